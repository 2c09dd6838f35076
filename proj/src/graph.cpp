#include "cptmdp/graph.hpp"

#include <algorithm>
#include <functional>

#include "cptmdp/errors.hpp"

namespace cptmdp {

namespace {

using Adjacency = std::vector<std::vector<std::size_t>>;

// Iterative Tarjan over the vertices with alive[v]; returns components with
// sorted members, ordered by smallest member.
std::vector<std::vector<std::size_t>> tarjan(const Adjacency& adj, const std::vector<bool>& alive) {
    const std::size_t n = adj.size();
    const std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unset), low(n, 0), edge_pos(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack, call;
    std::vector<std::vector<std::size_t>> comps;
    std::size_t counter = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (!alive[root] || index[root] != unset) continue;
        call.push_back(root);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            std::size_t v = call.back();
            if (edge_pos[v] < adj[v].size()) {
                std::size_t w = adj[v][edge_pos[v]++];
                if (!alive[w]) continue;
                if (index[w] == unset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back(w);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            call.pop_back();
            if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

Adjacency full_graph(const Model& m) {
    Adjacency adj(m.size());
    for (std::size_t s = 0; s < m.size(); ++s) {
        for (const Action& a : m.states[s].actions)
            for (const Successor& t : a.succ)
                if (t.prob > 0.0) adj[s].push_back(t.state);
        std::sort(adj[s].begin(), adj[s].end());
        adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
    }
    return adj;
}

}  // namespace

std::vector<Scc> sccs(const Model& m) {
    Adjacency adj = full_graph(m);
    std::vector<Scc> out;
    std::vector<std::size_t> comp_of(m.size());
    auto comps = tarjan(adj, std::vector<bool>(m.size(), true));
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t s : comps[c]) comp_of[s] = c;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        bool bottom = true;
        for (std::size_t s : comps[c])
            for (std::size_t t : adj[s])
                if (comp_of[t] != c) bottom = false;
        out.push_back(Scc{std::move(comps[c]), bottom});
    }
    return out;
}

std::vector<Mec> mecs(const Model& m, const std::vector<bool>& restrict_to) {
    const std::size_t n = m.size();
    std::vector<bool> alive = restrict_to.empty() ? std::vector<bool>(n, true) : restrict_to;
    std::vector<std::vector<bool>> enabled(n);
    for (std::size_t s = 0; s < n; ++s) enabled[s].assign(m.states[s].actions.size(), alive[s]);

    auto stays_inside = [&](std::size_t s, std::size_t a, const std::vector<std::size_t>* comp_of,
                            std::size_t c) {
        for (const Successor& t : m.states[s].actions[a].succ) {
            if (t.prob <= 0.0) continue;
            if (!alive[t.state]) return false;
            if (comp_of && (*comp_of)[t.state] != c) return false;
        }
        return true;
    };

    std::vector<std::size_t> comp_of(n, 0);
    std::vector<std::vector<std::size_t>> comps;
    bool changed = true;
    while (changed) {
        changed = false;
        // Drop actions leaving the live set and states left without actions.
        bool pruned = true;
        while (pruned) {
            pruned = false;
            for (std::size_t s = 0; s < n; ++s) {
                if (!alive[s]) continue;
                bool any = false;
                for (std::size_t a = 0; a < enabled[s].size(); ++a) {
                    if (enabled[s][a] && !stays_inside(s, a, nullptr, 0)) enabled[s][a] = false;
                    any = any || enabled[s][a];
                }
                if (!any) {
                    alive[s] = false;
                    pruned = true;
                }
            }
        }
        Adjacency adj(n);
        for (std::size_t s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            for (std::size_t a = 0; a < enabled[s].size(); ++a)
                if (enabled[s][a])
                    for (const Successor& t : m.states[s].actions[a].succ)
                        if (t.prob > 0.0) adj[s].push_back(t.state);
        }
        comps = tarjan(adj, alive);
        for (std::size_t c = 0; c < comps.size(); ++c)
            for (std::size_t s : comps[c]) comp_of[s] = c;
        for (std::size_t s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            for (std::size_t a = 0; a < enabled[s].size(); ++a) {
                if (enabled[s][a] && !stays_inside(s, a, &comp_of, comp_of[s])) {
                    enabled[s][a] = false;
                    changed = true;
                }
            }
        }
    }
    std::vector<Mec> out;
    for (const auto& comp : comps) {
        Mec mec;
        mec.states = comp;
        for (std::size_t s : comp)
            for (std::size_t a = 0; a < enabled[s].size(); ++a)
                if (enabled[s][a]) mec.actions.emplace_back(s, a);
        if (!mec.actions.empty()) out.push_back(std::move(mec));
    }
    return out;
}

bool is_end_component(const Model& m, const std::vector<std::size_t>& states,
                      const std::vector<StateAction>& actions) {
    if (states.empty()) return false;
    std::vector<bool> in(m.size(), false);
    for (std::size_t s : states) in[s] = true;
    std::vector<bool> has_action(m.size(), false);
    Adjacency adj(m.size());
    for (const auto& [s, a] : actions) {
        if (!in[s]) return false;
        has_action[s] = true;
        for (const Successor& t : m.states[s].actions[a].succ) {
            if (t.prob <= 0.0) continue;
            if (!in[t.state]) return false;
            adj[s].push_back(t.state);
        }
    }
    for (std::size_t s : states)
        if (!has_action[s]) return false;
    return tarjan(adj, in).size() == 1;
}

std::vector<bool> can_reach(const Model& m, const std::vector<bool>& goal) {
    Adjacency rev(m.size());
    for (std::size_t s = 0; s < m.size(); ++s)
        for (const Action& a : m.states[s].actions)
            for (const Successor& t : a.succ)
                if (t.prob > 0.0) rev[t.state].push_back(s);
    std::vector<bool> seen = goal;
    std::vector<std::size_t> queue;
    for (std::size_t s = 0; s < m.size(); ++s)
        if (goal[s]) queue.push_back(s);
    while (!queue.empty()) {
        std::size_t v = queue.back();
        queue.pop_back();
        for (std::size_t u : rev[v])
            if (!seen[u]) {
                seen[u] = true;
                queue.push_back(u);
            }
    }
    return seen;
}

std::vector<std::size_t> obtainset(const Model& m, const WeightedReachObjective& obj, double o) {
    std::vector<double> outcomes = outcome_vector(obj);
    if (std::find(outcomes.begin(), outcomes.end(), o) == outcomes.end())
        throw ValidationError("outcome is not among the objective's outcomes");
    std::vector<std::size_t> out;
    if (o != obj.penalty) {
        for (const auto& [s, r] : obj.targets)
            if (r == o) out.push_back(s);
        return out;
    }
    std::vector<bool> target(m.size(), false);
    for (const auto& [s, r] : obj.targets) target[s] = true;
    if (m.kind == ModelKind::Mc) {
        for (const Scc& c : sccs(m)) {
            if (!c.is_bottom) continue;
            bool disjoint = std::none_of(c.states.begin(), c.states.end(), [&](std::size_t s) { return target[s]; });
            if (disjoint) out.insert(out.end(), c.states.begin(), c.states.end());
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    if (m.sink) return {*m.sink};
    std::vector<bool> outside(m.size(), true);
    for (std::size_t s = 0; s < m.size(); ++s) outside[s] = !target[s];
    if (!mecs(m, outside).empty())
        throw ValidationError("penalty obtainset is strategy-dependent on a non-stopping MDP");
    return out;
}

}  // namespace cptmdp
