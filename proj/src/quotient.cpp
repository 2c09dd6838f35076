#include <algorithm>
#include <map>
#include <set>

#include "cptmdp/errors.hpp"
#include "cptmdp/mdp_engine.hpp"

namespace cptmdp {

namespace {

std::string unique_name(std::string base, const std::set<std::string>& taken) {
    while (taken.count(base)) base += "'";
    return base;
}

std::vector<Successor> map_successors(const std::vector<Successor>& succ,
                                      const std::vector<std::size_t>& to_q) {
    std::map<std::size_t, std::pair<double, std::vector<std::string>>> acc;
    for (const Successor& t : succ) {
        auto& slot = acc[to_q[t.state]];
        slot.first += t.prob;
        slot.second.push_back(t.exact);
    }
    std::vector<Successor> out;
    for (auto& [state, slot] : acc) {
        // Exact text survives only when no merge happened.
        std::string exact = slot.second.size() == 1 ? slot.second.front() : std::string();
        out.push_back(Successor{state, slot.first, exact});
    }
    return out;
}

}  // namespace

QuotientResult collapse_mecs(const Model& m, const std::vector<Mec>& mecs, bool shared_sink) {
    const std::size_t n = m.size();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> mec_of(n, none);
    for (std::size_t i = 0; i < mecs.size(); ++i)
        for (std::size_t s : mecs[i].states) mec_of[s] = i;

    QuotientResult q;
    q.original = m;
    q.collapsed = mecs;
    q.original_to_quotient.assign(n, none);
    q.mec_rep.assign(mecs.size(), none);
    std::set<std::string> names;

    // Quotient states in original order; a MEC takes the slot of its smallest member.
    for (std::size_t s = 0; s < n; ++s) {
        if (mec_of[s] == none) {
            q.original_to_quotient[s] = q.back_map.size();
            q.back_map.push_back({s});
            names.insert(m.states[s].id);
            continue;
        }
        const Mec& mec = mecs[mec_of[s]];
        if (s != mec.states.front()) continue;
        std::size_t rep = q.back_map.size();
        q.mec_rep[mec_of[s]] = rep;
        for (std::size_t t : mec.states) q.original_to_quotient[t] = rep;
        q.back_map.push_back(mec.states);
    }
    for (std::size_t s = 0; s < n; ++s)
        if (mec_of[s] != none) q.original_to_quotient[s] = q.mec_rep[mec_of[s]];

    q.quotient.kind = ModelKind::Mdp;
    q.quotient.states.resize(q.back_map.size());
    q.action_map.resize(q.back_map.size());
    for (std::size_t qs = 0; qs < q.back_map.size(); ++qs) {
        const auto& members = q.back_map[qs];
        State& st = q.quotient.states[qs];
        if (members.size() == 1 && mec_of[members.front()] == none) {
            std::size_t s = members.front();
            st.id = m.states[s].id;
            for (std::size_t a = 0; a < m.states[s].actions.size(); ++a) {
                const Action& act = m.states[s].actions[a];
                st.actions.push_back(Action{act.id, map_successors(act.succ, q.original_to_quotient)});
                q.action_map[qs].push_back(ActionOrigin{false, s, a});
            }
            continue;
        }
        if (members.size() == 1) {
            st.id = m.states[members.front()].id;
        } else {
            std::string id = "mec(";
            for (std::size_t i = 0; i < members.size(); ++i)
                id += (i ? "," : "") + m.states[members[i]].id;
            st.id = unique_name(id + ")", names);
        }
        names.insert(st.id);
    }

    // Leaving actions of collapsed MECs; the sink and stay actions follow.
    std::set<std::string> quotient_names;
    for (const State& st : q.quotient.states) quotient_names.insert(st.id);
    q.stay_target.assign(mecs.size(), none);
    auto add_absorbing = [&](const std::string& base) {
        std::size_t idx = q.quotient.states.size();
        std::string id = unique_name(base, quotient_names);
        quotient_names.insert(id);
        q.quotient.states.push_back(State{id, {Action{"loop", {Successor{idx, 1.0, "1"}}}}});
        q.back_map.push_back({});
        q.action_map.push_back({ActionOrigin{true, 0, 0}});
        return idx;
    };
    if (shared_sink) {
        q.sink = add_absorbing("sink");
        q.quotient.sink = q.sink;
    }
    for (std::size_t i = 0; i < mecs.size(); ++i) {
        const Mec& mec = mecs[i];
        std::size_t rep = q.mec_rep[i];
        std::set<StateAction> inside(mec.actions.begin(), mec.actions.end());
        std::vector<Action> actions;
        std::set<std::string> action_names;
        const bool singleton = mec.states.size() == 1;
        for (std::size_t s : mec.states) {
            for (std::size_t a = 0; a < m.states[s].actions.size(); ++a) {
                if (inside.count({s, a})) continue;
                const Action& act = m.states[s].actions[a];
                std::string id = singleton ? act.id : m.states[s].id + ":" + act.id;
                id = unique_name(id, action_names);
                action_names.insert(id);
                actions.push_back(Action{id, map_successors(act.succ, q.original_to_quotient)});
                q.action_map[rep].push_back(ActionOrigin{false, s, a});
            }
        }
        std::size_t target = shared_sink ? q.sink
                                         : add_absorbing("f(" + q.quotient.states[rep].id + ")");
        q.stay_target[i] = target;
        actions.push_back(Action{unique_name("stay", action_names), {Successor{target, 1.0, "1"}}});
        q.action_map[rep].push_back(ActionOrigin{true, 0, 0});
        q.quotient.states[rep].actions = std::move(actions);
    }
    q.quotient.initial = q.original_to_quotient[m.initial];
    q.quotient.validate();
    return q;
}

QuotientResult make_stopping(const Model& m, const WeightedReachObjective& obj) {
    std::vector<bool> outside(m.size(), true);
    for (const auto& [s, r] : obj.targets) {
        if (!m.is_absorbing(s)) throw ValidationError("targets must be absorbing; normalize the objective first");
        outside[s] = false;
    }
    QuotientResult q = collapse_mecs(m, mecs(m, outside), true);
    q.objective.penalty = obj.penalty;
    for (const auto& [s, r] : obj.targets) q.objective.targets[q.original_to_quotient[s]] = r;

    std::vector<bool> rest(q.quotient.size(), true);
    rest[q.sink] = false;
    for (const auto& [s, r] : q.objective.targets) rest[s] = false;
    if (!mecs(q.quotient, rest).empty()) throw SolverError("MEC quotient is not stopping");
    return q;
}

std::vector<std::vector<std::size_t>> build_mo_query(const QuotientResult& q) {
    std::vector<std::vector<std::size_t>> sets;
    for (double o : outcome_vector(q.objective)) {
        if (o == q.objective.penalty) {
            sets.push_back({q.sink});
            continue;
        }
        std::vector<std::size_t> set;
        for (const auto& [s, r] : q.objective.targets)
            if (r == o) set.push_back(s);
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace cptmdp
