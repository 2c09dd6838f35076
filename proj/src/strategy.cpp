#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "cptmdp/errors.hpp"
#include "cptmdp/mc_engine.hpp"
#include "cptmdp/mdp_engine.hpp"
#include "internal.hpp"

namespace cptmdp {

namespace {

constexpr double kFlowTol = 1e-12;
constexpr double kStayTol = 1e-9;

using Dist = std::vector<std::pair<std::size_t, double>>;

// Normalized positive part of a flow vector; empty when there is no flow.
Dist normalize_flow(const std::vector<double>& flow) {
    double total = 0.0;
    for (double f : flow) total += std::max(f, 0.0);
    Dist out;
    if (total <= kFlowTol) return out;
    double kept = 0.0;
    for (std::size_t a = 0; a < flow.size(); ++a)
        if (flow[a] > kFlowTol * total) kept += flow[a];
    for (std::size_t a = 0; a < flow.size(); ++a)
        if (flow[a] > kFlowTol * total) out.emplace_back(a, flow[a] / kept);
    return out;
}

StateChoice choice(const State& st, const Dist& dist) {
    StateChoice c{st.id, {}};
    for (const auto& [a, p] : dist) c.dist.emplace_back(st.actions[a].id, p);
    return c;
}

std::string format_prob(double p) {
    std::ostringstream os;
    os.precision(12);
    os << p;
    return os.str();
}

// Occupation measure over the quotient reaching at least `point`.
std::vector<double> quotient_flow(const QuotientResult& q, const OccupationLp& occ,
                                  const std::vector<std::vector<std::size_t>>& query,
                                  const std::vector<double>& point, SolveStats* stats) {
    for (double slack : {0.0, 1e-9, 1e-7}) {
        LinearProgram lp;
        lp.objective.assign(occ.num_vars(), -1.0);
        lp.rows = occ.flow_rows();
        for (std::size_t i = 0; i < query.size(); ++i)
            lp.rows.push_back(LpRow{occ.reach_row(query[i]), Relation::Ge, point[i] - slack});
        if (stats) ++stats->lp_calls;
        LpResult res = solve_lp(lp);
        if (res.status == LpStatus::Optimal) return res.x;
    }
    (void)q;
    throw InfeasiblePoint("point is not achievable by any memoryless strategy");
}

// Flow inside a collapsed MEC that enters as the quotient says and leaves
// through each leaving action with its quotient flow.
std::optional<std::vector<std::vector<double>>> mec_flow(const QuotientResult& q, std::size_t mec_index,
                                                         const OccupationLp& occ,
                                                         const std::vector<double>& y, SolveStats* stats) {
    const Model& m = q.original;
    const Mec& mec = q.collapsed[mec_index];
    const std::size_t rep = q.mec_rep[mec_index];
    std::map<std::size_t, std::size_t> row_of;
    for (std::size_t s : mec.states) row_of.emplace(s, row_of.size());
    std::vector<StateAction> vars;
    for (std::size_t s : mec.states)
        for (std::size_t a = 0; a < m.states[s].actions.size(); ++a) vars.emplace_back(s, a);

    std::vector<double> inflow(mec.states.size(), 0.0);
    if (row_of.count(m.initial)) inflow[row_of[m.initial]] += 1.0;
    std::map<StateAction, double> fixed;
    for (std::size_t v = 0; v < occ.num_vars(); ++v) {
        const auto& [u, b] = occ.vars()[v];
        const ActionOrigin& origin = q.action_map[u][b];
        if (origin.stay) continue;
        if (u == rep) {
            fixed[{origin.state, origin.action}] = y[v];
            continue;
        }
        for (const Successor& t : m.states[origin.state].actions[origin.action].succ) {
            auto it = row_of.find(t.state);
            if (it != row_of.end()) inflow[it->second] += y[v] * t.prob;
        }
    }

    LinearProgram lp;
    lp.objective.assign(vars.size(), -1.0);
    lp.rows.assign(mec.states.size(), LpRow{std::vector<double>(vars.size(), 0.0), Relation::Eq, 0.0});
    for (std::size_t r = 0; r < inflow.size(); ++r) lp.rows[r].b = inflow[r];
    lp.lower.assign(vars.size(), 0.0);
    lp.upper.assign(vars.size(), kInf);
    std::set<StateAction> inside(mec.actions.begin(), mec.actions.end());
    for (std::size_t v = 0; v < vars.size(); ++v) {
        const auto& [s, a] = vars[v];
        lp.rows[row_of[s]].a[v] += 1.0;
        for (const Successor& t : m.states[s].actions[a].succ) {
            auto it = row_of.find(t.state);
            if (it != row_of.end()) lp.rows[it->second].a[v] -= t.prob;
        }
        if (!inside.count(vars[v])) {
            double f = std::max(0.0, fixed.count(vars[v]) ? fixed[vars[v]] : 0.0);
            lp.lower[v] = lp.upper[v] = f;
        }
    }
    if (stats) ++stats->lp_calls;
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return std::nullopt;
    std::vector<std::vector<double>> per_state(mec.states.size());
    for (std::size_t v = 0; v < vars.size(); ++v) {
        const auto& [s, a] = vars[v];
        auto& row = per_state[row_of[s]];
        row.resize(m.states[s].actions.size(), 0.0);
        row[a] = res.x[v];
    }
    return per_state;
}

Dist uniform_inside(const Mec& mec, std::size_t s) {
    Dist out;
    for (const auto& [t, a] : mec.actions)
        if (t == s) out.emplace_back(a, 0.0);
    for (auto& e : out) e.second = 1.0 / static_cast<double>(out.size());
    return out;
}

}  // namespace

Strategy extract_strategy(const QuotientResult& q, const std::vector<std::vector<std::size_t>>& query,
                          const std::vector<double>& best_point, SolveStats* stats) {
    if (best_point.size() != query.size()) throw ValidationError("point dimension differs from query size");
    std::vector<bool> absorbing = detail::absorbing_mask(q);
    OccupationLp occ(q.quotient, absorbing);
    Strategy sigma;
    if (occ.initial_absorbing()) return sigma;
    std::vector<double> y = quotient_flow(q, occ, query, best_point, stats);

    const std::size_t nq = q.quotient.size();
    std::vector<std::vector<double>> flow(nq);
    for (std::size_t v = 0; v < occ.num_vars(); ++v) {
        const auto& [s, a] = occ.vars()[v];
        flow[s].resize(q.quotient.states[s].actions.size(), 0.0);
        flow[s][a] = y[v];
    }
    std::vector<Dist> qdist(nq);
    for (std::size_t s = 0; s < nq; ++s) {
        if (absorbing[s]) continue;
        qdist[s] = normalize_flow(flow[s]);
        if (qdist[s].empty()) qdist[s] = {{0, 1.0}};
    }

    std::vector<double> stay(q.collapsed.size(), 0.0);
    std::vector<bool> reached(q.collapsed.size(), false);
    bool partial = false;
    std::string notes;
    for (std::size_t i = 0; i < q.collapsed.size(); ++i) {
        std::size_t rep = q.mec_rep[i];
        std::size_t stay_action = q.quotient.states[rep].actions.size() - 1;
        reached[i] = !normalize_flow(flow[rep]).empty();
        for (const auto& [a, p] : qdist[rep])
            if (a == stay_action) stay[i] = p;
        if (reached[i] && stay[i] > kStayTol && stay[i] < 1.0 - kStayTol) {
            partial = true;
            notes += (notes.empty() ? "" : "; ") + std::string("stay probability at ") +
                     q.quotient.states[rep].id + " = " + format_prob(stay[i]);
        }
    }

    auto quotient_scope = [&](std::string why) {
        Strategy out;
        out.scope = StrategyScope::Quotient;
        for (std::size_t s = 0; s < nq; ++s)
            if (!absorbing[s]) out.choices.push_back(choice(q.quotient.states[s], qdist[s]));
        out.notes = std::move(why);
        return out;
    };
    if (partial) return quotient_scope("partial stay is not realizable by a memoryless strategy inside the MEC: " + notes);

    const Model& m = q.original;
    std::vector<Dist> odist(m.size());
    std::vector<bool> decided(m.size(), false);
    for (std::size_t i = 0; i < q.collapsed.size(); ++i) {
        const Mec& mec = q.collapsed[i];
        if (!reached[i] || stay[i] >= 1.0 - kStayTol) {
            for (std::size_t s : mec.states) {
                odist[s] = uniform_inside(mec, s);
                decided[s] = true;
            }
            continue;
        }
        auto inner = mec_flow(q, i, occ, y, stats);
        if (!inner) return quotient_scope("leaving flow of " + q.quotient.states[q.mec_rep[i]].id +
                                          " could not be distributed inside the MEC");
        for (std::size_t r = 0; r < mec.states.size(); ++r) {
            std::size_t s = mec.states[r];
            odist[s] = normalize_flow((*inner)[r]);
            if (odist[s].empty()) odist[s] = uniform_inside(mec, s);
            decided[s] = true;
        }
    }
    for (std::size_t s = 0; s < m.size(); ++s) {
        if (decided[s]) continue;
        std::size_t qs = q.original_to_quotient[s];
        if (absorbing[qs]) continue;
        odist[s] = qdist[qs];
        decided[s] = true;
    }
    for (std::size_t s = 0; s < m.size(); ++s)
        if (decided[s]) sigma.choices.push_back(choice(m.states[s], odist[s]));
    return sigma;
}

Model induced_mc(const Model& m, const Strategy& sigma) {
    std::map<std::string, const StateChoice*> by_state;
    for (const StateChoice& c : sigma.choices) by_state[c.state] = &c;
    Model mc;
    mc.kind = ModelKind::Mc;
    mc.initial = m.initial;
    mc.sink = m.sink;
    for (std::size_t s = 0; s < m.size(); ++s) {
        const State& st = m.states[s];
        std::map<std::size_t, double> succ;
        auto it = by_state.find(st.id);
        if (it == by_state.end()) {
            for (const Successor& t : st.actions.front().succ) succ[t.state] += t.prob;
        } else {
            double total = 0.0;
            for (const auto& [aid, p] : it->second->dist) {
                auto act = std::find_if(st.actions.begin(), st.actions.end(),
                                        [&](const Action& a) { return a.id == aid; });
                if (act == st.actions.end())
                    throw ValidationError("strategy uses unknown action '" + aid + "' at state '" + st.id + "'");
                if (p < 0.0) throw ValidationError("negative strategy probability at state '" + st.id + "'");
                total += p;
                for (const Successor& t : act->succ) succ[t.state] += p * t.prob;
            }
            if (std::abs(total - 1.0) > kProbTol)
                throw ValidationError("strategy distribution at state '" + st.id + "' does not sum to 1");
        }
        Action a{"sigma", {}};
        for (const auto& [t, p] : succ) a.succ.push_back(Successor{t, p, ""});
        mc.states.push_back(State{st.id, {std::move(a)}});
    }
    return mc;
}

double verify_strategy(const Model& m, const WeightedReachObjective& obj, const Strategy& sigma,
                       const CptParams& params) {
    if (sigma.scope != StrategyScope::Original)
        throw ValidationError("strategy scope mismatch: expected an original-scope strategy");
    return mc_cpt_value(induced_mc(m, sigma), obj, params);
}

}  // namespace cptmdp
