#include "cptmdp/mc_engine.hpp"

#include <algorithm>

#include "cptmdp/errors.hpp"
#include "cptmdp/graph.hpp"
#include "cptmdp/linalg.hpp"

namespace cptmdp {

namespace {

void require_mc(const Model& m) {
    if (m.kind != ModelKind::Mc) throw ValidationError("expected a Markov chain");
}

// Probability of reaching `goal` from the initial state.
double reach_probability(const Model& m, const std::vector<bool>& goal) {
    return absorption_probabilities(m, [&] {
        std::vector<std::vector<std::size_t>> sets(1);
        for (std::size_t s = 0; s < m.size(); ++s)
            if (goal[s]) sets[0].push_back(s);
        return sets;
    }()).front();
}

}  // namespace

std::vector<double> absorption_probabilities(const Model& m,
                                             const std::vector<std::vector<std::size_t>>& sets) {
    require_mc(m);
    const std::size_t n = m.size();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> set_of(n, none);
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t s : sets[i]) {
            if (s >= n) throw ValidationError("state index out of range");
            if (set_of[s] != none) throw ValidationError("absorbing sets must be disjoint");
            set_of[s] = i;
        }
    std::vector<double> out(sets.size(), 0.0);
    if (set_of[m.initial] != none) {
        out[set_of[m.initial]] = 1.0;
        return out;
    }
    std::vector<bool> goal(n);
    for (std::size_t s = 0; s < n; ++s) goal[s] = set_of[s] != none;
    std::vector<bool> reach = can_reach(m, goal);
    if (!reach[m.initial]) return out;

    std::vector<std::size_t> var(n, none), vars;
    for (std::size_t s = 0; s < n; ++s)
        if (reach[s] && !goal[s]) {
            var[s] = vars.size();
            vars.push_back(s);
        }
    const std::size_t v = vars.size();
    std::vector<double> a(v * v, 0.0);
    std::vector<std::vector<double>> rhs(sets.size(), std::vector<double>(v, 0.0));
    for (std::size_t r = 0; r < v; ++r) {
        a[r * v + r] = 1.0;
        for (const Successor& t : m.states[vars[r]].actions.front().succ) {
            if (var[t.state] != none) a[r * v + var[t.state]] -= t.prob;
            else if (set_of[t.state] != none) rhs[set_of[t.state]][r] += t.prob;
        }
    }
    LuFactor lu(v, std::move(a));
    for (std::size_t i = 0; i < sets.size(); ++i) {
        double p = lu.solve(rhs[i])[var[m.initial]];
        out[i] = std::clamp(p, 0.0, 1.0);
    }
    return out;
}

InducedProspect induced_prospect(const Model& m, const WeightedReachObjective& obj) {
    require_mc(m);
    NormalizedProblem np = validate_objective(m, obj);
    std::vector<double> outs = outcome_vector(np.objective);
    std::vector<std::vector<std::size_t>> sets;
    InducedProspect ip;
    for (double o : outs) {
        sets.push_back(obtainset(np.model, np.objective, o));
        ip.per_outcome_states[o] = sets.back();
    }
    std::vector<double> probs = absorption_probabilities(np.model, sets);
    double total = 0.0;
    for (double p : probs) total += p;
    if (std::abs(total - 1.0) > kProbTol) throw SolverError("induced prospect does not sum to 1");
    ip.prospect = Prospect::make(outs, probs);
    return ip;
}

double mc_cpt_value(const Model& m, const WeightedReachObjective& obj, const CptParams& params) {
    return cpt(params, induced_prospect(m, obj).prospect);
}

double classical_cpt_value(const Model& m, const WeightedReachObjective& obj,
                           const CptParams& params) {
    require_mc(m);
    NormalizedProblem np = validate_objective(m, obj);
    const Model& mc = np.model;
    std::vector<double> outs = outcome_vector(np.objective);
    std::vector<std::vector<std::size_t>> sets;
    for (double o : outs) sets.push_back(obtainset(mc, np.objective, o));

    // P(lo <= Phi <= hi) over outcome indices, via one reachability solve.
    auto mass = [&](std::size_t lo, std::size_t hi) {
        if (lo > hi) return 0.0;
        std::vector<bool> goal(mc.size(), false);
        for (std::size_t i = lo; i <= hi; ++i)
            for (std::size_t s : sets[i]) goal[s] = true;
        return reach_probability(mc, goal);
    };
    const std::size_t k = outs.size();
    const std::size_t zero_or_first_gain =
        std::lower_bound(outs.begin(), outs.end(), 0.0) - outs.begin();
    double value = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double u = utility(params, outs[i]);
        if (outs[i] > 0) {
            value += u * (weight(params.weight_gain, mass(i, k - 1)) -
                          weight(params.weight_gain, i + 1 < k ? mass(i + 1, k - 1) : 0.0));
        } else if (outs[i] < 0) {
            double with, without;
            if (params.loss_ranking == LossRanking::WorstFirst) {
                with = mass(0, i);
                without = i > 0 ? mass(0, i - 1) : 0.0;
            } else {
                // Losses weighted by the mass between them and 0, zero included.
                std::size_t top = zero_or_first_gain < k && outs[zero_or_first_gain] == 0.0
                                      ? zero_or_first_gain
                                      : zero_or_first_gain - 1;
                with = mass(i, top);
                without = i + 1 <= top ? mass(i + 1, top) : 0.0;
            }
            value += u * (weight(params.weight_loss, with) - weight(params.weight_loss, without));
        }
    }
    return value;
}

}  // namespace cptmdp
