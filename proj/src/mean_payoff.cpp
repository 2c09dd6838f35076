#include "cptmdp/mean_payoff.hpp"

#include <algorithm>
#include <map>

#include "cptmdp/errors.hpp"
#include "cptmdp/linalg.hpp"
#include "cptmdp/mc_engine.hpp"

namespace cptmdp {

namespace {

void check_rewards(const Model& m, const MeanPayoffObjective& rewards) {
    if (rewards.rewards.size() != m.size()) throw ValidationError("mean-payoff rewards must cover every state");
}

// Maps each gain to the first earlier gain within the merge tolerance.
std::vector<double> snap(const std::vector<double>& gains) {
    std::vector<double> reps;
    std::vector<double> out;
    for (double g : gains) {
        auto it = std::find_if(reps.begin(), reps.end(), [&](double r) { return std::abs(r - g) <= kGainMergeTol; });
        if (it == reps.end()) {
            reps.push_back(g);
            out.push_back(g);
        } else {
            out.push_back(*it);
        }
    }
    return out;
}

}  // namespace

double bscc_mean_payoff(const Model& m, const MeanPayoffObjective& rewards, const Scc& c) {
    check_rewards(m, rewards);
    if (!c.is_bottom) throw ValidationError("mean payoff requested for a non-bottom SCC");
    const std::size_t n = c.states.size();
    std::map<std::size_t, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) pos[c.states[i]] = i;
    // Rows j < n-1: stationarity at state j; last row: normalization.
    LinearSystem sys{n, std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        const Action& a = m.states[c.states[i]].actions.front();
        for (const Successor& t : a.succ) {
            std::size_t j = pos.at(t.state);
            if (j + 1 < n) sys.matrix[j * n + i] += t.prob;
        }
        if (i + 1 < n) sys.matrix[i * n + i] -= 1.0;
        sys.matrix[(n - 1) * n + i] = 1.0;
    }
    sys.rhs[n - 1] = 1.0;
    std::vector<double> nu = solve_linear(sys);
    double gain = 0.0;
    for (std::size_t i = 0; i < n; ++i) gain += nu[i] * rewards.rewards[c.states[i]];
    return gain;
}

double mec_optimal_gain(const Model& m, const MeanPayoffObjective& rewards, const Mec& mec, Direction sense,
                        SolveStats* stats) {
    check_rewards(m, rewards);
    const double sign = sense == Direction::Max ? 1.0 : -1.0;
    std::map<std::size_t, std::size_t> row_of;
    for (std::size_t s : mec.states) row_of.emplace(s, row_of.size());
    const std::size_t nv = mec.actions.size();
    LinearProgram lp;
    lp.objective.assign(nv, 0.0);
    lp.rows.assign(mec.states.size(), LpRow{std::vector<double>(nv, 0.0), Relation::Eq, 0.0});
    LpRow total{std::vector<double>(nv, 1.0), Relation::Eq, 1.0};
    for (std::size_t v = 0; v < nv; ++v) {
        const auto& [s, a] = mec.actions[v];
        lp.objective[v] = sign * rewards.rewards[s];
        lp.rows[row_of.at(s)].a[v] += 1.0;
        for (const Successor& t : m.states[s].actions[a].succ) lp.rows[row_of.at(t.state)].a[v] -= t.prob;
    }
    lp.rows.push_back(std::move(total));
    if (stats) ++stats->lp_calls;
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) throw SolverError("MEC gain LP failed");
    return sign * res.value;
}

std::vector<MecGain> mec_gains(const Model& m, const MeanPayoffObjective& rewards, SolveStats* stats) {
    std::vector<MecGain> out;
    for (Mec& mec : mecs(m)) {
        MecGain g;
        g.gain_max = mec_optimal_gain(m, rewards, mec, Direction::Max, stats);
        g.gain_min = mec_optimal_gain(m, rewards, mec, Direction::Min, stats);
        g.mec = std::move(mec);
        out.push_back(std::move(g));
    }
    return out;
}

WeightedQuotient weighted_mec_quotient(const Model& m, const MeanPayoffObjective& rewards, Direction sense,
                                       SolveStats* stats) {
    m.validate();
    check_rewards(m, rewards);
    std::vector<Mec> all = mecs(m);
    std::vector<double> gains;
    for (const Mec& mec : all) gains.push_back(mec_optimal_gain(m, rewards, mec, sense, stats));
    gains = snap(gains);
    WeightedQuotient wq;
    wq.quotient = collapse_mecs(m, all, false);
    for (std::size_t i = 0; i < all.size(); ++i) wq.objective.targets[wq.quotient.stay_target[i]] = gains[i];
    wq.quotient.objective = wq.objective;
    return wq;
}

CptSolveResult mp_cpt_value(const Model& m, const MeanPayoffObjective& rewards, const CptParams& params,
                            const SolveOptions& options) {
    SolveStats gain_stats;
    WeightedQuotient wq = weighted_mec_quotient(m, rewards, options.direction, &gain_stats);
    CptSolveResult r = mdp_cpt_value(wq.quotient.quotient, wq.objective, params, options);
    r.stats.lp_calls += gain_stats.lp_calls;
    r.strategy.scope = StrategyScope::Quotient;
    std::string note = "strategy on the weighted MEC quotient";
    r.strategy.notes = r.strategy.notes.empty() ? note : note + "; " + r.strategy.notes;
    return r;
}

Prospect mc_mean_payoff_prospect(const Model& m, const MeanPayoffObjective& rewards) {
    if (m.kind != ModelKind::Mc) throw ValidationError("expected a Markov chain");
    check_rewards(m, rewards);
    std::vector<std::vector<std::size_t>> sets;
    std::vector<double> gains;
    for (const Scc& c : sccs(m)) {
        if (!c.is_bottom) continue;
        sets.push_back(c.states);
        gains.push_back(bscc_mean_payoff(m, rewards, c));
    }
    gains = snap(gains);
    std::vector<double> probs = absorption_probabilities(m, sets);
    return Prospect::make(gains, probs);
}

}  // namespace cptmdp
