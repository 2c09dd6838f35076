#pragma once

#include <vector>

#include "cptmdp/graph.hpp"
#include "cptmdp/mdp_engine.hpp"
#include "cptmdp/model.hpp"

namespace cptmdp {

/// Gains closer than this are treated as one outcome.
inline constexpr double kGainMergeTol = 1e-9;

struct MecGain {
    Mec mec;
    double gain_max = 0.0;
    double gain_min = 0.0;
};

/// Long-run average reward of a BSCC of a Markov chain.
double bscc_mean_payoff(const Model& m, const MeanPayoffObjective& rewards, const Scc& c);

/// Optimal long-run average reward while confined to the MEC.
double mec_optimal_gain(const Model& m, const MeanPayoffObjective& rewards, const Mec& mec, Direction sense,
                        SolveStats* stats = nullptr);

std::vector<MecGain> mec_gains(const Model& m, const MeanPayoffObjective& rewards, SolveStats* stats = nullptr);

struct WeightedQuotient {
    QuotientResult quotient;
    /// Targets are the per-MEC absorbing states, rewarded with the MEC gain.
    WeightedReachObjective objective;
};

/// Every MEC collapsed; its stay action leads to a fresh absorbing target
/// whose reward is the MEC's optimal gain for `sense`.
WeightedQuotient weighted_mec_quotient(const Model& m, const MeanPayoffObjective& rewards, Direction sense,
                                       SolveStats* stats = nullptr);

CptSolveResult mp_cpt_value(const Model& m, const MeanPayoffObjective& rewards, const CptParams& params,
                            const SolveOptions& options = {});

/// Distribution of the mean payoff of a Markov chain: BSCC gains weighted
/// by the probability of reaching each BSCC.
Prospect mc_mean_payoff_prospect(const Model& m, const MeanPayoffObjective& rewards);

}  // namespace cptmdp
