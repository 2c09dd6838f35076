#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "cptmdp/model.hpp"
#include "cptmdp/prospect.hpp"

namespace cptmdp {

/// Probability, from the initial state, of eventually entering each set.
/// Sets must be pairwise disjoint; only states that can reach their union are
/// solved for, the rest contribute 0.
std::vector<double> absorption_probabilities(const Model& m,
                                             const std::vector<std::vector<std::size_t>>& sets);

struct InducedProspect {
    Prospect prospect;
    std::map<double, std::vector<std::size_t>> per_outcome_states;
};

/// Distribution over outcomes of a Markov chain under weighted reachability.
InducedProspect induced_prospect(const Model& m, const WeightedReachObjective& obj);

double mc_cpt_value(const Model& m, const WeightedReachObjective& obj, const CptParams& params);

/// Rank-dependent formula over outcome tail probabilities P(Phi >= o),
/// P(Phi > o) and their loss counterparts, each obtained by a separate
/// reachability solve. Independent of induced_prospect.
double classical_cpt_value(const Model& m, const WeightedReachObjective& obj,
                           const CptParams& params);

}  // namespace cptmdp
