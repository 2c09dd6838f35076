#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cptmdp/model.hpp"

namespace cptmdp {

struct Scc {
    std::vector<std::size_t> states;  // sorted
    bool is_bottom = false;
};

/// (state index, action index)
using StateAction = std::pair<std::size_t, std::size_t>;

struct Mec {
    std::vector<std::size_t> states;    // sorted
    std::vector<StateAction> actions;   // sorted
};

/// SCC partition ordered by smallest member.
std::vector<Scc> sccs(const Model& m);

/// Maximal end components inside `restrict_to` (all states when empty),
/// ordered by smallest member.
std::vector<Mec> mecs(const Model& m, const std::vector<bool>& restrict_to = {});

/// Closure and strong connectivity of (states, actions) via those actions only.
bool is_end_component(const Model& m, const std::vector<std::size_t>& states,
                      const std::vector<StateAction>& actions);

/// States that obtain outcome `o`. For the penalty outcome: BSCCs disjoint
/// from the targets on an MC, {z} on a stopping quotient, empty on an MDP
/// without non-target end components. Throws ValidationError otherwise.
std::vector<std::size_t> obtainset(const Model& m, const WeightedReachObjective& obj, double o);

/// States from which some state in `goal` is reachable in the underlying graph.
std::vector<bool> can_reach(const Model& m, const std::vector<bool>& goal);

}  // namespace cptmdp
