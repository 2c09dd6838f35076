#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cptmdp/graph.hpp"
#include "cptmdp/linalg.hpp"
#include "cptmdp/model.hpp"
#include "cptmdp/prospect.hpp"

namespace cptmdp {

/// Counters shared by the stages of one solve.
struct SolveStats {
    std::size_t lp_calls = 0;
    std::size_t hypercubes_examined = 0;
};

/// Quotient action provenance: an original (state, action) or a stay action.
struct ActionOrigin {
    bool stay = false;
    std::size_t state = 0;
    std::size_t action = 0;
};

struct QuotientResult {
    Model original;
    Model quotient;
    WeightedReachObjective objective;
    /// Original states represented by each quotient state; empty for added states.
    std::vector<std::vector<std::size_t>> back_map;
    /// Indexed [quotient state][quotient action].
    std::vector<std::vector<ActionOrigin>> action_map;
    std::vector<Mec> collapsed;
    /// Quotient state of each collapsed MEC.
    std::vector<std::size_t> mec_rep;
    /// Destination of the stay action of each collapsed MEC.
    std::vector<std::size_t> stay_target;
    std::vector<std::size_t> original_to_quotient;
    std::size_t sink = 0;
};

/// Collapses `mecs` into one state each, keeping their leaving actions and
/// adding a stay action. With a shared sink every stay leads to one added
/// absorbing state; otherwise each MEC gets its own absorbing state.
QuotientResult collapse_mecs(const Model& m, const std::vector<Mec>& mecs, bool shared_sink);

/// Collapses every non-target MEC and adds the sink z. Expects a normalized
/// objective (absorbing targets). Throws SolverError if the result is not
/// stopping.
QuotientResult make_stopping(const Model& m, const WeightedReachObjective& obj);

/// One target set per outcome, in outcome order; the penalty outcome maps to {z}.
std::vector<std::vector<std::size_t>> build_mo_query(const QuotientResult& q);

/// Occupation measures y over (state, action) pairs of the states outside
/// F and z. Variable order: states ascending, then actions.
class OccupationLp {
public:
    OccupationLp(const Model& quotient, const std::vector<bool>& absorbing);

    std::size_t num_vars() const { return vars_.size(); }
    const std::vector<StateAction>& vars() const { return vars_; }
    /// Flow-conservation rows with unit inflow at the initial state.
    const std::vector<LpRow>& flow_rows() const { return flow_; }
    /// Coefficients of P[reach set] as a linear function of y.
    std::vector<double> reach_row(const std::vector<std::size_t>& set) const;
    /// Reach probabilities of each set under y (unit vector if the initial
    /// state is itself absorbing).
    std::vector<double> reach(const std::vector<std::vector<std::size_t>>& sets,
                              const std::vector<double>& y) const;
    bool initial_absorbing() const { return initial_absorbing_; }

private:
    const Model* model_;
    std::vector<bool> absorbing_;
    std::vector<StateAction> vars_;
    std::vector<LpRow> flow_;
    bool initial_absorbing_ = false;
};

struct Achievability {
    bool achievable = false;
    std::vector<double> witness;
};

/// Whether some memoryless strategy reaches each query set with at least
/// the given probability. Query sets must consist of targets or the sink.
Achievability achievable_point(const QuotientResult& q,
                               const std::vector<std::vector<std::size_t>>& query,
                               const std::vector<double>& point, SolveStats* stats = nullptr);

struct ParetoApprox {
    /// Lexicographically sorted, one coordinate per query set.
    std::vector<std::vector<double>> extreme_points;
    std::vector<std::vector<double>> witnesses;
    double epsilon_pareto = 0.0;
};

/// Sandwich approximation: refines inner-hull facets until every facet is
/// within eps of its supporting hyperplane.
ParetoApprox pareto_frontier(const QuotientResult& q,
                             const std::vector<std::vector<std::size_t>>& query, double eps,
                             SolveStats* stats = nullptr);

enum class Direction { Max, Min };

struct OptimizeOptions {
    Direction direction = Direction::Max;
    bool branch_and_bound = true;
    std::size_t box_budget = 2000000;
    std::size_t grid_budget = 1000000;
};

struct OptimizeResult {
    std::vector<double> best_point;
    double value = 0.0;
};

/// Optimizes cpt over the convex hull of the frontier points to within
/// eps_opt. `lipschitz` is the constant used for the Lipschitz bound and
/// for the grid side of the exhaustive mode.
OptimizeResult optimize_cpt_on_frontier(const ParetoApprox& frontier,
                                        const std::vector<double>& outcomes,
                                        const CptParams& params, double eps_opt,
                                        double lipschitz, const OptimizeOptions& options = {},
                                        SolveStats* stats = nullptr);

/// Memoryless strategy reaching best_point, mapped back to the original
/// model when every collapsed MEC is stayed in with probability 0 or 1.
/// Throws InfeasiblePoint if best_point is not achievable.
Strategy extract_strategy(const QuotientResult& q,
                          const std::vector<std::vector<std::size_t>>& query,
                          const std::vector<double>& best_point, SolveStats* stats = nullptr);

/// Markov chain induced by a memoryless strategy keyed by ids of m. States
/// without a choice play their first action.
Model induced_mc(const Model& m, const Strategy& sigma);

/// CPT value of the chain induced by an original-scope strategy.
double verify_strategy(const Model& m, const WeightedReachObjective& obj, const Strategy& sigma,
                       const CptParams& params);

enum class Mode { Cpt, Eu };

struct SolveOptions {
    double epsilon = 0.01;
    Mode mode = Mode::Cpt;
    Direction direction = Direction::Max;
    bool branch_and_bound = true;
};

struct CptSolveResult {
    double value = 0.0;
    double error_bound = 0.0;
    std::vector<double> best_point;
    Prospect best_prospect;
    Strategy strategy;
    ParetoApprox frontier;
    std::vector<double> outcomes;
    double lipschitz = 0.0;
    bool lipschitz_estimated = false;
    SolveStats stats;
};

CptSolveResult mdp_cpt_value(const Model& m, const WeightedReachObjective& obj,
                             const CptParams& params, const SolveOptions& options = {});

}  // namespace cptmdp
