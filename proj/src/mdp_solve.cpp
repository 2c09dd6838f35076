#include <algorithm>

#include "cptmdp/errors.hpp"
#include "cptmdp/mdp_engine.hpp"

namespace cptmdp {

CptSolveResult mdp_cpt_value(const Model& m, const WeightedReachObjective& obj, const CptParams& params,
                             const SolveOptions& options) {
    if (!(options.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    m.validate();
    const CptParams active = options.mode == Mode::Eu ? params.with_identity_weights() : params;

    NormalizedProblem np = validate_objective(m, obj);
    QuotientResult q = make_stopping(np.model, np.objective);
    std::vector<std::vector<std::size_t>> query = build_mo_query(q);

    CptSolveResult result;
    result.outcomes = outcome_vector(q.objective);
    result.frontier = pareto_frontier(q, query, options.epsilon, &result.stats);
    result.lipschitz = lipschitz_constant(active, result.outcomes);
    result.lipschitz_estimated = active.lip_source == LipSource::GridEstimated;
    result.error_bound = options.epsilon * (1.0 + result.lipschitz);

    OptimizeOptions opt;
    opt.direction = options.direction;
    opt.branch_and_bound = options.branch_and_bound;
    OptimizeResult best = optimize_cpt_on_frontier(result.frontier, result.outcomes, active, options.epsilon,
                                                   result.lipschitz, opt, &result.stats);
    result.value = best.value;
    result.best_point = best.best_point;
    double total = 0.0;
    for (double p : result.best_point) total += p;
    std::vector<double> probs = result.best_point;
    for (double& p : probs) p /= total;
    result.best_prospect = Prospect::make(result.outcomes, probs);
    result.strategy = extract_strategy(q, query, result.best_point, &result.stats);
    return result;
}

}  // namespace cptmdp
