#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cptmdp/errors.hpp"
#include "cptmdp/io.hpp"
#include "cptmdp/mc_engine.hpp"
#include "cptmdp/mdp_engine.hpp"
#include "cptmdp/mean_payoff.hpp"
#include "cptmdp/model.hpp"
#include "cptmdp/prospect.hpp"

namespace py = pybind11;
using namespace cptmdp;

namespace {

CptParams params_from(const std::optional<std::string>& text) {
    return text ? parse_params(*text) : CptParams::standard();
}

std::string solve(const std::string& model, const std::optional<std::string>& params, double epsilon,
                  const std::string& mode, const std::string& direction, bool bnb) {
    ParsedModel pm = parse_model(model);
    SolveOptions opts;
    opts.epsilon = epsilon;
    opts.mode = mode == "eu" ? Mode::Eu : Mode::Cpt;
    opts.direction = direction == "min" ? Direction::Min : Direction::Max;
    opts.branch_and_bound = bnb;
    if (mode != "cpt" && mode != "eu") throw ValidationError("mode must be \"cpt\" or \"eu\"");
    if (direction != "max" && direction != "min") throw ValidationError("direction must be \"max\" or \"min\"");
    CptParams p = params ? parse_params(*params) : opts.mode == Mode::Eu ? CptParams::identity() : CptParams::standard();
    ResultContext ctx{opts.mode, opts.direction, epsilon, "weighted-reachability"};
    if (const auto* wr = std::get_if<WeightedReachObjective>(&pm.objective))
        return result_json(mdp_cpt_value(pm.model, *wr, p, opts), ctx);
    ctx.objective_kind = "mean-payoff";
    return result_json(mp_cpt_value(pm.model, std::get<MeanPayoffObjective>(pm.objective), p, opts), ctx);
}

py::tuple chain_prospect(const std::string& model) {
    ParsedModel pm = parse_model(model);
    Prospect x;
    if (const auto* wr = std::get_if<WeightedReachObjective>(&pm.objective))
        x = induced_prospect(pm.model, *wr).prospect;
    else
        x = mc_mean_payoff_prospect(pm.model, std::get<MeanPayoffObjective>(pm.objective));
    return py::make_tuple(x.outcomes, x.probs);
}

std::vector<std::vector<double>> frontier(const std::string& model, double epsilon) {
    ParsedModel pm = parse_model(model);
    const auto* wr = std::get_if<WeightedReachObjective>(&pm.objective);
    if (!wr) throw ValidationError("frontier needs a weighted-reachability objective");
    NormalizedProblem np = validate_objective(pm.model, *wr);
    QuotientResult q = make_stopping(np.model, np.objective);
    return pareto_frontier(q, build_mo_query(q), epsilon).extreme_points;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "CPT-value solver for Markov chains and MDPs";
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def(
        "cpt",
        [](std::vector<double> outcomes, std::vector<double> probs, std::optional<std::string> params) {
            return cpt(params_from(params), Prospect::make(std::move(outcomes), std::move(probs)));
        },
        py::arg("outcomes"), py::arg("probs"), py::arg("params") = py::none());
    m.def(
        "eu",
        [](std::vector<double> outcomes, std::vector<double> probs, std::optional<std::string> params) {
            CptParams p = params ? parse_params(*params) : CptParams::identity();
            return eu(p, Prospect::make(std::move(outcomes), std::move(probs)));
        },
        py::arg("outcomes"), py::arg("probs"), py::arg("params") = py::none());
    m.def(
        "lipschitz_constant",
        [](std::vector<double> outcomes, std::optional<std::string> params) {
            return lipschitz_constant(params_from(params), outcomes);
        },
        py::arg("outcomes"), py::arg("params") = py::none());
    m.def("solve", &solve, py::arg("model"), py::arg("params") = py::none(), py::arg("epsilon") = 0.01,
          py::arg("mode") = "cpt", py::arg("direction") = "max", py::arg("bnb") = true);
    m.def("chain_prospect", &chain_prospect, py::arg("model"));
    m.def("frontier", &frontier, py::arg("model"), py::arg("epsilon") = 1e-6);
}
