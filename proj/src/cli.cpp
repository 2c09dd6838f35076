#include "cptmdp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cptmdp/errors.hpp"
#include "cptmdp/io.hpp"
#include "cptmdp/mdp_engine.hpp"
#include "cptmdp/mean_payoff.hpp"
#include "cptmdp/model.hpp"

namespace cptmdp {

namespace {

struct SolveConfig {
    std::string model_path;
    std::string params_path;
    double epsilon = 0.01;
    std::string mode = "cpt";
    std::string direction = "max";
    bool no_bnb = false;
    std::string out_path;
    std::string frontier_path;
    std::string strategy_path;
    std::string plot_path;
};

int solve(const SolveConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    ParsedModel pm = load_model(cfg.model_path);
    SolveOptions options;
    options.epsilon = cfg.epsilon;
    options.mode = cfg.mode == "eu" ? Mode::Eu : Mode::Cpt;
    options.direction = cfg.direction == "min" ? Direction::Min : Direction::Max;
    options.branch_and_bound = !cfg.no_bnb;

    CptParams params;
    if (!cfg.params_path.empty())
        params = load_params(cfg.params_path);
    else if (options.mode == Mode::Eu)
        params = CptParams::identity();
    else
        params = CptParams::standard();

    ResultContext ctx{options.mode, options.direction, options.epsilon, "weighted-reachability"};
    CptSolveResult result;
    double penalty = 0.0;
    if (const auto* wr = std::get_if<WeightedReachObjective>(&pm.objective)) {
        penalty = wr->penalty;
        result = mdp_cpt_value(pm.model, *wr, params, options);
    } else {
        ctx.objective_kind = "mean-payoff";
        result = mp_cpt_value(pm.model, std::get<MeanPayoffObjective>(pm.objective), params, options);
    }

    const std::string doc = result_json(result, ctx);
    if (cfg.out_path.empty())
        out << doc;
    else
        write_text(cfg.out_path, doc);
    if (!cfg.frontier_path.empty()) write_text(cfg.frontier_path, frontier_json(result.frontier, result.outcomes));
    if (!cfg.strategy_path.empty()) write_text(cfg.strategy_path, strategy_json(result.strategy));
    if (!cfg.plot_path.empty()) {
        // The penalty coordinate is one minus the others; plot the rest.
        auto it = std::find(result.outcomes.begin(), result.outcomes.end(), penalty);
        ParetoApprox shown = result.frontier;
        if (it != result.outcomes.end() && result.outcomes.size() > 1)
            shown = drop_coordinate(result.frontier, static_cast<std::size_t>(it - result.outcomes.begin()));
        emit_frontier_plot_data(shown, cfg.plot_path);
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "wall_time: " << secs << " s\n";
    if (result.lipschitz_estimated) err << "note: Lipschitz constant is grid-estimated\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"CPT-value solver for Markov chains and MDPs"};
    app.require_subcommand(1);
    SolveConfig cfg;
    CLI::App* sub = app.add_subcommand("solve", "Compute the CPT or EU value of a model");
    sub->add_option("--model", cfg.model_path, "Model JSON file")->required();
    sub->add_option("--params", cfg.params_path, "CPT parameter JSON file");
    sub->add_option("--epsilon", cfg.epsilon, "Approximation precision")->check(CLI::PositiveNumber);
    sub->add_option("--mode", cfg.mode, "cpt or eu")->check(CLI::IsMember({"cpt", "eu"}));
    sub->add_option("--direction", cfg.direction, "max or min")->check(CLI::IsMember({"max", "min"}));
    sub->add_flag("--no-bnb", cfg.no_bnb, "Exhaustive grid instead of branch-and-bound");
    sub->add_option("--out", cfg.out_path, "Result JSON file (default: standard output)");
    sub->add_option("--frontier-out", cfg.frontier_path, "Frontier JSON file");
    sub->add_option("--strategy-out", cfg.strategy_path, "Strategy JSON file");
    sub->add_option("--plot-out", cfg.plot_path, "Frontier plot CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    try {
        return solve(cfg, out, err);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}

}  // namespace cptmdp
