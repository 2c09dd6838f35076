#pragma once

#include <string>
#include <string_view>

#include "cptmdp/mdp_engine.hpp"
#include "cptmdp/model.hpp"
#include "cptmdp/prospect.hpp"

namespace cptmdp {

/// Parses a parameter document; absent fields take the standard values.
/// Throws ParseError or ValidationError.
CptParams parse_params(std::string_view text);
CptParams load_params(const std::string& path);
std::string serialize_params(const CptParams& params);

std::string strategy_json(const Strategy& sigma);
std::string frontier_json(const ParetoApprox& frontier, const std::vector<double>& outcomes);

struct ResultContext {
    Mode mode = Mode::Cpt;
    Direction direction = Direction::Max;
    double epsilon = 0.01;
    std::string objective_kind = "weighted-reachability";
};

std::string result_json(const CptSolveResult& result, const ResultContext& context);

/// CSV of frontier vertices. For two objectives the rows trace the
/// frontier by increasing first coordinate; otherwise the extreme points
/// are listed after a comment line.
/// Frontier with coordinate `index` removed; duplicate points merged.
ParetoApprox drop_coordinate(const ParetoApprox& frontier, std::size_t index);
std::string frontier_plot_csv(const ParetoApprox& frontier);
void emit_frontier_plot_data(const ParetoApprox& frontier, const std::string& path);

/// Writes text to a file; throws Error on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace cptmdp
