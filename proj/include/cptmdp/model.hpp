#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cptmdp {

enum class ModelKind { Mc, Mdp };

struct Successor {
    std::size_t state;
    double prob;
    /// Normalized "num/den" text when the input gave an exact rational.
    std::string exact;
};

struct Action {
    std::string id;
    /// Sorted by state index, no duplicates.
    std::vector<Successor> succ;
};

struct State {
    std::string id;
    std::vector<Action> actions;
};

/// Finite MC or MDP. Actions are addressed by (state index, action index),
/// which makes them globally unique regardless of their ids.
struct Model {
    ModelKind kind = ModelKind::Mdp;
    std::vector<State> states;
    std::size_t initial = 0;
    /// Sink z of a stopping quotient; unset for user models.
    std::optional<std::size_t> sink;

    std::size_t size() const { return states.size(); }
    std::optional<std::size_t> find(std::string_view id) const;
    /// Throws ValidationError on unknown ids.
    std::size_t index_of(std::string_view id) const;
    /// True if every action is a self-loop with probability 1.
    bool is_absorbing(std::size_t s) const;
    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
};

struct WeightedReachObjective {
    std::map<std::size_t, double> targets;
    double penalty = 0.0;
};

struct MeanPayoffObjective {
    /// One reward per state.
    std::vector<double> rewards;
};

using Objective = std::variant<WeightedReachObjective, MeanPayoffObjective>;

enum class StrategyScope { Original, Quotient };

struct StateChoice {
    std::string state;
    std::vector<std::pair<std::string, double>> dist;
};

/// Memoryless randomized strategy keyed by ids of the model it refers to.
struct Strategy {
    StrategyScope scope = StrategyScope::Original;
    std::vector<StateChoice> choices;
    std::string notes;
};

struct ParsedModel {
    Model model;
    Objective objective;
};

/// Parses and validates a model document. Throws ParseError or ValidationError.
ParsedModel parse_model(std::string_view text);
ParsedModel load_model(const std::string& path);
std::string serialize_model(const Model& m, const Objective& obj);

struct NormalizedProblem {
    Model model;
    WeightedReachObjective objective;
};

/// Makes every target absorbing (single self-loop action) and drops targets
/// whose reward equals the penalty. Idempotent.
NormalizedProblem validate_objective(const Model& m, const WeightedReachObjective& obj);

/// Sorted distinct target rewards plus the penalty outcome.
std::vector<double> outcome_vector(const WeightedReachObjective& obj);

}  // namespace cptmdp
