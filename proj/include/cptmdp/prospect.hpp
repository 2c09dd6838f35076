#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace cptmdp {

inline constexpr double kProbTol = 1e-9;
inline constexpr double kWeightClamp = 1e-12;

/// Finite distribution over monetary outcomes, outcomes strictly increasing.
struct Prospect {
    std::vector<double> outcomes;
    std::vector<double> probs;
    /// False for sub-distributions (optimizer internals, monotonicity tests).
    bool full = true;

    /// Sorts by outcome and merges equal outcomes. Throws ValidationError.
    static Prospect make(std::vector<double> outcomes, std::vector<double> probs);
    /// Same, but the probabilities need not sum to 1.
    static Prospect sub(std::vector<double> outcomes, std::vector<double> probs);

    std::size_t size() const { return outcomes.size(); }
};

enum class UtilityKind { TkPower, Identity, Piecewise };

struct UtilitySpec {
    UtilityKind kind = UtilityKind::Identity;
    double alpha = 1.0;
    double beta = 1.0;
    double lambda = 1.0;
    std::vector<std::pair<double, double>> points;

    static UtilitySpec tk_power(double alpha, double beta, double lambda);
    static UtilitySpec identity();
    /// Breakpoints sorted by x, through (0,0); extrapolated linearly.
    static UtilitySpec piecewise(std::vector<std::pair<double, double>> points);

    double operator()(double x) const;
};

enum class WeightKind { Tk, Identity, Piecewise };

struct WeightSpec {
    WeightKind kind = WeightKind::Identity;
    double exponent = 1.0;
    std::vector<std::pair<double, double>> points;

    /// Requires exponent > 0.279; below that the form is not monotone.
    static WeightSpec tk(double exponent);
    static WeightSpec identity();
    /// Breakpoints from (0,0) to (1,1), x strictly increasing, y nondecreasing.
    static WeightSpec piecewise(std::vector<std::pair<double, double>> points);

    double operator()(double p) const;
    /// Exact constant for identity and piecewise specs; nullopt for TK.
    std::optional<double> exact_lipschitz() const;
};

enum class LipSource { UserSupplied, Exact, GridEstimated };

/// Order in which loss mass is accumulated for loss decision weights.
/// WorstFirst: mass of strictly worse outcomes (rank-dependent definition).
/// ReferenceFirst: mass of outcomes between the loss and 0, zero included,
/// as in the single-pass accumulator over a descending sort.
enum class LossRanking { WorstFirst, ReferenceFirst };

struct CptParams {
    UtilitySpec utility;
    WeightSpec weight_gain;
    WeightSpec weight_loss;
    double lip_gain = 1.0;
    double lip_loss = 1.0;
    LipSource lip_source = LipSource::Exact;
    LossRanking loss_ranking = LossRanking::WorstFirst;

    /// Fills missing Lipschitz constants (exact where possible, else grid).
    static CptParams make(UtilitySpec utility, WeightSpec gain, WeightSpec loss,
                          std::optional<double> lip_gain = std::nullopt,
                          std::optional<double> lip_loss = std::nullopt,
                          LossRanking ranking = LossRanking::WorstFirst);
    /// alpha = beta = 0.88, lambda = 2.25, gamma = 0.61, delta = 0.69.
    static CptParams standard(LossRanking ranking = LossRanking::WorstFirst);
    /// Identity utility and weights.
    static CptParams identity();
    /// Same utility and ranking, identity weights (expected-utility mode).
    CptParams with_identity_weights() const;
};

inline constexpr std::size_t kLipschitzGridPoints = 100000;

double utility(const CptParams& params, double o);
/// Throws DomainError for p outside [0,1] by more than 1e-12.
double weight(const WeightSpec& spec, double p);

std::vector<double> decision_weights(const CptParams& params, const Prospect& x);
double cpt(const CptParams& params, const Prospect& x);
/// Literal single-pass accumulator over a descending sort. Equals cpt()
/// under LossRanking::ReferenceFirst.
double cpt_accumulator(const CptParams& params, const Prospect& x);
double eu(const CptParams& params, const Prospect& x);

double grid_estimate_weight_lipschitz(const WeightSpec& spec, std::size_t n_points);
/// u* * max(L_w+, L_w-) * (2k^2 + k).
double lipschitz_constant(const CptParams& params, const std::vector<double>& outcomes);

/// cpt(p) = sum_j coef_j * w_j(p[first_j] + ... + p[last_j]) for a fixed
/// outcome vector. Every coefficient multiplies an increasing function, so
/// sign(coef) gives the direction of monotonicity of each term.
struct CptTerm {
    double coef;
    bool gain;
    std::size_t first;
    std::size_t last;
};

std::vector<CptTerm> cpt_terms(const CptParams& params, const std::vector<double>& outcomes);
/// Evaluates a term decomposition at a (sub-)probability vector.
double eval_terms(const CptParams& params, const std::vector<CptTerm>& terms,
                  const std::vector<double>& probs);

}  // namespace cptmdp
