#include "cptmdp/prospect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cptmdp/errors.hpp"

namespace cptmdp {

namespace {

Prospect normalize(std::vector<double> outcomes, std::vector<double> probs, bool full) {
    if (outcomes.empty()) throw ValidationError("prospect needs at least one outcome");
    if (outcomes.size() != probs.size())
        throw ValidationError("prospect outcome and probability vectors differ in length");
    std::vector<std::size_t> order(outcomes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return outcomes[a] < outcomes[b]; });
    Prospect x;
    x.full = full;
    for (std::size_t i : order) {
        double o = outcomes[i];
        double p = probs[i];
        if (!std::isfinite(o)) throw ValidationError("prospect outcome is not finite");
        if (!(p >= -kWeightClamp && p <= 1.0 + kWeightClamp))
            throw ValidationError("prospect probability outside [0,1]");
        p = std::clamp(p, 0.0, 1.0);
        if (!x.outcomes.empty() && x.outcomes.back() == o) {
            x.probs.back() += p;
        } else {
            x.outcomes.push_back(o);
            x.probs.push_back(p);
        }
    }
    double total = std::accumulate(x.probs.begin(), x.probs.end(), 0.0);
    if (full && std::abs(total - 1.0) > kProbTol) {
        std::ostringstream msg;
        msg << "prospect probabilities sum to " << total << ", expected 1";
        throw ValidationError(msg.str());
    }
    if (!full && total > 1.0 + kProbTol * static_cast<double>(x.size()))
        throw ValidationError("sub-distribution has mass above 1");
    return x;
}

double interpolate(const std::vector<std::pair<double, double>>& pts, double x) {
    auto it = std::upper_bound(pts.begin(), pts.end(), x,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    std::size_t hi = static_cast<std::size_t>(it - pts.begin());
    if (hi == 0) hi = 1;
    if (hi >= pts.size()) hi = pts.size() - 1;
    const auto& [x0, y0] = pts[hi - 1];
    const auto& [x1, y1] = pts[hi];
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

double clamp_unit(double s) { return std::clamp(s, 0.0, 1.0); }

}  // namespace

Prospect Prospect::make(std::vector<double> outcomes, std::vector<double> probs) {
    return normalize(std::move(outcomes), std::move(probs), true);
}

Prospect Prospect::sub(std::vector<double> outcomes, std::vector<double> probs) {
    return normalize(std::move(outcomes), std::move(probs), false);
}

UtilitySpec UtilitySpec::tk_power(double alpha, double beta, double lambda) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("utility alpha must lie in (0,1]");
    if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("utility beta must lie in (0,1]");
    if (!(lambda >= 1.0)) throw ValidationError("utility lambda must be at least 1");
    UtilitySpec u;
    u.kind = UtilityKind::TkPower;
    u.alpha = alpha;
    u.beta = beta;
    u.lambda = lambda;
    return u;
}

UtilitySpec UtilitySpec::identity() { return UtilitySpec{}; }

UtilitySpec UtilitySpec::piecewise(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2) throw ValidationError("piecewise utility needs at least two points");
    bool through_origin = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
            throw ValidationError("piecewise utility point is not finite");
        if (i > 0 && !(points[i].first > points[i - 1].first))
            throw ValidationError("piecewise utility breakpoints must be strictly increasing in x");
        if (i > 0 && !(points[i].second > points[i - 1].second))
            throw ValidationError("piecewise utility must be strictly increasing");
        if (points[i].first == 0.0 && points[i].second == 0.0) through_origin = true;
    }
    if (!through_origin) throw ValidationError("piecewise utility must pass through (0,0)");
    UtilitySpec u;
    u.kind = UtilityKind::Piecewise;
    u.points = std::move(points);
    return u;
}

double UtilitySpec::operator()(double x) const {
    switch (kind) {
        case UtilityKind::Identity:
            return x;
        case UtilityKind::TkPower:
            if (x >= 0.0) return std::pow(x, alpha);
            return -lambda * std::pow(-x, beta);
        case UtilityKind::Piecewise:
            return interpolate(points, x);
    }
    return x;
}

WeightSpec WeightSpec::tk(double exponent) {
    if (!(exponent > 0.279) || !std::isfinite(exponent))
        throw ValidationError("TK weight exponent must exceed 0.279 (non-monotone below)");
    WeightSpec w;
    w.kind = WeightKind::Tk;
    w.exponent = exponent;
    return w;
}

WeightSpec WeightSpec::identity() { return WeightSpec{}; }

WeightSpec WeightSpec::piecewise(std::vector<std::pair<double, double>> points) {
    if (points.size() < 2) throw ValidationError("piecewise weight needs at least two points");
    if (points.front() != std::pair<double, double>{0.0, 0.0} ||
        points.back() != std::pair<double, double>{1.0, 1.0})
        throw ValidationError("piecewise weight must start at (0,0) and end at (1,1)");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].first > points[i - 1].first))
            throw ValidationError("piecewise weight breakpoints must be strictly increasing in x");
        if (!(points[i].second >= points[i - 1].second))
            throw ValidationError("piecewise weight must be nondecreasing");
        if (points[i].second < 0.0 || points[i].second > 1.0)
            throw ValidationError("piecewise weight leaves the unit square");
    }
    WeightSpec w;
    w.kind = WeightKind::Piecewise;
    w.points = std::move(points);
    return w;
}

double WeightSpec::operator()(double p) const {
    if (p <= kWeightClamp) return 0.0;
    if (p >= 1.0) return 1.0;
    switch (kind) {
        case WeightKind::Identity:
            return p;
        case WeightKind::Tk: {
            double a = std::pow(p, exponent);
            double b = std::pow(1.0 - p, exponent);
            return std::min(1.0, a / std::pow(a + b, 1.0 / exponent));
        }
        case WeightKind::Piecewise:
            return interpolate(points, p);
    }
    return p;
}

std::optional<double> WeightSpec::exact_lipschitz() const {
    switch (kind) {
        case WeightKind::Identity:
            return 1.0;
        case WeightKind::Piecewise: {
            double best = 0.0;
            for (std::size_t i = 1; i < points.size(); ++i)
                best = std::max(best, (points[i].second - points[i - 1].second) /
                                          (points[i].first - points[i - 1].first));
            return best;
        }
        case WeightKind::Tk:
            return std::nullopt;
    }
    return std::nullopt;
}

CptParams CptParams::make(UtilitySpec utility, WeightSpec gain, WeightSpec loss,
                          std::optional<double> lip_gain, std::optional<double> lip_loss,
                          LossRanking ranking) {
    CptParams p;
    p.utility = std::move(utility);
    p.weight_gain = std::move(gain);
    p.weight_loss = std::move(loss);
    p.loss_ranking = ranking;
    bool estimated = false;
    auto fill = [&](const WeightSpec& w, std::optional<double> given) {
        if (given) {
            if (!(*given >= 0.0) || !std::isfinite(*given))
                throw ValidationError("Lipschitz constants must be finite and nonnegative");
            return *given;
        }
        if (auto exact = w.exact_lipschitz()) return *exact;
        estimated = true;
        return grid_estimate_weight_lipschitz(w, kLipschitzGridPoints);
    };
    p.lip_gain = fill(p.weight_gain, lip_gain);
    p.lip_loss = fill(p.weight_loss, lip_loss);
    if (lip_gain && lip_loss)
        p.lip_source = LipSource::UserSupplied;
    else
        p.lip_source = estimated ? LipSource::GridEstimated : LipSource::Exact;
    return p;
}

CptParams CptParams::standard(LossRanking ranking) {
    return make(UtilitySpec::tk_power(0.88, 0.88, 2.25), WeightSpec::tk(0.61), WeightSpec::tk(0.69),
                std::nullopt, std::nullopt, ranking);
}

CptParams CptParams::identity() {
    return make(UtilitySpec::identity(), WeightSpec::identity(), WeightSpec::identity());
}

CptParams CptParams::with_identity_weights() const {
    return make(utility, WeightSpec::identity(), WeightSpec::identity(), std::nullopt, std::nullopt,
                loss_ranking);
}

double utility(const CptParams& params, double o) { return params.utility(o); }

double weight(const WeightSpec& spec, double p) {
    if (!(p >= -kWeightClamp && p <= 1.0 + kWeightClamp))
        throw DomainError("weight argument outside [0,1]");
    return spec(p);
}

std::vector<double> decision_weights(const CptParams& params, const Prospect& x) {
    const std::size_t k = x.size();
    std::vector<double> pi(k, 0.0);
    // Gains: mass of strictly better outcomes.
    double cp = 0.0;
    for (std::size_t i = k; i-- > 0 && x.outcomes[i] > 0.0;) {
        double next = clamp_unit(cp + x.probs[i]);
        pi[i] = params.weight_gain(next) - params.weight_gain(cp);
        cp = next;
    }
    if (params.loss_ranking == LossRanking::WorstFirst) {
        double cm = 0.0;
        for (std::size_t i = 0; i < k && x.outcomes[i] < 0.0; ++i) {
            double next = clamp_unit(cm + x.probs[i]);
            pi[i] = params.weight_loss(next) - params.weight_loss(cm);
            cm = next;
        }
    } else {
        double cm = 0.0;
        for (std::size_t i = k; i-- > 0;) {
            if (x.outcomes[i] > 0.0) continue;
            double next = clamp_unit(cm + x.probs[i]);
            if (x.outcomes[i] < 0.0) pi[i] = params.weight_loss(next) - params.weight_loss(cm);
            cm = next;
        }
    }
    return pi;
}

double cpt(const CptParams& params, const Prospect& x) {
    std::vector<double> pi = decision_weights(params, x);
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (pi[i] != 0.0) total += params.utility(x.outcomes[i]) * pi[i];
    return total;
}

double cpt_accumulator(const CptParams& params, const Prospect& x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x.outcomes[a] > x.outcomes[b]; });
    double value = 0.0;
    double cp = 0.0;
    double cm = 0.0;
    for (std::size_t i : order) {
        double o = x.outcomes[i];
        double p = x.probs[i];
        if (o > 0.0) {
            double next = clamp_unit(cp + p);
            value += params.utility(o) * (params.weight_gain(next) - params.weight_gain(cp));
            cp = next;
        } else {
            double next = clamp_unit(cm + p);
            value += params.utility(o) * (params.weight_loss(next) - params.weight_loss(cm));
            cm = next;
        }
    }
    return value;
}

double eu(const CptParams& params, const Prospect& x) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += params.utility(x.outcomes[i]) * x.probs[i];
    return total;
}

double grid_estimate_weight_lipschitz(const WeightSpec& spec, std::size_t n_points) {
    if (n_points < 2) throw ValidationError("grid needs at least two points");
    const double step = 1.0 / static_cast<double>(n_points - 1);
    double best = 0.0;
    double prev = spec(0.0);
    for (std::size_t i = 1; i < n_points; ++i) {
        double xi = i + 1 == n_points ? 1.0 : static_cast<double>(i) * step;
        double xp = static_cast<double>(i - 1) * step;
        double cur = spec(xi);
        best = std::max(best, std::abs(cur - prev) / (xi - xp));
        prev = cur;
    }
    return best;
}

double lipschitz_constant(const CptParams& params, const std::vector<double>& outcomes) {
    if (outcomes.empty()) throw ValidationError("outcome vector is empty");
    double ustar = 0.0;
    for (double o : outcomes) ustar = std::max(ustar, std::abs(params.utility(o)));
    const double k = static_cast<double>(outcomes.size());
    return ustar * std::max(params.lip_gain, params.lip_loss) * (2.0 * k * k + k);
}

std::vector<CptTerm> cpt_terms(const CptParams& params, const std::vector<double>& outcomes) {
    const std::size_t k = outcomes.size();
    std::vector<CptTerm> terms;
    std::size_t first_gain = k;
    while (first_gain > 0 && outcomes[first_gain - 1] > 0.0) --first_gain;
    double prev = 0.0;
    for (std::size_t i = first_gain; i < k; ++i) {
        double u = params.utility(outcomes[i]);
        terms.push_back({u - prev, true, i, k - 1});
        prev = u;
    }
    std::size_t n_loss = 0;
    while (n_loss < k && outcomes[n_loss] < 0.0) ++n_loss;
    if (n_loss == 0) return terms;
    if (params.loss_ranking == LossRanking::WorstFirst) {
        for (std::size_t i = 0; i < n_loss; ++i) {
            double u = params.utility(outcomes[i]);
            double next = i + 1 < n_loss ? params.utility(outcomes[i + 1]) : 0.0;
            terms.push_back({u - next, false, 0, i});
        }
    } else {
        bool has_zero = n_loss < k && outcomes[n_loss] == 0.0;
        std::size_t top = has_zero ? n_loss : n_loss - 1;
        double below = 0.0;
        for (std::size_t i = 0; i < n_loss; ++i) {
            double u = params.utility(outcomes[i]);
            terms.push_back({u - below, false, i, top});
            below = u;
        }
        if (has_zero) terms.push_back({-below, false, n_loss, n_loss});
    }
    return terms;
}

double eval_terms(const CptParams& params, const std::vector<CptTerm>& terms,
                  const std::vector<double>& probs) {
    double total = 0.0;
    for (const CptTerm& t : terms) {
        double s = 0.0;
        for (std::size_t m = t.first; m <= t.last; ++m) s += probs[m];
        s = clamp_unit(s);
        total += t.coef * (t.gain ? params.weight_gain(s) : params.weight_loss(s));
    }
    return total;
}

}  // namespace cptmdp
