#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>

#include "cptmdp/errors.hpp"
#include "cptmdp/mdp_engine.hpp"
#include "internal.hpp"

namespace cptmdp {

namespace {

using detail::Vec;

// Derivative of a weighting function and its range over subintervals.
class WeightSlope {
public:
    explicit WeightSlope(const WeightSpec& spec) : spec_(spec) {
        if (spec.kind != WeightKind::Tk || spec.exponent == 1.0) return;
        // w' of the TK form has a single interior extremum: a minimum for
        // exponents below 1, a maximum above. Verified on a grid.
        const bool find_min = spec.exponent < 1.0;
        constexpr int n = 2000;
        std::vector<double> vals(n + 1);
        for (int i = 1; i < n; ++i) vals[i] = at(static_cast<double>(i) / n);
        int arg = 1;
        for (int i = 1; i < n; ++i)
            if (find_min ? vals[i] < vals[arg] : vals[i] > vals[arg]) arg = i;
        unimodal_ = true;
        for (int i = 1; i + 1 < n; ++i) {
            double step = vals[i + 1] - vals[i];
            double slack = 1e-9 * (1.0 + std::abs(vals[i]));
            bool before = i < arg;
            if (find_min ? (before ? step > slack : step < -slack) : (before ? step < -slack : step > slack))
                unimodal_ = false;
        }
        double a = static_cast<double>(std::max(arg - 1, 1)) / n;
        double b = static_cast<double>(std::min(arg + 1, n - 1)) / n;
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 100; ++it) {
            double c = b - phi * (b - a), d = a + phi * (b - a);
            bool left = find_min ? at(c) < at(d) : at(c) > at(d);
            (left ? b : a) = left ? d : c;
        }
        extremum_ = 0.5 * (a + b);
    }

    double at(double x) const {
        switch (spec_.kind) {
            case WeightKind::Identity:
                return 1.0;
            case WeightKind::Piecewise: {
                const auto& pts = spec_.points;
                for (std::size_t i = 1; i < pts.size(); ++i)
                    if (x < pts[i].first || i + 1 == pts.size())
                        return (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
                return 0.0;
            }
            case WeightKind::Tk:
                break;
        }
        const double g = spec_.exponent;
        if (g == 1.0) return 1.0;
        if (x <= 0.0 || x >= 1.0) return g < 1.0 ? kInf : 0.0;
        const double xg = std::pow(x, g), yg = std::pow(1.0 - x, g);
        const double den = xg + yg;
        const double num = g * std::pow(x, g - 1.0) * den - xg * (std::pow(x, g - 1.0) - std::pow(1.0 - x, g - 1.0));
        return num * std::pow(den, -1.0 / g - 1.0);
    }

    // {min, max} of w' over [lo, hi]; max is infinite when unknown.
    std::pair<double, double> range(double lo, double hi) const {
        switch (spec_.kind) {
            case WeightKind::Identity:
                return {1.0, 1.0};
            case WeightKind::Piecewise: {
                const auto& pts = spec_.points;
                double mn = kInf, mx = -kInf;
                for (std::size_t i = 1; i < pts.size(); ++i) {
                    if (pts[i].first < lo || pts[i - 1].first > hi) continue;
                    double s = (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
                    mn = std::min(mn, s);
                    mx = std::max(mx, s);
                }
                return {mn, mx};
            }
            case WeightKind::Tk:
                break;
        }
        if (spec_.exponent == 1.0) return {1.0, 1.0};
        if (!unimodal_) return {0.0, kInf};
        double a = at(lo), b = at(hi);
        double mn = std::min(a, b), mx = std::max(a, b);
        if (lo < extremum_ && extremum_ < hi) {
            double e = at(extremum_);
            mn = std::min(mn, e);
            mx = std::max(mx, e);
        }
        return {mn, mx};
    }

private:
    WeightSpec spec_;
    bool unimodal_ = false;
    double extremum_ = 0.5;
};

struct Box {
    Vec lo, hi;
};

struct Node {
    double ub;
    std::size_t id;
    Box box;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.ub != b.ub) return a.ub < b.ub;
        return a.id > b.id;
    }
};

class Optimizer {
public:
    Optimizer(const ParetoApprox& frontier, const std::vector<double>& outcomes, const CptParams& params,
              double lipschitz, const OptimizeOptions& options, SolveStats* stats)
        : params_(params), lipschitz_(lipschitz), options_(options), stats_(stats),
          gain_slope_(params.weight_gain), loss_slope_(params.weight_loss) {
        const double sign = options.direction == Direction::Max ? 1.0 : -1.0;
        terms_ = cpt_terms(params, outcomes);
        for (CptTerm& t : terms_) t.coef *= sign;
        verts_ = frontier.extreme_points;
        k_ = outcomes.size();
        x0_ = verts_.front();
        for (std::size_t j = 1; j < verts_.size(); ++j)
            detail::extend_basis(basis_, detail::sub(verts_[j], x0_), 1e-10);
        d_ = basis_.size();
        for (const Vec& v : verts_) zverts_.push_back(local(v));
        for (const CptTerm& t : terms_) {
            double a = 0.0;
            Vec g(d_, 0.0);
            for (std::size_t m = t.first; m <= t.last; ++m) {
                a += x0_[m];
                for (std::size_t i = 0; i < d_; ++i) g[i] += basis_[i][m];
            }
            term_base_.push_back(a);
            term_grad_.push_back(std::move(g));
        }
    }

    std::size_t dim() const { return d_; }

    Vec local(const Vec& x) const {
        Vec z(d_);
        Vec diff = detail::sub(x, x0_);
        for (std::size_t i = 0; i < d_; ++i) z[i] = detail::dot(basis_[i], diff);
        return z;
    }

    Vec global(const Vec& z) const {
        Vec x = x0_;
        for (std::size_t i = 0; i < d_; ++i)
            for (std::size_t m = 0; m < k_; ++m) x[m] += z[i] * basis_[i][m];
        for (double& v : x) v = std::max(v, 0.0);
        return x;
    }

    double f(const Vec& x) const { return eval_terms(params_, terms_, x); }

    void consider(const Vec& x) {
        double v = f(x);
        if (!has_best_ || v > best_value_ || (v == best_value_ && x < best_point_)) {
            best_value_ = v;
            best_point_ = x;
            has_best_ = true;
        }
    }

    Box root_box() const {
        Box b{Vec(d_, kInf), Vec(d_, -kInf)};
        for (const Vec& z : zverts_)
            for (std::size_t i = 0; i < d_; ++i) {
                b.lo[i] = std::min(b.lo[i], z[i]);
                b.hi[i] = std::max(b.hi[i], z[i]);
            }
        return b;
    }

    // Rows constraining sum(lambda) = 1 and lo <= z(lambda) <= hi; the
    // lambda variables come first.
    LinearProgram hull_in_box(const Box& box, std::size_t extra_vars) const {
        const std::size_t m = zverts_.size();
        LinearProgram lp;
        lp.objective.assign(m + extra_vars, 0.0);
        LpRow sum{Vec(m + extra_vars, 0.0), Relation::Eq, 1.0};
        for (std::size_t j = 0; j < m; ++j) sum.a[j] = 1.0;
        lp.rows.push_back(std::move(sum));
        for (std::size_t i = 0; i < d_; ++i) {
            LpRow row{Vec(m + extra_vars, 0.0), Relation::Le, box.hi[i]};
            for (std::size_t j = 0; j < m; ++j) row.a[j] = zverts_[j][i];
            lp.rows.push_back(row);
            row.rel = Relation::Ge;
            row.b = box.lo[i];
            lp.rows.push_back(std::move(row));
        }
        return lp;
    }

    Vec z_of(const Vec& lambda) const {
        Vec z(d_, 0.0);
        for (std::size_t j = 0; j < zverts_.size(); ++j)
            for (std::size_t i = 0; i < d_; ++i) z[i] += lambda[j] * zverts_[j][i];
        return z;
    }

    // Point of the hull inside the box closest in L1 to the box centre.
    std::optional<Vec> representative(const Box& box) {
        const std::size_t m = zverts_.size();
        LinearProgram lp = hull_in_box(box, d_);
        for (std::size_t i = 0; i < d_; ++i) {
            lp.objective[m + i] = -1.0;
            const double c = 0.5 * (box.lo[i] + box.hi[i]);
            for (double sgn : {1.0, -1.0}) {
                LpRow row{Vec(m + d_, 0.0), Relation::Ge, -sgn * c};
                row.a[m + i] = 1.0;
                for (std::size_t j = 0; j < m; ++j) row.a[j] = -sgn * zverts_[j][i];
                lp.rows.push_back(std::move(row));
            }
        }
        count_lp();
        if (stats_) ++stats_->hypercubes_examined;
        LpResult res = solve_lp(lp);
        if (res.status != LpStatus::Optimal) return std::nullopt;
        res.x.resize(m);
        return z_of(res.x);
    }

    std::pair<double, double> term_range(std::size_t j, const Box& box) const {
        double lo = term_base_[j], hi = term_base_[j];
        for (std::size_t i = 0; i < d_; ++i) {
            double g = term_grad_[j][i];
            lo += g * (g > 0 ? box.lo[i] : box.hi[i]);
            hi += g * (g > 0 ? box.hi[i] : box.lo[i]);
        }
        return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
    }

    double term_at(std::size_t j, const Vec& z) const {
        return std::clamp(term_base_[j] + detail::dot(term_grad_[j], z), 0.0, 1.0);
    }

    double upper_bound(const Box& box, const Vec& rep) {
        const double f_rep = f(global(rep));
        double diag = 0.0;
        for (std::size_t i = 0; i < d_; ++i) diag += (box.hi[i] - box.lo[i]) * (box.hi[i] - box.lo[i]);
        double ub = f_rep + lipschitz_ * std::sqrt(diag);

        // Terms with an unbounded slope over the box keep their monotone bound;
        // the others are linearized at the representative.
        double monotone = 0.0;
        double linear_base = 0.0;
        Vec grad(d_, 0.0);
        double remainder = 0.0;
        bool any_linear = false;
        for (std::size_t j = 0; j < terms_.size(); ++j) {
            const CptTerm& t = terms_[j];
            const WeightSpec& w = t.gain ? params_.weight_gain : params_.weight_loss;
            const WeightSlope& slope = t.gain ? gain_slope_ : loss_slope_;
            auto [lo, hi] = term_range(j, box);
            const double mono = t.coef * w(t.coef > 0 ? hi : lo);
            monotone += mono;
            double s = term_at(j, rep);
            double ds = slope.at(s);
            auto [dmin, dmax] = slope.range(lo, hi);
            if (!std::isfinite(ds) || !std::isfinite(dmax)) {
                linear_base += mono;
                continue;
            }
            any_linear = true;
            linear_base += t.coef * w(s);
            for (std::size_t i = 0; i < d_; ++i) grad[i] += t.coef * ds * term_grad_[j][i];
            double omega = std::max(dmax - ds, ds - dmin);
            remainder += std::abs(t.coef) * omega * std::max(hi - s, s - lo);
        }
        ub = std::min(ub, monotone);
        if (any_linear && ub > best_value_ + prune_eps_) {
            const std::size_t m = zverts_.size();
            LinearProgram lp = hull_in_box(box, 0);
            for (std::size_t j = 0; j < m; ++j) lp.objective[j] = detail::dot(grad, zverts_[j]);
            count_lp();
            LpResult res = solve_lp(lp);
            if (res.status == LpStatus::Optimal) {
                consider(global(z_of(res.x)));
                ub = std::min(ub, linear_base + res.value - detail::dot(grad, rep) + remainder);
            }
        }
        return ub;
    }

    void branch_and_bound(double eps) {
        prune_eps_ = eps;
        std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
        std::size_t next_id = 0;
        auto push = [&](Box box) {
            auto rep = representative(box);
            if (!rep) return;
            consider(global(*rep));
            double ub = upper_bound(box, *rep);
            if (ub > best_value_ + eps) queue.push(Node{ub, next_id++, std::move(box)});
        };
        push(root_box());
        std::size_t boxes = 0;
        while (!queue.empty()) {
            Node node = queue.top();
            queue.pop();
            if (node.ub <= best_value_ + eps) break;
            if (++boxes > options_.box_budget) throw SolverError("branch-and-bound box budget exhausted");
            std::size_t axis = 0;
            for (std::size_t i = 1; i < d_; ++i)
                if (node.box.hi[i] - node.box.lo[i] > node.box.hi[axis] - node.box.lo[axis]) axis = i;
            double width = node.box.hi[axis] - node.box.lo[axis];
            if (width < 1e-13) continue;
            double mid = node.box.lo[axis] + 0.5 * width;
            Box left = node.box, right = node.box;
            left.hi[axis] = mid;
            right.lo[axis] = mid;
            push(std::move(left));
            push(std::move(right));
        }
    }

    void grid(double eps) {
        const double side = eps / (lipschitz_ * std::sqrt(static_cast<double>(k_)));
        Box root = root_box();
        std::vector<std::size_t> counts(d_);
        double total = 1.0;
        for (std::size_t i = 0; i < d_; ++i) {
            counts[i] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((root.hi[i] - root.lo[i]) / side)));
            total *= static_cast<double>(counts[i]);
        }
        if (total > static_cast<double>(options_.grid_budget))
            throw SolverError("grid of side " + std::to_string(side) + " needs " + std::to_string(total) +
                              " cells, over the budget");
        std::vector<std::size_t> idx(d_, 0);
        while (true) {
            Box cell{Vec(d_), Vec(d_)};
            for (std::size_t i = 0; i < d_; ++i) {
                double step = (root.hi[i] - root.lo[i]) / static_cast<double>(counts[i]);
                cell.lo[i] = root.lo[i] + step * static_cast<double>(idx[i]);
                cell.hi[i] = idx[i] + 1 == counts[i] ? root.hi[i] : cell.lo[i] + step;
            }
            if (auto rep = representative(cell)) consider(global(*rep));
            std::size_t i = 0;
            while (i < d_ && ++idx[i] == counts[i]) idx[i++] = 0;
            if (i == d_) break;
        }
    }

    OptimizeResult run(double eps) {
        for (const Vec& v : verts_) consider(v);
        if (d_ > 0) {
            if (options_.branch_and_bound) branch_and_bound(eps);
            else grid(eps);
        }
        const double sign = options_.direction == Direction::Max ? 1.0 : -1.0;
        return OptimizeResult{best_point_, sign * best_value_};
    }

private:
    void count_lp() {
        if (stats_) ++stats_->lp_calls;
    }

    const CptParams& params_;
    double lipschitz_;
    OptimizeOptions options_;
    SolveStats* stats_;
    WeightSlope gain_slope_, loss_slope_;
    std::vector<CptTerm> terms_;
    std::vector<Vec> verts_, zverts_, basis_;
    Vec x0_;
    std::size_t k_ = 0, d_ = 0;
    std::vector<double> term_base_;
    std::vector<Vec> term_grad_;
    double prune_eps_ = 0.0;
    bool has_best_ = false;
    double best_value_ = -kInf;
    Vec best_point_;
};

}  // namespace

OptimizeResult optimize_cpt_on_frontier(const ParetoApprox& frontier, const std::vector<double>& outcomes,
                                        const CptParams& params, double eps_opt, double lipschitz,
                                        const OptimizeOptions& options, SolveStats* stats) {
    if (frontier.extreme_points.empty()) throw ValidationError("frontier is empty");
    if (!(eps_opt > 0.0)) throw ValidationError("epsilon must be positive");
    for (const auto& p : frontier.extreme_points)
        if (p.size() != outcomes.size()) throw ValidationError("frontier dimension differs from outcome count");
    Optimizer opt(frontier, outcomes, params, lipschitz, options, stats);
    return opt.run(eps_opt);
}

}  // namespace cptmdp
