#include <algorithm>
#include <numeric>

#include "cptmdp/errors.hpp"
#include "cptmdp/mdp_engine.hpp"
#include "internal.hpp"

namespace cptmdp {

namespace detail {

bool in_convex_hull(const std::vector<Vec>& pts, const Vec& p, SolveStats* stats) {
    if (pts.empty()) return false;
    const std::size_t dim = p.size();
    LinearProgram lp;
    lp.objective.assign(pts.size(), 0.0);
    for (std::size_t c = 0; c < dim; ++c) {
        LpRow row{Vec(pts.size()), Relation::Eq, p[c]};
        for (std::size_t j = 0; j < pts.size(); ++j) row.a[j] = pts[j][c];
        lp.rows.push_back(std::move(row));
    }
    lp.rows.push_back(LpRow{Vec(pts.size(), 1.0), Relation::Eq, 1.0});
    if (stats) ++stats->lp_calls;
    return solve_lp(lp).status == LpStatus::Optimal;
}

}  // namespace detail

namespace {

using detail::Vec;

constexpr double kHullTol = 1e-8;
constexpr double kSameTol = 1e-10;

struct Facet {
    Vec normal;  // unit, local coordinates
    double offset;
};

bool same_facet(const Facet& a, const Facet& b) {
    if (std::abs(a.offset - b.offset) > 1e-7) return false;
    for (std::size_t i = 0; i < a.normal.size(); ++i)
        if (std::abs(a.normal[i] - b.normal[i]) > 1e-7) return false;
    return true;
}

// Supporting hyperplanes through d affinely independent points of a
// full-dimensional point set in R^d.
std::vector<Facet> enumerate_facets(const std::vector<Vec>& z, std::size_t d) {
    std::vector<Facet> facets;
    const std::size_t m = z.size();
    if (d == 1) {
        double lo = z[0][0], hi = z[0][0];
        for (const Vec& p : z) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        facets.push_back({{1.0}, hi});
        facets.push_back({{-1.0}, -lo});
        return facets;
    }
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        std::vector<Vec> basis;
        bool independent = true;
        for (std::size_t j = 1; j < d && independent; ++j)
            independent = detail::extend_basis(basis, detail::sub(z[idx[j]], z[idx[0]]), 1e-9);
        if (independent) {
            Vec normal;
            double best = -1.0;
            for (std::size_t l = 0; l < d; ++l) {
                std::vector<Vec> trial = basis;
                Vec e(d, 0.0);
                e[l] = 1.0;
                if (detail::extend_basis(trial, e, 1e-9) && best < 0.0) {
                    normal = trial.back();
                    best = 1.0;
                }
            }
            if (best > 0.0) {
                double h = detail::dot(normal, z[idx[0]]);
                bool below = true, above = true;
                for (const Vec& p : z) {
                    double v = detail::dot(normal, p) - h;
                    below = below && v <= kHullTol;
                    above = above && v >= -kHullTol;
                }
                if (below || above) {
                    Facet f{normal, h};
                    if (!below) {
                        for (double& x : f.normal) x = -x;
                        f.offset = -h;
                    }
                    bool dup = std::any_of(facets.begin(), facets.end(),
                                           [&](const Facet& g) { return same_facet(f, g); });
                    if (!dup) facets.push_back(std::move(f));
                }
            }
        }
        // Next d-combination of m.
        std::size_t i = d;
        while (i > 0 && idx[i - 1] == m - d + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    return facets;
}

class Sandwich {
public:
    Sandwich(const QuotientResult& q, std::vector<std::vector<std::size_t>> sets, SolveStats* stats)
        : occ_(q.quotient, detail::absorbing_mask(q)), sets_(std::move(sets)), stats_(stats) {
        for (const auto& s : sets_) rows_.push_back(occ_.reach_row(s));
    }

    bool trivial() const { return occ_.initial_absorbing(); }
    Vec trivial_point() const { return occ_.reach(sets_, {}); }

    // Adds the maximizer of dir . reach; returns its index.
    std::size_t maximize(const Vec& dir) {
        LinearProgram lp;
        lp.objective.assign(occ_.num_vars(), 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (std::size_t v = 0; v < occ_.num_vars(); ++v) lp.objective[v] += dir[i] * rows_[i][v];
        lp.rows = occ_.flow_rows();
        LpResult res = solve_lp(lp);
        if (stats_) ++stats_->lp_calls;
        if (res.status != LpStatus::Optimal) throw SolverError("occupation LP is not bounded and feasible");
        Vec p = occ_.reach(sets_, res.x);
        for (std::size_t j = 0; j < points.size(); ++j) {
            bool same = true;
            for (std::size_t i = 0; i < p.size() && same; ++i)
                same = std::abs(points[j][i] - p[i]) <= kSameTol;
            if (same) return j;
        }
        points.push_back(std::move(p));
        witnesses.push_back(std::move(res.x));
        return points.size() - 1;
    }

    std::vector<Vec> points;
    std::vector<Vec> witnesses;

private:
    OccupationLp occ_;
    std::vector<std::vector<std::size_t>> sets_;
    std::vector<Vec> rows_;
    SolveStats* stats_;
};

// Drops points that are convex combinations of the remaining ones.
void keep_vertices(std::vector<Vec>& pts, std::vector<Vec>& wit, SolveStats* stats) {
    for (std::size_t j = pts.size(); j-- > 0;) {
        if (pts.size() == 1) break;
        std::vector<Vec> others;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != j) others.push_back(pts[i]);
        if (detail::in_convex_hull(others, pts[j], stats)) {
            pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(j));
            wit.erase(wit.begin() + static_cast<std::ptrdiff_t>(j));
        }
    }
}

// Drops points dominated by a convex combination of the others.
void drop_dominated(std::vector<Vec>& pts, std::vector<Vec>& wit, SolveStats* stats) {
    for (std::size_t j = pts.size(); j-- > 0;) {
        if (pts.size() == 1) break;
        const Vec& p = pts[j];
        std::vector<Vec> others;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != j) others.push_back(pts[i]);
        LinearProgram lp;
        lp.objective.assign(others.size(), 0.0);
        for (std::size_t i = 0; i < others.size(); ++i)
            for (double x : others[i]) lp.objective[i] += x;
        for (std::size_t c = 0; c < p.size(); ++c) {
            LpRow row{Vec(others.size()), Relation::Ge, p[c]};
            for (std::size_t i = 0; i < others.size(); ++i) row.a[i] = others[i][c];
            lp.rows.push_back(std::move(row));
        }
        lp.rows.push_back(LpRow{Vec(others.size(), 1.0), Relation::Eq, 1.0});
        if (stats) ++stats->lp_calls;
        LpResult res = solve_lp(lp);
        double psum = std::accumulate(p.begin(), p.end(), 0.0);
        if (res.status == LpStatus::Optimal && res.value > psum + 1e-8) {
            pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(j));
            wit.erase(wit.begin() + static_cast<std::ptrdiff_t>(j));
        }
    }
}

}  // namespace

ParetoApprox pareto_frontier(const QuotientResult& q,
                             const std::vector<std::vector<std::size_t>>& query, double eps,
                             SolveStats* stats) {
    if (!(eps > 0.0)) throw ValidationError("epsilon must be positive");
    const std::size_t k = query.size();
    std::vector<bool> mask = detail::absorbing_mask(q);
    std::vector<int> covered(q.quotient.size(), 0);
    for (const auto& set : query)
        for (std::size_t s : set) ++covered[s];
    bool partition = true;
    std::vector<std::size_t> rest;
    for (std::size_t s = 0; s < q.quotient.size(); ++s) {
        if (covered[s] > 1) throw ValidationError("query sets must be disjoint");
        if (mask[s] && covered[s] == 0) {
            partition = false;
            rest.push_back(s);
        }
    }
    std::vector<std::vector<std::size_t>> sets = query;
    if (!partition) sets.push_back(rest);
    const std::size_t dim = sets.size();

    ParetoApprox out;
    Sandwich sw(q, sets, stats);
    if (sw.trivial()) {
        Vec p = sw.trivial_point();
        p.resize(k);
        out.extreme_points.push_back(p);
        out.witnesses.push_back({});
        return out;
    }

    for (std::size_t i = 0; i < dim; ++i) {
        Vec e(dim, 0.0);
        e[i] = 1.0;
        sw.maximize(e);
    }

    // Affine hull: probe directions orthogonal to the current hull inside
    // the hyperplane sum = 1 until none reveals a new point.
    std::vector<Vec> basis;
    Vec x0;
    while (true) {
        x0 = sw.points.front();
        basis.clear();
        for (std::size_t j = 1; j < sw.points.size(); ++j)
            detail::extend_basis(basis, detail::sub(sw.points[j], x0), kHullTol);
        std::vector<Vec> complement = basis;
        for (std::size_t i = 0; i < dim; ++i) {
            Vec e(dim, -1.0 / static_cast<double>(dim));
            e[i] += 1.0;
            detail::extend_basis(complement, e, 1e-6);
        }
        bool grown = false;
        for (std::size_t c = basis.size(); c < complement.size() && !grown; ++c) {
            for (double sign : {1.0, -1.0}) {
                Vec dir = complement[c];
                for (double& x : dir) x *= sign;
                std::size_t j = sw.maximize(dir);
                if (detail::dot(dir, detail::sub(sw.points[j], x0)) > kHullTol) {
                    grown = true;
                    break;
                }
            }
        }
        if (!grown) break;
    }

    const std::size_t d = basis.size();
    auto local = [&](const Vec& p) {
        Vec z(d);
        Vec diff = detail::sub(p, x0);
        for (std::size_t i = 0; i < d; ++i) z[i] = detail::dot(basis[i], diff);
        return z;
    };

    double gap_max = 0.0;
    if (d > 0) {
        std::vector<std::pair<Facet, double>> checked;
        while (true) {
            std::vector<Vec> z;
            for (const Vec& p : sw.points) z.push_back(local(p));
            std::vector<Facet> facets = enumerate_facets(z, d);
            bool grown = false;
            gap_max = 0.0;
            for (const Facet& f : facets) {
                auto it = std::find_if(checked.begin(), checked.end(),
                                       [&](const auto& c) { return same_facet(c.first, f); });
                double gap;
                if (it != checked.end()) {
                    gap = it->second;
                } else {
                    Vec dir(dim, 0.0);
                    for (std::size_t i = 0; i < d; ++i)
                        for (std::size_t c = 0; c < dim; ++c) dir[c] += f.normal[i] * basis[i][c];
                    std::size_t before = sw.points.size();
                    std::size_t j = sw.maximize(dir);
                    gap = std::max(0.0, detail::dot(f.normal, local(sw.points[j])) - f.offset);
                    checked.emplace_back(f, gap);
                    if (gap > eps) {
                        grown = true;
                    } else if (sw.points.size() > before) {
                        // Within tolerance: keep the hull unchanged.
                        sw.points.pop_back();
                        sw.witnesses.pop_back();
                    }
                }
                if (gap <= eps) gap_max = std::max(gap_max, gap);
            }
            if (!grown) break;
        }
    }
    out.epsilon_pareto = gap_max;

    std::vector<Vec> pts = sw.points;
    std::vector<Vec> wit = sw.witnesses;
    keep_vertices(pts, wit, stats);
    if (!partition) {
        for (Vec& p : pts) p.resize(k);
        // Projection can create duplicates and interior points.
        for (std::size_t j = pts.size(); j-- > 0;)
            for (std::size_t i = 0; i < j; ++i) {
                bool same = true;
                for (std::size_t c = 0; c < k && same; ++c) same = std::abs(pts[i][c] - pts[j][c]) <= kSameTol;
                if (same) {
                    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(j));
                    wit.erase(wit.begin() + static_cast<std::ptrdiff_t>(j));
                    break;
                }
            }
        keep_vertices(pts, wit, stats);
        drop_dominated(pts, wit, stats);
    }

    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
    for (std::size_t i : order) {
        out.extreme_points.push_back(pts[i]);
        out.witnesses.push_back(wit[i]);
    }
    return out;
}

}  // namespace cptmdp
