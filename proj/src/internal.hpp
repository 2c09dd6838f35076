#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cptmdp/mdp_engine.hpp"

namespace cptmdp::detail {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec sub(const Vec& a, const Vec& b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

/// Orthogonalizes v against `basis` (twice, for stability) and appends it
/// when the residual norm exceeds tol. Returns whether it was appended.
inline bool extend_basis(std::vector<Vec>& basis, Vec v, double tol) {
    for (int pass = 0; pass < 2; ++pass)
        for (const Vec& b : basis) {
            double c = dot(v, b);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
        }
    double nv = norm(v);
    if (nv <= tol) return false;
    for (double& x : v) x /= nv;
    basis.push_back(std::move(v));
    return true;
}

/// Targets, sink and per-MEC stay targets of a quotient.
std::vector<bool> absorbing_mask(const QuotientResult& q);

/// Whether `p` is a convex combination of `pts` within the LP tolerance.
bool in_convex_hull(const std::vector<Vec>& pts, const Vec& p, SolveStats* stats);

}  // namespace cptmdp::detail
