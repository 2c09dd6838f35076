#include <algorithm>
#include <cmath>

#include "cptmdp/errors.hpp"
#include "cptmdp/linalg.hpp"

namespace cptmdp {

LuFactor::LuFactor(std::size_t n, std::vector<double> matrix, double pivot_tol)
    : n_(n), lu_(std::move(matrix)), perm_(n) {
    if (lu_.size() != n * n) throw ValidationError("matrix is not square");
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    double scale = 0.0;
    for (double v : lu_) scale = std::max(scale, std::abs(v));
    if (n > 0 && scale == 0.0) throw SingularMatrix();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::abs(lu_[i * n + k]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best < pivot_tol * scale) throw SingularMatrix();
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_[k * n + j], lu_[piv * n + j]);
            std::swap(perm_[k], perm_[piv]);
        }
        const double inv = 1.0 / lu_[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = lu_[i * n + k] * inv;
            lu_[i * n + k] = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_[i * n + j] -= f * lu_[k * n + j];
        }
    }
}

std::vector<double> LuFactor::solve(std::vector<double> rhs) const {
    if (rhs.size() != n_) throw ValidationError("right-hand side has wrong length");
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_[i * n_ + j] * x[j];
    for (std::size_t i = n_; i-- > 0;) {
        for (std::size_t j = i + 1; j < n_; ++j) x[i] -= lu_[i * n_ + j] * x[j];
        x[i] /= lu_[i * n_ + i];
    }
    return x;
}

std::vector<double> solve_linear(const LinearSystem& sys) {
    if (sys.rhs.size() != sys.n) throw ValidationError("right-hand side has wrong length");
    LuFactor lu(sys.n, sys.matrix);
    std::vector<double> x = lu.solve(sys.rhs);
    // One step of iterative refinement.
    std::vector<double> r(sys.n);
    for (std::size_t i = 0; i < sys.n; ++i) {
        long double acc = sys.rhs[i];
        for (std::size_t j = 0; j < sys.n; ++j) acc -= static_cast<long double>(sys.matrix[i * sys.n + j]) * x[j];
        r[i] = static_cast<double>(acc);
    }
    std::vector<double> dx = lu.solve(r);
    for (std::size_t i = 0; i < sys.n; ++i) x[i] += dx[i];
    return x;
}

}  // namespace cptmdp
