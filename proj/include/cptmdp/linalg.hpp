#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace cptmdp {

/// Dense square system, row-major.
struct LinearSystem {
    std::size_t n = 0;
    std::vector<double> matrix;
    std::vector<double> rhs;
};

inline constexpr double kPivotTol = 1e-12;

/// LU factorization with partial pivoting; reusable for several right-hand sides.
class LuFactor {
public:
    /// Throws SingularMatrix when a pivot falls below `pivot_tol` times the
    /// largest entry of its column.
    LuFactor(std::size_t n, std::vector<double> matrix, double pivot_tol = kPivotTol);
    std::vector<double> solve(std::vector<double> rhs) const;
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::vector<double> lu_;
    std::vector<std::size_t> perm_;
};

std::vector<double> solve_linear(const LinearSystem& sys);

enum class Relation { Le, Eq, Ge };

struct LpRow {
    std::vector<double> a;
    Relation rel = Relation::Le;
    double b = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// maximize objective . x subject to rows and lower <= x <= upper.
/// Empty bound vectors mean 0 and +infinity.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t num_vars() const { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double value = 0.0;
    std::size_t pivots = 0;
};

struct SolverConfig {
    double feasibility_tol = 1e-8;
    double pivot_tol = kPivotTol;
    std::size_t max_pivots = 1000000;
};

/// Two-phase dense tableau simplex with Bland's rule. Throws IterationLimit.
LpResult solve_lp(const LinearProgram& lp, const SolverConfig& config = {});

}  // namespace cptmdp
