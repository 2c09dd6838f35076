#include <algorithm>
#include <cmath>

#include "cptmdp/errors.hpp"
#include "cptmdp/linalg.hpp"

namespace cptmdp {

namespace {

constexpr double kReducedCostTol = 1e-9;

struct Column {
    std::size_t index;
    double coef;
};

// Original variable x = offset + sum coef * y[index], y >= 0.
struct VarMap {
    double offset = 0.0;
    std::vector<Column> cols;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_(rows * (cols + 1), 0.0), basis_(rows) {}

    double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double rhs(std::size_t i) const { return at(i, n_); }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t c) {
        const std::size_t w = n_ + 1;
        double* prow = &t_[r * w];
        const double inv = 1.0 / prow[c];
        for (std::size_t j = 0; j < w; ++j) prow[j] *= inv;
        prow[c] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &t_[i * w];
            const double f = row[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < w; ++j) row[j] -= f * prow[j];
            row[c] = 0.0;
        }
        basis_[r] = c;
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

enum class PhaseOutcome { Optimal, Unbounded };

// Maximizes cost . y over the tableau's feasible basis with Bland's rule.
PhaseOutcome run_phase(Tableau& tab, const std::vector<double>& cost, const std::vector<bool>& allowed,
                       const SolverConfig& cfg, std::size_t& pivots) {
    const std::size_t m = tab.rows();
    const std::size_t n = tab.cols();
    std::vector<double> reduced(n);
    while (true) {
        for (std::size_t j = 0; j < n; ++j) {
            double d = -cost[j];
            for (std::size_t i = 0; i < m; ++i) d += cost[tab.basis()[i]] * tab.at(i, j);
            reduced[j] = d;
        }
        std::size_t enter = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (allowed[j] && reduced[j] < -kReducedCostTol) {
                enter = j;
                break;
            }
        }
        if (enter == n) return PhaseOutcome::Optimal;
        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double a = tab.at(i, enter);
            if (a <= cfg.pivot_tol) continue;
            const double ratio = std::max(0.0, tab.rhs(i)) / a;
            const double tie = 1e-12 * (1.0 + best);
            if (leave == m || ratio < best - tie) {
                leave = i;
                best = ratio;
            } else if (ratio <= best + tie && tab.basis()[i] < tab.basis()[leave]) {
                leave = i;
                best = std::min(best, ratio);
            }
        }
        if (leave == m) return PhaseOutcome::Unbounded;
        if (++pivots > cfg.max_pivots) throw IterationLimit();
        tab.pivot(leave, enter);
    }
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const SolverConfig& cfg) {
    const std::size_t nv = lp.num_vars();
    for (const LpRow& row : lp.rows)
        if (row.a.size() != nv) throw ValidationError("LP row length differs from variable count");
    if ((!lp.lower.empty() && lp.lower.size() != nv) || (!lp.upper.empty() && lp.upper.size() != nv))
        throw ValidationError("LP bound vectors have wrong length");

    LpResult result;
    std::vector<VarMap> vars(nv);
    std::vector<LpRow> rows;
    std::size_t ny = 0;
    std::vector<std::pair<std::size_t, double>> upper_rows;  // (column, bound)
    for (std::size_t j = 0; j < nv; ++j) {
        double lo = lp.lower.empty() ? 0.0 : lp.lower[j];
        double hi = lp.upper.empty() ? kInf : lp.upper[j];
        if (lo > hi + cfg.feasibility_tol) return result;
        if (std::isfinite(lo)) {
            vars[j] = {lo, {{ny, 1.0}}};
            if (std::isfinite(hi)) upper_rows.emplace_back(ny, std::max(0.0, hi - lo));
            ++ny;
        } else if (std::isfinite(hi)) {
            vars[j] = {hi, {{ny++, -1.0}}};
        } else {
            vars[j] = {0.0, {{ny, 1.0}, {ny + 1, -1.0}}};
            ny += 2;
        }
    }
    for (const LpRow& row : lp.rows) {
        LpRow r{std::vector<double>(ny, 0.0), row.rel, row.b};
        for (std::size_t j = 0; j < nv; ++j) {
            if (row.a[j] == 0.0) continue;
            r.b -= row.a[j] * vars[j].offset;
            for (const Column& c : vars[j].cols) r.a[c.index] += row.a[j] * c.coef;
        }
        rows.push_back(std::move(r));
    }
    for (const auto& [col, bound] : upper_rows) {
        LpRow r{std::vector<double>(ny, 0.0), Relation::Le, bound};
        r.a[col] = 1.0;
        rows.push_back(std::move(r));
    }
    for (LpRow& r : rows) {
        if (r.b < 0.0) {
            for (double& v : r.a) v = -v;
            r.b = -r.b;
            if (r.rel == Relation::Le)
                r.rel = Relation::Ge;
            else if (r.rel == Relation::Ge)
                r.rel = Relation::Le;
        }
    }

    const std::size_t m = rows.size();
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (const LpRow& r : rows) {
        if (r.rel != Relation::Eq) ++n_slack;
        if (r.rel != Relation::Le) ++n_art;
    }
    const std::size_t n = ny + n_slack + n_art;
    Tableau tab(m, n);
    std::vector<bool> is_art(n, false);
    std::size_t next_slack = ny;
    std::size_t next_art = ny + n_slack;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < ny; ++j) tab.at(i, j) = rows[i].a[j];
        tab.rhs(i) = rows[i].b;
        if (rows[i].rel == Relation::Le) {
            tab.at(i, next_slack) = 1.0;
            tab.basis()[i] = next_slack++;
        } else {
            if (rows[i].rel == Relation::Ge) tab.at(i, next_slack++) = -1.0;
            tab.at(i, next_art) = 1.0;
            is_art[next_art] = true;
            tab.basis()[i] = next_art++;
        }
    }

    std::size_t pivots = 0;
    std::vector<bool> allowed(n, true);
    if (n_art > 0) {
        std::vector<double> cost(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (is_art[j]) cost[j] = -1.0;
        run_phase(tab, cost, allowed, cfg, pivots);
        double infeas = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (is_art[tab.basis()[i]]) infeas += tab.rhs(i);
        if (infeas > cfg.feasibility_tol) {
            result.pivots = pivots;
            return result;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_art[tab.basis()[i]]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!is_art[j] && std::abs(tab.at(i, j)) > cfg.pivot_tol) {
                    tab.pivot(i, j);
                    ++pivots;
                    break;
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (is_art[j]) allowed[j] = false;
    }

    std::vector<double> cost(n, 0.0);
    for (std::size_t j = 0; j < nv; ++j)
        for (const Column& c : vars[j].cols) cost[c.index] += lp.objective[j] * c.coef;
    PhaseOutcome outcome = run_phase(tab, cost, allowed, cfg, pivots);
    result.pivots = pivots;
    if (outcome == PhaseOutcome::Unbounded) {
        result.status = LpStatus::Unbounded;
        return result;
    }
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) y[tab.basis()[i]] = std::max(0.0, tab.rhs(i));
    result.x.assign(nv, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        double v = vars[j].offset;
        for (const Column& c : vars[j].cols) v += c.coef * y[c.index];
        if (!lp.lower.empty()) v = std::max(v, lp.lower[j]);
        if (!lp.upper.empty()) v = std::min(v, lp.upper[j]);
        result.x[j] = v;
    }
    result.value = 0.0;
    for (std::size_t j = 0; j < nv; ++j) result.value += lp.objective[j] * result.x[j];
    result.status = LpStatus::Optimal;
    return result;
}

}  // namespace cptmdp
