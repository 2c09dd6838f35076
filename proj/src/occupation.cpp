#include "cptmdp/errors.hpp"
#include "cptmdp/mdp_engine.hpp"
#include "internal.hpp"

namespace cptmdp {

OccupationLp::OccupationLp(const Model& quotient, const std::vector<bool>& absorbing)
    : model_(&quotient), absorbing_(absorbing) {
    const std::size_t n = quotient.size();
    initial_absorbing_ = absorbing_[quotient.initial];
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> row_of(n, none);
    std::size_t rows = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (absorbing_[s]) continue;
        row_of[s] = rows++;
        for (std::size_t a = 0; a < quotient.states[s].actions.size(); ++a) vars_.emplace_back(s, a);
    }
    if (initial_absorbing_) return;
    flow_.assign(rows, LpRow{std::vector<double>(vars_.size(), 0.0), Relation::Eq, 0.0});
    flow_[row_of[quotient.initial]].b = 1.0;
    for (std::size_t v = 0; v < vars_.size(); ++v) {
        const auto& [s, a] = vars_[v];
        flow_[row_of[s]].a[v] += 1.0;
        for (const Successor& t : quotient.states[s].actions[a].succ)
            if (row_of[t.state] != none) flow_[row_of[t.state]].a[v] -= t.prob;
    }
}

std::vector<double> OccupationLp::reach_row(const std::vector<std::size_t>& set) const {
    std::vector<bool> in(model_->size(), false);
    for (std::size_t s : set) {
        if (!absorbing_[s]) throw ValidationError("query sets must consist of absorbing states");
        in[s] = true;
    }
    std::vector<double> row(vars_.size(), 0.0);
    for (std::size_t v = 0; v < vars_.size(); ++v) {
        const auto& [s, a] = vars_[v];
        for (const Successor& t : model_->states[s].actions[a].succ)
            if (in[t.state]) row[v] += t.prob;
    }
    return row;
}

std::vector<double> OccupationLp::reach(const std::vector<std::vector<std::size_t>>& sets,
                                        const std::vector<double>& y) const {
    std::vector<double> out(sets.size(), 0.0);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (initial_absorbing_) {
            for (std::size_t s : sets[i])
                if (s == model_->initial) out[i] = 1.0;
            continue;
        }
        std::vector<double> row = reach_row(sets[i]);
        for (std::size_t v = 0; v < y.size(); ++v) out[i] += row[v] * y[v];
    }
    return out;
}

namespace detail {

std::vector<bool> absorbing_mask(const QuotientResult& q) {
    std::vector<bool> mask(q.quotient.size(), false);
    if (q.quotient.sink) mask[*q.quotient.sink] = true;
    for (const auto& [s, r] : q.objective.targets) mask[s] = true;
    for (std::size_t t : q.stay_target) mask[t] = true;
    return mask;
}

}  // namespace detail

Achievability achievable_point(const QuotientResult& q,
                               const std::vector<std::vector<std::size_t>>& query,
                               const std::vector<double>& point, SolveStats* stats) {
    if (point.size() != query.size()) throw ValidationError("point dimension differs from query size");
    OccupationLp occ(q.quotient, detail::absorbing_mask(q));
    if (occ.initial_absorbing()) {
        std::vector<double> r = occ.reach(query, {});
        for (std::size_t i = 0; i < r.size(); ++i)
            if (r[i] < point[i] - 1e-8) return {};
        return {true, {}};
    }
    LinearProgram lp;
    lp.objective.assign(occ.num_vars(), 0.0);
    lp.rows = occ.flow_rows();
    for (std::size_t i = 0; i < query.size(); ++i)
        lp.rows.push_back(LpRow{occ.reach_row(query[i]), Relation::Ge, point[i]});
    LpResult res = solve_lp(lp);
    if (stats) ++stats->lp_calls;
    if (res.status != LpStatus::Optimal) return {};
    return {true, res.x};
}

}  // namespace cptmdp
