#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "../support.hpp"
#include "cptmdp/errors.hpp"
#include "cptmdp/graph.hpp"
#include "cptmdp/mc_engine.hpp"
#include "cptmdp/mdp_engine.hpp"
#include "cptmdp/mean_payoff.hpp"

using namespace cptmdp;
using namespace cptmdp::testing;

namespace {

CptParams piecewise_params(std::mt19937_64& rng, LossRanking ranking = LossRanking::WorstFirst) {
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    auto weight = [&] {
        double x = unit(rng), y = unit(rng);
        return WeightSpec::piecewise({{0, 0}, {x, y}, {1, 1}});
    };
    return CptParams::make(UtilitySpec::piecewise({{-10, -25}, {0, 0}, {5, 4}, {10, 6}}), weight(), weight(),
                           std::nullopt, std::nullopt, ranking);
}

std::vector<double> random_probs(std::mt19937_64& rng, std::size_t k, double mass = 1.0) {
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution zero(0.2);
    std::vector<double> p(k);
    double total = 0.0;
    for (double& v : p) total += v = zero(rng) ? 0.0 : e(rng);
    if (total == 0.0) {
        p[0] = 1.0;
        total = 1.0;
    }
    for (double& v : p) v *= mass / total;
    return p;
}

std::vector<double> random_outcomes(std::mt19937_64& rng, std::size_t k) {
    std::uniform_int_distribution<int> pick(-10, 10);
    std::set<double> s;
    while (s.size() < k) s.insert(pick(rng));
    return {s.begin(), s.end()};
}

Model induced(const Model& m, std::mt19937_64& rng) { return induced_mc(m, random_strategy(rng, m)); }

}  // namespace

TEST_CASE("definition equivalence on random MDPs under random strategies") {
    std::mt19937_64 rng(20240601);
    const CptParams params[] = {CptParams::standard(), CptParams::standard(LossRanking::ReferenceFirst)};
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<std::size_t> size(2, 8);
        Model m = random_model(rng, size(rng), 3, ModelKind::Mdp, 1 + trial % 3);
        WeightedReachObjective obj = random_objective(rng, m);
        Model mc = induced(m, rng);
        for (const CptParams& p : params) {
            CAPTURE(trial);
            CHECK(mc_cpt_value(mc, obj, p) == doctest::Approx(classical_cpt_value(mc, obj, p)).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("Monte-Carlo simulation agrees with induced prospects") {
    std::mt19937_64 rng(77);
    constexpr std::size_t kPaths = 1000000;
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> size(2, 7);
        Model m = random_model(rng, size(rng), 1, ModelKind::Mc, 1 + trial % 2);
        WeightedReachObjective obj = random_objective(rng, m);
        NormalizedProblem np = validate_objective(m, obj);
        InducedProspect ip = induced_prospect(m, obj);

        // Outcome realized once a path enters an outcome's obtainset.
        std::vector<int> outcome_of(m.size(), -1);
        for (std::size_t i = 0; i < ip.prospect.size(); ++i)
            for (std::size_t s : ip.per_outcome_states.at(ip.prospect.outcomes[i])) outcome_of[s] = static_cast<int>(i);
        std::vector<std::vector<double>> cdf(m.size());
        for (std::size_t s = 0; s < m.size(); ++s) {
            double acc = 0.0;
            for (const Successor& t : np.model.states[s].actions[0].succ) cdf[s].push_back(acc += t.prob);
        }
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::size_t> counts(ip.prospect.size(), 0);
        for (std::size_t path = 0; path < kPaths; ++path) {
            std::size_t s = m.initial;
            while (outcome_of[s] < 0) {
                const double r = unit(rng);
                const auto& c = cdf[s];
                std::size_t j = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), r) - c.begin());
                s = np.model.states[s].actions[0].succ[std::min(j, c.size() - 1)].state;
            }
            ++counts[static_cast<std::size_t>(outcome_of[s])];
        }
        for (std::size_t i = 0; i < counts.size(); ++i) {
            const double p = ip.prospect.probs[i];
            const double sigma = std::sqrt(p * (1 - p) / kPaths);
            const double freq = static_cast<double>(counts[i]) / kPaths;
            CAPTURE(trial);
            CAPTURE(i);
            CHECK(std::abs(freq - p) <= 3 * sigma + 1e-12);
        }
    }
}

TEST_CASE("solver stays inside the strategy-grid envelope on small MDPs") {
    std::mt19937_64 rng(4242);
    const CptParams params = CptParams::standard();
    std::size_t within_eps = 0;
    for (int trial = 0; trial < 50; ++trial) {
        // Two choice states with two actions each; grid of step 1/20 per state.
        Model m = random_model(rng, 5, 2, ModelKind::Mdp, 2);
        for (std::size_t s = 0; s < 3; ++s)
            while (m.states[s].actions.size() < 2) m.states[s].actions.push_back(random_action(rng, "a1", 5));
        WeightedReachObjective obj = random_objective(rng, m);
        CptSolveResult r = mdp_cpt_value(m, obj, params);

        double grid_best = -kInf;
        constexpr int kSteps = 20;
        for (int i = 0; i <= kSteps; ++i)
            for (int j = 0; j <= kSteps; ++j)
                for (int l = 0; l <= kSteps; ++l) {
                    const double q[3] = {i / double(kSteps), j / double(kSteps), l / double(kSteps)};
                    Strategy sigma;
                    for (std::size_t s = 0; s < 3; ++s)
                        sigma.choices.push_back({m.states[s].id, {{"a0", q[s]}, {"a1", 1 - q[s]}}});
                    grid_best = std::max(grid_best, mc_cpt_value(induced_mc(m, sigma), obj, params));
                }
        CAPTURE(trial);
        CHECK(r.value >= grid_best - r.error_bound);
        if (r.value >= grid_best - 0.01) ++within_eps;
        if (r.strategy.scope == StrategyScope::Original)
            CHECK(verify_strategy(m, obj, r.strategy, params) == doctest::Approx(r.value).epsilon(1e-6).scale(1.0));
    }
    MESSAGE("instances within 0.01 of the grid optimum: " << within_eps << "/50");
}

TEST_CASE("decision weights telescope") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10000; ++trial) {
        const CptParams p = piecewise_params(rng, trial % 2 ? LossRanking::ReferenceFirst : LossRanking::WorstFirst);
        std::vector<double> o = random_outcomes(rng, 1 + trial % 7);
        Prospect x = Prospect::make(o, random_probs(rng, o.size()));
        std::vector<double> pi = decision_weights(p, x);
        double gain_pi = 0, loss_pi = 0, gain_mass = 0, loss_mass = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(pi[i] >= -1e-15);
            if (x.outcomes[i] > 0) gain_pi += pi[i], gain_mass += x.probs[i];
            if (x.outcomes[i] < 0) loss_pi += pi[i], loss_mass += x.probs[i];
        }
        CHECK(gain_pi == doctest::Approx(p.weight_gain(std::min(gain_mass, 1.0))).epsilon(1e-12).scale(1.0));
        if (p.loss_ranking == LossRanking::WorstFirst)
            CHECK(loss_pi == doctest::Approx(p.weight_loss(std::min(loss_mass, 1.0))).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("cpt is monotone under first-order stochastic dominance") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const CptParams p = piecewise_params(rng);
        std::vector<double> o = random_outcomes(rng, 2 + trial % 6);
        std::vector<double> probs = random_probs(rng, o.size());
        std::uniform_int_distribution<std::size_t> pick(0, o.size() - 2);
        std::size_t from = pick(rng);
        std::size_t to = std::uniform_int_distribution<std::size_t>(from + 1, o.size() - 1)(rng);
        std::vector<double> better = probs;
        double moved = probs[from] * unit(rng);
        better[from] -= moved;
        better[to] += moved;
        CHECK(cpt(p, Prospect::make(o, better)) >= cpt(p, Prospect::make(o, probs)) - 1e-12);

        // Sub-distributions: adding mass to a gain helps, adding it to a loss hurts.
        std::vector<double> sub = random_probs(rng, o.size(), 0.8);
        std::vector<double> more = sub;
        more[to] += 0.2 * unit(rng);
        const double before = cpt(p, Prospect::sub(o, sub));
        const double after = cpt(p, Prospect::sub(o, more));
        if (o[to] > 0) CHECK(after >= before - 1e-12);
        if (o[to] < 0) CHECK(after <= before + 1e-12);
    }
}

TEST_CASE("cpt is Lipschitz with the closed-form constant") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const CptParams p = piecewise_params(rng);
        std::vector<double> o = random_outcomes(rng, 1 + trial % 7);
        std::vector<double> a = random_probs(rng, o.size());
        std::vector<double> b = trial % 2 ? random_probs(rng, o.size()) : a;
        if (trial % 2 == 0) {
            double total = 0.0;
            for (double& v : b) total += v = std::max(0.0, v + 1e-3 * noise(rng));
            if (total == 0.0) continue;
            for (double& v : b) v /= total;
        }
        double dist = 0.0;
        for (std::size_t i = 0; i < o.size(); ++i) dist += (a[i] - b[i]) * (a[i] - b[i]);
        dist = std::sqrt(dist);
        const double gap = std::abs(cpt(p, Prospect::make(o, a)) - cpt(p, Prospect::make(o, b)));
        CHECK(gap <= lipschitz_constant(p, o) * dist + 1e-12);
    }
}

namespace {

// Every end component, by closure of all state-action subsets of a small MDP.
std::vector<std::pair<std::set<std::size_t>, std::set<StateAction>>> brute_mecs(const Model& m) {
    std::vector<StateAction> all;
    for (std::size_t s = 0; s < m.size(); ++s)
        for (std::size_t a = 0; a < m.states[s].actions.size(); ++a) all.emplace_back(s, a);
    std::vector<std::pair<std::set<std::size_t>, std::set<StateAction>>> ecs;
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << all.size()); ++mask) {
        std::vector<StateAction> acts;
        std::set<std::size_t> states;
        for (std::size_t i = 0; i < all.size(); ++i)
            if (mask >> i & 1) acts.push_back(all[i]), states.insert(all[i].first);
        std::vector<std::size_t> sv(states.begin(), states.end());
        if (is_end_component(m, sv, acts)) ecs.emplace_back(states, std::set<StateAction>(acts.begin(), acts.end()));
    }
    std::vector<std::pair<std::set<std::size_t>, std::set<StateAction>>> maximal;
    for (const auto& e : ecs) {
        bool dominated = std::any_of(ecs.begin(), ecs.end(), [&](const auto& f) {
            return f.second != e.second && std::includes(f.second.begin(), f.second.end(), e.second.begin(), e.second.end());
        });
        if (!dominated) maximal.push_back(e);
    }
    std::sort(maximal.begin(), maximal.end());
    return maximal;
}

}  // namespace

TEST_CASE("MEC decomposition matches brute-force end-component enumeration") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> size(1, 5);
        Model m = random_model(rng, size(rng), 3, ModelKind::Mdp, trial % 2);
        std::size_t n_actions = 0;
        for (const State& s : m.states) n_actions += s.actions.size();
        if (n_actions > 14) {
            for (State& s : m.states) s.actions.resize(std::min<std::size_t>(s.actions.size(), 2));
        }
        std::vector<std::pair<std::set<std::size_t>, std::set<StateAction>>> got;
        for (const Mec& e : mecs(m))
            got.emplace_back(std::set<std::size_t>(e.states.begin(), e.states.end()),
                             std::set<StateAction>(e.actions.begin(), e.actions.end()));
        std::sort(got.begin(), got.end());
        CAPTURE(trial);
        CHECK(got == brute_mecs(m));
    }
}

TEST_CASE("mean payoff: direct and reduction paths agree on chains") {
    std::mt19937_64 rng(555);
    const CptParams params = CptParams::standard();
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> size(2, 8);
        Model m = random_model(rng, size(rng), 1, ModelKind::Mc, 0);
        MeanPayoffObjective rewards;
        std::uniform_int_distribution<int> r(-5, 5);
        for (std::size_t s = 0; s < m.size(); ++s) rewards.rewards.push_back(r(rng));
        const double direct = cpt(params, mc_mean_payoff_prospect(m, rewards));
        const double reduced = mp_cpt_value(m, rewards, params).value;
        CAPTURE(trial);
        CHECK(std::abs(direct - reduced) <= 1e-8);
    }
}
