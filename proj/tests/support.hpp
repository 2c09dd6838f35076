#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "cptmdp/model.hpp"

namespace cptmdp::testing {

inline std::string fixture(const std::string& name) { return std::string(CPTMDP_FIXTURE_DIR) + "/" + name; }

// Random distribution over `n` entries with mass in multiples of 1/16.
inline std::vector<double> random_dist(std::mt19937_64& rng, std::size_t n) {
    std::vector<int> parts(n, 0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int i = 0; i < 16; ++i) ++parts[pick(rng)];
    std::vector<double> out;
    for (int p : parts) out.push_back(p / 16.0);
    return out;
}

inline Action random_action(std::mt19937_64& rng, const std::string& id, std::size_t n_states) {
    std::uniform_int_distribution<std::size_t> fanout(1, std::min<std::size_t>(3, n_states));
    std::vector<std::size_t> all(n_states);
    for (std::size_t i = 0; i < n_states; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::size_t> succ(all.begin(), all.begin() + static_cast<long>(fanout(rng)));
    std::sort(succ.begin(), succ.end());
    std::vector<double> probs = random_dist(rng, succ.size());
    Action a{id, {}};
    for (std::size_t i = 0; i < succ.size(); ++i)
        if (probs[i] > 0.0) a.succ.push_back(Successor{succ[i], probs[i], ""});
    return a;
}

// Random model; the last `absorbing` states are absorbing.
inline Model random_model(std::mt19937_64& rng, std::size_t n, std::size_t max_actions, ModelKind kind,
                          std::size_t absorbing = 2) {
    Model m;
    m.kind = kind;
    std::uniform_int_distribution<std::size_t> n_actions(1, kind == ModelKind::Mc ? 1 : max_actions);
    for (std::size_t s = 0; s < n; ++s) {
        State st{"s" + std::to_string(s), {}};
        if (s + absorbing >= n) {
            st.actions.push_back(Action{"loop", {Successor{s, 1.0, "1"}}});
        } else {
            std::size_t na = n_actions(rng);
            for (std::size_t a = 0; a < na; ++a) st.actions.push_back(random_action(rng, "a" + std::to_string(a), n));
        }
        m.states.push_back(std::move(st));
    }
    return m;
}

// Rewards drawn from a small set with repeats, losses and zero.
inline WeightedReachObjective random_objective(std::mt19937_64& rng, const Model& m) {
    static const double kValues[] = {-7.0, -2.0, 0.0, 1.0, 3.0, 10.0};
    std::uniform_int_distribution<std::size_t> value(0, 5);
    std::bernoulli_distribution take(0.5);
    WeightedReachObjective obj;
    for (std::size_t s = 0; s < m.size(); ++s)
        if (m.is_absorbing(s) || take(rng)) obj.targets[s] = kValues[value(rng)];
    if (obj.targets.empty()) obj.targets[m.size() - 1] = 5.0;
    obj.penalty = kValues[value(rng)];
    return obj;
}

inline Strategy random_strategy(std::mt19937_64& rng, const Model& m) {
    Strategy sigma;
    for (const State& st : m.states) {
        StateChoice c{st.id, {}};
        std::vector<double> p = random_dist(rng, st.actions.size());
        for (std::size_t a = 0; a < st.actions.size(); ++a)
            if (p[a] > 0.0) c.dist.emplace_back(st.actions[a].id, p[a]);
        sigma.choices.push_back(std::move(c));
    }
    return sigma;
}

}  // namespace cptmdp::testing
