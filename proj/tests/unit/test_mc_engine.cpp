#include <doctest.h>

#include "../support.hpp"
#include "cptmdp/errors.hpp"
#include "cptmdp/mc_engine.hpp"

using namespace cptmdp;
using cptmdp::testing::fixture;

namespace {

Model running_under(std::size_t action) {
    Model m = load_model(fixture("running.json")).model;
    m.kind = ModelKind::Mc;
    Action keep = m.states[0].actions[action];
    m.states[0].actions = {keep};
    return m;
}

}  // namespace

TEST_CASE("induced prospects of the running example") {
    const auto obj = std::get<WeightedReachObjective>(load_model(fixture("running.json")).objective);
    InducedProspect a1 = induced_prospect(running_under(0), obj);
    CHECK(a1.prospect.outcomes == std::vector<double>{-5, 0, 20, 50});
    CHECK(a1.prospect.probs[0] == 0.0);
    CHECK(a1.prospect.probs[2] == doctest::Approx(0.95).epsilon(1e-12));
    InducedProspect a2 = induced_prospect(running_under(1), obj);
    CHECK(a2.prospect.probs[1] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(a2.per_outcome_states.at(-5.0) == std::vector<std::size_t>{3});
    const CptParams params = CptParams::standard();
    CHECK(mc_cpt_value(running_under(0), obj, params) == doctest::Approx(11.07354794624832).epsilon(1e-10));
    CHECK(mc_cpt_value(running_under(1), obj, params) == doctest::Approx(9.449679794905729).epsilon(1e-10));
    CHECK(classical_cpt_value(running_under(1), obj, params) ==
          doctest::Approx(9.449679794905729).epsilon(1e-10));
    const CptParams ref = CptParams::standard(LossRanking::ReferenceFirst);
    CHECK(classical_cpt_value(running_under(1), obj, ref) == doctest::Approx(10.194352919679941).epsilon(1e-10));
}

TEST_CASE("absorption through transient cycles") {
    // s0 -> s0 (1/2), s1 (1/4), s2 (1/4); targets s1, s2.
    Model m;
    m.kind = ModelKind::Mc;
    m.states = {State{"s0", {Action{"a", {Successor{0, 0.5, ""}, Successor{1, 0.25, ""}, Successor{2, 0.25, ""}}}}},
                State{"s1", {Action{"a", {Successor{1, 1.0, ""}}}}},
                State{"s2", {Action{"a", {Successor{2, 1.0, ""}}}}}};
    std::vector<double> p = absorption_probabilities(m, {{1}, {2}});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("penalty covers bottom components without targets") {
    ParsedModel pm = load_model(fixture("fig3.json"));
    Model m = pm.model;
    m.kind = ModelKind::Mc;
    m.states[0].actions = {m.states[0].actions[0]};
    InducedProspect ip = induced_prospect(m, std::get<WeightedReachObjective>(pm.objective));
    CHECK(ip.prospect.outcomes == std::vector<double>{-5, 0});
    CHECK(ip.prospect.probs[1] == doctest::Approx(1.0));
}

TEST_CASE("MDP input is rejected by the chain engine") {
    ParsedModel pm = load_model(fixture("running.json"));
    CHECK_THROWS_AS(induced_prospect(pm.model, std::get<WeightedReachObjective>(pm.objective)), ValidationError);
}
