#include <doctest.h>

#include "../support.hpp"
#include "cptmdp/errors.hpp"
#include "cptmdp/model.hpp"

using namespace cptmdp;
using cptmdp::testing::fixture;

TEST_CASE("running example fixture parses with exact probabilities") {
    ParsedModel pm = load_model(fixture("running.json"));
    const Model& m = pm.model;
    REQUIRE(m.size() == 5);
    CHECK(m.kind == ModelKind::Mdp);
    CHECK(m.states[m.initial].id == "s0");
    const Action& a2 = m.states[0].actions[1];
    CHECK(a2.id == "a2");
    REQUIRE(a2.succ.size() == 3);
    CHECK(a2.succ[1].prob == doctest::Approx(0.44).epsilon(1e-15));
    CHECK(a2.succ[1].exact == "11/25");
    const auto& obj = std::get<WeightedReachObjective>(pm.objective);
    CHECK(obj.targets.at(m.index_of("s3")) == -5.0);
    CHECK(obj.penalty == 0.0);
    CHECK(outcome_vector(obj) == std::vector<double>{-5, 0, 20, 50});
}

TEST_CASE("serialization round-trips") {
    for (const char* name : {"running.json", "fig4.json", "two_coupon.json", "mean_payoff_mdp.json"}) {
        ParsedModel pm = load_model(fixture(name));
        std::string text = serialize_model(pm.model, pm.objective);
        ParsedModel again = parse_model(text);
        CHECK(serialize_model(again.model, again.objective) == text);
    }
}

TEST_CASE("malformed documents are rejected with located messages") {
    CHECK_THROWS_AS(parse_model("{ \"type\": "), ParseError);
    CHECK_THROWS_WITH_AS(parse_model("{\n  \"type\": ]"), doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_AS(parse_model(R"({"type":"pomdp","states":["a"],"initial":"a","transitions":{}})"), ParseError);
    CHECK_THROWS_AS(parse_model(R"({"type":"mc","states":["a"],"initial":"b","transitions":{"a":{"x":{"a":1}}}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"type":"mc","states":["a"],"initial":"a","transitions":{"a":{"x":{"a":"1/0"}}}})"),
                    ParseError);
    CHECK_THROWS_WITH_AS(
        parse_model(R"({"type":"mc","states":["a","b"],"initial":"a","transitions":{"a":{"x":{"a":0.5,"b":0.4}},"b":{"x":{"b":1}}}})"),
        doctest::Contains("sums to"), ValidationError);
    CHECK_THROWS_AS(
        parse_model(R"({"type":"mc","states":["a"],"initial":"a","transitions":{"a":{"x":{"a":1},"y":{"a":1}}}})"),
        ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"type":"mc","states":["a"],"initial":"a","transitions":{}})"), ValidationError);
}

TEST_CASE("total-reward objectives are rejected") {
    CHECK_THROWS_WITH_AS(load_model(fixture("total_reward.json")), doctest::Contains("total-reward"), ValidationError);
}

TEST_CASE("objective normalization makes targets absorbing") {
    ParsedModel pm = load_model(fixture("fig3.json"));
    const auto& obj = std::get<WeightedReachObjective>(pm.objective);
    NormalizedProblem np = validate_objective(pm.model, obj);
    for (const auto& [s, r] : np.objective.targets) {
        CHECK(np.model.is_absorbing(s));
        CHECK(np.model.states[s].actions.size() == 1);
    }
}

TEST_CASE("a target paying the penalty still stops the path") {
    Model m;
    m.kind = ModelKind::Mc;
    m.states = {State{"a", {Action{"x", {Successor{1, 1.0, ""}}}}},
                State{"b", {Action{"x", {Successor{2, 1.0, ""}}}}},
                State{"c", {Action{"x", {Successor{2, 1.0, ""}}}}}};
    WeightedReachObjective obj{{{1, 0.0}, {2, 7.0}}, 0.0};
    NormalizedProblem np = validate_objective(m, obj);
    CHECK(np.model.is_absorbing(1));
    CHECK(np.objective.targets.count(1) == 0);
}
