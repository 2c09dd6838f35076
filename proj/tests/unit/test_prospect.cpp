#include <doctest.h>

#include <random>

#include "cptmdp/errors.hpp"
#include "cptmdp/prospect.hpp"

using namespace cptmdp;

namespace {

const CptParams kWorst = CptParams::standard();
const CptParams kReference = CptParams::standard(LossRanking::ReferenceFirst);

Prospect x1() { return Prospect::make({0, 20}, {0.05, 0.95}); }
Prospect x2() { return Prospect::make({-5, 0, 50}, {0.44, 0.05, 0.51}); }

}  // namespace

TEST_CASE("standard utility and weights match high-precision references") {
    CHECK(utility(kWorst, 20) == doctest::Approx(13.960674331656390).epsilon(1e-14));
    CHECK(utility(kWorst, -5) == doctest::Approx(-9.274192838040269).epsilon(1e-14));
    CHECK(utility(kWorst, 0) == 0.0);
    CHECK(weight(kWorst.weight_gain, 0.95) == doctest::Approx(0.79319577859778652).epsilon(1e-14));
    CHECK(weight(kWorst.weight_gain, 0.51) == doctest::Approx(0.42578453808190353).epsilon(1e-14));
    CHECK(weight(kWorst.weight_loss, 0.44) == doctest::Approx(0.41659171504926961).epsilon(1e-14));
    CHECK(weight(kWorst.weight_gain, 0.0) == 0.0);
    CHECK(weight(kWorst.weight_gain, 1.0) == 1.0);
}

TEST_CASE("weight rejects arguments outside the unit interval") {
    CHECK_THROWS_AS(weight(kWorst.weight_gain, 1.5), DomainError);
    CHECK_THROWS_AS(weight(kWorst.weight_gain, -0.1), DomainError);
    CHECK_NOTHROW(weight(kWorst.weight_gain, 1.0 + 1e-13));
}

TEST_CASE("cpt of the running-example prospects") {
    CHECK(cpt(kWorst, x1()) == doctest::Approx(11.07354794624832).epsilon(1e-12));
    CHECK(cpt(kReference, x1()) == doctest::Approx(11.07354794624832).epsilon(1e-12));
    CHECK(cpt(kWorst, x2()) == doctest::Approx(9.449679794905729).epsilon(1e-12));
    CHECK(cpt(kReference, x2()) == doctest::Approx(10.194352919679941).epsilon(1e-12));
    CHECK(cpt_accumulator(kWorst, x2()) == doctest::Approx(cpt(kReference, x2())).epsilon(1e-14));
    CHECK(eu(CptParams::identity(), x1()) == doctest::Approx(19.0).epsilon(1e-15));
    CHECK(eu(CptParams::identity(), x2()) == doctest::Approx(23.3).epsilon(1e-15));
}

TEST_CASE("cpt of the two-coupon prospects") {
    Prospect x11 = Prospect::make({0, 20, 40}, {0.0025, 0.095, 0.9025});
    Prospect x12 = Prospect::make({-5, 0, 15, 20, 50, 70}, {0.022, 0.0025, 0.418, 0.0475, 0.0255, 0.4845});
    Prospect x22 = Prospect::make({-10, -5, 0, 45, 50, 100}, {0.1936, 0.044, 0.0025, 0.4488, 0.051, 0.2601});
    CHECK(cpt(kWorst, x11) == doctest::Approx(21.789891558003166).epsilon(1e-12));
    CHECK(cpt(kReference, x12) == doctest::Approx(21.991626425027153).epsilon(1e-12));
    CHECK(cpt(kWorst, x12) == doctest::Approx(21.89008342158806).epsilon(1e-12));
    CHECK(cpt(kReference, x22) == doctest::Approx(21.177256968552317).epsilon(1e-12));
    CHECK(cpt(kWorst, x22) == doctest::Approx(20.48622515499341).epsilon(1e-12));
}

TEST_CASE("decision weights use strictly better and strictly worse masses") {
    std::vector<double> pi = decision_weights(kWorst, x2());
    CHECK(pi[0] == doctest::Approx(0.41659171504926961));
    CHECK(pi[1] == 0.0);
    CHECK(pi[2] == doctest::Approx(0.42578453808190353));
}

TEST_CASE("prospect construction merges and validates") {
    Prospect p = Prospect::make({3, 1, 3}, {0.25, 0.5, 0.25});
    REQUIRE(p.size() == 2);
    CHECK(p.outcomes[0] == 1);
    CHECK(p.probs[1] == doctest::Approx(0.5));
    CHECK_THROWS_AS(Prospect::make({1, 2}, {0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(Prospect::make({1}, {0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(Prospect::make({}, {}), ValidationError);
    CHECK_NOTHROW(Prospect::sub({1, 2}, {0.2, 0.3}));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(WeightSpec::tk(0.279), ValidationError);
    CHECK_NOTHROW(WeightSpec::tk(0.28));
    CHECK_NOTHROW(WeightSpec::tk(2.25));
    CHECK_THROWS_AS(UtilitySpec::tk_power(1.2, 0.88, 2.25), ValidationError);
    CHECK_THROWS_AS(UtilitySpec::tk_power(0.88, 0.88, 0.5), ValidationError);
    CHECK_THROWS_AS(WeightSpec::piecewise({{0, 0}, {0.5, 0.7}, {1, 0.9}}), ValidationError);
    CHECK_THROWS_AS(UtilitySpec::piecewise({{-1, -2}, {1, 1}}), ValidationError);
}

TEST_CASE("lipschitz constant follows the closed form") {
    CptParams id = CptParams::identity();
    CHECK(id.lip_source == LipSource::Exact);
    CHECK(lipschitz_constant(id, {-5, 0, 20, 50}) == doctest::Approx(50.0 * 36.0));
    CHECK(kWorst.lip_source == LipSource::GridEstimated);
    CptParams user = CptParams::make(UtilitySpec::identity(), WeightSpec::tk(0.61), WeightSpec::tk(0.69), 3.0, 4.0);
    CHECK(user.lip_source == LipSource::UserSupplied);
    CHECK(lipschitz_constant(user, {1, 2}) == doctest::Approx(2.0 * 4.0 * 10.0));
    WeightSpec pw = WeightSpec::piecewise({{0, 0}, {0.2, 0.5}, {1, 1}});
    CHECK(*pw.exact_lipschitz() == doctest::Approx(2.5));
}

TEST_CASE("term decomposition reproduces cpt for both rankings") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<double> outcomes{-10, -3, 0, 2, 8};
    for (const CptParams* params : {&kWorst, &kReference}) {
        std::vector<CptTerm> terms = cpt_terms(*params, outcomes);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> p(outcomes.size());
            double total = 0.0;
            for (double& v : p) total += v = unit(rng);
            for (double& v : p) v /= total;
            CHECK(eval_terms(*params, terms, p) == doctest::Approx(cpt(*params, Prospect::make(outcomes, p))).epsilon(1e-12));
        }
    }
}

TEST_CASE("reference-first ranking is not monotone on loss sub-distributions") {
    // More mass on the smaller loss lowers the value under the accumulator ranking.
    CptParams params = CptParams::make(UtilitySpec::identity(), WeightSpec::identity(),
                                       WeightSpec::piecewise({{0, 0}, {0.1, 0.6}, {1, 1}}), std::nullopt,
                                       std::nullopt, LossRanking::ReferenceFirst);
    double before = cpt(params, Prospect::sub({-10, -1}, {0.5, 0.0}));
    double after = cpt(params, Prospect::sub({-10, -1}, {0.5, 0.1}));
    CHECK(after > before);
    CptParams worst = params;
    worst.loss_ranking = LossRanking::WorstFirst;
    CHECK(cpt(worst, Prospect::sub({-10, -1}, {0.5, 0.1})) <= cpt(worst, Prospect::sub({-10, -1}, {0.5, 0.0})));
}
