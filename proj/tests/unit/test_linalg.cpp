#include <doctest.h>

#include "cptmdp/errors.hpp"
#include "cptmdp/linalg.hpp"

using namespace cptmdp;

TEST_CASE("LU solves small systems and reuses the factorization") {
    LuFactor lu(2, {2, 1, 1, 3});
    std::vector<double> x = lu.solve({3, 5});
    CHECK(x[0] == doctest::Approx(0.8));
    CHECK(x[1] == doctest::Approx(1.4));
    x = lu.solve({1, 0});
    CHECK(x[0] == doctest::Approx(0.6));
    CHECK_THROWS_AS(LuFactor(2, {1, 2, 2, 4}), SingularMatrix);
    CHECK(solve_linear(LinearSystem{1, {4}, {2}})[0] == doctest::Approx(0.5));
}

TEST_CASE("simplex handles equality, bounds and degenerate cases") {
    // max x + y  s.t. x + 2y <= 4, 3x + y <= 6
    LinearProgram lp{{1, 1}, {{{1, 2}, Relation::Le, 4}, {{3, 1}, Relation::Le, 6}}, {}, {}};
    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(2.8));

    LinearProgram eq{{1, -1}, {{{1, 1}, Relation::Eq, 1}, {{1, 0}, Relation::Ge, 0.25}}, {}, {0.0, 0.0}};
    eq.upper = {0.6, kInf};
    r = solve_lp(eq);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x[0] == doctest::Approx(0.6));
    CHECK(r.value == doctest::Approx(0.2));

    LinearProgram infeasible{{1}, {{{1}, Relation::Ge, 2}, {{1}, Relation::Le, 1}}, {}, {}};
    CHECK(solve_lp(infeasible).status == LpStatus::Infeasible);
    LinearProgram unbounded{{1, 0}, {{{1, -1}, Relation::Le, 1}}, {}, {}};
    CHECK(solve_lp(unbounded).status == LpStatus::Unbounded);

    // Classic cycling instance; Bland's rule terminates.
    LinearProgram beale{{0.75, -20, 0.5, -6},
                        {{{0.25, -8, -1, 9}, Relation::Le, 0},
                         {{0.5, -12, -0.5, 3}, Relation::Le, 0},
                         {{0, 0, 1, 0}, Relation::Le, 1}},
                        {},
                        {}};
    r = solve_lp(beale);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(1.25));
}
