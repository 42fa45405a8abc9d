#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ballmax/integrand.hpp"
#include "oracles.hpp"

using namespace ballmax;

TEST_CASE("family names round-trip") {
  CHECK(family_name(Family::PowerDecay) == "power_decay");
  CHECK(family_name(Family::LinearCutoff) == "linear_cutoff");
  CHECK(family_name(Family::Exponential) == "exponential");
  CHECK(family_name(Family::Tabulated) == "tabulated");
}

TEST_CASE("built-in families evaluate to closed forms") {
  const Integrand pd = Integrand::power_decay(2.0, 2.0, 1.0, 2.0, 1);
  CHECK(pd(1.0, 0.5) == doctest::Approx(0.0625).epsilon(1e-15));

  const Integrand ex = Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1);
  CHECK(ex(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ex(2.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  const Integrand lc = Integrand::linear_cutoff(1.0, 2.0, 1.0, 2.0, 1);
  CHECK(lc(0.25, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(lc(2.0, 1.0) == 0.0);  // cutoff region is exactly zero
}

TEST_CASE("checked evaluation rejects out-of-domain arguments") {
  const Integrand ex = Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1);
  CHECK(eval(ex, 1.0, 0.5) == ex(1.0, 0.5));
  CHECK_THROWS_AS(eval(ex, -0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(eval(ex, 1.0, -0.1), std::domain_error);
  CHECK_THROWS_AS(eval(ex, 1.0, 1.5), std::domain_error);
}

TEST_CASE("factory validation") {
  CHECK_THROWS_AS(Integrand::power_decay(0.0, 2.0, 1.0, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Integrand::exponential(1.0, 2.0, -1.0, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Integrand::exponential(1.0, 2.0, 1.0, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(Integrand::exponential(1.0, 2.0, 1.0, 2.0, 4), std::invalid_argument);
}

TEST_CASE("tabulated integrand: bilinear interpolation and validation") {
  std::vector<Real> rk{0.0, 1.0, 2.0}, sk{0.0, 0.5, 1.0};
  MatrixXr table(3, 3);
  table << 0.0, 0.5, 1.0,
           0.0, 0.25, 0.5,
           0.0, 0.125, 0.25;
  const Integrand T = Integrand::tabulated(rk, sk, table, 1.0, 2.0, 1);
  CHECK(T(0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(T(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  // center of the first cell: average of the four corners
  CHECK(T(0.5, 0.25) == doctest::Approx(0.25 * (0.0 + 0.5 + 0.0 + 0.25)).epsilon(1e-15));
  // clamped outside the knot range
  CHECK(T(5.0, 1.0) == doctest::Approx(0.25).epsilon(1e-15));

  MatrixXr bad = table;
  bad(0, 0) = 0.1;  // F(r, 0) must vanish
  CHECK_THROWS_AS(Integrand::tabulated(rk, sk, bad, 1.0, 2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Integrand::tabulated(rk, {0.0, 0.5, 0.9}, table, 1.0, 2.0, 1),
                  std::invalid_argument);
}

TEST_CASE("monotone decrease in r: passes for the built-ins, catches violations") {
  const ArrayXr r = ArrayXr::LinSpaced(41, 0.0, 4.0);
  const ArrayXr s = ArrayXr::LinSpaced(9, 0.0, 1.0);

  for (const Integrand& F : {Integrand::power_decay(2.0, 2.0, 1.0, 2.0, 1),
                             Integrand::linear_cutoff(1.0, 2.0, 1.0, 2.0, 1),
                             Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1)}) {
    const H1Result res = check_h1(F, r, s);
    CHECK(res.pass);
    CHECK(res.worst_violation == 0.0);
  }

  // strict decrease at s = a holds for smooth families, not past a cutoff
  CHECK(check_h1(Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1), r, s).strict_decrease);
  CHECK_FALSE(check_h1(Integrand::linear_cutoff(1.0, 2.0, 1.0, 2.0, 1), r, s).strict_decrease);

  // a table increasing in r must be flagged
  MatrixXr up(2, 2);
  up << 0.0, 1.0,
        0.0, 2.0;
  const Integrand bad = Integrand::tabulated({0.0, 1.0}, {0.0, 1.0}, up, 1.0, 2.0, 1);
  const H1Result res = check_h1(bad, r, s);
  CHECK_FALSE(res.pass);
  CHECK(res.worst_violation > 0.09);
}

TEST_CASE("scaling bound in s: q >= p passes, q < p fails with quantified worst case") {
  const ArrayXr r = ArrayXr::LinSpaced(21, 0.0, 4.0);
  const ArrayXr lam = ArrayXr::LinSpaced(11, 0.0, 1.0);

  CHECK(check_condition(Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1), r, lam).pass);
  CHECK(check_condition(Integrand::exponential(1.0, 3.0, 1.0, 2.0, 1), r, lam).pass);

  const ConditionResult bad =
      check_condition(Integrand::exponential(1.0, 1.0, 1.0, 2.0, 1), r, lam);
  CHECK_FALSE(bad.pass);
  // worst over the grid is lambda - lambda^2 at lambda = 1/2, r = 0
  CHECK(bad.worst_violation == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(
      check_condition(Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1), r,
                      ArrayXr::LinSpaced(5, 0.1, 0.9)),
      std::invalid_argument);
}

TEST_CASE("decrease modulus estimate") {
  // linear cutoff has difference quotient exactly 1 inside [0, c]
  const Integrand lc = Integrand::linear_cutoff(1.0, 2.0, 1.0, 2.0, 1);
  CHECK(estimate_lambda(lc, ArrayXr::LinSpaced(17, 0.0, 1.0)) == 1.0);
  // beyond the cutoff the flat tail kills the estimate
  CHECK(estimate_lambda(lc, ArrayXr::LinSpaced(17, 0.0, 2.0)) == 0.0);

  // exponential: the smallest quotient sits on the last subinterval
  const Integrand ex = Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1);
  const Real lam = estimate_lambda(ex, ArrayXr::LinSpaced(2001, 0.0, 2.0));
  const Real h = 0.001;
  CHECK(lam >= std::exp(-2.0));
  CHECK(lam <= std::exp(-2.0) * (std::exp(h) - 1.0) / h * (1.0 + 1e-12));
}

TEST_CASE("product domination with integrable radial factor") {
  const Integrand pd = Integrand::power_decay(2.0, 2.0, 1.0, 2.0, 2);
  const auto [alpha, beta] = canonical_h2_pair(pd);
  const ArrayXr r = ArrayXr::LinSpaced(41, 0.0, 10.0);
  const ArrayXr s = ArrayXr::LinSpaced(9, 0.0, 1.0);
  const H2Result res = check_h2(pd, alpha, beta, r, s);
  CHECK(res.pass);
  CHECK(res.worst_violation == 0.0);
  // int_0^10 (1+r)^{-2} r dr = ln(11) - 10/11
  const Real expected = std::log(11.0) - 10.0 / 11.0;
  CHECK(res.alpha_integral == doctest::Approx(expected).epsilon(1e-10));
  // cross-check via an independent integrator
  const Real ref = oracle::integrate(
      [&](Real rr) { return alpha(rr) * rr; }, 0.0, 10.0);
  CHECK(res.alpha_integral == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("combined hypothesis run") {
  const ArrayXr r = ArrayXr::LinSpaced(101, 0.0, 4.0);

  const HypothesisReport good =
      run_hypothesis_checks(Integrand::exponential(1.0, 2.0, 1.0, 2.0, 1), r);
  CHECK(good.all_pass());
  CHECK(good.lambda_hat > 0.0);
  CHECK(good.lambda_hat >= std::exp(-4.0));

  const HypothesisReport bad =
      run_hypothesis_checks(Integrand::exponential(1.0, 1.0, 1.0, 2.0, 1), r);
  CHECK_FALSE(bad.all_pass());
  CHECK(bad.h1.pass);
  CHECK_FALSE(bad.condition.pass);
}
