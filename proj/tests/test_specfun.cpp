#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ggbm/specfun.hpp"
#include "support/quad.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace ggbm;

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt_pi = std::sqrt(pi);
}  // namespace

TEST_CASE("log_gamma matches classical values") {
  REQUIRE_THAT(log_gamma(1.0), WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(log_gamma(0.5), WithinRel(std::log(sqrt_pi), 1e-13));
  REQUIRE_THAT(log_gamma(10.0), WithinRel(std::log(362880.0), 1e-13));
  REQUIRE_THROWS_AS(log_gamma(0.0), std::domain_error);
  REQUIRE_THROWS_AS(log_gamma(-3.2), std::domain_error);
}

TEST_CASE("log_gamma keeps Gamma accurate over [1e-3, 200]") {
  // relative error of Gamma itself below 1e-12 <=> absolute error of
  // log Gamma below ~1e-12
  for (double x : {1e-3, 0.02, 0.5, 1.0, 2.5, 7.3, 41.0, 123.0, 200.0}) {
    // Gauss multiplication-free cross-check: Gamma(x+1) = x * Gamma(x)
    const double lhs = log_gamma(x + 1.0);
    const double rhs = std::log(x) + log_gamma(x);
    REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-12 * std::max(1.0, std::abs(lhs))));
  }
}

TEST_CASE("recip_gamma point values") {
  REQUIRE(recip_gamma(0.0) == 0.0);
  REQUIRE(recip_gamma(-1.0) == 0.0);
  REQUIRE(recip_gamma(-2.0) == 0.0);
  REQUIRE(recip_gamma(-63.0) == 0.0);
  REQUIRE_THAT(recip_gamma(1.0), WithinRel(1.0, 1e-14));
  // Gamma(-1/2) = -2 sqrt(pi) via the recurrence from Gamma(1/2)
  REQUIRE_THAT(recip_gamma(-0.5), WithinRel(-1.0 / (2.0 * sqrt_pi), 1e-13));
}

TEST_CASE("recip_gamma is the reciprocal of Gamma on the positive axis") {
  for (double x : {0.1, 0.5, 1.5, 7.3}) {
    const double prod = recip_gamma(x) * std::exp(log_gamma(x));
    REQUIRE_THAT(prod, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("recip_gamma reflection identity at the series arguments") {
  // 1/Gamma(1-b-b n) = sin(pi (b+b n)) Gamma(b+b n) / pi. The naive sin on
  // the right carries roundoff ~eps * y amplified by Gamma(y); near the
  // poles (where the true value is 0) that floor dominates the comparison.
  for (double beta : {0.3, 0.5, 0.7}) {
    for (int n = 0; n <= 20; ++n) {
      const double lhs = recip_gamma(1.0 - beta - beta * n);
      const double y = beta + beta * n;
      const double gamma_y = std::exp(std::lgamma(y));
      const double rhs = std::sin(pi * y) * gamma_y / pi;
      const double tol = 1e-10 * std::max(std::abs(lhs), std::abs(rhs)) +
                         20.0 * 2.22e-16 * y * gamma_y;
      REQUIRE_THAT(lhs, WithinAbs(rhs, tol));
    }
  }
}

TEST_CASE("recip_gamma hits exact zeros at representable pole arguments") {
  // beta = 0.5, n = 1: 1 - 0.5 - 0.5 = 0 exactly in floating point
  REQUIRE(recip_gamma(1.0 - 0.5 - 0.5 * 1) == 0.0);
  // beta = 0.25, n = 7: 1 - 0.25 - 1.75 = -1 exactly
  REQUIRE(recip_gamma(1.0 - 0.25 - 0.25 * 7) == 0.0);
}

TEST_CASE("mwright at x = 0 reduces to the n = 0 term") {
  const MWrightEval half(0.5);
  REQUIRE_THAT(half(0.0), WithinRel(1.0 / sqrt_pi, 1e-12));
  const MWrightEval quarter(0.25);
  // 1/Gamma(0.75) = 0.81604895...
  REQUIRE_THAT(quarter(0.0), WithinRel(std::exp(-log_gamma(0.75)), 1e-12));
}

TEST_CASE("mwright for beta = 1/2 matches exp(-x^2/4)/sqrt(pi)") {
  const MWrightEval half(0.5);
  REQUIRE_THAT(half(2.0), WithinRel(std::exp(-1.0) / sqrt_pi, 1e-10));
  for (double x = 0.0; x <= 8.0 + 1e-12; x += 0.05) {
    const double ref = std::exp(-x * x / 4.0) / sqrt_pi;
    REQUIRE_THAT(half(x), WithinRel(ref, 1e-8));
  }
}

TEST_CASE("mwright is nonnegative on a dense grid") {
  for (double beta : {0.25, 0.5, 0.75}) {
    const MWrightEval eval(beta);
    for (double x = 0.0; x <= 20.0 + 1e-12; x += 0.05) {
      REQUIRE(eval(x) >= 0.0);
    }
  }
}

TEST_CASE("mwright branches agree at the crossover") {
  for (double beta : {0.3, 0.5, 0.6}) {
    const MWrightEval eval(beta);
    const double x = eval.crossover_x();
    const double s = eval.series(x);
    const double a = eval.asymptotic(x);
    CAPTURE(beta, x, s, a);
    REQUIRE_THAT(a / s, WithinAbs(1.0, 0.01));
  }
}

TEST_CASE("mwright normalizes to 1 (quadrature + asymptotic tail)") {
  for (double beta : {0.3, 0.5, 0.7}) {
    const MWrightEval eval(beta);
    const double x_split = eval.crossover_x();
    const double head = testsupport::integrate(
        [&](double x) { return eval(x); }, 0.0, x_split, 1e-11);
    const double tail = testsupport::integrate_to_inf(
        [&](double x) { return eval(x); }, x_split, 1e-11);
    CAPTURE(beta, x_split, head, tail);
    REQUIRE_THAT(head + tail, WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("mwright series signals when the stopping rule cannot be met") {
  // crossover forced far beyond the series' usable range
  const MWrightEval eval(0.5, 40.0, 1e-14);
  REQUIRE_THROWS_AS(eval(30.0), accuracy_error);
}

TEST_CASE("mwright_log_asymptotic exact values") {
  REQUIRE_THAT(mwright_log_asymptotic(0.5, 4.0), WithinRel(-4.0, 1e-14));
  REQUIRE_THAT(mwright_log_asymptotic(0.5, 2.0), WithinRel(-1.0, 1e-14));
  for (double beta : {0.2, 0.5, 0.8}) {
    const double x = 1.0 / beta;  // beta * x = 1
    REQUIRE_THAT(mwright_log_asymptotic(beta, x),
                 WithinRel(-(1.0 - beta) / beta, 1e-12));
  }
}

TEST_CASE("mwright_moment closed form and quadrature agree") {
  REQUIRE_THAT(mwright_moment(0.5, 0), WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(mwright_moment(0.5, 1), WithinRel(2.0 / sqrt_pi, 1e-13));
  REQUIRE_THAT(mwright_moment(0.5, 2), WithinRel(2.0, 1e-13));
  for (double beta : {0.25, 0.5, 0.75}) {
    const MWrightEval eval(beta);
    const double x_split = eval.crossover_x();
    for (int n : {0, 1, 2}) {
      const auto f = [&](double x) { return std::pow(x, n) * eval(x); };
      const double quad = testsupport::integrate(f, 0.0, x_split, 1e-11) +
                          testsupport::integrate_to_inf(f, x_split, 1e-11);
      CAPTURE(beta, n, quad);
      REQUIRE_THAT(quad, WithinRel(mwright_moment(beta, n), 1e-5));
    }
  }
}

TEST_CASE("mittag_leffler classical special cases") {
  REQUIRE_THAT(mittag_leffler({1.0, 1.0}, 1.0), WithinRel(std::exp(1.0), 1e-12));
  REQUIRE_THAT(mittag_leffler({2.0, 1.0}, 4.0), WithinRel(std::cosh(2.0), 1e-12));
  REQUIRE_THAT(mittag_leffler({0.5, 0.5}, 0.0), WithinRel(1.0 / sqrt_pi, 1e-12));
  for (double z = 0.0; z <= 10.0 + 1e-12; z += 0.25) {
    REQUIRE_THAT(mittag_leffler({1.0, 1.0}, z), WithinRel(std::exp(z), 1e-10));
    REQUIRE_THAT(mittag_leffler({2.0, 1.0}, z),
                 WithinRel(std::cosh(std::sqrt(z)), 1e-10));
  }
}

TEST_CASE("mittag_leffler guards") {
  REQUIRE_THROWS_AS(mittag_leffler({1.0, 1.0}, 800.0), std::overflow_error);
  REQUIRE_THROWS_AS(mittag_leffler({-1.0, 1.0}, 1.0), std::domain_error);
  REQUIRE_THROWS_AS(mittag_leffler({1.0, 0.0}, 1.0), std::domain_error);
}

TEST_CASE("mwright rejects bad parameters") {
  REQUIRE_THROWS_AS(MWrightEval(1.0), std::domain_error);
  REQUIRE_THROWS_AS(MWrightEval(0.0), std::domain_error);
  REQUIRE_THROWS_AS(MWrightEval(0.5, -1.0, 1e-14), std::domain_error);
  const MWrightEval eval(0.5);
  REQUIRE_THROWS_AS(eval(-0.1), std::domain_error);
  REQUIRE_THROWS_AS(mwright_moment(0.5, -1), std::domain_error);
  REQUIRE_THROWS_AS(mwright_moment(1.5, 1), std::domain_error);
}
