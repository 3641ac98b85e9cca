#pragma once
// Special functions for subordinated-Gaussian process work: log-gamma,
// reciprocal gamma on the whole real line, the M-Wright density M_beta, and
// the two-parameter Mittag-Leffler function. Plain double precision
// throughout; the M-Wright evaluator switches from the defining series to a
// calibrated asymptotic branch once cancellation starts eating digits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ggbm/errors.hpp"

namespace ggbm {

// ln Gamma(x), x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0))
    throw std::domain_error("log_gamma: argument must be positive, got " +
                            std::to_string(x));
  return std::lgamma(x);
}

namespace detail {

// sin(pi*x) with the reduction done on x itself, so the result stays
// accurate near integer x where sin(pi*x) vanishes.
inline double sin_pi(double x) {
  double r = std::remainder(x, 2.0);  // x - r is an exact multiple of 2
  if (r > 0.5)
    r = 1.0 - r;
  else if (r < -0.5)
    r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

}  // namespace detail

// 1/Gamma(x) for arbitrary real x. Poles of Gamma (x = 0, -1, -2, ...) map to
// an exact 0.0. For x <= 0 the value comes from Euler's reflection formula in
// the form 1/Gamma(x) = sin(pi*(1-x)) * Gamma(1-x) / pi, which never
// evaluates Gamma at a nonpositive argument.
inline double recip_gamma(double x) {
  if (x > 0.0) return std::exp(-std::lgamma(x));
  if (x == std::floor(x)) return 0.0;
  const double s = detail::sin_pi(1.0 - x);
  const double lg = std::lgamma(1.0 - x);  // 1 - x >= 1 here
  if (lg > 700.0) {
    // Gamma(1-x) alone would overflow; combine in log space.
    const double v = lg + std::log(std::abs(s) / std::numbers::pi);
    return std::copysign(std::exp(v), s);
  }
  return s / std::numbers::pi * std::exp(lg);
}

// Leading exponent of M_beta at large x, with no prefactor:
//   -((1-beta)/beta) * (beta*x)^(1/(1-beta)).
inline double mwright_log_asymptotic(double beta, double x) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("mwright_log_asymptotic: beta must lie in (0,1)");
  return -((1.0 - beta) / beta) * std::pow(beta * x, 1.0 / (1.0 - beta));
}

namespace detail {

struct MWrightSeriesSum {
  double value = 0.0;    // raw partial sum (not clamped)
  double sum_abs = 0.0;  // sum of |terms|; gauges cancellation
  int terms = 0;
  bool converged = false;
};

inline constexpr int mwright_series_max_terms = 400;

// Effective unit roundoff for one series term. Terms carry an exp(lgamma)
// factor whose relative error grows with |lgamma|, so this is well above
// machine epsilon.
inline constexpr double mwright_series_eps = 2e-14;

// Sum_{n>=0} (-x)^n / (n! Gamma(1-beta-beta*n)), each reciprocal gamma via
// the reflection form above. Stops once `quiet_needed` consecutive terms are
// below tol*|partial sum|; a single-term test is unsafe because the
// reciprocal-gamma zeros make individual terms vanish.
inline MWrightSeriesSum mwright_series(double beta, double x, double tol,
                                       int quiet_needed = 3) {
  MWrightSeriesSum r;
  double pw = 1.0;  // (-x)^n / n!
  int quiet = 0;
  for (int n = 0; n <= mwright_series_max_terms; ++n) {
    if (pw == 0.0) {  // power/factorial underflow: all remaining terms vanish
      r.converged = true;
      break;
    }
    const double term = pw * recip_gamma(1.0 - beta - beta * n);
    r.value += term;
    r.sum_abs += std::abs(term);
    ++r.terms;
    if (n >= 1) {
      quiet = (std::abs(term) < tol * std::abs(r.value)) ? quiet + 1 : 0;
      if (quiet >= quiet_needed) {
        r.converged = true;
        break;
      }
    }
    pw *= -x / (n + 1);
  }
  if (!std::isfinite(r.value)) r.converged = false;
  return r;
}

// Estimated relative error of the partial sum from accumulated roundoff.
inline double mwright_series_relerr(const MWrightSeriesSum& s) {
  if (!(std::abs(s.value) > 0.0)) return std::numeric_limits<double>::infinity();
  return mwright_series_eps * s.sum_abs / std::abs(s.value);
}

}  // namespace detail

// Evaluation policy and cached calibration for M_beta at one value of beta.
//
// The defining series is used on [0, crossover_x]. Beyond the crossover the
// leading-order asymptotic exp(-((1-beta)/beta)(beta x)^(1/(1-beta))) is used
// with the power-law prefactor A * x^((beta-1/2)/(1-beta)); A is fitted once
// by matching the series branch at the largest abscissa where the series
// still carries ~9 accurate digits. The default crossover extends past that
// point while the estimated series roundoff stays below half the measured
// series/asymptotic disagreement, i.e. the hand-off happens where the two
// branches are about equally accurate.
class MWrightEval {
 public:
  explicit MWrightEval(double beta, double series_tol = 1e-14)
      : beta_(beta), tol_(series_tol) {
    validate();
    calibrate();
    crossover_ = default_crossover();
  }

  MWrightEval(double beta, double crossover_x, double series_tol)
      : beta_(beta), tol_(series_tol), crossover_(crossover_x) {
    validate();
    if (!(crossover_x > 0.0))
      throw std::domain_error("MWrightEval: crossover_x must be positive");
    calibrate();
  }

  double beta() const { return beta_; }
  double crossover_x() const { return crossover_; }
  double series_tol() const { return tol_; }

  // M_beta(x); series branch below the crossover, asymptotic branch above.
  double operator()(double x) const {
    if (!(x >= 0.0))
      throw std::domain_error("MWrightEval: argument must be nonnegative");
    if (x <= crossover_) return std::max(0.0, series(x));
    return asymptotic(x);
  }

  // Series branch regardless of the crossover. Throws accuracy_error when
  // the stopping rule is not met within the term cap (the symptom of a
  // crossover_x set too large for this beta).
  double series(double x) const {
    const auto s = detail::mwright_series(beta_, x, tol_);
    if (!s.converged)
      throw accuracy_error(
          "mwright: series stopping rule not met within " +
          std::to_string(detail::mwright_series_max_terms) +
          " terms at x = " + std::to_string(x) +
          " (crossover_x too large for beta = " + std::to_string(beta_) + ")");
    return s.value;
  }

  // Calibrated asymptotic branch A * x^a * exp(log_asymptotic).
  double asymptotic(double x) const {
    const double a = (beta_ - 0.5) / (1.0 - beta_);
    return prefactor_ * std::pow(x, a) *
           std::exp(mwright_log_asymptotic(beta_, x));
  }

 private:
  void validate() const {
    if (!(beta_ > 0.0 && beta_ < 1.0))
      throw std::domain_error("MWrightEval: beta must lie in (0,1)");
    if (!(tol_ > 0.0))
      throw std::domain_error("MWrightEval: series_tol must be positive");
  }

  // True when the series at x converges and its estimated roundoff is below
  // `relerr`.
  bool series_ok(double x, double relerr) const {
    const auto s = detail::mwright_series(beta_, x, tol_);
    return s.converged && s.value > 0.0 &&
           detail::mwright_series_relerr(s) <= relerr;
  }

  void calibrate() {
    // Largest x with ~1e-9 series accuracy, by bisection.
    double lo = 0.25, hi = 64.0;
    if (series_ok(hi, 1e-9)) {
      anchor_ = hi;
    } else {
      while (!series_ok(lo, 1e-9)) lo *= 0.5;  // beta near 1 shrinks the range
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (series_ok(mid, 1e-9) ? lo : hi) = mid;
      }
      anchor_ = lo;
    }
    const double a = (beta_ - 0.5) / (1.0 - beta_);
    const double shape =
        std::pow(anchor_, a) * std::exp(mwright_log_asymptotic(beta_, anchor_));
    prefactor_ = series(anchor_) / shape;
  }

  double default_crossover() const {
    // Extend past the calibration anchor while the series roundoff estimate
    // stays below half the series/asymptotic disagreement (the measurable
    // proxy for the asymptotic branch's own error), capped at ~3 digits lost.
    double x = anchor_;
    for (;;) {
      const double next = x * 1.04;
      if (next > 64.0) break;
      const auto s = detail::mwright_series(beta_, next, tol_);
      if (!s.converged || !(s.value > 0.0)) break;
      const double err = detail::mwright_series_relerr(s);
      const double disagree = std::abs(asymptotic(next) / s.value - 1.0);
      if (err > 3e-3 || err > std::max(1e-9, 0.5 * disagree)) break;
      x = next;
    }
    return x;
  }

  double beta_;
  double tol_;
  double crossover_ = 0.0;
  double anchor_ = 0.0;     // calibration abscissa for the prefactor
  double prefactor_ = 0.0;  // A in the asymptotic branch
};

inline double mwright(const MWrightEval& eval, double x) { return eval(x); }

struct MittagLefflerParams {
  double u;
  double v;
};

// E_{u,v}(z) = sum_{n>=0} z^n / Gamma(u*n + v) by direct summation, with the
// same consecutive-quiet-terms stopping rule as the M-Wright series. The
// overflow guard rejects z whose leading behaviour exp(z^{1/u}) exceeds the
// double range.
inline double mittag_leffler(const MittagLefflerParams& p, double z) {
  if (!(p.u > 0.0) || !(p.v > 0.0))
    throw std::domain_error("mittag_leffler: u and v must be positive");
  if (z > 1.0 && std::pow(z, 1.0 / p.u) > 690.0)
    throw std::overflow_error("mittag_leffler: argument beyond overflow guard");
  double sum = 0.0;
  double zn = 1.0;  // z^n
  int quiet = 0;
  for (int n = 0; n <= detail::mwright_series_max_terms; ++n) {
    const double term = zn * recip_gamma(p.u * n + p.v);
    sum += term;
    if (n >= 1) {
      quiet = (std::abs(term) < 1e-14 * std::abs(sum)) ? quiet + 1 : 0;
      if (quiet >= 3) return sum;
    }
    zn *= z;
  }
  throw accuracy_error("mittag_leffler: series did not settle within " +
                       std::to_string(detail::mwright_series_max_terms) +
                       " terms");
}

// n-th moment of the M-Wright density: n! / Gamma(1 + beta*n).
inline double mwright_moment(double beta, int n) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("mwright_moment: beta must lie in (0,1)");
  if (n < 0) throw std::domain_error("mwright_moment: order must be >= 0");
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(1.0 + beta * n));
}

}  // namespace ggbm
