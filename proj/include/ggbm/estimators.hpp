#pragma once
// Monte Carlo and semi-analytic estimators for small-ball probabilities,
// negative moments, the small-ball series expansion, and tail-exponent
// regression. All reductions are fixed-order folds over the sorted sample
// set, so results do not depend on generation-time parallelism.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggbm/errors.hpp"
#include "ggbm/norms.hpp"
#include "ggbm/parallel.hpp"
#include "ggbm/pathgen.hpp"
#include "ggbm/rng.hpp"
#include "ggbm/specfun.hpp"

namespace ggbm {

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  bool unreliable = false;  // rare-event estimate backed by < 100 events
};

struct ProcessSpec {
  enum class Kind { Fbm, Ggbm };
  Kind kind = Kind::Fbm;
  double alpha = 1.0;  // 2H
  double beta = 1.0;   // 1 for fBm

  static ProcessSpec fbm(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0))
      throw std::domain_error("ProcessSpec: hurst must lie in (0,1)");
    return {Kind::Fbm, 2.0 * hurst, 1.0};
  }
  static ProcessSpec ggbm(double alpha, double beta) {
    ProcessParams p{alpha, beta};
    p.validate();
    if (!(beta < 1.0))
      throw std::domain_error("ProcessSpec: ggbm requires beta < 1");
    return {Kind::Ggbm, alpha, beta};
  }

  double hurst() const { return 0.5 * alpha; }

  std::string name() const {
    if (kind == Kind::Fbm) return "fbm(hurst=" + std::to_string(hurst()) + ")";
    return "ggbm(alpha=" + std::to_string(alpha) +
           ",beta=" + std::to_string(beta) + ")";
  }
};

// Sorted norm samples of one process/norm pair; the empirical law of the
// path norm.
struct NormSampleSet {
  ProcessSpec process;
  NormSpec norm;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples;  // ascending, all >= 0
};

namespace detail {

// Kahan-compensated accumulator.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace detail

// Generates n_paths paths, applies the norm per path, sorts ascending.
// Paths are streamed (never materialized as a whole grid); one RngStream per
// path derived from the base stream.
inline NormSampleSet norm_samples(const ProcessSpec& process,
                                  const NormSpec& norm, std::size_t n_paths,
                                  std::size_t n_steps, const RngStream& base,
                                  unsigned workers = 0) {
  if (n_paths == 0) throw std::invalid_argument("norm_samples: n_paths == 0");
  norm.theta(process.hurst());  // validates Holder gamma < hurst
  FbmGenerator gen(process.hurst(), n_steps);
  NormSampleSet set;
  set.process = process;
  set.norm = norm;
  set.n_steps = gen.n_steps();
  set.seed = base.seed();
  set.samples.resize(n_paths);
  const bool subordinated = process.kind == ProcessSpec::Kind::Ggbm;
  parallel_chunks(n_paths, workers, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> path(gen.n_steps() + 1);
    for (std::size_t i = lo; i < hi; ++i) {
      RngStream rng(base.seed(), base.stream_id() + i);
      double l = 1.0;
      if (subordinated) l = lbeta_sample(process.beta, rng);
      gen.sample_path(rng, path);
      if (subordinated) {
        const double s = std::sqrt(l);
        for (double& v : path) v *= s;
      }
      set.samples[i] = apply_norm(norm, path);
    }
  });
  std::sort(set.samples.begin(), set.samples.end());
  return set;
}

// Fraction of samples <= x (right-continuous step function).
inline double empirical_cdf(const NormSampleSet& set, double x) {
  if (set.samples.empty())
    throw std::invalid_argument("empirical_cdf: empty sample set");
  const auto it = std::upper_bound(set.samples.begin(), set.samples.end(), x);
  return static_cast<double>(it - set.samples.begin()) /
         static_cast<double>(set.samples.size());
}

// Binomial estimate of P[||.|| <= eps]; flagged unreliable below 100 events.
inline MCEstimate small_ball_mc(const NormSampleSet& set, double eps) {
  if (set.samples.empty())
    throw std::invalid_argument("small_ball_mc: empty sample set");
  const std::size_t n = set.samples.size();
  const std::size_t hits = static_cast<std::size_t>(
      std::upper_bound(set.samples.begin(), set.samples.end(), eps) -
      set.samples.begin());
  MCEstimate e;
  e.value = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
  e.n_samples = n;
  e.seed = set.seed;
  e.unreliable = hits < 100;
  return e;
}

// Binomial estimate of P[||.|| >= y]; flagged unreliable below 100 events.
inline MCEstimate tail_mc(const NormSampleSet& set, double y) {
  if (set.samples.empty())
    throw std::invalid_argument("tail_mc: empty sample set");
  const std::size_t n = set.samples.size();
  const std::size_t hits = static_cast<std::size_t>(
      set.samples.end() -
      std::lower_bound(set.samples.begin(), set.samples.end(), y));
  MCEstimate e;
  e.value = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
  e.n_samples = n;
  e.seed = set.seed;
  e.unreliable = hits < 100;
  return e;
}

struct MixedEstimate {
  MCEstimate estimate;          // stderr covers the L-mixture variance only
  double fbm_bias_bound = 0.0;  // 99% KS band of the fBm empirical cdf
};

// Rao-Blackwellized small-ball estimate for ggBm: the average of
// F_H(eps / sqrt(L_j)) over mixture draws L_j, with F_H the empirical fBm
// cdf. The fBm sampling error enters every L_j the same way, so it is
// reported as a separate bias bound rather than folded into the stderr.
inline MixedEstimate small_ball_mixed_given(const NormSampleSet& fbm_set,
                                            double eps,
                                            std::span<const double> l_draws,
                                            std::uint64_t seed = 0) {
  if (fbm_set.process.kind != ProcessSpec::Kind::Fbm)
    throw std::invalid_argument("small_ball_mixed: need an fBm sample set");
  if (l_draws.empty())
    throw std::invalid_argument("small_ball_mixed: no mixture draws");
  detail::KahanSum sum;
  detail::KahanSum sumsq;
  for (const double l : l_draws) {
    const double f = empirical_cdf(fbm_set, eps / std::sqrt(l));
    sum.add(f);
    sumsq.add(f * f);
  }
  const double n = static_cast<double>(l_draws.size());
  const double mean = sum.value() / n;
  const double var = std::max(0.0, sumsq.value() / n - mean * mean);
  MixedEstimate m;
  m.estimate.value = mean;
  m.estimate.std_error =
      l_draws.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  m.estimate.n_samples = l_draws.size();
  m.estimate.seed = seed;
  m.fbm_bias_bound =
      1.63 / std::sqrt(static_cast<double>(fbm_set.samples.size()));
  return m;
}

inline MixedEstimate small_ball_mixed(const NormSampleSet& fbm_set,
                                      double beta, double eps,
                                      std::size_t n_mix, RngStream& rng) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("small_ball_mixed: beta must lie in (0,1)");
  std::vector<double> draws(n_mix);
  for (double& l : draws) l = lbeta_sample(beta, rng);
  return small_ball_mixed_given(fbm_set, eps, draws, rng.seed());
}

// Negative-moment table eta_k = E[||.||^{-k}] for even k.
struct MomentTable {
  double hurst = 0.0;
  NormSpec norm;
  std::map<int, MCEstimate> entries;  // key: even k >= 2
  std::size_t excluded = 0;           // samples below the 1e-8 floor
};

inline constexpr double neg_moment_sample_floor = 1e-8;

// eta_hat_k = mean of s^{-k} over the sample set for even k = 2..k_max, all
// from the same samples (estimates are correlated across k). Samples below
// 1e-8 are excluded and counted; at sane scales only corrupt data lands
// there.
inline MomentTable neg_moments(const NormSampleSet& fbm_set, int k_max) {
  if (fbm_set.process.kind != ProcessSpec::Kind::Fbm)
    throw std::invalid_argument("neg_moments: need an fBm sample set");
  if (fbm_set.samples.empty())
    throw std::invalid_argument("neg_moments: empty sample set");
  if (k_max < 2 || k_max % 2 != 0)
    throw std::invalid_argument("neg_moments: k_max must be even and >= 2");
  MomentTable table;
  table.hurst = fbm_set.process.hurst();
  table.norm = fbm_set.norm;
  std::vector<double> kept;
  kept.reserve(fbm_set.samples.size());
  for (const double s : fbm_set.samples) {
    if (s < neg_moment_sample_floor)
      ++table.excluded;
    else
      kept.push_back(s);
  }
  if (kept.empty())
    throw insufficient_data_error("neg_moments: every sample excluded");
  const double n = static_cast<double>(kept.size());
  for (int k = 2; k <= k_max; k += 2) {
    detail::KahanSum sum;
    for (const double s : kept) sum.add(std::pow(s, -k));
    const double mean = sum.value() / n;
    detail::KahanSum ss;
    for (const double s : kept) {
      const double d = std::pow(s, -k) - mean;
      ss.add(d * d);
    }
    MCEstimate e;
    e.value = mean;
    e.std_error =
        kept.size() > 1 ? std::sqrt(ss.value() / (n * (n - 1.0))) : 0.0;
    e.n_samples = kept.size();
    e.seed = fbm_set.seed;
    table.entries[k] = e;
  }
  return table;
}

// k * \int_0^infty y^{-k-1} Fhat(y) dy evaluated segment-exactly on the
// empirical step cdf (same sample floor as neg_moments). Algebraically this
// equals the k-th negative moment; the test suite uses the pair as an
// integration-by-parts identity check.
inline double eta_from_cdf_quadrature(const NormSampleSet& set, int k) {
  if (set.samples.empty())
    throw std::invalid_argument("eta_from_cdf_quadrature: empty sample set");
  std::vector<double> kept;
  kept.reserve(set.samples.size());
  for (const double s : set.samples)
    if (s >= neg_moment_sample_floor) kept.push_back(s);
  if (kept.empty())
    throw insufficient_data_error("eta_from_cdf_quadrature: nothing kept");
  const double m = static_cast<double>(kept.size());
  detail::KahanSum acc;
  // On [y_i, y_{i+1}): Fhat = (i+1)/m and k*int y^{-k-1} = y_i^{-k} - y_{i+1}^{-k}.
  for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
    const double lo = std::pow(kept[i], -k);
    const double hi = std::pow(kept[i + 1], -k);
    acc.add((static_cast<double>(i + 1) / m) * (lo - hi));
  }
  acc.add(std::pow(kept.back(), -k));  // Fhat = 1 beyond the last sample
  return acc.value();
}

// Coefficients of the small-ball series
//   P[||.|| <= eps] = sum_n c_n eps^{2n+2},
//   c_n = 2 (-1)^n eta_{2n+2} / ((2n+2) n! Gamma(1-beta-beta*n)).
struct SeriesExpansion {
  double beta = 0.0;
  int order = 0;  // N: coefficients for n = 0..N
  double theta = 0.0;
  enum class Validity { SeriesValid, LeadingOnly };
  Validity validity = Validity::LeadingOnly;
  std::vector<double> coeffs;
  std::vector<double> coeff_errs;  // propagated moment stderr, same sign-free
};

// Builds c_0..c_N from a moment table. Refuses orders whose moment stderr
// exceeds 50% relative (the coefficient would be noise). Validity is
// SeriesValid iff 2/theta + beta < 1 for the table's norm and process.
inline SeriesExpansion series_coefficients(double beta,
                                           const MomentTable& moments,
                                           int order) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("series_coefficients: beta must lie in (0,1)");
  if (order < 0)
    throw std::domain_error("series_coefficients: order must be >= 0");
  SeriesExpansion exp;
  exp.beta = beta;
  exp.order = order;
  exp.theta = moments.norm.theta(moments.hurst);
  exp.validity = (2.0 / exp.theta + beta < 1.0)
                     ? SeriesExpansion::Validity::SeriesValid
                     : SeriesExpansion::Validity::LeadingOnly;
  double fact = 1.0;  // n!
  for (int n = 0; n <= order; ++n) {
    const int k = 2 * n + 2;
    const auto it = moments.entries.find(k);
    if (it == moments.entries.end())
      throw std::invalid_argument("series_coefficients: moment table lacks k=" +
                                  std::to_string(k));
    const MCEstimate& eta = it->second;
    if (!(eta.value > 0.0) || eta.std_error > 0.5 * eta.value)
      throw insufficient_data_error(
          "series_coefficients: eta_" + std::to_string(k) +
          " has > 50% relative stderr; lower the order");
    if (n > 0) fact *= n;
    const double rg = recip_gamma(1.0 - beta - beta * n);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double denom = static_cast<double>(k) * fact;
    exp.coeffs.push_back(sign * (2.0 * (eta.value * rg)) / denom);
    exp.coeff_errs.push_back(std::abs(2.0 * (eta.std_error * rg)) / denom);
  }
  return exp;
}

struct SeriesValue {
  double value = 0.0;
  double std_error = 0.0;  // propagated from the moment stderrs
  int terms_used = 0;
  bool truncated_by_order = false;  // stopped by N, not by the tolerance
};

// Sum of c_n eps^{2n+2}, truncated when two consecutive terms fall below
// tol * |partial sum| or the order runs out. Refuses LeadingOnly expansions
// unless force is set (exploratory use).
inline SeriesValue small_ball_series(const SeriesExpansion& exp, double eps,
                                     double tol = 1e-12, bool force = false) {
  if (!(eps >= 0.0))
    throw std::domain_error("small_ball_series: eps must be >= 0");
  if (exp.validity == SeriesExpansion::Validity::LeadingOnly && !force)
    throw series_validity_error(
        "small_ball_series: expansion is LeadingOnly (2/theta + beta >= 1); "
        "pass force to evaluate anyway");
  SeriesValue out;
  const double e2 = eps * eps;
  double epow = e2;
  int quiet = 0;
  for (std::size_t n = 0; n < exp.coeffs.size(); ++n) {
    const double term = exp.coeffs[n] * epow;
    out.value += term;
    out.std_error += exp.coeff_errs[n] * epow;
    ++out.terms_used;
    quiet = (std::abs(term) <= tol * std::abs(out.value)) ? quiet + 1 : 0;
    if (quiet >= 2) return out;
    epow *= e2;
  }
  out.truncated_by_order = true;
  return out;
}

// Leading-order small-ball law eta_2 * eps^2 / Gamma(1-beta). Bitwise equal
// to an order-0 series evaluation built from the same eta_2.
inline MCEstimate leading_order(const MCEstimate& eta2, double beta,
                                double eps) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("leading_order: beta must lie in (0,1)");
  if (!(eps > 0.0))
    throw std::domain_error("leading_order: eps must be positive");
  const double rg = recip_gamma(1.0 - beta);
  MCEstimate e = eta2;
  e.value = (eta2.value * rg) * (eps * eps);
  e.std_error = (eta2.std_error * rg) * (eps * eps);
  return e;
}

// Tail-exponent regression record: slope of log(-log p) on log y against the
// compressed-exponential target 2/(2-beta). The unknown tail constants are
// absorbed into the intercept.
struct TailFit {
  double beta = 0.0;
  double fitted_exponent = 0.0;
  double target_exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> y_grid;
  std::vector<double> log_neg_log_p;
};

// Fits the tail exponent on the y-range where empirical tail probabilities
// lie in [p_lo, p_hi]. Needs at least 1e5 samples and 5 usable grid points.
inline TailFit tail_exponent_fit(const NormSampleSet& set, double beta,
                                 double p_lo = 1e-4, double p_hi = 1e-1,
                                 std::size_t n_grid = 25) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::domain_error("tail_exponent_fit: beta must lie in (0,1]");
  if (!(p_lo > 0.0 && p_lo < p_hi && p_hi < 1.0))
    throw std::domain_error("tail_exponent_fit: need 0 < p_lo < p_hi < 1");
  if (set.samples.size() < 100000)
    throw std::invalid_argument(
        "tail_exponent_fit: need at least 1e5 samples");
  const std::size_t n = set.samples.size();
  const auto quantile_for_tail = [&](double p) {
    // largest sample with tail probability >= p
    std::size_t idx = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(n) - 1.0,
                         std::floor((1.0 - p) * static_cast<double>(n))));
    return set.samples[idx];
  };
  const double y_lo = quantile_for_tail(p_hi);
  const double y_hi = quantile_for_tail(p_lo);
  TailFit fit;
  fit.beta = beta;
  fit.target_exponent = 2.0 / (2.0 - beta);
  if (!(y_lo > 0.0 && y_hi > y_lo))
    throw insufficient_data_error(
        "tail_exponent_fit: degenerate y-range for the requested window");
  const double log_lo = std::log(y_lo), log_hi = std::log(y_hi);
  for (std::size_t j = 0; j < n_grid; ++j) {
    const double ly =
        log_lo + (log_hi - log_lo) * static_cast<double>(j) /
                     static_cast<double>(n_grid - 1);
    const double y = std::exp(ly);
    const MCEstimate t = tail_mc(set, y);
    if (!(t.value >= p_lo && t.value <= p_hi && t.value < 1.0)) continue;
    fit.y_grid.push_back(y);
    fit.log_neg_log_p.push_back(std::log(-std::log(t.value)));
  }
  if (fit.y_grid.size() < 5)
    throw insufficient_data_error(
        "tail_exponent_fit: fewer than 5 usable grid points in [p_lo, p_hi]");
  // OLS of log(-log p) on log y.
  const std::size_t m = fit.y_grid.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += std::log(fit.y_grid[i]);
    sy += fit.log_neg_log_p[i];
  }
  const double mx = sx / static_cast<double>(m);
  const double my = sy / static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(fit.y_grid[i]) - mx;
    const double dy = fit.log_neg_log_p[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw insufficient_data_error(
        "tail_exponent_fit: no variation across the usable grid points");
  fit.fitted_exponent = sxy / sxx;
  fit.intercept = my - fit.fitted_exponent * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double pred =
        fit.intercept + fit.fitted_exponent * std::log(fit.y_grid[i]);
    const double r = fit.log_neg_log_p[i] - pred;
    ss_res += r * r;
  }
  fit.r_squared = 1.0 - ss_res / syy;
  return fit;
}

// P[sup_{[0,1]} |W| <= eps] for Brownian motion, by the reflection-principle
// theta series
//   (4/pi) sum_{j>=0} (-1)^j/(2j+1) exp(-(2j+1)^2 pi^2 / (8 eps^2)),
// truncated at n_terms; the alternating structure bounds the truncation
// error by the first omitted term.
inline double bm_supnorm_cdf_exact(double eps, int n_terms = 64) {
  if (!(eps > 0.0))
    throw std::domain_error("bm_supnorm_cdf_exact: eps must be positive");
  if (n_terms < 1)
    throw std::domain_error("bm_supnorm_cdf_exact: need at least one term");
  const double a = std::numbers::pi * std::numbers::pi / (8.0 * eps * eps);
  double sum = 0.0;
  for (int j = 0; j < n_terms; ++j) {
    const double q = static_cast<double>(2 * j + 1);
    const double term = ((j % 2 == 0) ? 1.0 : -1.0) / q * std::exp(-q * q * a);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::clamp(4.0 / std::numbers::pi * sum, 0.0, 1.0);
}

// Mittag-Leffler remainder diagnostic for a truncated series, following the
// bound  |remainder| <= 2 eps^{2N+1} \int Fhat(y) y^{-3} B_N(y) dy  with
//   B_N(y) = y^{-2} E_{1-bh,1-bh}(y^{-2}) - sum_{n=1}^N y^{-2n}/Gamma((1-bh)n)
// and bh > beta free; default bh = midpoint of (beta, 1 - 2/theta). The
// integral is taken from the 0.1% quantile upward: below that the empirical
// cdf cannot resolve the superexponential decay the bound relies on.
inline double series_remainder_diagnostic(const SeriesExpansion& exp,
                                          const NormSampleSet& fbm_set,
                                          double eps, double beta_hat = 0.0) {
  if (exp.validity != SeriesExpansion::Validity::SeriesValid)
    throw series_validity_error(
        "series_remainder_diagnostic: requires a SeriesValid expansion");
  if (beta_hat == 0.0) beta_hat = 0.5 * (exp.beta + 1.0 - 2.0 / exp.theta);
  if (!(beta_hat > exp.beta && beta_hat < 1.0))
    throw std::domain_error(
        "series_remainder_diagnostic: beta_hat must lie in (beta, 1)");
  const double u = 1.0 - beta_hat;
  const std::size_t n = fbm_set.samples.size();
  if (n == 0)
    throw std::invalid_argument("series_remainder_diagnostic: empty set");
  double y_lo = fbm_set.samples[n / 1000];
  // keep the Mittag-Leffler argument inside its overflow guard
  y_lo = std::max(y_lo, 1.0001 * std::pow(690.0, -u / 2.0));
  const double y_hi = std::max(fbm_set.samples.back() * 4.0, y_lo * 8.0);
  const auto integrand = [&](double y) {
    double b = std::pow(y, -2.0) *
               mittag_leffler(MittagLefflerParams{u, u}, std::pow(y, -2.0));
    for (int k = 1; k <= exp.order; ++k)
      b -= std::pow(y, -2.0 * k) * recip_gamma(u * k);
    b = std::max(0.0, b);
    return empirical_cdf(fbm_set, y) * std::pow(y, -3.0) * b;
  };
  // composite Simpson on a log grid
  const int segments = 4096;
  const double l0 = std::log(y_lo), l1 = std::log(y_hi);
  double acc = 0.0;
  for (int i = 0; i < segments; ++i) {
    const double a0 = std::exp(l0 + (l1 - l0) * i / segments);
    const double a1 = std::exp(l0 + (l1 - l0) * (i + 1) / segments);
    const double mid = 0.5 * (a0 + a1);
    acc += (a1 - a0) / 6.0 *
           (integrand(a0) + 4.0 * integrand(mid) + integrand(a1));
  }
  return 2.0 * std::pow(eps, 2 * exp.order + 1) * acc;
}

}  // namespace ggbm
