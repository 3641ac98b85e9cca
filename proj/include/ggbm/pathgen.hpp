#pragma once
// Exact-in-law sampling of fBm on a uniform grid over [0,1] (circulant
// embedding of fractional Gaussian noise, Davies-Harte style), the one-sided
// stable variable S_beta, the subordination variable L_beta = S_beta^{-beta},
// and ggBm paths sqrt(L_beta) * fBm.
//
// Every path owns its RngStream (stream_id = base + path index), so the
// output is bit-identical for any worker count.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ggbm/errors.hpp"
#include "ggbm/fft.hpp"
#include "ggbm/parallel.hpp"
#include "ggbm/rng.hpp"

namespace ggbm {

// ggBm parameter pair; the Hurst index of the Gaussian factor is alpha/2.
struct ProcessParams {
  double alpha = 1.0;
  double beta = 1.0;

  double hurst() const { return 0.5 * alpha; }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 2.0))
      throw std::domain_error("ProcessParams: alpha must lie in (0,2)");
    if (!(beta > 0.0 && beta <= 1.0))
      throw std::domain_error("ProcessParams: beta must lie in (0,1]");
  }
};

// Sampled paths on the grid t_i = i/n_steps, i = 0..n_steps. Row-major,
// one row per path; column 0 is always 0.
class PathGrid {
 public:
  PathGrid(std::size_t n_steps, std::size_t n_paths)
      : n_steps_(n_steps), n_paths_(n_paths),
        values_(n_paths * (n_steps + 1), 0.0) {
    if (n_steps == 0 || n_paths == 0)
      throw std::invalid_argument("PathGrid: empty grid");
  }

  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_paths() const { return n_paths_; }
  std::size_t n_points() const { return n_steps_ + 1; }
  double t(std::size_t j) const {
    return static_cast<double>(j) / static_cast<double>(n_steps_);
  }

  std::span<double> row(std::size_t i) {
    return {values_.data() + i * n_points(), n_points()};
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_points(), n_points()};
  }

  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_steps_;
  std::size_t n_paths_;
  std::vector<double> values_;
};

inline std::size_t next_pow2(std::size_t n) {
  return std::bit_ceil(n);
}

// One draw of the one-sided beta-stable variable S_beta, normalized by
// E[exp(-s S_beta)] = exp(-s^beta). Kanter's uniform-exponential
// representation with Zolotarev's function, evaluated in logs:
//   S = (A(U)/E)^((1-beta)/beta),  U uniform on (0,pi), E ~ Exp(1),
//   A(u) = sin(beta u)^(beta/(1-beta)) sin((1-beta)u) / sin(u)^(1/(1-beta)).
inline double stable_oneside_sample(double beta, RngStream& rng) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("stable_oneside_sample: beta must lie in (0,1)");
  const double u = std::numbers::pi * rng.uniform_open();
  const double e = rng.exponential_pos();
  const double log_a = (beta * std::log(std::sin(beta * u)) +
                        (1.0 - beta) * std::log(std::sin((1.0 - beta) * u)) -
                        std::log(std::sin(u))) /
                       (1.0 - beta);
  return std::exp((1.0 - beta) / beta * (log_a - std::log(e)));
}

// One draw of L_beta, whose density is the M-Wright function M_beta.
// Realized as S_beta^{-beta}; validated against the M-Wright moments
// n!/Gamma(1+beta*n) and the quadrature cdf in the test suite.
inline double lbeta_sample(double beta, RngStream& rng) {
  return std::pow(stable_oneside_sample(beta, rng), -beta);
}

// Per-path fBm generator for a fixed (hurst, n_steps). Default backend is
// circulant embedding of the fGn covariance (one length-2n complex FFT per
// path); eigenvalues below -1e-10 * max trigger the dense square-root
// fallback, tiny negatives are clamped to zero.
class FbmGenerator {
 public:
  enum class Backend { Auto, Circulant, Dense };

  FbmGenerator(double hurst, std::size_t n_steps,
               Backend backend = Backend::Auto)
      : hurst_(hurst), n_(next_pow2(n_steps)) {
    if (!(hurst > 0.0 && hurst < 1.0))
      throw std::domain_error("FbmGenerator: hurst must lie in (0,1)");
    if (n_steps == 0)
      throw std::invalid_argument("FbmGenerator: n_steps must be positive");
    scale_ = std::pow(static_cast<double>(n_), -hurst_);
    if (backend == Backend::Dense) {
      build_dense();
      return;
    }
    if (!build_circulant() ) {
      if (backend == Backend::Circulant)
        throw embedding_error(
            "FbmGenerator: circulant embedding has inadmissible eigenvalues");
      build_dense();
    }
  }

  double hurst() const { return hurst_; }
  std::size_t n_steps() const { return n_; }  // after power-of-two round-up
  bool uses_dense() const { return spec_scale_.empty(); }

  // Fills out (size n_steps()+1) with one path, out[0] = 0. Consumes a fixed
  // number of draws from rng in a fixed order.
  void sample_path(RngStream& rng, std::span<double> out) const {
    if (out.size() != n_ + 1)
      throw std::invalid_argument("FbmGenerator: bad output span size");
    if (uses_dense())
      sample_dense(rng, out);
    else
      sample_circulant(rng, out);
  }

 private:
  // fGn covariance at integer lag k for unit-spacing increments.
  double fgn_cov(std::size_t k) const {
    const double kk = static_cast<double>(k);
    const double h2 = 2.0 * hurst_;
    if (k == 0) return 1.0;
    return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) +
                  std::pow(kk - 1.0, h2));
  }

  bool build_circulant() {
    const std::size_t m = 2 * n_;
    std::vector<std::complex<double>> c(m);
    for (std::size_t k = 0; k <= n_; ++k) c[k] = fgn_cov(k);
    for (std::size_t k = 1; k < n_; ++k) c[m - k] = c[k];
    Dft dft(m);
    dft.forward(c.data());
    double max_ev = 0.0, min_ev = 0.0;
    for (const auto& z : c) {
      max_ev = std::max(max_ev, z.real());
      min_ev = std::min(min_ev, z.real());
    }
    if (min_ev < -1e-10 * max_ev) return false;
    spec_scale_.resize(m);
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t k = 0; k < m; ++k) {
      const double ev = std::max(0.0, c[k].real());  // clamp round-off
      const double half = (k == 0 || k == n_) ? 1.0 : 0.5;
      spec_scale_[k] = std::sqrt(ev * half) * inv_sqrt_m;
    }
    dft_ = std::make_shared<Dft>(m);
    return true;
  }

  void build_dense() {
    Eigen::MatrixXd cov(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            fgn_cov(i > j ? i - j : j - i);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw embedding_error(
          "FbmGenerator: dense covariance factorization failed");
    chol_ = llt.matrixL();
    spec_scale_.clear();
  }

  void sample_circulant(RngStream& rng, std::span<double> out) const {
    const std::size_t m = 2 * n_;
    std::vector<std::complex<double>> v(m);
    v[0] = spec_scale_[0] * rng.normal();
    v[n_] = spec_scale_[n_] * rng.normal();
    for (std::size_t k = 1; k < n_; ++k) {
      const double g = rng.normal();
      const double h = rng.normal();
      v[k] = spec_scale_[k] * std::complex<double>(g, h);
      v[m - k] = std::conj(v[k]);
    }
    dft_->forward(v.data());
    out[0] = 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      acc += v[j].real();
      out[j + 1] = scale_ * acc;
    }
  }

  void sample_dense(RngStream& rng, std::span<double> out) const {
    Eigen::VectorXd z(n_);
    for (std::size_t i = 0; i < n_; ++i)
      z(static_cast<Eigen::Index>(i)) = rng.normal();
    Eigen::VectorXd w = chol_ * z;
    out[0] = 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      acc += w(static_cast<Eigen::Index>(j));
      out[j + 1] = scale_ * acc;
    }
  }

  double hurst_;
  std::size_t n_;
  double scale_;
  std::vector<double> spec_scale_;  // sqrt(lambda_k * half / m); empty => dense
  std::shared_ptr<Dft> dft_;
  Eigen::MatrixXd chol_;
};

// n_paths independent fBm rows; the exact finite-dimensional law on the grid.
// Non-power-of-two n_steps are rounded up (the returned grid reflects that).
inline PathGrid fbm_sample(double hurst, std::size_t n_steps,
                           std::size_t n_paths, const RngStream& base,
                           unsigned workers = 0) {
  FbmGenerator gen(hurst, n_steps);
  PathGrid grid(gen.n_steps(), n_paths);
  parallel_chunks(n_paths, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RngStream rng(base.seed(), base.stream_id() + i);
      gen.sample_path(rng, grid.row(i));
    }
  });
  return grid;
}

// ggBm rows sqrt(L) * fBm via the subordination representation; one L per
// path, independent of the Gaussian factor. Requires beta < 1 (use
// fbm_sample for the fBm limit).
inline PathGrid ggbm_sample(const ProcessParams& params, std::size_t n_steps,
                            std::size_t n_paths, const RngStream& base,
                            unsigned workers = 0) {
  params.validate();
  if (!(params.beta < 1.0))
    throw std::domain_error(
        "ggbm_sample: beta must be < 1; for beta = 1 sample fBm directly");
  FbmGenerator gen(params.hurst(), n_steps);
  PathGrid grid(gen.n_steps(), n_paths);
  parallel_chunks(n_paths, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RngStream rng(base.seed(), base.stream_id() + i);
      const double l = lbeta_sample(params.beta, rng);
      auto row = grid.row(i);
      gen.sample_path(rng, row);
      const double s = std::sqrt(l);
      for (double& v : row) v *= s;
    }
  });
  return grid;
}

}  // namespace ggbm
