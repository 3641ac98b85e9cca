#pragma once
// Small statistics helpers shared by the test suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace testsupport {

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (const double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

inline double stderr_of_mean(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

// Kolmogorov-Smirnov distance between sorted samples and a reference cdf.
inline double ks_distance(std::span<const double> sorted,
                          const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

}  // namespace testsupport
