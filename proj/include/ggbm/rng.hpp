#pragma once
// Seeded, addressable random streams. A stream is identified by
// (seed, stream_id); equal identifiers reproduce identical output, distinct
// stream_ids give statistically independent sequences. Monte Carlo code
// assigns one stream per path so that results do not depend on how paths are
// distributed over workers.

#include <cstdint>
#include <random>

namespace ggbm {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed-sequence adapter filling engine state from a splitmix64 chain.
struct SplitMixSeq {
  std::uint64_t state;
  using result_type = std::uint32_t;
  template <class It>
  void generate(It first, It last) {
    std::uint64_t s = state;
    while (first != last) {
      const std::uint64_t v = splitmix64(s);
      *first++ = static_cast<std::uint32_t>(v);
      if (first != last) *first++ = static_cast<std::uint32_t>(v >> 32);
    }
  }
  std::size_t size() const { return 2; }
  template <class It>
  void param(It) const {}
};

}  // namespace detail

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    detail::SplitMixSeq seq{seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Stream with the same seed and a shifted stream_id.
  RngStream substream(std::uint64_t offset) const {
    return RngStream(seed_, stream_id_ + offset);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  // Uniform on the open interval (0, 1).
  double uniform_open() {
    for (;;) {
      const double u = uniform();
      if (u > 0.0 && u < 1.0) return u;
    }
  }

  double normal() { return normal_(engine_); }

  // Exponential(1), strictly positive.
  double exponential_pos() {
    for (;;) {
      const double e = std::exponential_distribution<double>(1.0)(engine_);
      if (e > 0.0) return e;
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ggbm
