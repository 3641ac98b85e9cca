#pragma once
// Thin wrapper over FFTW complex transforms. Plans are cached per size and
// created with FFTW_ESTIMATE | FFTW_UNALIGNED, so one plan serves every
// buffer and the executed algorithm (hence the rounding) is the same no
// matter which thread runs it. fftw_execute_dft is thread-safe; plan
// creation is serialized here.

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace ggbm {

class Dft {
 public:
  explicit Dft(std::size_t n) : n_(n), plan_(acquire(n)) {
    if (n == 0) throw std::invalid_argument("Dft: size must be positive");
  }

  std::size_t size() const { return n_; }

  // In-place forward transform, unnormalized: X_j = sum_k x_k e^{-2*pi*i*jk/n}.
  void forward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_->plan, p, p);
  }

 private:
  struct PlanHolder {
    fftw_plan plan = nullptr;
    ~PlanHolder() {
      if (plan) fftw_destroy_plan(plan);
    }
  };

  static std::shared_ptr<const PlanHolder> acquire(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const PlanHolder>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> scratch(n);
    auto holder = std::make_shared<PlanHolder>();
    holder->plan = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!holder->plan) throw std::runtime_error("Dft: fftw plan creation failed");
    cache.emplace(n, holder);
    return holder;
  }

  std::size_t n_;
  std::shared_ptr<const PlanHolder> plan_;
};

}  // namespace ggbm
