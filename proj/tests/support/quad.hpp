#pragma once
// GSL-backed adaptive quadrature, used in tests as the independent oracle
// integrator (kept deliberately separate from the library code it checks).

#include <functional>
#include <memory>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace testsupport {

namespace detail {

inline double trampoline(double x, void* params) {
  return (*static_cast<std::function<double(double)>*>(params))(x);
}

inline void quiet_gsl() {
  static const auto once = [] {
    gsl_set_error_handler_off();
    return 0;
  }();
  (void)once;
}

}  // namespace detail

// \int_a^b f, adaptive Gauss-Kronrod (QAGS handles endpoint trouble).
inline double integrate(std::function<double(double)> f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-14) {
  detail::quiet_gsl();
  gsl_function gf{&detail::trampoline, &f};
  auto* ws = gsl_integration_workspace_alloc(4096);
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qags(&gf, a, b, abs_tol, rel_tol, 4096,
                                          ws, &result, &abserr);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS && status != GSL_EROUND)
    throw std::runtime_error("testsupport::integrate failed, gsl status " +
                             std::to_string(status));
  return result;
}

// \int_a^\infty f via QAGIU.
inline double integrate_to_inf(std::function<double(double)> f, double a,
                               double rel_tol = 1e-10,
                               double abs_tol = 1e-14) {
  detail::quiet_gsl();
  gsl_function gf{&detail::trampoline, &f};
  auto* ws = gsl_integration_workspace_alloc(4096);
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qagiu(&gf, a, abs_tol, rel_tol, 4096, ws,
                                           &result, &abserr);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS && status != GSL_EROUND)
    throw std::runtime_error(
        "testsupport::integrate_to_inf failed, gsl status " +
        std::to_string(status));
  return result;
}

}  // namespace testsupport
