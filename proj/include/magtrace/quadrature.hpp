#pragma once

// Adaptive Gauss-Kronrod integration (GSL QAG) over explicit breakpoint lists, plus the
// half-power moments  int (tau - beta)_+^{ell-1} phi(tau) d tau  that appear
// in the radial reductions of the local density and of the Khuat-Duy pairings.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "magtrace/error.hpp"
#include "magtrace/probe.hpp"

namespace magtrace {

inline constexpr double kQuadratureRelTol = 1e-12;
inline constexpr std::size_t kQuadratureLimit = 2000;

/// Adaptive GK31 (GSL QAG) on [a, b]; stops once the global error estimate is
/// below max(abs_tol, rel_tol |I|).
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol, double rel_tol = kQuadratureRelTol) {
  if (a == b) return 0.0;
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
      gsl_integration_workspace_alloc(kQuadratureLimit), &gsl_integration_workspace_free);
  using Fn = std::remove_reference_t<F>;
  gsl_function fn;
  fn.function = [](double x, void* p) { return static_cast<double>((*static_cast<Fn*>(p))(x)); };
  fn.params = const_cast<void*>(static_cast<const void*>(&f));
  double result = 0.0;
  double abserr = 0.0;
  const int status = gsl_integration_qag(&fn, a, b, abs_tol, rel_tol, kQuadratureLimit,
                                         GSL_INTEG_GAUSS31, ws.get(), &result, &abserr);
  if (status != GSL_SUCCESS && abserr > 100.0 * std::max(abs_tol, rel_tol * std::abs(result))) {
    throw NumericalError(std::string("adaptive quadrature failed: ") + gsl_strerror(status) +
                         " (error estimate " + std::to_string(abserr) + ")");
  }
  return result;
}

/// Sum of panel integrals over consecutive breakpoints; abs_tol applies per panel.
template <typename F>
double integrate_panels(F&& f, std::span<const double> points, double abs_tol,
                        double rel_tol = kQuadratureRelTol) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    total += integrate(f, points[i], points[i + 1], abs_tol, rel_tol);
  }
  return total;
}

template <typename F>
std::complex<double> integrate_complex_panels(F&& f, std::span<const double> points, double abs_tol,
                                              double rel_tol = kQuadratureRelTol) {
  auto re = [&](double t) { return std::real(f(t)); };
  auto im = [&](double t) { return std::imag(f(t)); };
  return {integrate_panels(re, points, abs_tol, rel_tol), integrate_panels(im, points, abs_tol, rel_tol)};
}

/// int_{beta}^{inf} (tau - beta)^{ell - 1} phi(tau) d tau for ell > 0.
///
/// Substituting tau = beta + u^2 gives 2 int_0^inf u^{2 ell - 1} phi(beta + u^2) du,
/// which is smooth for ell >= 1/2. Panels are placed one probe width apart in
/// tau across the probe's effective support so narrow probes are resolved.
inline double half_power_moment(const TestFunction& phi, double beta, double ell) {
  require(ell > 0.0, "half_power_moment requires ell > 0");
  const double sigma = phi.width();
  const auto [lo, hi] = phi.support(1e-32 * phi.sup_bound());
  const double end = std::max(hi, beta + 12.0 * sigma);
  std::vector<double> taus{beta};
  double start = std::max(beta, lo);
  if (start > beta) taus.push_back(start);
  for (double t = start + sigma; t < end; t += sigma) taus.push_back(t);
  taus.push_back(end);
  std::vector<double> us;
  us.reserve(taus.size());
  for (double t : taus) us.push_back(std::sqrt(std::max(0.0, t - beta)));
  const double power = 2.0 * ell - 1.0;
  auto integrand = [&](double u) {
    const double w = power == 0.0 ? 1.0 : std::pow(u, power);
    return 2.0 * w * phi.value(beta + u * u);
  };
  const double abs_tol = 1e-17 * phi.sup_bound() * std::max(1.0, std::pow(end - beta, ell));
  return integrate_panels(integrand, us, abs_tol);
}

/// Bound K with |half_power_moment(phi, beta, ell)| <= K * phi.envelope(beta)
/// whenever beta lies past the decay onset.
inline double half_power_tail_weight(const TestFunction& phi, double ell) {
  const double s2 = 2.0 * phi.width() * phi.width();
  return 0.5 * std::pow(s2, 0.5 * ell) * std::tgamma(0.5 * ell);
}

/// int over R^m of phi(|xi|^2 + c) d xi = pi^{m/2} / Gamma(m/2) * half_power_moment(phi, c, m/2).
inline double radial_integral(const TestFunction& phi, int m, double c) {
  require(m >= 1, "radial_integral needs m >= 1");
  const double ell = 0.5 * m;
  return std::pow(std::numbers::pi, ell) / std::tgamma(ell) * half_power_moment(phi, c, ell);
}

}  // namespace magtrace
