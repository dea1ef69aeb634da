#pragma once

// Pairings of phi_hat with the distributions
//
//     e^{itV} / ((t + i0)^ell prod_j sin c_j (t + i0)),
//
// both in closed form (Landau sums and half-power moments) and as the
// epsilon-regularized oscillatory integral extrapolated to epsilon = 0.
//
// For ell = 0:   (1/2pi) <., phi_hat> = (-2i)^m sum_k phi(beta_k + V)
// For ell > 0:   (1/2pi) <., phi_hat> = 2^m e^{3 pi i (ell+m)/2} / Gamma(ell)
//                                       * sum_k int (tau - beta_k - V)_+^{ell-1} phi(tau) d tau
// with beta_k = sum_j (2 k_j + 1) c_j.
//
// The closed form for ell > 0 fixes the branch of (t + i eps)^ell: its argument
// is taken in (-2 pi, -pi) on the upper half plane, which differs from the
// principal branch by the constant e^{-2 pi i ell}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "magtrace/error.hpp"
#include "magtrace/fit.hpp"
#include "magtrace/geometry.hpp"
#include "magtrace/probe.hpp"
#include "magtrace/quadrature.hpp"
#include "magtrace/series.hpp"

namespace magtrace {

using cplx = std::complex<double>;

struct PairingSpec {
  std::vector<double> c;
  double ell = 0.0;
  double shift = 0.0;

  int m() const { return static_cast<int>(c.size()); }

  void validate() const {
    for (double cj : c) require(cj > 0.0 && std::isfinite(cj), "pairing frequencies must be > 0");
    require(ell >= 0.0 && std::floor(2.0 * ell) == 2.0 * ell, "ell must be a nonnegative half-integer");
    require(std::isfinite(shift), "shift must be finite");
  }
};

inline cplx sin_sum(const PairingSpec& spec, const TestFunction& phi, double tol) {
  spec.validate();
  require(spec.ell == 0.0, "sin_sum requires ell = 0");
  require(spec.m() >= 1, "sin_sum requires at least one frequency");
  const double scale = std::pow(2.0, spec.m());
  const auto sum = certified_landau_sum(spec.c, spec.shift, phi, 1.0, tol / scale,
                                        [&](double x) { return phi.value(x); });
  return std::pow(cplx(0.0, -2.0), spec.m()) * sum.value;
}

inline cplx half_power_prefactor(double ell, int m) {
  return std::pow(2.0, m) * std::exp(cplx(0.0, 1.5 * std::numbers::pi * (ell + m))) / std::tgamma(ell);
}

inline cplx half_power_pairing(const PairingSpec& spec, const TestFunction& phi, double tol) {
  spec.validate();
  require(spec.ell > 0.0, "half_power_pairing requires ell > 0");
  const cplx pref = half_power_prefactor(spec.ell, spec.m());
  const auto sum = certified_landau_sum(spec.c, spec.shift, phi, half_power_tail_weight(phi, spec.ell),
                                        tol / std::abs(pref),
                                        [&](double x) { return half_power_moment(phi, x, spec.ell); });
  return pref * sum.value;
}

/// Closed form of the pairing for any ell (dispatches on ell = 0).
inline cplx closed_form_pairing(const PairingSpec& spec, const TestFunction& phi, double tol) {
  return spec.ell == 0.0 ? sin_sum(spec, phi, tol) : half_power_pairing(spec, phi, tol);
}

using EpsTable = std::vector<std::pair<double, cplx>>;

class ExtrapolationError : public NumericalError {
 public:
  ExtrapolationError(const std::string& what, EpsTable table)
      : NumericalError(what), table_(std::move(table)) {}
  const EpsTable& table() const { return table_; }

 private:
  EpsTable table_;
};

struct RegularizedPairing {
  cplx value;
  double error_estimate = 0.0;
  EpsTable table;
};

inline constexpr int kEpsScheduleLength = 6;

/// Six halvings from eps0 = 0.1 min(1, 10 / (|mu - V| + 4 sigma)). I(eps) varies
/// on the scale 1/beta with beta the Landau levels the probe sees, so the
/// schedule shrinks for probes far from the origin.
inline std::vector<double> default_eps_schedule(const TestFunction& phi, double shift = 0.0) {
  const double reach = std::abs(phi.center() - shift) + 4.0 * phi.width();
  double eps = 0.1 * std::min(1.0, 10.0 / reach);
  std::vector<double> schedule;
  for (int i = 0; i < kEpsScheduleLength; ++i, eps *= 0.5) schedule.push_back(eps);
  return schedule;
}

inline constexpr double kFourierWindowThreshold = 1e-18;

/// (1/2pi) int phi_hat(t) e^{iV z} / (z^ell prod_j sin c_j z) dt with z = t + i eps.
inline cplx regularized_integral(const PairingSpec& spec, const TestFunction& phi, double eps) {
  require(eps > 0.0, "eps must be positive");
  const double window = phi.fourier_cutoff(kFourierWindowThreshold);
  std::vector<double> points{-window, 0.0, window};
  auto add_peak = [&](double p) {
    for (double off : {0.0, eps, 8.0 * eps}) {
      for (double q : {p - off, p + off}) {
        if (q > -window && q < window) points.push_back(q);
      }
    }
  };
  add_peak(0.0);
  for (double cj : spec.c) {
    const double spacing = std::numbers::pi / cj;
    for (int k = 1; k * spacing < window; ++k) {
      add_peak(k * spacing);
      add_peak(-k * spacing);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const double ell = spec.ell;
  auto integrand = [&](double t) -> cplx {
    const cplx z(t, eps);
    cplx denom = 1.0;
    if (ell != 0.0) {
      const double arg = std::arg(z) - 2.0 * std::numbers::pi;
      denom = std::polar(std::pow(std::abs(z), ell), ell * arg);
    }
    for (double cj : spec.c) denom *= std::sin(cj * z);
    return phi.fourier_transform(t) * std::exp(cplx(0.0, spec.shift) * z) / denom;
  };
  const double abs_tol = 1e-14 * phi.width();
  return integrate_complex_panels(integrand, points, abs_tol) / (2.0 * std::numbers::pi);
}

inline constexpr double kExtrapolationRelTol = 1e-3;

inline RegularizedPairing regularized_pairing(const PairingSpec& spec, const TestFunction& phi,
                                              std::span<const double> schedule) {
  spec.validate();
  require(schedule.size() >= 3, "eps schedule needs at least 3 entries");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    require(schedule[i] > 0.0, "eps schedule entries must be positive");
    if (i > 0) require(schedule[i] < schedule[i - 1], "eps schedule must be strictly descending");
  }
  RegularizedPairing out;
  for (double eps : schedule) out.table.emplace_back(eps, regularized_integral(spec, phi, eps));
  const auto rr = richardson<cplx>(out.table, static_cast<int>(schedule.size()) - 1);
  out.value = rr.limit;
  out.error_estimate = rr.error_estimate;
  if (!(out.error_estimate <= kExtrapolationRelTol * std::abs(out.value) + 1e-12)) {
    throw ExtrapolationError("regularized_pairing: extrapolation did not converge (estimate " +
                                 std::to_string(out.error_estimate) + ")",
                             out.table);
  }
  return out;
}

inline RegularizedPairing regularized_pairing(const PairingSpec& spec, const TestFunction& phi) {
  return regularized_pairing(spec, phi, default_eps_schedule(phi, spec.shift));
}

/// f0(x0) written through the pairings: for d = 2n
///   prod a / (-4 i pi)^n * (1/2pi) <e^{itV} / prod sin a_j (t+i0), phi_hat>,
/// and for d > 2n
///   e^{-3 pi i d/4} prod a / (4^n pi^{2n-d/2} (2 pi)^{d-2n}) * (1/2pi) <e^{itV} / ((t+i0)^{d/2-n} prod sin), phi_hat>.
inline cplx f0_from_pairing(const MagneticFrequencies& freqs, double potential, int d,
                            const TestFunction& phi, double tol) {
  const int n = static_cast<int>(freqs.a.size());
  const int m = d - 2 * n;
  require(m >= 0, "f0_from_pairing: rank exceeds dimension");
  const double prod = freqs.product();
  PairingSpec spec{freqs.a, 0.5 * m, potential};
  if (m == 0) {
    const cplx pref = prod / std::pow(cplx(0.0, -4.0 * std::numbers::pi), n);
    return pref * sin_sum(spec, phi, tol / std::abs(pref));
  }
  const cplx pref = std::exp(cplx(0.0, -0.75 * std::numbers::pi * d)) * prod /
                    (std::pow(4.0, n) * std::pow(std::numbers::pi, 2.0 * n - 0.5 * d) *
                     std::pow(2.0 * std::numbers::pi, m));
  return pref * half_power_pairing(spec, phi, tol / std::abs(pref));
}

// Critical-level Weyl coefficient
//   c0 = (2 pi)^{-(2d-q)} sum_k int_Theta int_{R^{2d-q}} phi(|xi|^2/2 + beta_k(x)) dx d xi,
//   beta_k(x) = sum_j (k_j + 1/2) alpha_j(x).

struct CriticalNode {
  std::vector<double> alpha;
  double weight = 0.0;
};

struct CriticalQuadrature {
  std::vector<CriticalNode> nodes;
};

inline double khuat_duy_c0(const CriticalQuadrature& theta, int d, int q, const TestFunction& phi,
                           double tol = 1e-14) {
  require(2 * d - q >= 0, "khuat_duy_c0 requires 2d - q >= 0");
  require(q - d >= 0, "khuat_duy_c0 requires q >= d");
  const int M = 2 * d - q;
  double total_weight = 0.0;
  for (const auto& node : theta.nodes) {
    require(static_cast<int>(node.alpha.size()) == q - d,
            "khuat_duy_c0: each node needs q - d frequencies");
    require(node.weight > 0.0, "khuat_duy_c0: weights must be positive");
    total_weight += node.weight;
  }
  if (theta.nodes.empty()) return 0.0;
  const double ell = 0.5 * M;
  // int_{R^M} phi(|xi|^2/2 + b) d xi = 2^{M/2} pi^{M/2} / Gamma(M/2) * half_power_moment(phi, b, M/2)
  const double radial = M == 0 ? 1.0 : std::pow(2.0 * std::numbers::pi, ell) / std::tgamma(ell);
  const double pref = radial / std::pow(2.0 * std::numbers::pi, M);
  const double weight = M == 0 ? 1.0 : half_power_tail_weight(phi, ell);
  CompensatedSum acc;
  for (const auto& node : theta.nodes) {
    std::vector<double> c;
    for (double a : node.alpha) {
      require(a > 0.0, "khuat_duy_c0: frequencies must be positive");
      c.push_back(0.5 * a);
    }
    const auto sum = certified_landau_sum(c, 0.0, phi, weight, tol / (pref * total_weight), [&](double x) {
      return M == 0 ? phi.value(x) : half_power_moment(phi, x, ell);
    });
    acc.add(node.weight * sum.value);
  }
  return pref * acc.value();
}

}  // namespace magtrace
