#pragma once

// Linearized magnetic flow on the normal space at a critical point.
//
// Coordinates are interleaved (u_1, v_1, u_2, v_2, ...), so the flow is
// block-diagonal with one rotation by 2 a_k t per pair and the symplectic form
// is Omega = diag([[0, 1], [-1, 0]], ...).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "magtrace/error.hpp"

namespace magtrace {

struct FlowMatrix {
  int n = 0;
  double t = 0.0;
  Eigen::MatrixXd matrix;
};

inline FlowMatrix flow_matrix(std::span<const double> a, double t) {
  const int n = static_cast<int>(a.size());
  FlowMatrix out{n, t, Eigen::MatrixXd::Zero(2 * n, 2 * n)};
  for (int k = 0; k < n; ++k) {
    const double c = std::cos(2.0 * a[k] * t);
    const double s = std::sin(2.0 * a[k] * t);
    out.matrix(2 * k, 2 * k) = c;
    out.matrix(2 * k, 2 * k + 1) = s;
    out.matrix(2 * k + 1, 2 * k) = -s;
    out.matrix(2 * k + 1, 2 * k + 1) = c;
  }
  return out;
}

inline Eigen::MatrixXd standard_symplectic_form(int n) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

inline constexpr double kPeriodDedupTol = 1e-12;

/// All m pi / a_k with |m pi / a_k| <= t_max, merged within 1e-12.
inline std::vector<double> periods(std::span<const double> a, double t_max) {
  require(t_max > 0.0, "t_max must be positive");
  std::vector<double> out;
  for (double ak : a) {
    require(ak > 0.0, "frequencies must be positive");
    const double step = std::numbers::pi / ak;
    const auto m_max = static_cast<long long>(std::floor(t_max / step * (1.0 + 1e-15)));
    for (long long m = -m_max; m <= m_max; ++m) {
      const double T = m * step;
      if (std::abs(T) <= t_max * (1.0 + 1e-15)) out.push_back(T);
    }
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double T : out) {
    if (merged.empty() || T - merged.back() > kPeriodDedupTol * std::max(1.0, std::abs(T))) {
      merged.push_back(T);
    }
  }
  return merged;
}

struct DetIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline constexpr double kPeriodProximity = 1e-8;

/// lhs = prod |sin a_k t|, rhs = |det(I - flow)|^{1/2} / 2^n.
inline DetIdentity det_identity(std::span<const double> a, double t) {
  for (double ak : a) {
    require(ak > 0.0, "frequencies must be positive");
    const double step = std::numbers::pi / ak;
    const double nearest = std::round(t / step) * step;
    require(std::abs(t - nearest) > kPeriodProximity, "det_identity: t lies at a period of the flow");
  }
  const FlowMatrix M = flow_matrix(a, t);
  const int dim = 2 * M.n;
  const double det = (Eigen::MatrixXd::Identity(dim, dim) - M.matrix).determinant();
  DetIdentity out;
  out.lhs = 1.0;
  for (double ak : a) out.lhs *= std::abs(std::sin(ak * t));
  out.rhs = std::sqrt(std::abs(det)) / std::pow(2.0, M.n);
  return out;
}

/// Linearized flow on the round sphere of radius R (F = (1/2) sin theta
/// d theta ^ d varphi) at a point with polar angle theta0, in the normal
/// coordinates (P_theta, P_varphi - (1/2) sin(theta0) Theta):
///   [[cos(t/R^2), sin(t/R^2)/sin(theta0)], [-sin(theta0) sin(t/R^2), cos(t/R^2)]].
inline Eigen::Matrix2d sphere_normal_flow(double radius, double theta0, double t) {
  require(radius > 0.0, "radius must be positive");
  const double s0 = std::sin(theta0);
  require(s0 > 0.0, "theta0 must lie strictly between the poles");
  const double w = t / (radius * radius);
  return Eigen::Matrix2d{{std::cos(w), std::sin(w) / s0}, {-s0 * std::sin(w), std::cos(w)}};
}

/// Generator of sphere_normal_flow: d/dt (P_theta, P_hat) = G (P_theta, P_hat).
inline Eigen::Matrix2d sphere_normal_generator(double radius, double theta0) {
  const double s0 = std::sin(theta0);
  const double r2 = radius * radius;
  return Eigen::Matrix2d{{0.0, 1.0 / (r2 * s0)}, {-s0 / r2, 0.0}};
}

}  // namespace magtrace
