#pragma once

// Schwartz-class probe functions.
//
// A probe is phi(lambda) = He_n(z) exp(-z^2/2) with z = (lambda - mu) / sigma,
// where He_n is the probabilists' Hermite polynomial (n = 0 is the plain
// Gaussian). The Fourier transform follows the convention
//
//     phi_hat(k) = integral phi(lambda) exp(-i k lambda) d lambda,
//
// which for the Hermite-Gaussian family is closed form:
//     phi_hat(k) = sigma exp(-i mu k) (-i sigma k)^n sqrt(2 pi) exp(-sigma^2 k^2 / 2).
//
// Besides point evaluation the probe exposes a monotone envelope used by the
// certified-tail machinery: for lambda >= decay_onset(), |phi| <= envelope and
// envelope(lambda + u) <= envelope(lambda) exp(-u^2 / (2 sigma^2)).

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "magtrace/error.hpp"

namespace magtrace {

enum class ProbeKind { gaussian, hermite_gaussian };

inline constexpr int kMaxDerivativeOrder = 8;
inline constexpr int kMaxHermiteDegree = 16;

namespace detail {

// He_n(z) by the three-term recursion He_{k+1} = z He_k - k He_{k-1}.
inline double hermite_he(int n, double z) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = z;
  for (int k = 1; k < n; ++k) {
    const double next = z * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Sum of absolute coefficients of He_n; bounds |He_n(z)| <= S_n |z|^n for |z| >= 1.
inline double hermite_abs_coefficient_sum(int n) {
  std::vector<double> prev{1.0};
  if (n == 0) return 1.0;
  std::vector<double> cur{0.0, 1.0};
  for (int k = 1; k < n; ++k) {
    std::vector<double> next(cur.size() + 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= k * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  double s = 0.0;
  for (double c : cur) s += std::abs(c);
  return s;
}

}  // namespace detail

class TestFunction {
 public:
  static TestFunction gaussian(double mu, double sigma) {
    return TestFunction(ProbeKind::gaussian, mu, sigma, 0);
  }

  static TestFunction hermite_gaussian(double mu, double sigma, int degree) {
    return TestFunction(ProbeKind::hermite_gaussian, mu, sigma, degree);
  }

  ProbeKind kind() const { return kind_; }
  double center() const { return mu_; }
  double width() const { return sigma_; }
  int hermite_degree() const { return degree_; }

  double value(double lambda) const {
    const double z = (lambda - mu_) / sigma_;
    return detail::hermite_he(degree_, z) * std::exp(-0.5 * z * z);
  }

  double operator()(double lambda) const { return value(lambda); }

  /// Exact derivative of the given order (0..8).
  ///
  /// Uses He_n(z) e^{-z^2/2} = (-1)^n D^n e^{-z^2/2}, so the r-th derivative
  /// in lambda is sigma^{-r} (-1)^r He_{n+r}(z) e^{-z^2/2}.
  double derivative(int order, double lambda) const {
    require(order >= 0 && order <= kMaxDerivativeOrder,
            "derivative order must be in [0, 8], got " + std::to_string(order));
    const double z = (lambda - mu_) / sigma_;
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(sigma_, -order) * detail::hermite_he(degree_ + order, z) *
           std::exp(-0.5 * z * z);
  }

  std::complex<double> fourier_transform(double k) const {
    using namespace std::complex_literals;
    const double w = sigma_ * k;
    std::complex<double> poly = 1.0;
    for (int i = 0; i < degree_; ++i) poly *= -1i * w;
    return sigma_ * std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * w * w) *
           std::exp(-1i * (mu_ * k)) * poly;
  }

  // Envelope data for certified truncation.

  double decay_onset() const { return mu_ + sigma_ * onset_z_; }

  double envelope(double lambda) const {
    const double z = (lambda - mu_) / sigma_;
    return envelope_z(z);
  }

  /// Upper bound on sup |phi| over the real line.
  double sup_bound() const {
    if (degree_ == 0) return 1.0;
    const double n = degree_;
    return abs_coeff_sum_ * std::max(1.0, std::pow(n / std::numbers::e, 0.5 * n));
  }

  /// Interval outside of which |phi| < threshold.
  std::pair<double, double> support(double threshold) const {
    double z = onset_z_;
    while (envelope_z(z) >= threshold) z += 0.05;
    return {mu_ - z * sigma_, mu_ + z * sigma_};
  }

  /// |k| beyond which |phi_hat(k)| < threshold.
  double fourier_cutoff(double threshold) const {
    const double n = degree_;
    double w = std::sqrt(n);
    auto mag = [&](double x) {
      return sigma_ * std::sqrt(2.0 * std::numbers::pi) * std::pow(x, n) * std::exp(-0.5 * x * x);
    };
    while (mag(w) >= threshold) w += 0.05;
    return w / sigma_;
  }

  std::string describe() const {
    std::string s = (kind_ == ProbeKind::gaussian) ? "gaussian" : "hermite_gaussian";
    s += ":mu=" + std::to_string(mu_) + ",sigma=" + std::to_string(sigma_);
    if (kind_ == ProbeKind::hermite_gaussian) s += ",degree=" + std::to_string(degree_);
    return s;
  }

 private:
  TestFunction(ProbeKind kind, double mu, double sigma, int degree)
      : kind_(kind), mu_(mu), sigma_(sigma), degree_(degree) {
    require(std::isfinite(mu), "probe center must be finite");
    require(sigma > 0.0 && std::isfinite(sigma), "probe width sigma must be > 0");
    require(degree >= 0 && degree <= kMaxHermiteDegree, "hermite degree must be in [0, 16]");
    require(kind == ProbeKind::hermite_gaussian || degree == 0,
            "plain gaussian probes have degree 0");
    abs_coeff_sum_ = detail::hermite_abs_coefficient_sum(degree_);
    onset_z_ = degree_ == 0 ? 0.0 : std::max(1.0, std::sqrt(static_cast<double>(degree_)));
  }

  double envelope_z(double z) const {
    if (degree_ == 0) return std::exp(-0.5 * z * z);
    const double az = std::max(1.0, std::abs(z));
    return abs_coeff_sum_ * std::pow(az, degree_) * std::exp(-0.5 * z * z);
  }

  ProbeKind kind_;
  double mu_;
  double sigma_;
  int degree_;
  double abs_coeff_sum_ = 1.0;
  double onset_z_ = 0.0;
};

}  // namespace magtrace
