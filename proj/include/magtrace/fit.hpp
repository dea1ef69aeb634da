#pragma once

// Least-squares recovery of expansion coefficients
//     value(N) ~ sum_r f_r N^{p_r}
// and Neville-style Richardson extrapolation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "magtrace/error.hpp"

namespace magtrace {

struct ExpansionFit {
  std::vector<double> powers;
  std::vector<double> coefficients;
  double residual_rms = 0.0;
  double condition_estimate = 0.0;
};

inline constexpr double kMaxFitCondition = 1e12;

/// Rows are weighted by N^{-min(powers)} so each sample enters on a relative
/// scale. Columns are equilibrated before the SVD solve; the reported
/// condition number is that of the equilibrated design.
inline ExpansionFit fit_expansion(std::span<const std::pair<double, double>> samples,
                                  std::span<const double> powers) {
  require(!powers.empty(), "fit_expansion: at least one power is required");
  require(samples.size() >= powers.size() + 2,
          "fit_expansion: need at least len(powers) + 2 samples");
  std::set<double> distinct;
  for (const auto& [N, v] : samples) {
    require(N > 0.0, "fit_expansion: N must be positive");
    require(distinct.insert(N).second, "fit_expansion: N values must be distinct");
  }
  const double pmin = *std::min_element(powers.begin(), powers.end());
  const auto rows = static_cast<Eigen::Index>(samples.size());
  const auto cols = static_cast<Eigen::Index>(powers.size());
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto [N, v] = samples[i];
    const double w = std::pow(N, -pmin);
    for (Eigen::Index r = 0; r < cols; ++r) design(i, r) = w * std::pow(N, powers[r]);
    rhs(i) = w * v;
  }
  Eigen::VectorXd scale(cols);
  for (Eigen::Index r = 0; r < cols; ++r) {
    scale(r) = design.col(r).norm();
    require(scale(r) > 0.0, "fit_expansion: degenerate design column");
    design.col(r) /= scale(r);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  ExpansionFit fit;
  fit.powers.assign(powers.begin(), powers.end());
  fit.condition_estimate = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                   : std::numeric_limits<double>::infinity();
  if (!(fit.condition_estimate <= kMaxFitCondition)) {
    throw NumericalError("fit_expansion: design condition " + std::to_string(fit.condition_estimate) +
                         " exceeds 1e12; use fewer powers or a wider N range");
  }
  const Eigen::VectorXd scaled = svd.solve(rhs);
  const Eigen::VectorXd residual = design * scaled - rhs;
  fit.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(rows));
  for (Eigen::Index r = 0; r < cols; ++r) fit.coefficients.push_back(scaled(r) / scale(r));
  return fit;
}

template <typename T>
struct RichardsonResult {
  T limit{};
  double error_estimate = 0.0;
};

/// Polynomial extrapolation to h = 0 through the last order+1 samples
/// (smallest h). The error estimate is the difference between the last two
/// diagonal entries of the Neville tableau.
template <typename T>
RichardsonResult<T> richardson(std::span<const std::pair<double, T>> values, int order) {
  require(order >= 1, "richardson: order must be positive");
  require(values.size() >= static_cast<std::size_t>(order) + 1,
          "richardson: need at least order + 1 samples");
  for (std::size_t i = 1; i < values.size(); ++i) {
    require(values[i].first < values[i - 1].first, "richardson: h must be strictly descending");
  }
  const std::size_t first = values.size() - order - 1;
  const std::size_t K = order + 1;
  std::vector<double> h(K);
  std::vector<T> col(K);
  for (std::size_t i = 0; i < K; ++i) {
    h[i] = values[first + i].first;
    col[i] = values[first + i].second;
  }
  // After pass j, col[i] holds the interpolant through samples i-j..i at 0.
  T prev_diag = col[0];
  T diag = col[0];
  for (std::size_t j = 1; j < K; ++j) {
    for (std::size_t i = K - 1; i >= j; --i) {
      col[i] = (h[i - j] * col[i] - h[i] * col[i - 1]) / (h[i - j] - h[i]);
      if (i == j) break;
    }
    prev_diag = diag;
    diag = col[j];
  }
  return {col[K - 1], std::abs(diag - prev_diag)};
}

template <typename T>
RichardsonResult<T> richardson(const std::vector<std::pair<double, T>>& values, int order) {
  return richardson(std::span<const std::pair<double, T>>(values), order);
}

}  // namespace magtrace
