#pragma once

// Pointwise magnetic data and the leading trace coefficient.
//
// At a point x the 2-form F and metric g define the skew operator J through
// F(u, v) = g(J u, v). Its nonzero eigenvalues are +-i a_j(x); the model
// operator obtained by freezing coefficients at x has Landau levels
//
//     Lambda_k(x) = sum_j (2 k_j + 1) a_j(x) + V(x),   k in Z_+^n,
//
// and the kernel of phi(model operator) on the diagonal is
//
//     f0(x) = (2 pi)^{-n} prod_j a_j(x) * (2 pi)^{-m} sum_k int_{R^m} phi(|xi|^2 + Lambda_k(x)) d xi
//
// with m = d - 2n (the second factor is absent when F has maximal rank).

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "magtrace/error.hpp"
#include "magtrace/probe.hpp"
#include "magtrace/quadrature.hpp"
#include "magtrace/series.hpp"

namespace magtrace {

struct PointMagneticData {
  Eigen::MatrixXd metric;  // d x d, symmetric positive definite
  Eigen::MatrixXd field;   // d x d, antisymmetric: field(i, j) = F(e_i, e_j)
  double potential = 0.0;

  int dim() const { return static_cast<int>(metric.rows()); }

  void validate() const {
    const auto d = metric.rows();
    require(d >= 1 && metric.cols() == d && field.rows() == d && field.cols() == d,
            "metric and field must be square matrices of the same size");
    const double gscale = std::max(1.0, metric.cwiseAbs().maxCoeff());
    require((metric - metric.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * gscale,
            "metric must be symmetric");
    const double fscale = std::max(1.0, field.cwiseAbs().maxCoeff());
    require((field + field.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * fscale,
            "field must be antisymmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(metric, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() > 0.0, "metric must be positive definite");
  }
};

struct MagneticFrequencies {
  std::vector<double> a;  // ascending, each > 0
  int rank = 0;           // rank of F, always even
  bool near_degenerate = false;

  double product() const {
    double p = 1.0;
    for (double x : a) p *= x;
    return p;
  }
};

inline constexpr double kRankRelTol = 1e-10;

/// Frequencies a_j from the eigenvalues of -A^2, A = g^{-1/2} F g^{-1/2}.
inline MagneticFrequencies magnetic_frequencies(const PointMagneticData& p) {
  p.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(p.metric);
  const Eigen::MatrixXd ginv_half = gs.operatorInverseSqrt();
  Eigen::MatrixXd a_mat = ginv_half * p.field * ginv_half;
  a_mat = 0.5 * (a_mat - a_mat.transpose()).eval();
  Eigen::MatrixXd neg_sq = -(a_mat * a_mat);
  neg_sq = 0.5 * (neg_sq + neg_sq.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(neg_sq, Eigen::EigenvaluesOnly);

  std::vector<double> singular;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    singular.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
  }
  std::sort(singular.begin(), singular.end());
  MagneticFrequencies out;
  const double norm = singular.empty() ? 0.0 : singular.back();
  if (norm == 0.0) return out;
  const double tol = kRankRelTol * norm;
  std::vector<double> nonzero;
  for (double s : singular) {
    if (s >= 0.1 * tol && s <= 10.0 * tol) out.near_degenerate = true;
    if (s > tol) nonzero.push_back(s);
  }
  if (nonzero.size() % 2 == 1) {
    out.near_degenerate = true;
    nonzero.erase(nonzero.begin());
  }
  for (std::size_t i = 0; i + 1 < nonzero.size(); i += 2) {
    out.a.push_back(0.5 * (nonzero[i] + nonzero[i + 1]));
  }
  out.rank = static_cast<int>(nonzero.size());
  return out;
}

inline double landau_level(const MagneticFrequencies& freqs, double potential, std::span<const int> k) {
  require(k.size() == freqs.a.size(), "landau_level: multi-index length must equal n");
  double level = potential;
  for (std::size_t j = 0; j < k.size(); ++j) {
    require(k[j] >= 0, "landau_level: multi-index entries must be nonnegative");
    level += (2.0 * k[j] + 1.0) * freqs.a[j];
  }
  return level;
}

/// Diagonal kernel value f0(x0) of phi(model operator at x0); `truncation_tol`
/// bounds the omitted Landau tail in absolute terms.
inline double local_density_f0(const PointMagneticData& p, const TestFunction& phi,
                               double truncation_tol) {
  require(truncation_tol > 0.0, "truncation_tol must be positive");
  const MagneticFrequencies freqs = magnetic_frequencies(p);
  const int n = static_cast<int>(freqs.a.size());
  const int m = p.dim() - 2 * n;
  const double landau_prefactor = freqs.product() / std::pow(2.0 * std::numbers::pi, n);
  if (m == 0) {
    const auto sum = certified_landau_sum(freqs.a, p.potential, phi, 1.0,
                                          truncation_tol / landau_prefactor,
                                          [&](double x) { return phi.value(x); });
    return landau_prefactor * sum.value;
  }
  const double ell = 0.5 * m;
  const double radial_prefactor =
      std::pow(std::numbers::pi, ell) / std::tgamma(ell) / std::pow(2.0 * std::numbers::pi, m);
  const double prefactor = landau_prefactor * radial_prefactor;
  const auto sum = certified_landau_sum(
      freqs.a, p.potential, phi, half_power_tail_weight(phi, ell), truncation_tol / prefactor,
      [&](double x) { return half_power_moment(phi, x, ell); });
  return prefactor * sum.value;
}

struct QuadratureNode {
  PointMagneticData point;
  double weight = 0.0;
};

/// Node/weight discretization of the Riemannian volume form.
struct ManifoldQuadrature {
  std::vector<QuadratureNode> nodes;
  double total_volume = 0.0;

  static ManifoldQuadrature from_nodes(std::vector<QuadratureNode> nodes) {
    ManifoldQuadrature q;
    CompensatedSum vol;
    for (const auto& node : nodes) {
      require(node.weight > 0.0, "quadrature weights must be positive");
      vol.add(node.weight);
    }
    q.nodes = std::move(nodes);
    q.total_volume = vol.value();
    return q;
  }
};

inline double integrate_f0(const ManifoldQuadrature& q, const TestFunction& phi, double tol = 1e-14) {
  if (q.nodes.empty()) return 0.0;
  const int d = q.nodes.front().point.dim();
  const int rank = magnetic_frequencies(q.nodes.front().point).rank;
  CompensatedSum acc;
  for (const auto& node : q.nodes) {
    require(node.point.dim() == d, "integrate_f0: nodes must share the dimension");
    require(magnetic_frequencies(node.point).rank == rank,
            "integrate_f0: mixed field rank across quadrature nodes");
    acc.add(node.weight * local_density_f0(node.point, phi, tol / q.total_volume));
  }
  return acc.value();
}

// Built-in quadratures.

/// Uniform midpoint grid on the unit 2- or 3-torus with flat metric and
/// F = 2 pi f(x, y) dx ^ dy. In 3-D the data is z-independent, so the grid
/// covers (x, y) and each node carries the full z-length.
inline ManifoldQuadrature flat_torus_quadrature(int dim, int grid,
                                                const std::function<double(double, double)>& f,
                                                const std::function<double(double, double)>& potential = {}) {
  require(dim == 2 || dim == 3, "flat torus quadrature supports dim 2 or 3");
  require(grid >= 1, "grid must be positive");
  std::vector<QuadratureNode> nodes;
  const double h = 1.0 / grid;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double x = (i + 0.5) * h;
      const double y = (j + 0.5) * h;
      PointMagneticData p;
      p.metric = Eigen::MatrixXd::Identity(dim, dim);
      p.field = Eigen::MatrixXd::Zero(dim, dim);
      p.field(0, 1) = 2.0 * std::numbers::pi * f(x, y);
      p.field(1, 0) = -p.field(0, 1);
      p.potential = potential ? potential(x, y) : 0.0;
      nodes.push_back({std::move(p), h * h});
    }
  }
  return ManifoldQuadrature::from_nodes(std::move(nodes));
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count) {
  require(count >= 1, "gauss_legendre needs at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  std::vector<double> x(count), w(count);
  for (int i = 0; i < count; ++i) {
    x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    w[i] = 2.0 * v0 * v0;
  }
  return {x, w};
}

/// Round sphere of radius R in spherical coordinates (theta, varphi) with
/// F = (1/2) sin(theta) d theta ^ d varphi; Gauss-Legendre in cos(theta),
/// uniform in varphi.
inline ManifoldQuadrature sphere_quadrature(double radius, int n_theta, int n_phi) {
  require(radius > 0.0, "sphere radius must be positive");
  require(n_phi >= 1, "n_phi must be positive");
  const auto [u, w] = gauss_legendre(n_theta);
  std::vector<QuadratureNode> nodes;
  const double r2 = radius * radius;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = std::acos(u[i]);
    const double s = std::sin(theta);
    for (int j = 0; j < n_phi; ++j) {
      PointMagneticData p;
      p.metric = Eigen::Matrix2d{{r2, 0.0}, {0.0, r2 * s * s}};
      p.field = Eigen::Matrix2d{{0.0, 0.5 * s}, {-0.5 * s, 0.0}};
      nodes.push_back({std::move(p), r2 * w[i] * 2.0 * std::numbers::pi / n_phi});
    }
  }
  return ManifoldQuadrature::from_nodes(std::move(nodes));
}

/// Compact hyperbolic surface of the given genus with metric R^2 (dx^2 + dy^2) / y^2
/// and F = dx ^ dy / y^2. The data is homogeneous, so a single node at y = 1
/// carrying the full area 4 pi (genus - 1) R^2 is exact.
inline ManifoldQuadrature hyperbolic_quadrature(double radius, int genus) {
  require(radius > 0.0, "radius must be positive");
  require(genus >= 2, "genus must be >= 2");
  PointMagneticData p;
  const double r2 = radius * radius;
  p.metric = Eigen::Matrix2d{{r2, 0.0}, {0.0, r2}};
  p.field = Eigen::Matrix2d{{0.0, 1.0}, {-1.0, 0.0}};
  std::vector<QuadratureNode> nodes;
  nodes.push_back({std::move(p), 4.0 * std::numbers::pi * (genus - 1) * r2});
  return ManifoldQuadrature::from_nodes(std::move(nodes));
}

// CSV: one node per row,
//   d, g_11 .. g_dd (row-major, d*d values), F_12, F_13, .., F_{d-1,d}
//   (row-major strict upper triangle), V, weight
// Lines starting with '#' and a header line starting with "d" are skipped.

inline ManifoldQuadrature read_quadrature_csv(std::istream& in) {
  std::vector<QuadratureNode> nodes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == 'd') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("quadrature csv line " + std::to_string(line_no) +
                                    ": not a number: '" + cell + "'");
      }
    }
    require(!values.empty(), "quadrature csv: empty row");
    const int d = static_cast<int>(values[0]);
    require(d >= 1 && values[0] == d, "quadrature csv: d must be a positive integer");
    const std::size_t expected = 1 + d * d + d * (d - 1) / 2 + 2;
    require(values.size() == expected, "quadrature csv line " + std::to_string(line_no) +
                                           ": expected " + std::to_string(expected) + " columns");
    PointMagneticData p;
    p.metric.resize(d, d);
    p.field = Eigen::MatrixXd::Zero(d, d);
    std::size_t pos = 1;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) p.metric(i, j) = values[pos++];
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        p.field(i, j) = values[pos];
        p.field(j, i) = -values[pos];
        ++pos;
      }
    p.potential = values[pos++];
    const double weight = values[pos];
    p.validate();
    nodes.push_back({std::move(p), weight});
  }
  return ManifoldQuadrature::from_nodes(std::move(nodes));
}

inline void write_quadrature_csv(std::ostream& out, const ManifoldQuadrature& q) {
  out << "d,g,F,V,weight\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17e", v);
    out << buf;
  };
  for (const auto& node : q.nodes) {
    const int d = node.point.dim();
    out << d;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) put(node.point.metric(i, j));
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) put(node.point.field(i, j));
    put(node.point.potential);
    put(node.weight);
    out << '\n';
  }
}

}  // namespace magtrace
