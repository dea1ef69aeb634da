#pragma once

// Magnetic Laplacian H_N = Delta^{L^N} + N V on the unit 2-torus, discretized
// on an n x n grid with link phases (Peierls substitution).
//
// Site (i, j) sits at (x, y) = (i h, j h), h = 1/n, with linear index i + n j.
// Plaquette (i, j) is the cell [i h, (i+1) h] x [j h, (j+1) h] and carries
// the phase 2 pi N int_cell f, where F = 2 pi f dx ^ dy.
//
// Gauge ("column-accumulated"):
//   theta_x(i, j)   = 0                                    for i < n - 1
//   theta_x(n-1, j) = -sum_{j' < j} sum_i plaq(i, j')       (wrap twist)
//   theta_y(i, j)   = sum_{i' < i} plaq(i', j)
// theta_x(i, j) lives on the link (i, j) -> (i+1, j), theta_y(i, j) on
// (i, j) -> (i, j+1), indices mod n. Going counterclockwise around each
// plaquette the link phases add up to its plaquette phase mod 2 pi.
//
//   (H u)_s = h^{-2} (4 u_s - sum_{s'} e^{i theta(s -> s')} u_{s'}) + N V(s) u_s

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "magtrace/error.hpp"
#include "magtrace/geometry.hpp"

namespace magtrace {

using ScalarField = std::function<double(double, double)>;

class LatticeOperator {
 public:
  using SparseMatrix = Eigen::SparseMatrix<std::complex<double>>;

  int grid() const { return n_; }
  int flux_integer() const { return N_; }
  double spacing() const { return 1.0 / n_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(n_) * n_; }

  const Eigen::MatrixXd& plaquette_phases() const { return plaq_; }
  const Eigen::MatrixXd& x_link_phases() const { return theta_x_; }
  const Eigen::MatrixXd& y_link_phases() const { return theta_y_; }
  const Eigen::MatrixXd& potential() const { return pot_; }

  Eigen::Index site(int i, int j) const {
    return static_cast<Eigen::Index>(mod(i)) + static_cast<Eigen::Index>(n_) * mod(j);
  }

  double total_flux() const { return plaq_.sum(); }

  /// Largest |(oriented link sum) - plaquette phase| mod 2 pi.
  double gauge_defect() const {
    double worst = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const double loop = theta_x_(i, j) + theta_y_(mod(i + 1), j) - theta_x_(i, mod(j + 1)) -
                            theta_y_(i, j);
        worst = std::max(worst, std::abs(std::remainder(loop - plaq_(i, j), 2.0 * std::numbers::pi)));
      }
    }
    return worst;
  }

  SparseMatrix sparse() const {
    const double inv_h2 = static_cast<double>(n_) * n_;
    std::vector<Eigen::Triplet<std::complex<double>>> entries;
    entries.reserve(5 * dimension());
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const auto s = site(i, j);
        entries.emplace_back(s, s, 4.0 * inv_h2 + pot_(i, j));
        add_link(entries, s, site(i + 1, j), theta_x_(i, j), inv_h2);
        add_link(entries, s, site(i, j + 1), theta_y_(i, j), inv_h2);
      }
    }
    SparseMatrix H(dimension(), dimension());
    H.setFromTriplets(entries.begin(), entries.end());
    return H;
  }

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(sparse()); }

  /// Gershgorin bound on the spectral radius.
  double norm_bound() const {
    const double inv_h2 = static_cast<double>(n_) * n_;
    return 8.0 * inv_h2 + pot_.cwiseAbs().maxCoeff();
  }

  double hermiticity_defect() const {
    const SparseMatrix H = sparse();
    const SparseMatrix D = H - SparseMatrix(H.adjoint());
    double worst = 0.0;
    for (int k = 0; k < D.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(D, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
  }

  /// Gauge transform by a site function: theta(s -> s') += chi(s') - chi(s).
  LatticeOperator regauge(const Eigen::MatrixXd& chi) const {
    require(chi.rows() == n_ && chi.cols() == n_, "regauge: chi must be n x n");
    LatticeOperator out = *this;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        out.theta_x_(i, j) += chi(mod(i + 1), j) - chi(i, j);
        out.theta_y_(i, j) += chi(i, mod(j + 1)) - chi(i, j);
      }
    }
    return out;
  }

  void write_csv(std::ostream& out) const {
    out << "# n=" << n_ << ", N=" << N_
        << ", gauge=column-accumulated, convention=theta_y(i,j)=sum_{i'<i} plaq(i',j)\n";
    out << "i,j,plaquette,theta_x,theta_y,potential\n";
    char buf[160];
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.16e,%.16e,%.16e,%.16e\n", i, j, plaq_(i, j),
                      theta_x_(i, j), theta_y_(i, j), pot_(i, j));
        out << buf;
      }
    }
  }

 private:
  friend LatticeOperator build_operator(int, int, const ScalarField&, const ScalarField&);

  int mod(int i) const { return ((i % n_) + n_) % n_; }

  static void add_link(std::vector<Eigen::Triplet<std::complex<double>>>& entries, Eigen::Index s,
                       Eigen::Index t, double theta, double inv_h2) {
    const std::complex<double> w = -inv_h2 * std::polar(1.0, theta);
    entries.emplace_back(s, t, w);
    entries.emplace_back(t, s, std::conj(w));
  }

  int n_ = 0;
  int N_ = 0;
  Eigen::MatrixXd plaq_;
  Eigen::MatrixXd theta_x_;
  Eigen::MatrixXd theta_y_;
  Eigen::MatrixXd pot_;
};

inline constexpr double kFluxIntegerTol = 1e-8;

inline LatticeOperator build_operator(int n, int N, const ScalarField& field, const ScalarField& potential = {}) {
  require(n >= 8, "lattice grid n must be >= 8");
  require(N >= 0, "flux integer N must be nonnegative");
  require(static_cast<bool>(field), "field profile is required");
  LatticeOperator op;
  op.n_ = n;
  op.N_ = N;
  const double h = 1.0 / n;
  const auto [gx, gw] = gauss_legendre(6);
  Eigen::MatrixXd cell(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < gx.size(); ++a) {
        for (std::size_t b = 0; b < gx.size(); ++b) {
          const double x = (i + 0.5 * (gx[a] + 1.0)) * h;
          const double y = (j + 0.5 * (gx[b] + 1.0)) * h;
          acc += gw[a] * gw[b] * field(x, y);
        }
      }
      cell(i, j) = 0.25 * h * h * acc;
    }
  }
  const double total = cell.sum();
  const double integer = std::round(total);
  require(std::abs(total - integer) <= kFluxIntegerTol,
          "total flux int f dx dy = " + std::to_string(total) + " is not an integer");
  // Remove the quadrature residue so the total is an exact multiple of 2 pi.
  if (integer != 0.0) cell *= integer / total;
  op.plaq_ = 2.0 * std::numbers::pi * N * cell;

  op.theta_x_ = Eigen::MatrixXd::Zero(n, n);
  op.theta_y_ = Eigen::MatrixXd::Zero(n, n);
  double below = 0.0;
  for (int j = 0; j < n; ++j) {
    double run = 0.0;
    for (int i = 0; i < n; ++i) {
      op.theta_y_(i, j) = run;
      run += op.plaq_(i, j);
    }
    op.theta_x_(n - 1, j) = -below;
    below += run;
  }
  op.pot_ = Eigen::MatrixXd::Zero(n, n);
  if (potential) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) op.pot_(i, j) = N * potential(i * h, j * h);
  }
  return op;
}

inline ScalarField constant_field(double value = 1.0) {
  return [value](double, double) { return value; };
}

/// f(x, y) = 1 + amplitude cos(2 pi x).
inline ScalarField cosine_field(double amplitude) {
  return [amplitude](double x, double) { return 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * x); };
}

enum class EigenMethod { automatic, dense, lanczos };

inline constexpr int kDenseGridLimit = 48;

namespace detail {

inline std::vector<double> dense_lowest(const LatticeOperator& op, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
  std::vector<double> out(k);
  for (int i = 0; i < k; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

// Deterministic start block: the normalized all-ones vector plus a linear
// ramp, followed by ramp-weighted sine modes.
inline Eigen::MatrixXcd start_block(Eigen::Index dim, int block) {
  Eigen::MatrixXcd X(dim, block);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const double ramp = static_cast<double>(s) / dim;
    X(s, 0) = 1.0 + 0.1 * ramp;
    for (int c = 1; c < block; ++c) {
      const double phase = std::numbers::pi * (c + 1) * (s + 1.0) / (dim + 1.0);
      X(s, c) = std::complex<double>(std::sin(phase) + 0.05 * ramp, 0.01 * std::cos(0.5 * phase));
    }
  }
  return X;
}

// Orthonormalizes W against the columns of V (twice) and then internally;
// returns the surviving columns.
inline Eigen::MatrixXcd orthonormal_extension(const Eigen::MatrixXcd& V, Eigen::MatrixXcd W) {
  for (int pass = 0; pass < 2; ++pass) {
    if (V.cols() > 0) W -= V * (V.adjoint() * W);
  }
  Eigen::MatrixXcd out(W.rows(), 0);
  for (Eigen::Index c = 0; c < W.cols(); ++c) {
    Eigen::VectorXcd w = W.col(c);
    const double before = w.norm();
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (V.cols() > 0) w -= V * (V.adjoint() * w);
      if (out.cols() > 0) w -= out * (out.adjoint() * w);
    }
    const double after = w.norm();
    if (after <= 1e-10 * before) continue;
    out.conservativeResize(Eigen::NoChange, out.cols() + 1);
    out.col(out.cols() - 1) = w / after;
  }
  return out;
}

}  // namespace detail

struct EigenOptions {
  EigenMethod method = EigenMethod::automatic;
  int max_basis = 480;
  int max_restarts = 30;
};

/// The k smallest eigenvalues with residuals ||H y - theta y|| <= tol ||H||.
///
/// The iterative path runs block Lanczos with full reorthogonalization on the
/// shift-inverted operator (H - sigma)^{-1}, sigma below the spectrum, and
/// extracts Ritz pairs of H itself; it restarts from the best Ritz block when
/// the basis budget is exhausted.
inline std::vector<double> lowest_eigenvalues(const LatticeOperator& op, int k, double tol = 1e-8,
                                              EigenOptions options = {}) {
  const Eigen::Index dim = op.dimension();
  require(k >= 1 && k < dim, "k must satisfy 1 <= k < n^2");
  require(tol > 0.0, "tol must be positive");
  bool dense = options.method == EigenMethod::dense ||
               (options.method == EigenMethod::automatic && op.grid() <= kDenseGridLimit);
  if (dense) return detail::dense_lowest(op, k);

  using SparseMatrix = LatticeOperator::SparseMatrix;
  const SparseMatrix H = op.sparse();
  const double norm = op.norm_bound();
  const double sigma = op.potential().minCoeff() - 1.0;
  SparseMatrix shifted = H;
  for (Eigen::Index s = 0; s < dim; ++s) shifted.coeffRef(s, s) -= sigma;
  Eigen::SimplicialLLT<SparseMatrix> llt(shifted);
  if (llt.info() != Eigen::Success) throw NumericalError("lanczos: shifted factorization failed");

  const int block = std::min<int>(static_cast<int>(dim) - 1, std::max(k + 4, 8));
  const int max_basis = std::min<int>(static_cast<int>(dim), std::max(options.max_basis, 4 * block));
  Eigen::MatrixXcd X = detail::orthonormal_extension(Eigen::MatrixXcd(dim, 0), detail::start_block(dim, block));
  std::vector<double> worst_residuals;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    Eigen::MatrixXcd V = X;
    Eigen::MatrixXcd HV = H * V;
    Eigen::MatrixXcd W = V;
    while (true) {
      Eigen::MatrixXcd T = V.adjoint() * HV;
      T = 0.5 * (T + T.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T);
      const int want = std::min<int>(k, static_cast<int>(V.cols()));
      const Eigen::MatrixXcd S = es.eigenvectors().leftCols(want);
      const Eigen::MatrixXcd Y = V * S;
      const Eigen::MatrixXcd R = HV * S - Y * es.eigenvalues().head(want).asDiagonal();
      double worst = 0.0;
      for (int c = 0; c < want; ++c) worst = std::max(worst, R.col(c).norm());
      if (want == k && worst <= tol * norm) {
        std::vector<double> out(k);
        for (int i = 0; i < k; ++i) out[i] = es.eigenvalues()(i);
        return out;
      }
      const bool full = V.cols() + W.cols() > max_basis;
      Eigen::MatrixXcd next;
      if (!full) {
        Eigen::MatrixXcd OW(dim, W.cols());
        for (Eigen::Index c = 0; c < W.cols(); ++c) OW.col(c) = llt.solve(W.col(c));
        next = detail::orthonormal_extension(V, OW);
      }
      if (full || next.cols() == 0) {
        worst_residuals.push_back(worst);
        const int keep = std::min<int>(block, static_cast<int>(V.cols()));
        X = detail::orthonormal_extension(Eigen::MatrixXcd(dim, 0), V * es.eigenvectors().leftCols(keep));
        break;
      }
      const Eigen::Index old = V.cols();
      V.conservativeResize(Eigen::NoChange, old + next.cols());
      V.rightCols(next.cols()) = next;
      HV.conservativeResize(Eigen::NoChange, old + next.cols());
      HV.rightCols(next.cols()) = H * next;
      W = next;
    }
  }
  std::ostringstream msg;
  msg << "lanczos: no convergence after " << options.max_restarts << " restarts; residuals";
  for (double r : worst_residuals) msg << ' ' << r;
  msg << " vs target " << tol * norm;
  throw NumericalError(msg.str());
}

struct LandauReport {
  int cluster_count = 0;
  double cluster_mean = 0.0;
  double cluster_spread = 0.0;
  double midgap_threshold = 0.0;
  std::vector<double> eigenvalues;  // all computed, ascending
};

/// Eigenvalues below the midgap 2 a_ref max(N, 1) between the first two Landau levels.
inline LandauReport landau_report(const LatticeOperator& op, int N, double a_ref, double tol = 1e-8,
                                  EigenOptions options = {}) {
  require(N == op.flux_integer(), "landau_report: N differs from the operator's flux integer");
  require(a_ref > 0.0, "a_ref must be positive");
  LandauReport out;
  out.midgap_threshold = 2.0 * a_ref * std::max(N, 1);
  int k = std::max(N, 1) + 4;
  while (true) {
    k = std::min<int>(k, static_cast<int>(op.dimension()) - 1);
    out.eigenvalues = lowest_eigenvalues(op, k, tol, options);
    if (out.eigenvalues.back() >= out.midgap_threshold || k == op.dimension() - 1) break;
    k *= 2;
  }
  std::vector<double> below;
  for (double e : out.eigenvalues)
    if (e < out.midgap_threshold) below.push_back(e);
  out.cluster_count = static_cast<int>(below.size());
  if (!below.empty()) {
    double sum = 0.0;
    for (double e : below) sum += e;
    out.cluster_mean = sum / below.size();
    out.cluster_spread = below.back() - below.front();
  }
  return out;
}

}  // namespace magtrace
