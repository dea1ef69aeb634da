#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "magtrace/geometry.hpp"
#include "oracles.hpp"

using namespace magtrace;
constexpr double pi = std::numbers::pi;

namespace {

PointMagneticData point2(double f12, Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2), double V = 0.0) {
  PointMagneticData p;
  p.metric = std::move(g);
  p.field = Eigen::Matrix2d{{0.0, f12}, {-f12, 0.0}};
  p.potential = V;
  return p;
}

PointMagneticData torus3_point() {
  PointMagneticData p;
  p.metric = Eigen::MatrixXd::Identity(3, 3);
  p.field = Eigen::MatrixXd::Zero(3, 3);
  p.field(0, 1) = 2 * pi;
  p.field(1, 0) = -2 * pi;
  return p;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd B(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) B(i, j) = nd(rng);
  return B * B.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd random_antisym(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      A(i, j) = nd(rng);
      A(j, i) = -A(i, j);
    }
  return A;
}

}  // namespace

TEST(Frequencies, FlatTorus) {
  const auto f = magnetic_frequencies(point2(2 * pi));
  ASSERT_EQ(f.a.size(), 1u);
  EXPECT_NEAR(f.a[0], 2 * pi, 1e-14);
  EXPECT_EQ(f.rank, 2);
  EXPECT_FALSE(f.near_degenerate);
}

TEST(Frequencies, SpherePoint) {
  const double th = pi / 3, s = std::sin(th);
  const auto f = magnetic_frequencies(point2(0.5 * s, Eigen::Matrix2d{{1.0, 0.0}, {0.0, s * s}}));
  ASSERT_EQ(f.a.size(), 1u);
  EXPECT_NEAR(f.a[0], 0.5, 1e-14);
  EXPECT_EQ(f.rank, 2);
}

TEST(Frequencies, ThreeTorusHasKernelDirection) {
  const auto f = magnetic_frequencies(torus3_point());
  ASSERT_EQ(f.a.size(), 1u);
  EXPECT_NEAR(f.a[0], 2 * pi, 1e-14);
  EXPECT_EQ(f.rank, 2);
}

TEST(Frequencies, InvalidInputsThrow) {
  auto p = point2(1.0);
  p.metric(0, 1) = 0.3;
  EXPECT_THROW(magnetic_frequencies(p), std::invalid_argument);
  auto q = point2(1.0);
  q.field(1, 0) = 0.5;
  EXPECT_THROW(magnetic_frequencies(q), std::invalid_argument);
  auto r = point2(1.0, Eigen::Matrix2d{{1.0, 0.0}, {0.0, -1.0}});
  EXPECT_THROW(magnetic_frequencies(r), std::invalid_argument);
  PointMagneticData bad;
  bad.metric = Eigen::MatrixXd::Identity(2, 2);
  bad.field = Eigen::MatrixXd::Zero(3, 3);
  EXPECT_THROW(magnetic_frequencies(bad), std::invalid_argument);
}

TEST(Frequencies, NearDegenerateRankIsFlagged) {
  PointMagneticData p;
  p.metric = Eigen::MatrixXd::Identity(4, 4);
  p.field = Eigen::MatrixXd::Zero(4, 4);
  p.field(0, 1) = 1.0;
  p.field(1, 0) = -1.0;
  p.field(2, 3) = 1e-10;
  p.field(3, 2) = -1e-10;
  const auto f = magnetic_frequencies(p);
  EXPECT_TRUE(f.near_degenerate);
  EXPECT_EQ(f.rank % 2, 0);
}

TEST(Frequencies, ScalingProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> cdist(0.1, 10.0);
  std::uniform_int_distribution<int> ddist(2, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = ddist(rng);
    PointMagneticData p{random_spd(rng, d), random_antisym(rng, d), 0.0};
    const double c = cdist(rng);
    PointMagneticData q{p.metric, c * p.field, 0.0};
    const auto fa = magnetic_frequencies(p);
    const auto fb = magnetic_frequencies(q);
    ASSERT_EQ(fa.a.size(), fb.a.size());
    for (std::size_t j = 0; j < fa.a.size(); ++j) EXPECT_NEAR(fb.a[j], c * fa.a[j], 1e-10 * c * fa.a[j]);
  }
}

TEST(Frequencies, CongruenceInvariance) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 4;
    PointMagneticData p{random_spd(rng, d), random_antisym(rng, d), 0.0};
    Eigen::MatrixXd S(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) S(i, j) = nd(rng);
    S += 2.0 * Eigen::MatrixXd::Identity(d, d);
    if (std::abs(S.determinant()) < 1e-2) continue;
    Eigen::MatrixXd g2 = S.transpose() * p.metric * S;
    g2 = 0.5 * (g2 + g2.transpose()).eval();
    Eigen::MatrixXd F2 = S.transpose() * p.field * S;
    F2 = 0.5 * (F2 - F2.transpose()).eval();
    const auto fa = magnetic_frequencies(p);
    const auto fb = magnetic_frequencies({g2, F2, 0.0});
    ASSERT_EQ(fa.a.size(), fb.a.size());
    EXPECT_EQ(fa.rank % 2, 0);
    for (std::size_t j = 0; j < fa.a.size(); ++j) EXPECT_NEAR(fb.a[j], fa.a[j], 1e-8 * fa.a[j]);
  }
}

TEST(LandauLevel, Examples) {
  const std::vector<int> k0{0}, k2{2}, k10{1, 0};
  EXPECT_NEAR(landau_level({{2 * pi}, 2, false}, 0.0, k0), 2 * pi, 1e-15);
  EXPECT_NEAR(landau_level({{0.5}, 2, false}, 0.0, k2), 2.5, 1e-15);
  EXPECT_NEAR(landau_level({{1.0, 3.0}, 4, false}, 0.5, k10), 6.5, 1e-15);
  EXPECT_THROW(landau_level({{1.0, 3.0}, 4, false}, 0.5, k0), std::invalid_argument);
}

TEST(LocalDensity, TorusPoint) {
  const auto phi = TestFunction::gaussian(2 * pi, 1);
  const double direct = oracle::landau_sum({2 * pi}, 0.0, [&](double x) { return oracle::gauss(2 * pi, 1, x); });
  EXPECT_NEAR(local_density_f0(point2(2 * pi), phi, 1e-15), direct, 1e-14);
  EXPECT_NEAR(direct, 1.0, 1e-15);
}

TEST(LocalDensity, TwoDimensionalIsLandauSum) {
  const auto phi = TestFunction::gaussian(2.0, 0.7);
  const auto p = point2(1.3, Eigen::Matrix2d{{2.0, 0.3}, {0.3, 1.0}}, -0.4);
  const double a = magnetic_frequencies(p).a[0];
  const double direct =
      a / (2 * pi) * oracle::landau_sum({a}, -0.4, [](double x) { return oracle::gauss(2.0, 0.7, x); }, 2000);
  EXPECT_NEAR(local_density_f0(p, phi, 1e-15), direct, 1e-14);
}

TEST(LocalDensity, ThreeTorusMatchesRadialOracle) {
  // (1/2pi)(2pi) * (1/2pi) * sum_k int_R phi(xi^2 + 2pi(2k+1)) d xi
  const auto phi = TestFunction::gaussian(2 * pi, 1);
  double sum = 0.0;
  for (int k = 0; k < 10; ++k) {
    sum += oracle::radial([](double x) { return oracle::gauss(2 * pi, 1, x); }, 1, 2 * pi * (2 * k + 1), 12.0);
  }
  const double want = sum / (2 * pi);
  EXPECT_NEAR(local_density_f0(torus3_point(), phi, 1e-15), want, 1e-11 * want);
}

TEST(LocalDensity, FiveDimensionalMatchesRadialOracle) {
  // d = 5 with a 4-dim symplectic block a = (1, 2) and a 1-dim kernel.
  PointMagneticData p;
  p.metric = Eigen::MatrixXd::Identity(5, 5);
  p.field = Eigen::MatrixXd::Zero(5, 5);
  p.field(0, 1) = 1.0;
  p.field(2, 3) = 2.0;
  p.field(1, 0) = -1.0;
  p.field(3, 2) = -2.0;
  const auto phi = TestFunction::gaussian(5.0, 1.0);
  double sum = 0.0;
  for (int k1 = 0; k1 < 8; ++k1)
    for (int k2 = 0; k2 < 5; ++k2)
      sum += oracle::radial([](double x) { return oracle::gauss(5.0, 1.0, x); }, 1, (2 * k1 + 1) + 2.0 * (2 * k2 + 1),
                            12.0);
  const double want = 2.0 / std::pow(2 * pi, 2) * sum / (2 * pi);
  EXPECT_NEAR(local_density_f0(p, phi, 1e-16), want, 1e-10 * want);
}

TEST(LocalDensity, TruncationDoublingChangesLessThanTolerance) {
  const auto phi = TestFunction::gaussian(3.0, 2.0);
  const auto p = point2(0.8);
  for (double tol : {1e-4, 1e-8, 1e-12}) {
    const double coarse = local_density_f0(p, phi, tol);
    const double fine = local_density_f0(p, phi, tol / 2);
    EXPECT_LT(std::abs(coarse - fine), tol);
    const double direct =
        0.8 / (2 * pi) * oracle::landau_sum({0.8}, 0.0, [](double x) { return oracle::gauss(3.0, 2.0, x); }, 4000);
    EXPECT_LT(std::abs(coarse - direct), tol);
  }
}

TEST(LocalDensity, ZeroFieldIsFreeDensity) {
  PointMagneticData p;
  p.metric = Eigen::MatrixXd::Identity(2, 2);
  p.field = Eigen::MatrixXd::Zero(2, 2);
  const auto phi = TestFunction::gaussian(3.0, 1.0);
  const double want =
      oracle::radial([](double x) { return oracle::gauss(3.0, 1.0, x); }, 2, 0.0, 4.0) / std::pow(2 * pi, 2);
  EXPECT_NEAR(local_density_f0(p, phi, 1e-15), want, 1e-11 * want);
  EXPECT_THROW(local_density_f0(p, phi, 0.0), std::invalid_argument);
}

TEST(IntegrateF0, SingleTorusNode) {
  const auto phi = TestFunction::gaussian(2 * pi, 1);
  const auto q = flat_torus_quadrature(2, 1, [](double, double) { return 1.0; });
  ASSERT_EQ(q.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(integrate_f0(q, phi), local_density_f0(q.nodes[0].point, phi, 1e-14));
}

TEST(IntegrateF0, SphereMatchesLandauSum) {
  for (double R : {1.0, 0.7, 2.0}) {
    const auto phi = TestFunction::gaussian(1.5, 0.5);
    const double want = oracle::landau_sum({0.5 / (R * R)}, 0.0, [](double x) { return oracle::gauss(1.5, 0.5, x); },
                                           4000);
    const double got = integrate_f0(sphere_quadrature(R, 12, 5), phi);
    EXPECT_NEAR(got, want, 1e-10 * want) << "R=" << R;
  }
  EXPECT_NEAR(integrate_f0(sphere_quadrature(1.0, 8, 3), TestFunction::gaussian(1.5, 0.5)), 1.271006044331, 1e-11);
}

TEST(IntegrateF0, HyperbolicGenusTwo) {
  const auto phi = TestFunction::gaussian(1.0, 1.0);
  const double want =
      2.0 * (2 - 1) * oracle::landau_sum({1.0}, 0.0, [](double x) { return oracle::gauss(1.0, 1.0, x); });
  EXPECT_NEAR(integrate_f0(hyperbolic_quadrature(1.0, 2), phi), want, 1e-13);
}

TEST(IntegrateF0, MixedRankThrows) {
  auto q = flat_torus_quadrature(2, 2, [](double x, double) { return x < 0.5 ? 1.0 : 0.0; });
  EXPECT_THROW(integrate_f0(q, TestFunction::gaussian(1, 1)), std::invalid_argument);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomials) {
  const auto [x, w] = gauss_legendre(7);
  for (int p = 0; p <= 13; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], p);
    EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14) << p;
  }
}

TEST(Quadrature, SphereVolume) {
  EXPECT_NEAR(sphere_quadrature(1.5, 10, 4).total_volume, 4 * pi * 2.25, 1e-12);
  EXPECT_NEAR(hyperbolic_quadrature(1.0, 3).total_volume, 8 * pi, 1e-13);
}

TEST(Quadrature, CsvRoundTrip) {
  const auto q = sphere_quadrature(1.3, 3, 2);
  std::stringstream ss;
  write_quadrature_csv(ss, q);
  const auto back = read_quadrature_csv(ss);
  ASSERT_EQ(back.nodes.size(), q.nodes.size());
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    EXPECT_EQ(back.nodes[i].weight, q.nodes[i].weight);
    EXPECT_EQ((back.nodes[i].point.metric - q.nodes[i].point.metric).norm(), 0.0);
    EXPECT_EQ((back.nodes[i].point.field - q.nodes[i].point.field).norm(), 0.0);
  }
  std::stringstream bad("2,1,0,0,1,0.5,0\n");
  EXPECT_THROW(read_quadrature_csv(bad), std::invalid_argument);
}
