#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "magtrace/density.hpp"
#include "magtrace/fit.hpp"
#include "oracles.hpp"

using namespace magtrace;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<std::pair<double, double>> density_samples(const ModelSystem& model, const TestFunction& phi,
                                                       const std::vector<int>& Ns) {
  std::vector<std::pair<double, double>> out;
  for (const auto& v : density_curve(model, phi, Ns, 1e-15)) out.emplace_back(v.N, v.value);
  return out;
}

const std::vector<int> kSphereNs{32, 48, 64, 96, 128, 192, 256};

}  // namespace

TEST(Fit, SyntheticExact) {
  std::vector<std::pair<double, double>> s;
  for (double N : {2.0, 3.0, 5.0, 8.0, 13.0, 21.0}) s.emplace_back(N, 3 * N - 5 + 7 / N);
  const std::vector<double> powers{1, 0, -1};
  const auto f = fit_expansion(s, powers);
  EXPECT_NEAR(f.coefficients[0], 3, 1e-10);
  EXPECT_NEAR(f.coefficients[1], -5, 1e-10);
  EXPECT_NEAR(f.coefficients[2], 7, 1e-10);
  EXPECT_GE(f.residual_rms, 0.0);
  EXPECT_EQ(f.coefficients.size(), f.powers.size());
}

TEST(Fit, RandomExactRecovery) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  const std::vector<double> lattice{1, 0.5, 0, -0.5, -1};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> powers;
    for (double p : lattice)
      if (rng() % 2) powers.push_back(p);
    if (powers.empty()) powers.push_back(0.0);
    std::vector<double> c;
    for (std::size_t i = 0; i < powers.size(); ++i) c.push_back(coef(rng));
    std::vector<std::pair<double, double>> s;
    for (double N : {4.0, 9.0, 16.0, 25.0, 36.0, 49.0, 64.0, 100.0}) {
      double v = 0.0;
      for (std::size_t i = 0; i < powers.size(); ++i) v += c[i] * std::pow(N, powers[i]);
      s.emplace_back(N, v);
    }
    const auto f = fit_expansion(s, powers);
    for (std::size_t i = 0; i < powers.size(); ++i) EXPECT_NEAR(f.coefficients[i], c[i], 1e-10 * std::max(1.0, std::abs(c[i])));
  }
}

// Measured in the column-equilibrated, relatively weighted coordinates the
// condition estimate refers to: |dx| <= cond * eta * |x| for consistent data.
TEST(Fit, StabilityUnderTinyNoise) {
  std::vector<std::pair<double, double>> s, noisy;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double eta = 1e-10;
  const std::vector<double> Ns{10.0, 20.0, 40.0, 80.0, 160.0, 320.0};
  for (double N : Ns) {
    const double v = 2 * N + 1 - 3 / N;
    s.emplace_back(N, v);
    noisy.emplace_back(N, v * (1 + eta * u(rng)));
  }
  const std::vector<double> powers{1, 0, -1};
  const auto a = fit_expansion(s, powers);
  const auto b = fit_expansion(noisy, powers);
  double dx = 0.0, x = 0.0;
  for (int r = 0; r < 3; ++r) {
    double col = 0.0;
    for (double N : Ns) col += std::pow(N, 2 * (powers[r] + 1));
    const double scale = std::sqrt(col);
    dx += std::pow(scale * (a.coefficients[r] - b.coefficients[r]), 2);
    x += std::pow(scale * a.coefficients[r], 2);
  }
  EXPECT_GT(dx, 0.0);
  EXPECT_LE(std::sqrt(dx), a.condition_estimate * eta * std::sqrt(x));
}

TEST(Fit, Torus2Data) {
  const auto phi = TestFunction::gaussian(2 * pi, 1);
  const double S = oracle::landau_sum({2 * pi}, 0.0, [](double x) { return oracle::gauss(2 * pi, 1, x); });
  std::vector<int> Ns;
  for (int N = 1; N <= 40; ++N) Ns.push_back(N);
  const std::vector<double> powers{1, 0};
  const auto f = fit_expansion(density_samples(ModelSystem::torus2(), phi, Ns), powers);
  EXPECT_NEAR(f.coefficients[0], S, 1e-10);
  EXPECT_NEAR(f.coefficients[1], 0.0, 1e-10);
}

TEST(Fit, SphereCoefficients) {
  const auto phi = TestFunction::gaussian(0.0, 10.0);
  const double R = 1.0;
  double f0 = 0.0, f1 = 0.0;
  for (int j = 0; j < 2000; ++j) {
    const double x = (2 * j + 1) / (2 * R * R);
    const double p = oracle::gauss(0.0, 10.0, x);
    const double dp = -x / 100.0 * p;
    f0 += p;
    f1 += dp * j * (j + 1.0) / (R * R) + p * (2 * j + 1);
  }
  const std::vector<double> powers{1, 0, -1, -2};
  const auto f = fit_expansion(density_samples(ModelSystem::sphere(R), phi, kSphereNs), powers);
  EXPECT_NEAR(f.coefficients[0], f0, 1e-8 * f0);
  EXPECT_NEAR(f.coefficients[1], f1, 1e-4 * std::abs(f1));
}

TEST(Fit, SphereHasNoHalfIntegerPowers) {
  const auto phi = TestFunction::gaussian(0.0, 10.0);
  const std::vector<double> powers{1, 0.5, 0, -0.5};
  const auto f = fit_expansion(density_samples(ModelSystem::sphere(1.0), phi, kSphereNs), powers);
  EXPECT_LT(std::abs(f.coefficients[1]), 1e-6 * std::abs(f.coefficients[0]));
  EXPECT_LT(std::abs(f.coefficients[3]), 1e-6 * std::abs(f.coefficients[0]));
}

TEST(Fit, InvalidInputs) {
  std::vector<std::pair<double, double>> s{{1, 1}, {2, 2}, {3, 3}};
  const std::vector<double> two{1, 0};
  EXPECT_THROW(fit_expansion(s, two), std::invalid_argument);
  s.push_back({3, 4});
  EXPECT_THROW(fit_expansion(s, std::vector<double>{1}), std::invalid_argument);
  std::vector<std::pair<double, double>> t{{10, 1}, {11, 2}, {12, 3}, {13, 4}, {14, 5}};
  EXPECT_THROW(fit_expansion(t, std::vector<double>{1, 0.9999999999, 0}), NumericalError);
}

TEST(Richardson, ExactQuadratic) {
  const std::vector<std::pair<double, double>> v{{0.4, 2 + 0.16}, {0.2, 2 + 0.04}, {0.1, 2 + 0.01}};
  EXPECT_NEAR(richardson(v, 2).limit, 2.0, 1e-12);
}

TEST(Richardson, Exponential) {
  std::vector<std::pair<double, double>> v;
  const std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  for (double h : hs) v.emplace_back(h, std::exp(h));
  const auto r = richardson(v, 3);
  // Interpolation remainder at 0: exp(xi)/4! * prod(h), xi in (0, 0.2).
  double prod = 1.0;
  for (double h : hs) prod *= h;
  const double err = 1.0 - r.limit;
  EXPECT_GE(err, prod / 24 * (1 - 1e-9));
  EXPECT_LE(err, prod / 24 * std::exp(0.2));
  EXPECT_GE(r.error_estimate, err);
  EXPECT_LT(r.error_estimate, 1e-3);
}

TEST(Richardson, Preconditions) {
  const std::vector<std::pair<double, double>> one{{0.1, 1.0}};
  EXPECT_THROW(richardson(one, 1), std::invalid_argument);
  const std::vector<std::pair<double, double>> up{{0.1, 1.0}, {0.2, 1.0}};
  EXPECT_THROW(richardson(up, 1), std::invalid_argument);
}
