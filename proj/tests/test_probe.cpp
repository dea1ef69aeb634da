#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "magtrace/probe.hpp"
#include "oracles.hpp"

using magtrace::TestFunction;

TEST(Probe, GaussianPeakAndSubstitution) {
  EXPECT_DOUBLE_EQ(TestFunction::gaussian(0, 1).value(0), 1.0);
  EXPECT_DOUBLE_EQ(TestFunction::gaussian(2 * std::numbers::pi, 1)(2 * std::numbers::pi), 1.0);
  EXPECT_NEAR(TestFunction::gaussian(1.5, 0.5).value(0.5), std::exp(-2.0), 1e-16);
}

TEST(Probe, DerivativeExamples) {
  const auto phi = TestFunction::gaussian(0, 1);
  EXPECT_NEAR(phi.derivative(1, 0.0), 0.0, 1e-16);
  EXPECT_NEAR(phi.derivative(2, 0.0), -1.0, 1e-16);
  EXPECT_NEAR(phi.derivative(1, 1.0), -std::exp(-0.5), 1e-15);
}

TEST(Probe, DerivativeOrderOutOfRangeThrows) {
  const auto phi = TestFunction::gaussian(0, 1);
  EXPECT_THROW(phi.derivative(9, 0.0), std::invalid_argument);
  EXPECT_THROW(phi.derivative(-1, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(phi.derivative(8, 0.3));
}

TEST(Probe, InvalidParametersThrow) {
  EXPECT_THROW(TestFunction::gaussian(0, 0), std::invalid_argument);
  EXPECT_THROW(TestFunction::gaussian(0, -1), std::invalid_argument);
  EXPECT_THROW(TestFunction::hermite_gaussian(0, 1, 17), std::invalid_argument);
}

TEST(Probe, FourierTransformExamples) {
  const auto phi = TestFunction::gaussian(0, 1);
  EXPECT_NEAR(std::abs(phi.fourier_transform(0) - std::sqrt(2 * std::numbers::pi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(phi.fourier_transform(10)), std::sqrt(2 * std::numbers::pi) * std::exp(-50.0), 1e-30);

  const auto shifted = TestFunction::gaussian(1, 1);
  const auto want = oracle::fourier([](double l) { return oracle::gauss(1, 1, l); }, 1, 1, std::numbers::pi);
  EXPECT_LT(std::abs(shifted.fourier_transform(std::numbers::pi) - want), 1e-13);
  const std::complex<double> closed =
      std::sqrt(2 * std::numbers::pi) * std::exp(-std::numbers::pi * std::numbers::pi / 2) *
      std::complex<double>(std::cos(std::numbers::pi), -std::sin(std::numbers::pi));
  EXPECT_LT(std::abs(shifted.fourier_transform(std::numbers::pi) - closed), 1e-15);
}

TEST(Probe, GaussianDecaysWithinTenSigma) {
  for (double sigma : {0.1, 1.0, 7.0}) {
    const auto phi = TestFunction::gaussian(3.0, sigma);
    EXPECT_LT(std::abs(phi.value(3.0 + 10 * sigma)), 1e-20 * phi.value(3.0));
    EXPECT_LT(std::abs(phi.value(3.0 - 10 * sigma)), 1e-20 * phi.value(3.0));
  }
}

TEST(Probe, FourierAtZeroIsTotalIntegral) {
  for (auto phi : {TestFunction::gaussian(2, 0.7), TestFunction::hermite_gaussian(1, 1.3, 2),
                   TestFunction::hermite_gaussian(-1, 0.5, 4)}) {
    const double mu = phi.center(), s = phi.width();
    const double integral = oracle::trapezoid([&](double l) { return phi.value(l); }, mu - 40 * s, mu + 40 * s, 20000);
    const double ft0 = phi.fourier_transform(0).real();
    EXPECT_LE(std::abs(ft0 - integral), 1e-10 * std::max(1.0, std::abs(integral))) << phi.describe();
  }
}

TEST(Probe, DerivativesMatchCenteredDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(-4.0, 4.0);
  for (auto phi : {TestFunction::gaussian(0.5, 1.2), TestFunction::hermite_gaussian(0.0, 0.8, 3)}) {
    for (int trial = 0; trial < 100; ++trial) {
      const double x = lam(rng);
      for (int r = 1; r <= 4; ++r) {
        const double h = 1e-5;
        const double fd = (phi.derivative(r - 1, x + h) - phi.derivative(r - 1, x - h)) / (2 * h);
        const double exact = phi.derivative(r, x);
        const double scale = std::max(std::abs(exact), 1e-2 * std::pow(phi.width(), -r));
        EXPECT_LT(std::abs(fd - exact) / scale, 1e-6) << "r=" << r << " x=" << x;
      }
    }
  }
}

TEST(Probe, FourierMatchesQuadratureAndConjugateSymmetry) {
  for (auto phi : {TestFunction::gaussian(1.0, 1.0), TestFunction::hermite_gaussian(2.0, 0.6, 3)}) {
    auto f = [&](double l) { return phi.value(l); };
    for (double k = -20; k <= 20; k += 2.5) {
      const auto want = oracle::fourier(f, phi.center(), phi.width(), k);
      EXPECT_LT(std::abs(phi.fourier_transform(k) - want), 1e-10) << "k=" << k;
      EXPECT_LT(std::abs(phi.fourier_transform(-k) - std::conj(phi.fourier_transform(k))), 1e-14);
    }
  }
}

TEST(Probe, EnvelopeDominatesPastOnset) {
  for (auto phi : {TestFunction::gaussian(1.0, 0.5), TestFunction::hermite_gaussian(0.0, 1.0, 5)}) {
    for (double x = phi.decay_onset(); x < phi.decay_onset() + 15 * phi.width(); x += 0.01) {
      EXPECT_LE(std::abs(phi.value(x)), phi.envelope(x) * (1 + 1e-14));
      const double u = 0.37 * phi.width();
      EXPECT_LE(phi.envelope(x + u),
                phi.envelope(x) * std::exp(-u * u / (2 * phi.width() * phi.width())) * (1 + 1e-12));
    }
    for (double x = -10; x < 10; x += 0.01) EXPECT_LE(std::abs(phi.value(x)), phi.sup_bound());
  }
}
