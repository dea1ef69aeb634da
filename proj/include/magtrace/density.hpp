#pragma once

// Smoothed spectral density Y_N(phi) = sum_j phi(nu_{N,j} / N) over the exact
// model spectra, with a certified bound on the omitted tail.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "magtrace/error.hpp"
#include "magtrace/probe.hpp"
#include "magtrace/series.hpp"
#include "magtrace/spectra.hpp"

namespace magtrace {

struct DensityValue {
  int N = 0;
  double value = 0.0;
  double tail_bound = 0.0;
  double continuous_part_bound = 0.0;
};

/// Upper bound on #{lines with nu/N <= x} (multiplicities included), as a
/// function of the rescaled energy x. Not used for the hyperbolic model,
/// whose discrete part is finite.
inline GrowthBound rescaled_count_bound(const ModelSystem& model, int N) {
  const double n = N;
  const double pi = std::numbers::pi;
  GrowthBound g;
  switch (model.kind) {
    case ModelKind::torus2:
      // N (x / 4pi + 1)
      g.terms = {{n / (4.0 * pi), 1.0}, {n, 0.0}};
      break;
    case ModelKind::torus3:
      // N (x / 4pi + 1)(sqrt(N x) / pi + 1)
      g.terms = {{n * std::sqrt(n) / (4.0 * pi * pi), 1.5},
                 {n / (4.0 * pi), 1.0},
                 {n * std::sqrt(n) / pi, 0.5},
                 {n, 0.0}};
      break;
    case ModelKind::sphere: {
      // (J+1) N + (J+1)^2 with J + 1 <= R^2 x + 1/2
      const double r2 = model.radius * model.radius;
      g.terms = {{r2 * r2, 2.0}, {(n + 1.0) * r2, 1.0}, {0.5 * n + 0.25, 0.0}};
      break;
    }
    case ModelKind::hyperbolic:
      g.terms = {{(model.genus - 1.0) * n * n, 0.0}};
      break;
  }
  return g;
}

/// Weyl-type overcount for the continuous-type hyperbolic part:
/// #{lambda_l <= L} <= Area L / (4 pi) + 10 genus, with Area = 4 pi (genus-1) R^2.
/// In the rescaled variable x = nu/N = lambda_l/N + N/R^2 this becomes a bound
/// in (x - N/R^2)_+.
inline GrowthBound hyperbolic_continuous_count_bound(const ModelSystem& model, int N) {
  const double area = 4.0 * std::numbers::pi * (model.genus - 1.0) * model.radius * model.radius;
  GrowthBound g;
  g.shift = static_cast<double>(N) / (model.radius * model.radius);
  g.terms = {{area * N / (4.0 * std::numbers::pi), 1.0}, {10.0 * model.genus, 0.0}};
  return g;
}

inline double hyperbolic_continuous_bound(const ModelSystem& model, int N, const TestFunction& phi) {
  const GrowthBound count = hyperbolic_continuous_count_bound(model, N);
  const double start = count.shift;
  const double onset = phi.decay_onset();
  if (start >= onset) {
    return count(start) * phi.envelope(start) + envelope_tail(count, phi, start, phi.width());
  }
  return count(onset) * phi.sup_bound() + envelope_tail(count, phi, onset, phi.width());
}

inline DensityValue smoothed_density(const ModelSystem& model, int N, const TestFunction& phi,
                                     double tol) {
  require(N >= 1, "N must be a positive integer");
  require(tol > 0.0, "tol must be positive");
  DensityValue out;
  out.N = N;
  Spectrum spec;
  if (model.kind == ModelKind::hyperbolic) {
    const double r2 = model.radius * model.radius;
    spec = spectrum(model, N, 2.0 * N / r2);
    out.continuous_part_bound = hyperbolic_continuous_bound(model, N, phi);
  } else {
    const auto cut =
        certify_cut(rescaled_count_bound(model, N), phi, 1.0, tol, lowest_rescaled_level(model));
    out.tail_bound = cut.tail_bound;
    spec = spectrum(model, N, cut.cut);
  }
  CompensatedSum acc;
  for (const auto& line : spec.lines) {
    acc.add(static_cast<double>(line.multiplicity) * phi.value(line.eigenvalue / N));
  }
  out.value = acc.value();
  return out;
}

inline std::vector<DensityValue> density_curve(const ModelSystem& model, const TestFunction& phi,
                                               std::span<const int> Ns, double tol) {
  require(!Ns.empty(), "density_curve: list of N must be non-empty");
  std::vector<DensityValue> out;
  out.reserve(Ns.size());
  for (int N : Ns) out.push_back(smoothed_density(model, N, phi, tol));
  return out;
}

}  // namespace magtrace
