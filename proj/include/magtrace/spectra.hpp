#pragma once

// Exact spectra of the four constant-field model systems.
//
//   torus2      nu = 2 pi N (2j+1),                      mult N
//   torus3      nu = 2 pi N (2j+1) + (2 pi k)^2,         mult N per (j, k), k in Z
//   sphere      nu = (j(j+1) + N (2j+1)/2) / R^2,        mult N + 2j + 1
//   hyperbolic  nu = ((2j+1) N - j(j+1)) / R^2,          mult (genus-1)(2N-2j-1), j < N
//
// The hyperbolic surface also has a continuous-type part lambda_l + N^2/R^2
// built from the scalar Laplace spectrum; it is not enumerated, only its
// threshold is reported.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "magtrace/error.hpp"

namespace magtrace {

struct SpectralLine {
  double eigenvalue = 0.0;
  long long multiplicity = 0;
};

enum class ModelKind { torus2, torus3, sphere, hyperbolic };

struct ModelSystem {
  ModelKind kind = ModelKind::torus2;
  double radius = 1.0;
  int genus = 2;

  static ModelSystem torus2() { return {ModelKind::torus2, 1.0, 0}; }
  static ModelSystem torus3() { return {ModelKind::torus3, 1.0, 0}; }
  static ModelSystem sphere(double radius) {
    require(radius > 0.0, "sphere radius must be positive");
    return {ModelKind::sphere, radius, 0};
  }
  static ModelSystem hyperbolic(double radius, int genus) {
    require(radius > 0.0, "hyperbolic radius must be positive");
    require(genus >= 2, "genus must be >= 2");
    return {ModelKind::hyperbolic, radius, genus};
  }

  int dim() const { return kind == ModelKind::torus3 ? 3 : 2; }

  std::string name() const {
    switch (kind) {
      case ModelKind::torus2: return "torus2";
      case ModelKind::torus3: return "torus3";
      case ModelKind::sphere: return "sphere";
      case ModelKind::hyperbolic: return "hyperbolic";
    }
    return "?";
  }
};

struct Spectrum {
  std::vector<SpectralLine> lines;
  // Hyperbolic only: every continuous-type eigenvalue satisfies nu >= this.
  double continuous_threshold = std::numeric_limits<double>::infinity();
};

/// Smallest nu/N over all N.
inline double lowest_rescaled_level(const ModelSystem& model) {
  switch (model.kind) {
    case ModelKind::torus2:
    case ModelKind::torus3: return 2.0 * std::numbers::pi;
    case ModelKind::sphere: return 0.5 / (model.radius * model.radius);
    case ModelKind::hyperbolic: return 1.0 / (model.radius * model.radius);
  }
  return 0.0;
}

inline constexpr double kMergeRelTol = 1e-12;

inline Spectrum spectrum(const ModelSystem& model, int N, double rescaled_cutoff) {
  require(N >= 1, "N must be a positive integer");
  require(rescaled_cutoff > 0.0, "rescaled cutoff must be positive");
  const double nu_max = rescaled_cutoff * N;
  const double two_pi = 2.0 * std::numbers::pi;
  Spectrum out;
  auto& lines = out.lines;
  switch (model.kind) {
    case ModelKind::torus2:
      for (long long j = 0;; ++j) {
        const double nu = two_pi * N * (2.0 * j + 1.0);
        if (nu > nu_max) break;
        lines.push_back({nu, N});
      }
      break;
    case ModelKind::torus3: {
      std::vector<SpectralLine> raw;
      for (long long j = 0;; ++j) {
        const double base = two_pi * N * (2.0 * j + 1.0);
        if (base > nu_max) break;
        raw.push_back({base, N});
        for (long long k = 1;; ++k) {
          const double nu = base + (two_pi * k) * (two_pi * k);
          if (nu > nu_max) break;
          raw.push_back({nu, 2LL * N});
        }
      }
      std::sort(raw.begin(), raw.end(),
                [](const SpectralLine& a, const SpectralLine& b) { return a.eigenvalue < b.eigenvalue; });
      for (const auto& line : raw) {
        if (!lines.empty() && line.eigenvalue - lines.back().eigenvalue <= kMergeRelTol * line.eigenvalue) {
          lines.back().multiplicity += line.multiplicity;
        } else {
          lines.push_back(line);
        }
      }
      break;
    }
    case ModelKind::sphere: {
      const double r2 = model.radius * model.radius;
      for (long long j = 0;; ++j) {
        const double nu = (j * (j + 1.0) + 0.5 * N * (2.0 * j + 1.0)) / r2;
        if (nu > nu_max) break;
        lines.push_back({nu, N + 2 * j + 1});
      }
      break;
    }
    case ModelKind::hyperbolic: {
      const double r2 = model.radius * model.radius;
      for (long long j = 0; j < N; ++j) {
        const double nu = ((2.0 * j + 1.0) * N - j * (j + 1.0)) / r2;
        if (nu > nu_max) break;
        lines.push_back({nu, (model.genus - 1LL) * (2LL * N - 2 * j - 1)});
      }
      out.continuous_threshold = static_cast<double>(N) * N / r2;
      break;
    }
  }
  return out;
}

}  // namespace magtrace
