#pragma once

// Eigenvalue counting for (1/N) H_N, Demailly's limit
//
//   lim N^{-d/2} #{nu/N <= lambda}
//     = 2^{n-d} pi^{-d/2} / Gamma(d/2 - n + 1) sum_k int_M (lambda - Lambda_k(x))_+^{d/2-n} prod a_j(x) dv,
//
// and the band set: the union over k of the ranges of Lambda_k over M.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <span>
#include <vector>

#include "magtrace/error.hpp"
#include "magtrace/geometry.hpp"
#include "magtrace/series.hpp"
#include "magtrace/spectra.hpp"

namespace magtrace {

struct CountingResult {
  int N = 0;
  double lambda = 0.0;
  long long count = 0;
  double scaled = 0.0;
};

inline CountingResult counting_function(const ModelSystem& model, int N, double lambda) {
  require(N >= 1, "N must be a positive integer");
  require(lambda > 0.0, "lambda must be positive");
  if (model.kind == ModelKind::hyperbolic) {
    const double limit = N / (model.radius * model.radius);
    require(lambda < limit, "hyperbolic counting needs lambda < N/R^2 (continuous part unknown)");
  }
  CountingResult out{N, lambda, 0, 0.0};
  for (const auto& line : spectrum(model, N, lambda).lines) out.count += line.multiplicity;
  out.scaled = static_cast<double>(out.count) / std::pow(static_cast<double>(N), 0.5 * model.dim());
  return out;
}

struct DemaillyLimit {
  double value = 0.0;
  bool near_jump = false;
};

inline constexpr double kJumpProximity = 1e-9;

/// For d = 2n the weight (lambda - Lambda)_+^0 is 1 when Lambda < lambda and 0 otherwise.
inline DemaillyLimit demailly_limit(const ManifoldQuadrature& q, double lambda, int d) {
  DemaillyLimit out;
  CompensatedSum acc;
  for (const auto& node : q.nodes) {
    require(node.point.dim() == d, "demailly_limit: node dimension differs from d");
    const MagneticFrequencies freqs = magnetic_frequencies(node.point);
    const int n = static_cast<int>(freqs.a.size());
    const double expo = 0.5 * d - n;
    const double pref = std::pow(2.0, n - d) * std::pow(std::numbers::pi, -0.5 * d) / std::tgamma(expo + 1.0);
    double local = 0.0;
    for_each_landau_index(freqs.a, lambda - node.point.potential + kJumpProximity,
                          [&](std::span<const int>, double beta) {
                            const double level = beta + node.point.potential;
                            if (std::abs(lambda - level) <= kJumpProximity) out.near_jump = true;
                            if (level < lambda) local += expo == 0.0 ? 1.0 : std::pow(lambda - level, expo);
                          });
    acc.add(node.weight * pref * freqs.product() * local);
  }
  out.value = acc.value();
  return out;
}

struct BandSet {
  std::vector<std::pair<double, double>> intervals;
};

inline BandSet band_set(const ManifoldQuadrature& q, double max_level) {
  BandSet out;
  if (q.nodes.empty()) return out;
  std::vector<MagneticFrequencies> freqs;
  for (const auto& node : q.nodes) {
    freqs.push_back(magnetic_frequencies(node.point));
    require(2 * static_cast<int>(freqs.back().a.size()) == node.point.dim(),
            "band_set requires maximal rank at every node");
    require(freqs.back().a.size() == freqs.front().a.size(), "band_set: mixed rank across nodes");
  }
  std::set<std::vector<int>> indices;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    for_each_landau_index(freqs[i].a, max_level - q.nodes[i].point.potential,
                          [&](std::span<const int> k, double) {
                            indices.emplace(k.begin(), k.end());
                          });
  }
  std::vector<std::pair<double, double>> raw;
  for (const auto& k : indices) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double level = landau_level(freqs[i], q.nodes[i].point.potential, k);
      lo = std::min(lo, level);
      hi = std::max(hi, level);
    }
    raw.emplace_back(lo, hi);
  }
  std::sort(raw.begin(), raw.end());
  for (const auto& iv : raw) {
    if (!out.intervals.empty() && iv.first <= out.intervals.back().second) {
      out.intervals.back().second = std::max(out.intervals.back().second, iv.second);
    } else {
      out.intervals.push_back(iv);
    }
  }
  return out;
}

}  // namespace magtrace
