#pragma once

// Certified truncation of probe-weighted sums over discrete level sets.
//
// Every infinite sum in the library has the shape  sum_i w_i |phi(x_i)|  with
// levels x_i that are bounded below and whose counting function
// #{i : x_i <= Lambda} (multiplicities included) is dominated by a
// GrowthBound C(Lambda) = sum_p c_p (Lambda - shift)_+^{e_p} with c_p >= 0.
// Past the probe's decay onset the envelope is decreasing, so the omitted
// mass above a cut L is at most
//
//     sum_{i >= 0} C(L + (i+1) h) * E(L + i h)
//
// and the ratio of consecutive terms is bounded by a decreasing sequence,
// which closes the series with a geometric remainder.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "magtrace/error.hpp"
#include "magtrace/probe.hpp"

namespace magtrace {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct GrowthTerm {
  double coefficient;
  double exponent;
};

/// Monotone upper bound on a level-counting function.
struct GrowthBound {
  double shift = 0.0;
  std::vector<GrowthTerm> terms;

  double operator()(double lambda) const {
    const double u = lambda - shift;
    double total = 0.0;
    for (const auto& t : terms) {
      if (t.exponent == 0.0) {
        total += t.coefficient;
      } else if (u > 0.0) {
        total += t.coefficient * std::pow(u, t.exponent);
      }
    }
    return total;
  }

  double max_exponent() const {
    double e = 0.0;
    for (const auto& t : terms) e = std::max(e, t.exponent);
    return e;
  }

  /// Product of (a_j u + b_j) factors, expanded as a polynomial in u.
  static GrowthBound affine_product(double shift, std::span<const std::pair<double, double>> factors) {
    std::vector<double> poly{1.0};
    for (const auto& [slope, offset] : factors) {
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += offset * poly[i];
        next[i + 1] += slope * poly[i];
      }
      poly = std::move(next);
    }
    GrowthBound g;
    g.shift = shift;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (poly[i] != 0.0) g.terms.push_back({poly[i], static_cast<double>(i)});
    }
    return g;
  }
};

/// Upper bound on sum over levels x > from of |phi(x)|, given that the number
/// of levels <= Lambda is at most count(Lambda). Requires from >= decay onset.
/// Returns +infinity when no geometric closure is found.
inline double envelope_tail(const GrowthBound& count, const TestFunction& phi, double from,
                            double step, int max_steps = 200000) {
  require(from >= phi.decay_onset() - 1e-12 * std::max(1.0, std::abs(from)),
          "envelope_tail: cut must lie past the probe decay onset");
  require(step > 0.0, "envelope_tail: step must be positive");
  const double p = count.max_exponent();
  double acc = 0.0;
  for (int i = 0; i < max_steps; ++i) {
    const double x = from + i * step;
    const double e_here = phi.envelope(x);
    if (e_here == 0.0) return acc;
    const double term = count(x + step) * e_here;
    const double u = x + step - count.shift;
    if (u > 0.0) {
      const double growth = p == 0.0 ? 1.0 : std::pow((u + step) / u, p);
      const double rho = growth * phi.envelope(x + step) / e_here;
      if (rho < 1.0) return acc + term / (1.0 - rho);
    }
    acc += term;
  }
  return std::numeric_limits<double>::infinity();
}

/// Visits every k in Z_+^m with sum_j (2 k_j + 1) c_j <= limit, passing
/// (k, sum_j (2 k_j + 1) c_j).
inline void for_each_landau_index(std::span<const double> c, double limit,
                                  const std::function<void(std::span<const int>, double)>& visit) {
  const std::size_t m = c.size();
  if (m == 0) {
    if (0.0 <= limit) visit({}, 0.0);
    return;
  }
  double base = 0.0;
  for (double cj : c) base += cj;
  if (base > limit) return;
  std::vector<int> k(m, 0);
  // Odometer over the simplex-like region; levels grow by 2 c_j per step in slot j.
  std::function<void(std::size_t, double)> rec = [&](std::size_t j, double level) {
    if (j == m) {
      visit(k, level);
      return;
    }
    for (k[j] = 0; level + 2.0 * k[j] * c[j] <= limit; ++k[j]) {
      rec(j + 1, level + 2.0 * k[j] * c[j]);
    }
    k[j] = 0;
  };
  rec(0, base);
}

/// GrowthBound for #{k : sum_j (2k_j+1) c_j + shift <= Lambda}.
inline GrowthBound landau_count_bound(std::span<const double> c, double shift) {
  std::vector<std::pair<double, double>> factors;
  for (double cj : c) factors.emplace_back(1.0 / (2.0 * cj), 1.0);
  return GrowthBound::affine_product(shift, factors);
}

struct CertifiedCut {
  double cut = 0.0;
  double tail_bound = 0.0;
};

/// Smallest cut on the grid start + i * sigma (i >= 0) whose certified omitted
/// mass weight * envelope_tail(count, phi, cut) is below tol.
inline CertifiedCut certify_cut(const GrowthBound& count, const TestFunction& phi, double weight,
                                double tol, double start) {
  require(tol > 0.0, "tolerance must be positive");
  const double step = phi.width();
  double cut = std::max(phi.decay_onset(), start);
  for (int iter = 0; iter < 100000; ++iter) {
    const double tail = weight * envelope_tail(count, phi, cut, step);
    if (tail < tol) return {cut, tail};
    cut += step;
  }
  throw NumericalError("tail bound not certifiable below tolerance " + std::to_string(tol));
}

struct CertifiedSum {
  double value = 0.0;
  double tail_bound = 0.0;
  double cut = 0.0;
  std::size_t terms = 0;
};

/// Sum over k in Z_+^m of term(beta_k + shift), where |term(x)| <= tail_weight * phi.envelope(x)
/// past the decay onset. The cut is raised in steps of sigma until the certified
/// omitted mass is below tol; terms are accumulated in ascending level order.
inline CertifiedSum certified_landau_sum(std::span<const double> c, double shift,
                                         const TestFunction& phi, double tail_weight, double tol,
                                         const std::function<double(double)>& term) {
  for (double cj : c) require(cj > 0.0, "Landau frequencies must be positive");
  double lowest = shift;
  for (double cj : c) lowest += cj;
  const auto [cut, tail] =
      certify_cut(landau_count_bound(c, shift), phi, tail_weight, tol, lowest + phi.width());

  std::vector<double> levels;
  for_each_landau_index(c, cut - shift,
                        [&](std::span<const int>, double beta) { levels.push_back(beta + shift); });
  std::sort(levels.begin(), levels.end());
  CompensatedSum acc;
  for (double x : levels) acc.add(term(x));
  return {acc.value(), tail, cut, levels.size()};
}

}  // namespace magtrace
