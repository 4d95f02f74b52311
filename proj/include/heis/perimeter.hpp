#pragma once

// Horizontal and vertical boundaries of finite subsets of H^5_Z / H^3_Z.
//
//   ∂_h Ω   = {(x,y) ∈ Ω × Ωᶜ : x⁻¹y ∈ S}
//   ∂_v^t Ω = {(x,y) ∈ Ω × Ωᶜ : x⁻¹y ∈ {Z^t, Z^-t}}
//   |∂_v Ω| = (Σ_t |∂_v^t Ω|² / t²)^{1/2}
//
// Beyond the largest fiber span T of Ω no vertical segment of length t has
// both ends in Ω, so |∂_v^t Ω| = 2|Ω| for t > T and the tail of every
// series is a multiple of a zeta tail.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "heis/core.hpp"
#include "heis/error.hpp"
#include "heis/interval.hpp"

namespace heis {

/// Finite, deduplicated subset Ω of a discrete Heisenberg group.
template <class P>
class LatticeSet {
 public:
  using Traits = GroupTraits<P>;

  LatticeSet() = default;

  explicit LatticeSet(const std::vector<P>& pts) {
    keys_.reserve(pts.size());
    for (const auto& p : pts) keys_.push_back(Traits::pack(p));
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
    compute_extent();
  }

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

  bool contains(const P& p) const {
    if (!Traits::packable(p)) return false;
    return std::binary_search(keys_.begin(), keys_.end(), Traits::pack(p));
  }

  std::vector<P> points() const {
    std::vector<P> out;
    out.reserve(keys_.size());
    for (auto k : keys_) out.push_back(Traits::unpack(k));
    return out;
  }

  const std::vector<std::uint64_t>& keys() const { return keys_; }

  /// max over x ∈ Ω of the largest t ≥ 1 with x·Z^{±t} ∈ Ω; 0 if no fiber
  /// holds two points.
  std::int64_t z_extent() const { return z_extent_; }

  /// Left translate gΩ.
  LatticeSet translated(const P& g) const {
    std::vector<P> moved;
    moved.reserve(keys_.size());
    for (auto k : keys_) moved.push_back(mul(g, Traits::unpack(k)));
    return LatticeSet(moved);
  }

  /// Sorted heights of each vertical fiber.
  std::vector<std::vector<std::int64_t>> fibers() const {
    std::unordered_map<std::uint64_t, std::vector<std::int64_t>> by_fiber;
    for (auto k : keys_) {
      const P p = Traits::unpack(k);
      by_fiber[Traits::fiber(p)].push_back(Traits::height(p));
    }
    std::vector<std::pair<std::uint64_t, std::vector<std::int64_t>>> sorted(by_fiber.begin(),
                                                                           by_fiber.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(sorted.size());
    for (auto& [key, heights] : sorted) {
      std::sort(heights.begin(), heights.end());
      out.push_back(std::move(heights));
    }
    return out;
  }

 private:
  void compute_extent() {
    z_extent_ = 0;
    for (const auto& f : fibers()) z_extent_ = std::max(z_extent_, f.back() - f.front());
  }

  std::vector<std::uint64_t> keys_;
  std::int64_t z_extent_ = 0;
};

using LatticeSet5 = LatticeSet<DiscretePoint>;
using LatticeSet3 = LatticeSet<DiscretePoint3>;

/// All pairs (x, y) of the horizontal boundary.
template <class P>
std::vector<std::pair<P, P>> horizontal_boundary(const LatticeSet<P>& omega) {
  std::vector<std::pair<P, P>> out;
  for (const auto& x : omega.points()) {
    for (const auto& y : neighbors(x)) {
      if (!omega.contains(y)) out.emplace_back(x, y);
    }
  }
  return out;
}

template <class P>
std::int64_t horizontal_perimeter(const LatticeSet<P>& omega) {
  std::int64_t n = 0;
  for (const auto& x : omega.points()) {
    for (const auto& y : neighbors(x)) n += omega.contains(y) ? 0 : 1;
  }
  return n;
}

/// |∂_v^t Ω| for a single t ≥ 1.
template <class P>
std::int64_t vertical_t_boundary(const LatticeSet<P>& omega, std::int64_t t) {
  if (t < 1) throw DomainError("vertical boundary needs t >= 1");
  using T = GroupTraits<P>;
  std::int64_t n = 0;
  for (const auto& x : omega.points()) {
    n += omega.contains(T::vertical(x, t)) ? 0 : 1;
    n += omega.contains(T::vertical(x, -t)) ? 0 : 1;
  }
  return n;
}

/// |∂_v^t Ω| for t = 1..t_max, computed fiber by fiber. Index 0 is unused.
template <class P>
std::vector<std::int64_t> vertical_boundary_counts(const LatticeSet<P>& omega,
                                                   std::int64_t t_max) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(t_max) + 1, 0);
  const auto fibers = omega.fibers();
  for (std::int64_t t = 1; t <= t_max; ++t) {
    std::int64_t n = 0;
    for (const auto& f : fibers) {
      for (auto e : f) {
        n += std::binary_search(f.begin(), f.end(), e + t) ? 0 : 1;
        n += std::binary_search(f.begin(), f.end(), e - t) ? 0 : 1;
      }
    }
    counts[t] = n;
  }
  return counts;
}

/// Relative width of every certified series bracket.
inline constexpr double kTailTolerance = 1e-6;

/// |∂_v Ω| bracketed: exact sum for t ≤ T, tail Σ_{t>T} (2|Ω|)²/t² enclosed.
template <class P>
Interval vertical_perimeter(const LatticeSet<P>& omega, double rel_tol = kTailTolerance) {
  if (omega.empty()) return {0, 0};
  const auto T = omega.z_extent();
  const auto counts = vertical_boundary_counts(omega, T);
  double finite = 0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const double c = static_cast<double>(counts[t]);
    finite += c * c / (static_cast<double>(t) * static_cast<double>(t));
  }
  const double two_n = 2.0 * static_cast<double>(omega.size());
  return sqrt(certified_power_tail(finite, two_n * two_n, 2.0, T + 1, rel_tol));
}

/// |∂_v Ω| / |∂_h Ω|.
template <class P>
Interval iso_ratio(const LatticeSet<P>& omega) {
  if (omega.empty()) throw DomainError("isoperimetric ratio of the empty set");
  return vertical_perimeter(omega) / static_cast<double>(horizontal_perimeter(omega));
}

/// (Σ_t |∂_v^t Ω|^p / t^{1+p/2})^{1/p} for p > 2.
template <class P>
Interval p_vertical_norm(const LatticeSet<P>& omega, double p,
                         double rel_tol = kTailTolerance) {
  if (!(p > 2) || !std::isfinite(p)) throw DomainError("p-vertical norm requires 2 < p < inf");
  if (omega.empty()) return {0, 0};
  const auto T = omega.z_extent();
  const auto counts = vertical_boundary_counts(omega, T);
  const double s = 1 + p / 2;
  double finite = 0;
  for (std::int64_t t = 1; t <= T; ++t) {
    finite += std::pow(static_cast<double>(counts[t]), p) * std::pow(static_cast<double>(t), -s);
  }
  const double K = std::pow(2.0 * static_cast<double>(omega.size()), p);
  return pow(certified_power_tail(finite, K, s, T + 1, rel_tol), 1 / p);
}

/// sup_t |∂_v^t Ω| / √t. For t > T the quotient is 2|Ω|/√t, decreasing,
/// so t ≤ T+1 suffices.
template <class P>
double sup_vertical_rate(const LatticeSet<P>& omega) {
  if (omega.empty()) throw DomainError("vertical rate of the empty set");
  const auto T = omega.z_extent();
  const auto counts = vertical_boundary_counts(omega, T + 1);
  double best = 0;
  for (std::int64_t t = 1; t <= T + 1; ++t) {
    best = std::max(best, static_cast<double>(counts[t]) / std::sqrt(static_cast<double>(t)));
  }
  return best;
}

struct PerimeterReport {
  std::size_t size = 0;
  std::int64_t h_count = 0;
  std::int64_t z_extent = 0;
  std::vector<std::int64_t> v_counts;  // index t = 1..T, [0] unused
  Interval v_perimeter;
  Interval ratio;
  double sup_rate = 0;
  double p = 4;
  Interval p_norm;
};

template <class P>
PerimeterReport perimeter_report(const LatticeSet<P>& omega, double p = 4) {
  PerimeterReport r;
  r.size = omega.size();
  r.z_extent = omega.z_extent();
  r.p = p;
  if (omega.empty()) return r;
  r.h_count = horizontal_perimeter(omega);
  r.v_counts = vertical_boundary_counts(omega, r.z_extent);
  r.v_perimeter = vertical_perimeter(omega);
  r.ratio = r.v_perimeter / static_cast<double>(r.h_count);
  r.sup_rate = sup_vertical_rate(omega);
  r.p_norm = p_vertical_norm(omega, p);
  return r;
}

}  // namespace heis
