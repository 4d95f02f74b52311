#pragma once

// Sparsest-cut instances and exact OPT by cut enumeration.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "heis/error.hpp"

namespace heis {

/// Capacities C and demands D: symmetric, nonnegative, zero diagonal.
struct Instance {
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;

  int n() const { return static_cast<int>(C.rows()); }

  void validate() const {
    if (C.rows() != C.cols() || D.rows() != D.cols() || C.rows() != D.rows())
      throw DomainError("capacity and demand must be square matrices of one size");
    const auto n = C.rows();
    if (n < 2) throw DomainError("instance needs at least two points");
    double total = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (C(i, i) != 0 || D(i, i) != 0) throw DomainError("instance matrices need zero diagonals");
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!std::isfinite(C(i, j)) || !std::isfinite(D(i, j)) || C(i, j) < 0 || D(i, j) < 0)
          throw DomainError("instance entries must be finite and nonnegative");
        if (C(i, j) != C(j, i) || D(i, j) != D(j, i))
          throw DomainError("instance matrices must be symmetric");
        total += D(i, j);
      }
    }
    if (!(total > 0)) throw DomainError("demand matrix is zero");
  }

  /// Σ_{i∈A, j∉A} M_ij for the cut A given as a bitmask.
  static double cross(const Eigen::MatrixXd& M, std::uint64_t mask) {
    double s = 0;
    const auto n = M.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!((mask >> i) & 1)) continue;
      for (Eigen::Index j = 0; j < n; ++j)
        if (!((mask >> j) & 1)) s += M(i, j);
    }
    return s;
  }

  /// Relabels points: entry (i, j) moves to (perm[i], perm[j]).
  Instance permuted(const std::vector<int>& perm) const {
    Instance out{C, D};
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j) {
        out.C(perm[i], perm[j]) = C(i, j);
        out.D(perm[i], perm[j]) = D(i, j);
      }
    return out;
  }
};

struct OptResult {
  double value = 0;
  std::uint64_t mask = 0;  // the side A; never contains the last point
};

inline constexpr int kMaxOptPoints = 24;

/// min over ∅ ≠ A ⊊ {0..n−1} of C(A, Aᶜ)/D(A, Aᶜ), skipping cuts with no
/// cross demand. Gray-code walk over the 2^{n−1}−1 sides that omit the last
/// point, with running sums refreshed every 4096 steps.
inline OptResult opt_exact(const Instance& inst) {
  inst.validate();
  const int n = inst.n();
  if (n > kMaxOptPoints)
    throw CapabilityError("exact OPT supports at most 24 points", n, kMaxOptPoints);
  const auto& C = inst.C;
  const auto& D = inst.D;
  std::uint64_t mask = 0;
  double cap = 0, dem = 0;
  long positive = 0;  // crossing pairs with D > 0, kept exactly
  OptResult best{std::numeric_limits<double>::infinity(), 0};
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t i = 1; i < count; ++i) {
    const int v = std::countr_zero(i);
    const bool joining = !((mask >> v) & 1);
    for (int u = 0; u < n; ++u) {
      if (u == v) continue;
      const bool u_in = (mask >> u) & 1;
      // If u is on v's old side the pair starts crossing, otherwise it stops.
      const double sg = (u_in != joining) ? 1.0 : -1.0;
      cap += sg * C(v, u);
      dem += sg * D(v, u);
      if (D(v, u) > 0) positive += (u_in != joining) ? 1 : -1;
    }
    mask ^= std::uint64_t{1} << v;
    if ((i & 4095) == 0) {
      cap = Instance::cross(C, mask);
      dem = Instance::cross(D, mask);
    }
    if (positive == 0) continue;
    const double r = cap / dem;
    if (r < best.value) best = {r, mask};
  }
  if (!std::isfinite(best.value)) throw DomainError("no cut carries positive demand");
  best.value = Instance::cross(C, best.mask) / Instance::cross(D, best.mask);
  return best;
}

}  // namespace heis
