#pragma once

// Poincaré-type functionals of maps φ: H^5_Z → L_p.
//
//   LHS(φ) = (Σ_t t⁻² (Σ_h ‖φ(hZ^t) − φ(h)‖_p^p)^{2/p})^{1/2}
//   RHS(φ) = (Σ_h Σ_{σ∈S} ‖φ(hσ) − φ(h)‖_p^p)^{1/p}
//
// plus their local versions on word balls, and a compression check that
// replays the passage from the local inequality to the integral criterion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "heis/ball.hpp"
#include "heis/core.hpp"
#include "heis/criterion.hpp"
#include "heis/error.hpp"
#include "heis/interval.hpp"
#include "heis/perimeter.hpp"

namespace heis {

using Traits5 = GroupTraits<DiscretePoint>;

/// φ given by its values on a finite set of points. If `finitely_supported`
/// it equals `background` everywhere else on Z^5; otherwise it is only
/// defined on `points`.
struct VectorEmbedding {
  std::vector<DiscretePoint> points;
  std::vector<std::vector<double>> values;
  std::vector<double> background;
  bool finitely_supported = true;

  std::size_t dim() const { return background.size(); }

  /// φ defined on B_R only, φ(h) = f(h).
  template <class F>
  static VectorEmbedding on_ball(int R, std::size_t dim, F&& f) {
    VectorEmbedding v;
    v.points = word_ball<DiscretePoint>(R).points();
    for (const auto& p : v.points) v.values.push_back(f(p));
    v.background.assign(dim, 0.0);
    v.finitely_supported = false;
    return v;
  }
};

struct Cut {
  double weight = 1;
  LatticeSet5 set;
};

/// φ = Σ_i w_i 1_{A_i} as a map into ℓ_1 of the cut index. Without a
/// domain, every A_i is a finite subset of Z^5 and φ is finitely supported;
/// with a domain, φ is the restriction to it (cut sets must lie inside).
struct CutEmbedding {
  std::vector<Cut> cuts;
  std::optional<LatticeSet5> domain;

  static CutEmbedding indicator(const LatticeSet5& omega) { return {{{1.0, omega}}, {}}; }

  /// ‖φ(x) − φ(y)‖_1 = Σ of weights of the cuts separating x and y.
  double distance(const DiscretePoint& x, const DiscretePoint& y) const {
    double s = 0;
    for (const auto& c : cuts) s += c.set.contains(x) != c.set.contains(y) ? c.weight : 0.0;
    return s;
  }

  CutEmbedding scaled(double k) const {
    CutEmbedding out = *this;
    for (auto& c : out.cuts) c.weight *= k;
    return out;
  }
};

namespace detail {

// φ tabulated on sorted keys, row-major values, plus the value off support.
struct Table {
  std::vector<std::uint64_t> keys;
  std::vector<double> values;  // keys.size() × dim
  std::vector<double> background;
  bool finitely_supported = true;

  std::size_t dim() const { return background.size(); }

  std::optional<std::size_t> index(const DiscretePoint& p) const {
    if (!Traits5::packable(p)) return std::nullopt;
    const auto k = Traits5::pack(p);
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it == keys.end() || *it != k) return std::nullopt;
    return static_cast<std::size_t>(it - keys.begin());
  }

  const double* row(std::size_t i) const { return values.data() + i * dim(); }

  // Pointer to φ(p), or nullptr when p lies outside a restricted domain.
  const double* value(const DiscretePoint& p) const {
    if (auto i = index(p)) return row(*i);
    return finitely_supported ? background.data() : nullptr;
  }
};

inline double diff_p(const double* x, const double* y, std::size_t m, double p) {
  double s = 0;
  if (p == 1) {
    for (std::size_t k = 0; k < m; ++k) s += std::abs(x[k] - y[k]);
  } else if (p == 2) {
    for (std::size_t k = 0; k < m; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  } else {
    for (std::size_t k = 0; k < m; ++k) s += std::pow(std::abs(x[k] - y[k]), p);
  }
  return s;
}

inline Table tabulate(const VectorEmbedding& phi) {
  if (phi.points.size() != phi.values.size())
    throw DomainError("vector embedding has mismatched points and values");
  const auto m = phi.background.size();
  std::vector<std::pair<std::uint64_t, std::size_t>> order;
  order.reserve(phi.points.size());
  for (std::size_t i = 0; i < phi.points.size(); ++i) {
    if (phi.values[i].size() != m) throw DomainError("vector embedding has ragged values");
    order.emplace_back(Traits5::pack(phi.points[i]), i);
  }
  std::sort(order.begin(), order.end());
  Table t;
  t.background = phi.background;
  t.finitely_supported = phi.finitely_supported;
  for (std::size_t j = 0; j < order.size(); ++j) {
    if (j > 0 && order[j].first == order[j - 1].first)
      throw DomainError("vector embedding lists a point twice");
    t.keys.push_back(order[j].first);
    const auto& v = phi.values[order[j].second];
    t.values.insert(t.values.end(), v.begin(), v.end());
  }
  return t;
}

inline Table tabulate(const CutEmbedding& phi) {
  Table t;
  const auto m = phi.cuts.size();
  t.background.assign(m, 0.0);
  if (phi.domain) {
    t.finitely_supported = false;
    t.keys = phi.domain->keys();
    for (const auto& c : phi.cuts)
      for (auto k : c.set.keys())
        if (!std::binary_search(t.keys.begin(), t.keys.end(), k))
          throw DomainError("cut set leaves the embedding's domain");
  } else {
    for (const auto& c : phi.cuts) t.keys.insert(t.keys.end(), c.set.keys().begin(), c.set.keys().end());
    std::sort(t.keys.begin(), t.keys.end());
    t.keys.erase(std::unique(t.keys.begin(), t.keys.end()), t.keys.end());
  }
  t.values.assign(t.keys.size() * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (phi.cuts[i].weight < 0) throw DomainError("cut weights must be nonnegative");
    for (auto k : phi.cuts[i].set.keys()) {
      const auto j = std::lower_bound(t.keys.begin(), t.keys.end(), k) - t.keys.begin();
      t.values[static_cast<std::size_t>(j) * m + i] = phi.cuts[i].weight;
    }
  }
  return t;
}

inline std::int64_t support_z_extent(const Table& t) {
  std::vector<DiscretePoint> pts;
  pts.reserve(t.keys.size());
  for (auto k : t.keys) pts.push_back(Traits5::unpack(k));
  return LatticeSet5(pts).z_extent();
}

}  // namespace detail

/// Inner sums I_t = Σ_{h∈Z^5} ‖φ(hZ^t) − φ(h)‖_p^p for t = 1..t_max
/// (index 0 unused). Requires a finitely supported φ.
template <class Phi>
std::vector<double> global_inner_sums(const Phi& phi, std::int64_t t_max, double p = 1) {
  const auto tab = detail::tabulate(phi);
  if (!tab.finitely_supported) throw DomainError("global evaluator needs a finitely supported map");
  const auto m = tab.dim();
  std::vector<double> out(static_cast<std::size_t>(t_max) + 1, 0.0);
  for (std::int64_t t = 1; t <= t_max; ++t) {
    double s = 0;
    for (std::size_t i = 0; i < tab.keys.size(); ++i) {
      const auto h = Traits5::unpack(tab.keys[i]);
      // pairs (h, hZ^t) with h in the support
      s += detail::diff_p(tab.value(Traits5::vertical(h, t)), tab.row(i), m, p);
      // pairs (xZ^-t, x) with only x in the support
      if (!tab.index(Traits5::vertical(h, -t)))
        s += detail::diff_p(tab.row(i), tab.background.data(), m, p);
    }
    out[t] = s;
  }
  return out;
}

struct PoincareValue {
  Interval lhs;
  double rhs = 0;      // (Σ_h Σ_σ ‖·‖_p^p)^{1/p}
  double rhs_sum = 0;  // Σ_h Σ_σ ‖·‖_p^p
  double p = 1;
  std::int64_t z_extent = 0;

  /// lhs.hi / rhs, +inf when rhs = 0 < lhs.hi, 0 when both vanish.
  double ratio() const {
    if (rhs > 0) return lhs.hi / rhs;
    return lhs.hi > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
};

/// Left side with a certified tail. Beyond the z-extent T of the support,
/// hZ^t and h never both lie in it, so I_t = 2 Σ_x ‖φ(x) − φ_∞‖_p^p.
template <class Phi>
Interval global_lhs(const Phi& phi, double p = 1, double rel_tol = kTailTolerance) {
  if (!(p >= 1) || !std::isfinite(p)) throw DomainError("norm exponent must satisfy 1 <= p < inf");
  const auto tab = detail::tabulate(phi);
  if (!tab.finitely_supported) throw DomainError("global evaluator needs a finitely supported map");
  if (tab.keys.empty()) return {0, 0};
  const auto T = detail::support_z_extent(tab);
  const auto inner = global_inner_sums(phi, T, p);
  double finite = 0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const double tt = static_cast<double>(t) * static_cast<double>(t);
    finite += (p == 1 ? inner[t] * inner[t] : std::pow(inner[t], 2 / p)) / tt;
  }
  double tail = 0;
  for (std::size_t i = 0; i < tab.keys.size(); ++i)
    tail += detail::diff_p(tab.row(i), tab.background.data(), tab.dim(), p);
  tail *= 2;
  const double K = p == 1 ? tail * tail : std::pow(tail, 2 / p);
  return sqrt(certified_power_tail(finite, K, 2.0, T + 1, rel_tol));
}

/// Σ_h Σ_σ ‖φ(hσ) − φ(h)‖_p^p over all of Z^5.
template <class Phi>
double global_rhs_sum(const Phi& phi, double p = 1) {
  if (!(p >= 1) || !std::isfinite(p)) throw DomainError("norm exponent must satisfy 1 <= p < inf");
  const auto tab = detail::tabulate(phi);
  if (!tab.finitely_supported) throw DomainError("global evaluator needs a finitely supported map");
  const auto m = tab.dim();
  double s = 0;
  for (std::size_t i = 0; i < tab.keys.size(); ++i) {
    const auto h = Traits5::unpack(tab.keys[i]);
    for (const auto& y : neighbors(h)) {
      if (auto j = tab.index(y)) {
        s += detail::diff_p(tab.row(*j), tab.row(i), m, p);
      } else {
        // edge h → y and its reverse y → h both leave the support
        s += 2 * detail::diff_p(tab.background.data(), tab.row(i), m, p);
      }
    }
  }
  return s;
}

template <class Phi>
double global_rhs(const Phi& phi, double p = 1) {
  const double s = global_rhs_sum(phi, p);
  return p == 1 ? s : std::pow(s, 1 / p);
}

template <class Phi>
PoincareValue global_poincare(const Phi& phi, double p = 1) {
  PoincareValue v;
  v.p = p;
  v.lhs = global_lhs(phi, p);
  v.rhs_sum = global_rhs_sum(phi, p);
  v.rhs = p == 1 ? v.rhs_sum : std::pow(v.rhs_sum, 1 / p);
  v.z_extent = detail::support_z_extent(detail::tabulate(phi));
  return v;
}

/// Largest word length of Z^t over t = 1..t_max.
inline int max_central_length(std::int64_t t_max) {
  int best = 0;
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const auto d = word_dist(central_power<DiscretePoint>(t), 4 * static_cast<int>(t));
    best = std::max(best, *d);
  }
  return best;
}

/// (Σ_{t=1}^{n²} t⁻² (Σ_{h∈B_n} ‖φ(hZ^t) − φ(h)‖_p^p)^{2/p})^{1/2}. Finite and
/// exact, so returned as a degenerate interval.
template <class Phi>
Interval local_lhs(const Phi& phi, int n, double p = 1) {
  if (n < 1) throw DomainError("local evaluator needs n >= 1");
  const auto tab = detail::tabulate(phi);
  const auto ball = word_ball<DiscretePoint>(n).points();
  const auto m = tab.dim();
  const std::int64_t t_max = std::int64_t{n} * n;
  double total = 0;
  for (std::int64_t t = 1; t <= t_max; ++t) {
    double s = 0;
    for (const auto& h : ball) {
      const double* x = tab.value(h);
      const double* y = tab.value(Traits5::vertical(h, t));
      if (!x || !y) {
        const int need = n + max_central_length(t_max);
        throw DomainError("local left side needs the map on B_" + std::to_string(need));
      }
      s += detail::diff_p(y, x, m, p);
    }
    total += (p == 1 ? s * s : std::pow(s, 2 / p)) / (static_cast<double>(t) * static_cast<double>(t));
  }
  const double v = std::sqrt(total);
  return {v, v};
}

/// Σ_{h∈B_⌊αn⌋} Σ_σ ‖φ(hσ) − φ(h)‖_p^p, raised to 1/p.
template <class Phi>
double local_rhs(const Phi& phi, int n, double alpha = 2, double p = 1) {
  if (n < 1) throw DomainError("local evaluator needs n >= 1");
  if (!(alpha >= 1)) throw DomainError("local evaluator needs alpha >= 1");
  const auto tab = detail::tabulate(phi);
  const int r = static_cast<int>(std::floor(alpha * n));
  const auto m = tab.dim();
  double s = 0;
  for (const auto& h : word_ball<DiscretePoint>(r).points()) {
    const double* x = tab.value(h);
    for (const auto& y : neighbors(h)) {
      const double* v = tab.value(y);
      if (!x || !v)
        throw DomainError("local right side needs the map on B_" + std::to_string(r + 1));
      s += detail::diff_p(v, x, m, p);
    }
  }
  return p == 1 ? s : std::pow(s, 1 / p);
}

/// Coordinatewise threshold cuts. For coordinate k with distinct values
/// v_0 < ... < v_m, the level sets {φ_k ≥ v_j} carry weight v_j − v_{j−1};
/// a level set that contains the background is replaced by its (finite)
/// complement, which separates the same pairs.
inline CutEmbedding to_cut_form(const VectorEmbedding& phi) {
  const auto tab = detail::tabulate(phi);
  CutEmbedding out;
  if (!tab.finitely_supported) {
    std::vector<DiscretePoint> pts;
    for (auto k : tab.keys) pts.push_back(Traits5::unpack(k));
    out.domain = LatticeSet5(pts);
  }
  const auto m = tab.dim();
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> levels;
    for (std::size_t i = 0; i < tab.keys.size(); ++i) levels.push_back(tab.row(i)[k]);
    if (tab.finitely_supported) levels.push_back(tab.background[k]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (std::size_t j = 1; j < levels.size(); ++j) {
      const bool flip = tab.finitely_supported && tab.background[k] >= levels[j];
      std::vector<DiscretePoint> pts;
      for (std::size_t i = 0; i < tab.keys.size(); ++i) {
        const bool above = tab.row(i)[k] >= levels[j];
        if (above != flip) pts.push_back(Traits5::unpack(tab.keys[i]));
      }
      out.cuts.push_back({levels[j] - levels[j - 1], LatticeSet5(pts)});
    }
  }
  return out;
}

/// Coordinates w_i 1_{A_i}(x): the ℓ_1 distance of this vector map equals
/// the cut distance.
inline VectorEmbedding to_vector_form(const CutEmbedding& phi) {
  const auto tab = detail::tabulate(phi);
  VectorEmbedding v;
  v.background = tab.background;
  v.finitely_supported = tab.finitely_supported;
  for (std::size_t i = 0; i < tab.keys.size(); ++i) {
    v.points.push_back(Traits5::unpack(tab.keys[i]));
    v.values.emplace_back(tab.row(i), tab.row(i) + tab.dim());
  }
  return v;
}

/// Empirical constants β, γ with β√t ≤ d_W(Z^t, 0) ≤ γ√t over the sample.
struct CentralBand {
  std::vector<std::int64_t> t;
  std::vector<int> dist;
  double beta = 0;
  double gamma = 0;
  double spread() const { return gamma / beta; }
};

inline CentralBand central_band(const std::vector<std::int64_t>& ts,
                                std::size_t cap = kDefaultBallCap) {
  if (ts.empty()) throw DomainError("central band needs at least one t");
  CentralBand b;
  b.beta = std::numeric_limits<double>::infinity();
  for (auto t : ts) {
    if (t < 1) throw DomainError("central band needs t >= 1");
    const auto d = word_dist(central_power<DiscretePoint>(t), static_cast<int>(4 * t), cap);
    const double q = *d / std::sqrt(static_cast<double>(t));
    b.t.push_back(t);
    b.dist.push_back(*d);
    b.beta = std::min(b.beta, q);
    b.gamma = std::max(b.gamma, q);
  }
  return b;
}

inline std::vector<std::int64_t> range_1_to(std::int64_t n) {
  std::vector<std::int64_t> v;
  for (std::int64_t t = 1; t <= n; ++t) v.push_back(t);
  return v;
}

/// Numbers behind the deduction of the integral criterion from the local
/// inequality, for one φ on B_R:
///   local_lhs² ≥ |B_n|² Σ_{t≤n²} (m ω(β√t))²/t²
///              ≥ m² |B_n|² β² ∫_{β/√2}^{β√((n²+1)/2)} ω(s)²/s³ ds,
/// where m is the measured lower compression constant.
struct ChainReplay {
  int n = 0;
  double alpha = 2;
  double beta = 0, gamma = 0;
  double m = 0;
  std::size_t ball_n = 0;
  double local_lhs_sq = 0;
  double discrete_lower = 0;
  double integral_lower = 0;
  double local_rhs = 0;
  double implied_constant = 0;  // local_lhs / local_rhs
  bool chain_holds = false;     // the two displayed inequalities, exactly
};

struct CompressionReport {
  std::size_t pairs = 0;
  double max_upper_violation = 0;  // max ‖φx − φy‖ − d_W(x,y)
  double max_upper_ratio = 0;      // max ‖φx − φy‖ / d_W(x,y)
  double min_lower_ratio = std::numeric_limits<double>::infinity();  // min ‖φx − φy‖ / ω(d_W)
  std::optional<ChainReplay> chain;
};

/// Pairwise compression statistics of a cut embedding on its domain.
inline CompressionReport compression_pairs(const CutEmbedding& phi, const Modulus& omega,
                                           std::size_t cap = kDefaultBallCap) {
  std::vector<DiscretePoint> pts;
  if (phi.domain) {
    pts = phi.domain->points();
  } else {
    std::vector<std::uint64_t> keys;
    for (const auto& c : phi.cuts) keys.insert(keys.end(), c.set.keys().begin(), c.set.keys().end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (auto k : keys) pts.push_back(Traits5::unpack(k));
  }
  CompressionReport rep;
  if (pts.size() < 2) return rep;
  // Every x⁻¹y lies in B_{2r} when the domain lies in B_r.
  Ball<DiscretePoint> ball;
  auto inside = [&] {
    for (const auto& p : pts)
      if (!ball.contains(p)) return false;
    return true;
  };
  while (!inside()) ball.grow(cap);
  const int r = ball.radius();
  while (ball.radius() < 2 * r) ball.grow(cap);

  // memberships as bit rows
  std::vector<std::vector<bool>> in(pts.size(), std::vector<bool>(phi.cuts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t c = 0; c < phi.cuts.size(); ++c) in[i][c] = phi.cuts[c].set.contains(pts[i]);

  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dw = *ball.distance(mul(inv(pts[i]), pts[j]));
      double dphi = 0;
      for (std::size_t c = 0; c < phi.cuts.size(); ++c)
        if (in[i][c] != in[j][c]) dphi += phi.cuts[c].weight;
      ++rep.pairs;
      rep.max_upper_violation = std::max(rep.max_upper_violation, dphi - dw);
      rep.max_upper_ratio = std::max(rep.max_upper_ratio, dphi / dw);
      const double w = omega(dw);
      const double lower = w > 0 ? dphi / w : std::numeric_limits<double>::infinity();
      rep.min_lower_ratio = std::min(rep.min_lower_ratio, lower);
    }
  }
  if (rep.pairs == 0) rep.min_lower_ratio = 0;
  return rep;
}

/// Replays the chain for φ defined on B_R with measured constants.
inline ChainReplay replay_chain(const CutEmbedding& phi, int R, const Modulus& omega,
                                double m, const CentralBand& band, double alpha = 2) {
  if (!(alpha >= 1)) throw DomainError("chain replay needs alpha >= 1");
  ChainReplay c;
  c.alpha = alpha;
  c.beta = band.beta;
  c.gamma = band.gamma;
  c.m = m;
  c.n = static_cast<int>(std::floor(std::min(R / (1 + band.gamma), (R - 1) / alpha)));
  if (c.n < 1) {
    throw DomainError("ball radius " + std::to_string(R) +
                      " too small for the chain: need R >= 1 + max(alpha, gamma)");
  }
  const std::int64_t t_max = std::int64_t{c.n} * c.n;
  c.ball_n = word_ball<DiscretePoint>(c.n).size();
  const double lhs = local_lhs(phi, c.n).hi;
  c.local_lhs_sq = lhs * lhs;
  const double bn = static_cast<double>(c.ball_n);
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const double w = m * omega(c.beta * std::sqrt(static_cast<double>(t)));
    c.discrete_lower += bn * bn * w * w / (static_cast<double>(t) * static_cast<double>(t));
  }
  const double lo = c.beta / std::sqrt(2.0);
  const double hi = c.beta * std::sqrt((static_cast<double>(t_max) + 1) / 2);
  c.integral_lower = m * m * bn * bn * c.beta * c.beta * modulus_integral(omega, lo, hi);
  c.local_rhs = local_rhs(phi, c.n, alpha);
  c.implied_constant = c.local_rhs > 0 ? lhs / c.local_rhs : 0;
  const double slack = 1e-9 * std::max(1.0, c.local_lhs_sq);
  c.chain_holds = c.local_lhs_sq + slack >= c.discrete_lower && c.discrete_lower + slack >= c.integral_lower;
  return c;
}

/// Pair statistics, and for φ on a ball B_R the chain replay with β, γ
/// measured from d_W(Z^t) over the given t values.
inline CompressionReport compression_check(const CutEmbedding& phi, const Modulus& omega,
                                           std::optional<int> ball_radius = {},
                                           const std::vector<std::int64_t>& band_ts = range_1_to(16),
                                           double alpha = 2) {
  auto rep = compression_pairs(phi, omega);
  if (ball_radius) {
    const double m = std::isfinite(rep.min_lower_ratio) ? rep.min_lower_ratio : 0.0;
    rep.chain = replay_chain(phi, *ball_radius, omega, m, central_band(band_ts), alpha);
  }
  return rep;
}

}  // namespace heis
