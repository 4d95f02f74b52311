#pragma once

// Monte-Carlo side of the slicing argument for intrinsic graphs over the
// vertical hyperplane V = {x2 = 0} of H^5 (symmetric model).
//
// Balls are quasi-norm balls and H^6, H^4 are Lebesgue measure with
// proportionality constant 1. Every estimate is a stratified mean over
// independent streams: stream k draws its first input uniform from
// [k/S, (k+1)/S), and streams are reduced in index order, so results are
// bit-stable for a fixed (seed, streams) regardless of thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "heis/core.hpp"
#include "heis/error.hpp"

namespace heis {

/// Coordinates (a, c, d, e) of the point (a, 0, c, d, e) of V.
struct VPoint {
  double a = 0, c = 0, d = 0, e = 0;
};

class IntrinsicGraphFn {
 public:
  enum class Family { kZero, kConstant, kLinear, kBump, kSinusoid };

  static IntrinsicGraphFn zero() { return IntrinsicGraphFn(Family::kZero, {}); }
  static IntrinsicGraphFn constant(double value) {
    return IntrinsicGraphFn(Family::kConstant, {value});
  }
  /// ka·a + kc·c + kd·d + ke·e.
  static IntrinsicGraphFn linear(double ka, double kc, double kd, double ke) {
    return IntrinsicGraphFn(Family::kLinear, {ka, kc, kd, ke});
  }
  /// A·exp(−(a² + c² + d²)/w² − e²/w⁴), isotropic under the dilations.
  static IntrinsicGraphFn bump(double amplitude, double width) {
    if (!(width > 0)) throw DomainError("bump width must be positive");
    return IntrinsicGraphFn(Family::kBump, {amplitude, width});
  }
  /// A·sin(ω·e).
  static IntrinsicGraphFn sinusoid(double amplitude, double frequency) {
    return IntrinsicGraphFn(Family::kSinusoid, {amplitude, frequency});
  }

  /// Parses `zero`, `constant:1`, `linear:0.1,0,0,0`, `bump:A,w`, `sinusoid:A,omega`.
  static IntrinsicGraphFn parse(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::vector<double> v;
    if (colon != std::string::npos) {
      std::stringstream ss(spec.substr(colon + 1));
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          std::size_t used = 0;
          v.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw DomainError("bad number '" + tok + "' in graph family '" + spec + "'");
        }
      }
    }
    auto need = [&](std::size_t k) {
      if (v.size() != k)
        throw DomainError("graph family '" + name + "' takes " + std::to_string(k) + " parameters");
    };
    if (name == "zero") return need(0), zero();
    if (name == "constant") return need(1), constant(v[0]);
    if (name == "linear") return need(4), linear(v[0], v[1], v[2], v[3]);
    if (name == "bump") return need(2), bump(v[0], v[1]);
    if (name == "sinusoid") return need(2), sinusoid(v[0], v[1]);
    throw DomainError("unknown graph family '" + name + "'");
  }

  double operator()(const VPoint& v) const {
    switch (family_) {
      case Family::kZero:
        return 0;
      case Family::kConstant:
        return p_[0];
      case Family::kLinear:
        return p_[0] * v.a + p_[1] * v.c + p_[2] * v.d + p_[3] * v.e;
      case Family::kBump: {
        const double w2 = p_[1] * p_[1];
        return p_[0] * std::exp(-(v.a * v.a + v.c * v.c + v.d * v.d) / w2 - v.e * v.e / (w2 * w2));
      }
      case Family::kSinusoid:
        return p_[0] * std::sin(p_[1] * v.e);
    }
    return 0;
  }

  /// sup |∂f/∂e|, used to bound vertical differences of f at small heights.
  double vertical_derivative_bound() const {
    switch (family_) {
      case Family::kZero:
      case Family::kConstant:
        return 0;
      case Family::kLinear:
        return std::abs(p_[3]);
      case Family::kBump:
        return std::abs(p_[0]) * std::numbers::sqrt2 * std::exp(-0.5) / (p_[1] * p_[1]);
      case Family::kSinusoid:
        return std::abs(p_[0] * p_[1]);
    }
    return 0;
  }

  Family family() const { return family_; }
  const std::vector<double>& params() const { return p_; }

  std::string describe() const {
    static const char* names[] = {"zero", "constant", "linear", "bump", "sinusoid"};
    std::ostringstream os;
    os.precision(17);
    os << names[static_cast<int>(family_)];
    for (std::size_t i = 0; i < p_.size(); ++i) os << (i ? ',' : ':') << p_[i];
    return os.str();
  }

 private:
  IntrinsicGraphFn(Family f, std::vector<double> p) : family_(f), p_(std::move(p)) {
    for (double x : p_)
      if (!std::isfinite(x)) throw DomainError("graph family parameters must be finite");
  }

  Family family_;
  std::vector<double> p_;
};

/// v·X2^{f(v)} = (a, f, c, d, e − d·f/2).
inline ContinuousPoint gamma_point(const IntrinsicGraphFn& f, const VPoint& v) {
  const double b = f(v);
  if (!std::isfinite(b)) throw DomainError("graph function is not finite at the given point");
  return {v.a, b, v.c, v.d, v.e - 0.5 * v.d * b};
}

struct Slice {
  double chi = 0;          // y2(u)
  ContinuousPoint3 h;      // h_u = x1 X1 + y1 Y1 + (z + x2 y2/2) Z
  double xi = 0;           // x2(u)
};

/// u = Y2^χ · h_u · X2^ξ.
inline Slice slice_point(const ContinuousPoint& u) {
  return {u.y2, {u.x1, u.y1, u.z + 0.5 * u.x2 * u.y2}, u.x2};
}

inline ContinuousPoint reconstruct(const Slice& s) {
  return mul_cont(mul_cont(power(cgen::Y2, s.chi), lift(s.h)), power(cgen::X2, s.xi));
}

/// f_χ(h) = f(Y2^χ h); Y2^χ h = (x, 0, y, χ, z) since Y2 commutes with H^3.
inline double f_chi(const IntrinsicGraphFn& f, double chi, const ContinuousPoint3& h) {
  return f({h.x, h.y, chi, h.z});
}

/// u ∈ Γ⁺_f, i.e. x2(u) > f_{y2(u)}(h_u).
inline bool in_half_space(const IntrinsicGraphFn& f, const ContinuousPoint& u) {
  const Slice s = slice_point(u);
  return s.xi > f_chi(f, s.chi, s.h);
}

using Region = std::function<bool(const ContinuousPoint&)>;

inline Region half_space(const IntrinsicGraphFn& f) {
  return [f](const ContinuousPoint& u) { return in_half_space(f, u); };
}

/// s_θ(E): u ∈ s_θ(E) iff s_{1/θ}(u) ∈ E.
inline Region dilate(Region E, double theta) {
  if (!(theta != 0) || !std::isfinite(theta)) throw DomainError("dilation factor must be finite and nonzero");
  return [E = std::move(E), theta](const ContinuousPoint& u) { return E(scale(1.0 / theta, u)); };
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// In (0, 1]: safe under log.
inline double u01_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

// Beta(2, b) for integer b as G₂/(G₂ + G_b), with one of the G₂ factors
// driven by the stratified uniform `first`.
inline double beta2(int b, double first, std::mt19937_64& rng) {
  const double g2 = -std::log(first) - std::log(u01_open(rng));
  double gb = 0;
  for (int i = 0; i < b; ++i) gb -= std::log(u01_open(rng));
  return g2 / (g2 + gb);
}

// Uniform point of the ℓ₁ ball of radius R in R^k (k ≤ 4) via a flat
// Dirichlet vector with random signs.
inline std::array<double, 4> l1_ball(int k, double R, std::mt19937_64& rng) {
  std::array<double, 5> g{};
  double total = 0;
  for (int i = 0; i <= k; ++i) total += (g[i] = -std::log(u01_open(rng)));
  std::array<double, 4> x{};
  const std::uint64_t signs = rng();
  for (int i = 0; i < k; ++i) x[i] = R * g[i] / total * (((signs >> i) & 1) ? -1.0 : 1.0);
  return x;
}

}  // namespace detail

/// Sampling domain U: the quasi-norm ball of radius r, or an axis box.
class Domain {
 public:
  static Domain quasi_ball(double r) {
    if (!(r > 0) || !std::isfinite(r)) throw DomainError("ball radius must be positive");
    Domain d;
    d.ball_ = true;
    d.r_ = r;
    return d;
  }
  static Domain box(const ContinuousPoint& lo, const ContinuousPoint& hi) {
    const std::array<double, 5> l{lo.x1, lo.x2, lo.y1, lo.y2, lo.z}, h{hi.x1, hi.x2, hi.y1, hi.y2, hi.z};
    for (int i = 0; i < 5; ++i)
      if (!(h[i] > l[i]) || !std::isfinite(l[i]) || !std::isfinite(h[i]))
        throw DomainError("box needs finite lo < hi in every coordinate");
    Domain d;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
  }

  bool is_ball() const { return ball_; }
  double radius() const { return r_; }

  /// Lebesgue volume; the quasi-ball of radius r has volume r⁶/180.
  double volume() const {
    if (ball_) return std::pow(r_, 6) / 180.0;
    return (hi_.x1 - lo_.x1) * (hi_.x2 - lo_.x2) * (hi_.y1 - lo_.y1) * (hi_.y2 - lo_.y2) *
           (hi_.z - lo_.z);
  }

  bool contains(const ContinuousPoint& u) const {
    if (ball_) return quasi_norm(u) < r_;
    return u.x1 >= lo_.x1 && u.x1 < hi_.x1 && u.x2 >= lo_.x2 && u.x2 < hi_.x2 && u.y1 >= lo_.y1 &&
           u.y1 < hi_.y1 && u.y2 >= lo_.y2 && u.y2 < hi_.y2 && u.z >= lo_.z && u.z < hi_.z;
  }

  /// Uniform point; `first` ∈ (0,1] is the stratified input.
  ContinuousPoint sample(double first, std::mt19937_64& rng) const {
    if (ball_) {
      // w = 4√|z| has density ∝ w (r − w)⁴, i.e. w/r ~ Beta(2, 5); given w
      // the horizontal part is uniform in the ℓ₁ ball of radius r − w.
      const double w = r_ * detail::beta2(5, first, rng);
      const auto x = detail::l1_ball(4, r_ - w, rng);
      const double z = (rng() & 1 ? -1.0 : 1.0) * w * w / 16.0;
      return {x[0], x[1], x[2], x[3], z};
    }
    auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
    return {lerp(lo_.x1, hi_.x1, 1.0 - first), lerp(lo_.x2, hi_.x2, detail::u01(rng)),
            lerp(lo_.y1, hi_.y1, detail::u01(rng)), lerp(lo_.y2, hi_.y2, detail::u01(rng)),
            lerp(lo_.z, hi_.z, detail::u01(rng))};
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    if (ball_) {
      os << "quasi_ball:" << r_;
    } else {
      os << "box:" << lo_.x1 << ',' << hi_.x1 << ',' << lo_.x2 << ',' << hi_.x2 << ',' << lo_.y1
         << ',' << hi_.y1 << ',' << lo_.y2 << ',' << hi_.y2 << ',' << lo_.z << ',' << hi_.z;
    }
    return os.str();
  }

 private:
  Domain() = default;
  bool ball_ = false;
  double r_ = 0;
  ContinuousPoint lo_, hi_;
};

/// Uniform point of the H^3 quasi-ball {|x| + |y| + 4√|z| < ρ} (volume ρ⁴/24).
inline ContinuousPoint3 sample_h3_ball(double rho, double first, std::mt19937_64& rng) {
  const double w = rho * detail::beta2(3, first, rng);
  const auto x = detail::l1_ball(2, rho - w, rng);
  return {x[0], x[1], (rng() & 1 ? -1.0 : 1.0) * w * w / 16.0};
}

inline double h3_ball_volume(double rho) { return std::pow(rho, 4) / 24.0; }

struct McOptions {
  std::size_t budget = 200'000;  // samples per estimate, split evenly over streams
  int streams = 16;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency; results do not depend on it
};

struct Estimate {
  double value = 0;
  double stderr_ = 0;
};

namespace detail {

// Stratified mean of g(first, rng) over `streams` equal-probability strata
// of the first input uniform. Per-stratum variances give the error bar.
template <class G>
Estimate stratified(const McOptions& opt, std::uint64_t tag, G&& g) {
  if (opt.streams < 1) throw DomainError("need at least one stream");
  const auto S = static_cast<std::size_t>(opt.streams);
  const std::size_t per = std::max<std::size_t>(2, opt.budget / S);
  std::vector<double> mean(S), var(S);
  auto work = [&](std::size_t k) {
    auto rng = stream_rng(opt.seed, k, tag);
    double m = 0, m2 = 0;
    for (std::size_t i = 0; i < per; ++i) {
      const double first = (static_cast<double>(k) + u01_open(rng)) / static_cast<double>(S);
      const double x = g(first, rng);
      const double delta = x - m;
      m += delta / static_cast<double>(i + 1);
      m2 += delta * (x - m);
    }
    mean[k] = m;
    var[k] = m2 / static_cast<double>(per - 1);
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t T = std::min<std::size_t>(S, opt.threads > 0 ? opt.threads : hw);
  if (T <= 1) {
    for (std::size_t k = 0; k < S; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < T; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < S; k += T) work(k);
      });
    for (auto& th : pool) th.join();
  }
  Estimate e;
  double v = 0;
  for (std::size_t k = 0; k < S; ++k) {
    e.value += mean[k];
    v += var[k] / static_cast<double>(per);
  }
  e.value /= static_cast<double>(S);
  e.stderr_ = std::sqrt(v) / static_cast<double>(S);
  return e;
}

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

struct RegionSampler {
  Domain domain;
  McOptions mc;
};

struct VBarPoint {
  double s = 0;
  double value = 0;
  double stderr_ = 0;
  double trivial_bound = 0;  // vol(U)/2^s
};

/// v̄_U(E)(s) = 2^{−s} ∫_U |1_E(u) − 1_E(u Z^{−4^s})| du.
inline VBarPoint vbar(const RegionSampler& sampler, const Region& E, double s,
                      std::uint64_t tag = 0) {
  if (sampler.mc.budget < 1000) throw DomainError("v-bar needs a sample budget of at least 1000");
  if (!std::isfinite(s)) throw DomainError("scale s must be finite");
  const double t = std::exp2(2 * s);
  const double vol = sampler.domain.volume();
  const double w = vol / std::exp2(s);
  const Estimate e = detail::stratified(sampler.mc, tag, [&](double first, std::mt19937_64& rng) {
    const ContinuousPoint u = sampler.domain.sample(first, rng);
    ContinuousPoint down = u;
    down.z -= t;  // u·Z^{−t}: Z is central
    return E(u) != E(down) ? 1.0 : 0.0;
  });
  return {s, w * e.value, w * e.stderr_, w};
}

struct VBarOptions {
  double s_min = -10;
  double max_step = 0.25;
  double comparability = kDefaultComparability;
  McOptions mc;
};

struct VBarCurve {
  double r = 0;
  double comparability = 0;
  std::vector<VBarPoint> points;
  double grid_integral = 0;   // trapezoid ∫ v̄² over the grid
  double grid_stderr = 0;
  double tail = 0;            // ∫_{s_max}^∞ (vol/2^s)² ds, an upper bound
  double l2_grid = 0;         // √grid_integral
  double l2 = 0;              // √(grid_integral + tail)
  double l2_stderr = 0;
  double cutoff_bound = 0;    // v̄(s_min)²/(2 ln 2): the part below s_min if v̄ decays like 2^s
  double decay_slope = std::numeric_limits<double>::quiet_NaN();  // d log₂ v̄/ds near s_min
};

/// ‖v̄_{B_r}(E)‖_{L₂} on s ∈ [s_min, log₂(C r)] plus the trivial-bound tail.
inline VBarCurve vbar_l2(const Region& E, double r, const VBarOptions& opt = {}) {
  const double s_max = std::log2(opt.comparability * r);
  if (!(s_max > opt.s_min)) throw DomainError("grid needs s_min < log2(C r)");
  if (!(opt.max_step > 0) || opt.max_step > 0.25) throw DomainError("grid step must lie in (0, 0.25]");
  const int n = static_cast<int>(std::ceil((s_max - opt.s_min) / opt.max_step - 1e-9));
  const double h = (s_max - opt.s_min) / n;
  RegionSampler sampler{Domain::quasi_ball(r), opt.mc};
  VBarCurve c;
  c.r = r;
  c.comparability = opt.comparability;
  double var = 0;
  for (int k = 0; k <= n; ++k) {
    const double s = opt.s_min + k * h;
    auto p = vbar(sampler, E, s, detail::mix(static_cast<std::uint64_t>(k)));
    const double w = (k == 0 || k == n) ? h / 2 : h;
    c.grid_integral += w * p.value * p.value;
    var += std::pow(w * 2 * p.value * p.stderr_, 2);
    c.points.push_back(p);
  }
  c.grid_stderr = std::sqrt(var);
  const double vol = sampler.domain.volume();
  c.tail = vol * vol * std::exp2(-2 * s_max) / (2 * std::numbers::ln2);
  c.l2_grid = std::sqrt(c.grid_integral);
  c.l2 = std::sqrt(c.grid_integral + c.tail);
  c.l2_stderr = c.l2 > 0 ? c.grid_stderr / (2 * c.l2) : 0;
  c.cutoff_bound = c.points.front().value * c.points.front().value / (2 * std::numbers::ln2);
  // Least-squares slope of log₂ v̄ over the first positive grid values.
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : c.points) {
    if (p.value > 0) xy.emplace_back(p.s, std::log2(p.value));
    if (xy.size() == 8) break;
  }
  if (xy.size() >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : xy) sx += x, sy += y, sxx += x * x, sxy += x * y;
    const double m = static_cast<double>(xy.size());
    c.decay_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Lipschitz estimates

/// Half-widths of the V-box used to sample graph points.
struct VBox {
  double a = 1, c = 1, d = 1, e = 1;
};

struct LipEstimate {
  double lambda = 0;
  std::size_t pairs = 0;
  VPoint v1, v2;  // maximizing pair
};

namespace detail {

inline VPoint sample_vbox(const VBox& b, std::mt19937_64& rng) {
  auto s = [&](double w) { return w * (2 * u01(rng) - 1); };
  return {s(b.a), s(b.c), s(b.d), s(b.e)};
}

// A partner for v: independent, or v moved along one coordinate by a
// log-uniform amount down to 1e-4 of the box width.
inline VPoint partner(const VPoint& v, const VBox& b, std::mt19937_64& rng) {
  if (rng() & 1) return sample_vbox(b, rng);
  VPoint w = v;
  const double f = std::pow(10.0, -4 * u01(rng)) * (rng() & 1 ? 1.0 : -1.0);
  switch (rng() % 4) {
    case 0: w.a += f * b.a; break;
    case 1: w.c += f * b.c; break;
    case 2: w.d += f * b.d; break;
    default: w.e += f * b.e; break;
  }
  return w;
}

}  // namespace detail

/// Sampled sup of |x2(w1) − x2(w2)|/quasi_dist(w1, w2) over w_i ∈ Γ_f with
/// V-coordinates in the box. A lower estimate of the intrinsic Lipschitz
/// constant, measured in the quasi-metric.
inline LipEstimate intrinsic_lip_estimate(const IntrinsicGraphFn& f, const VBox& box,
                                          std::size_t budget, std::uint64_t seed) {
  auto rng = detail::stream_rng(seed, 0, 0x11b);
  LipEstimate out;
  for (std::size_t i = 0; i < budget; ++i) {
    const VPoint v1 = detail::sample_vbox(box, rng);
    const VPoint v2 = detail::partner(v1, box, rng);
    const ContinuousPoint w1 = gamma_point(f, v1), w2 = gamma_point(f, v2);
    const double q = quasi_dist(w1, w2);
    if (!(q > 1e-12)) continue;
    ++out.pairs;
    const double r = std::abs(w1.x2 - w2.x2) / q;
    if (r > out.lambda) {
      out.lambda = r;
      out.v1 = v1;
      out.v2 = v2;
    }
  }
  return out;
}

/// Box holding a full period of A·sin(ωe) in e.
inline VBox sinusoid_box(double frequency) {
  return {1, 1, 1, 2 * std::numbers::pi / std::abs(frequency)};
}

/// Amplitude A with intrinsic_lip_estimate(A·sin(ωe)) = target, by bisection
/// on a fixed sample.
inline double calibrate_sinusoid(double target, double frequency, std::size_t budget,
                                 std::uint64_t seed) {
  if (!(target > 0 && target < 1)) throw DomainError("target lambda must lie in (0, 1)");
  const VBox box = sinusoid_box(frequency);
  auto lam = [&](double A) {
    return intrinsic_lip_estimate(IntrinsicGraphFn::sinusoid(A, frequency), box, budget, seed).lambda;
  };
  double lo = 0, hi = 1;
  while (lam(hi) < target) {
    hi *= 2;
    if (hi > 1e6) throw NonConvergence("sinusoid calibration did not bracket the target", {hi});
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lam(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct SliceLipReport {
  double chi = 0;
  double rho = 0;            // slices sampled in B_ρ ∩ H^3
  double estimate = 0;       // sampled sup |f_χ(h1) − f_χ(h2)|/quasi_dist(h1, h2)
  double lambda_cons = 0;    // 1.1 λ̂
  double comparability = 0;
  double K = 0;              // C·λ_cons
  double bound = 0;          // K/(1 − λ_cons)
  double quasi_bound = 0;    // λ_cons/(1 − λ_cons): the same argument run in the quasi-metric
  bool within = false;
};

/// Lipschitz constant of the slice f_χ on B_ρ ∩ H^3. From
/// |Δf| ≤ λ(C d(h1,h2) + |Δf|) the slice is (Cλ/(1−λ))-Lipschitz.
inline SliceLipReport slice_lip_check(const IntrinsicGraphFn& f, double chi, double rho,
                                      double lambda_hat, std::size_t budget, std::uint64_t seed,
                                      double comparability = kDefaultComparability) {
  SliceLipReport rep;
  rep.chi = chi;
  rep.rho = rho;
  rep.comparability = comparability;
  rep.lambda_cons = 1.1 * lambda_hat;
  if (!(rep.lambda_cons < 1)) throw DomainError("slice check needs 1.1 * lambda_hat < 1");
  auto rng = detail::stream_rng(seed, 0, 0x51c);
  for (std::size_t i = 0; i < budget; ++i) {
    const ContinuousPoint3 h1 = sample_h3_ball(rho, detail::u01_open(rng), rng);
    ContinuousPoint3 h2;
    if (rng() & 1) {
      h2 = sample_h3_ball(rho, detail::u01_open(rng), rng);
    } else {
      const double f = std::pow(10.0, -4 * detail::u01(rng)) * rho;
      h2 = mul_cont(h1, ContinuousPoint3{f * (2 * detail::u01(rng) - 1), f * (2 * detail::u01(rng) - 1),
                                         f * f * (2 * detail::u01(rng) - 1) / 16});
    }
    const double q = quasi_dist(h1, h2);
    if (!(q > 1e-12)) continue;
    rep.estimate = std::max(rep.estimate, std::abs(f_chi(f, chi, h1) - f_chi(f, chi, h2)) / q);
  }
  rep.K = comparability * rep.lambda_cons;
  rep.bound = rep.K / (1 - rep.lambda_cons);
  rep.quasi_bound = rep.lambda_cons / (1 - rep.lambda_cons);
  rep.within = rep.estimate <= rep.bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Vertical energy of functions on H^3

struct H3Function {
  std::function<double(const ContinuousPoint3&)> fn;
  double vertical_derivative_bound = 0;  // sup |∂ψ/∂z|
};

/// ψ(h) = σ·β(N(h)/σ), β(s) = (1 − s²)² on [0,1] and 0 beyond, with the
/// smooth gauge N = ((x² + y²)² + 16 z²)^{1/4}. |∂ψ/∂z| ≤ 8/σ.
inline H3Function clamped_bump(double sigma) {
  if (!(sigma > 0)) throw DomainError("bump width must be positive");
  return {[sigma](const ContinuousPoint3& h) {
            const double r2 = h.x * h.x + h.y * h.y;
            const double N = std::pow(r2 * r2 + 16 * h.z * h.z, 0.25);
            const double s = N / sigma;
            return s >= 1 ? 0.0 : sigma * (1 - s * s) * (1 - s * s);
          },
          8 / sigma};
}

inline H3Function slice_function(const IntrinsicGraphFn& f, double chi) {
  return {[f, chi](const ContinuousPoint3& h) { return f_chi(f, chi, h); }, f.vertical_derivative_bound()};
}

/// Sampled sup of |ψ(h1) − ψ(h2)|/quasi_dist over pairs in B_ρ ∩ H^3.
inline double h3_lip_estimate(const H3Function& psi, double rho, std::size_t budget, std::uint64_t seed) {
  auto rng = detail::stream_rng(seed, 0, 0x13c);
  double best = 0;
  for (std::size_t i = 0; i < budget; ++i) {
    const ContinuousPoint3 h1 = sample_h3_ball(rho, detail::u01_open(rng), rng);
    ContinuousPoint3 h2;
    if (rng() & 1) {
      h2 = sample_h3_ball(rho, detail::u01_open(rng), rng);
    } else {
      const double f = std::pow(10.0, -4 * detail::u01(rng)) * rho;
      h2 = mul_cont(h1, ContinuousPoint3{f * (2 * detail::u01(rng) - 1), f * (2 * detail::u01(rng) - 1),
                                         f * f * (2 * detail::u01(rng) - 1) / 16});
    }
    const double q = quasi_dist(h1, h2);
    if (!(q > 1e-12)) continue;
    best = std::max(best, std::abs(psi.fn(h1) - psi.fn(h2)) / q);
  }
  return best;
}

struct PsiEnergy {
  double rho = 0;
  double t0 = 0;
  double lhs = 0;          // Monte-Carlo part over t ∈ [t0, ρ²]
  double stderr_ = 0;
  double small_t = 0;      // bound on the t < t0 part: vol·sup|∂ψ/∂z|²·t0
  double lip = 0;          // sampled Lipschitz constant of ψ
  double ratio = 0;        // (lhs + small_t)/(ρ⁴ lip²), 0 when lip = 0
};

/// ∫₀^{ρ²} ∫_{B_ρ∩H³} |ψ(h) − ψ(h Z^{−t})|² dh dt/t², sampling log t uniformly
/// on [t0, ρ²] with t0 = 1e-6 ρ².
inline PsiEnergy psi_energy(const H3Function& psi, double rho, const McOptions& mc,
                            std::size_t lip_budget = 200'000) {
  if (!(rho > 0)) throw DomainError("rho must be positive");
  PsiEnergy out;
  out.rho = rho;
  out.t0 = 1e-6 * rho * rho;
  const double L = std::log(rho * rho / out.t0);
  const double vol = h3_ball_volume(rho);
  const Estimate e = detail::stratified(mc, 0x951, [&](double first, std::mt19937_64& rng) {
    const double t = out.t0 * std::exp(L * first);
    const ContinuousPoint3 h = sample_h3_ball(rho, detail::u01_open(rng), rng);
    const double diff = psi.fn(h) - psi.fn({h.x, h.y, h.z - t});
    return vol * L * diff * diff / t;
  });
  out.lhs = e.value;
  out.stderr_ = e.stderr_;
  out.small_t = vol * psi.vertical_derivative_bound * psi.vertical_derivative_bound * out.t0;
  out.lip = h3_lip_estimate(psi, rho, lip_budget, mc.seed);
  if (out.lip > 0) out.ratio = (out.lhs + out.small_t) / (std::pow(rho, 4) * out.lip * out.lip);
  return out;
}

}  // namespace heis
