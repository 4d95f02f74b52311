#pragma once

// Discrete Heisenberg groups H^5_Z and H^3_Z in the polarized (upper
// triangular matrix) coordinates, and the continuous group H^5 in the
// symmetric coordinates.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

#include "heis/error.hpp"

namespace heis {

namespace checked {

inline std::int64_t add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw OverflowError("integer overflow in addition");
  return r;
}

inline std::int64_t sub(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_sub_overflow(x, y, &r)) throw OverflowError("integer overflow in subtraction");
  return r;
}

inline std::int64_t mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) throw OverflowError("integer overflow in multiplication");
  return r;
}

inline std::int64_t neg(std::int64_t x) { return sub(0, x); }

}  // namespace checked

/// Element (a,b,c,d,e) of H^5_Z. a,b are the X1,X2 coordinates, c,d the
/// Y1,Y2 coordinates and e the central coordinate.
struct DiscretePoint {
  std::int64_t a = 0, b = 0, c = 0, d = 0, e = 0;

  friend bool operator==(const DiscretePoint&, const DiscretePoint&) = default;
  friend auto operator<=>(const DiscretePoint&, const DiscretePoint&) = default;
};

/// Element (a,c,e) of H^3_Z, the subgroup spanned by X1, Y1, Z.
struct DiscretePoint3 {
  std::int64_t a = 0, c = 0, e = 0;

  friend bool operator==(const DiscretePoint3&, const DiscretePoint3&) = default;
  friend auto operator<=>(const DiscretePoint3&, const DiscretePoint3&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const DiscretePoint& p) {
  return os << '(' << p.a << ',' << p.b << ',' << p.c << ',' << p.d << ',' << p.e << ')';
}

inline std::ostream& operator<<(std::ostream& os, const DiscretePoint3& p) {
  return os << '(' << p.a << ',' << p.c << ',' << p.e << ')';
}

// (a,b,c,d,e)(α,β,γ,δ,ε) = (a+α, b+β, c+γ, d+δ, e+ε+aγ+bδ)
inline DiscretePoint mul(const DiscretePoint& p, const DiscretePoint& q) {
  using namespace checked;
  return {add(p.a, q.a), add(p.b, q.b), add(p.c, q.c), add(p.d, q.d),
          add(add(p.e, q.e), add(checked::mul(p.a, q.c), checked::mul(p.b, q.d)))};
}

inline DiscretePoint inv(const DiscretePoint& p) {
  using namespace checked;
  return {neg(p.a), neg(p.b), neg(p.c), neg(p.d),
          add(neg(p.e), add(checked::mul(p.a, p.c), checked::mul(p.b, p.d)))};
}

inline DiscretePoint3 mul(const DiscretePoint3& p, const DiscretePoint3& q) {
  using namespace checked;
  return {add(p.a, q.a), add(p.c, q.c), add(add(p.e, q.e), checked::mul(p.a, q.c))};
}

inline DiscretePoint3 inv(const DiscretePoint3& p) {
  using namespace checked;
  return {neg(p.a), neg(p.c), add(neg(p.e), checked::mul(p.a, p.c))};
}

/// [g,h] = g h g^-1 h^-1
template <class P>
P commutator(const P& g, const P& h) {
  return mul(mul(mul(g, h), inv(g)), inv(h));
}

/// Group homomorphism H^3_Z -> H^5_Z (b = d = 0).
inline DiscretePoint embed(const DiscretePoint3& p) { return {p.a, 0, p.c, 0, p.e}; }

namespace gen {
inline constexpr DiscretePoint X1{1, 0, 0, 0, 0};
inline constexpr DiscretePoint X2{0, 1, 0, 0, 0};
inline constexpr DiscretePoint Y1{0, 0, 1, 0, 0};
inline constexpr DiscretePoint Y2{0, 0, 0, 1, 0};
inline constexpr DiscretePoint Z{0, 0, 0, 0, 1};
}  // namespace gen

/// Static description of a discrete Heisenberg group: its symmetric
/// generating set, the central direction and a packed 64-bit key.
template <class P>
struct GroupTraits;

template <>
struct GroupTraits<DiscretePoint> {
  using Point = DiscretePoint;
  static constexpr int kGenerators = 8;
  static constexpr const char* kName = "H5";

  static constexpr std::array<Point, 8> generators() {
    return {{{1, 0, 0, 0, 0}, {-1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, -1, 0, 0, 0},
             {0, 0, 1, 0, 0}, {0, 0, -1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, -1, 0}}};
  }

  /// x Z^t. Z is central, so only e moves.
  static Point vertical(const Point& p, std::int64_t t) {
    return {p.a, p.b, p.c, p.d, checked::add(p.e, t)};
  }
  static std::int64_t height(const Point& p) { return p.e; }
  static Point with_height(Point p, std::int64_t e) {
    p.e = e;
    return p;
  }

  // Signed bitfields: 11 bits for each of a,b,c,d and 20 bits for e.
  static constexpr int kHorizBits = 11;
  static constexpr int kVertBits = 20;

  static bool packable(const Point& p) {
    return fits(p.a, kHorizBits) && fits(p.b, kHorizBits) && fits(p.c, kHorizBits) &&
           fits(p.d, kHorizBits) && fits(p.e, kVertBits);
  }

  static std::uint64_t pack(const Point& p) {
    if (!packable(p)) throw OverflowError("point outside the packable key range");
    return field(p.a, kHorizBits, 0) | field(p.b, kHorizBits, 11) |
           field(p.c, kHorizBits, 22) | field(p.d, kHorizBits, 33) |
           field(p.e, kVertBits, 44);
  }

  static Point unpack(std::uint64_t k) {
    return {extract(k, kHorizBits, 0), extract(k, kHorizBits, 11), extract(k, kHorizBits, 22),
            extract(k, kHorizBits, 33), extract(k, kVertBits, 44)};
  }

  /// Key of the vertical fiber through p (everything but e).
  static std::uint64_t fiber(const Point& p) {
    return pack(with_height(p, 0));
  }

  static bool fits(std::int64_t v, int bits) {
    const std::int64_t lim = std::int64_t{1} << (bits - 1);
    return v >= -lim && v < lim;
  }
  static std::uint64_t field(std::int64_t v, int bits, int shift) {
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    return (static_cast<std::uint64_t>(v) & mask) << shift;
  }
  static std::int64_t extract(std::uint64_t k, int bits, int shift) {
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    std::uint64_t raw = (k >> shift) & mask;
    if (raw >> (bits - 1)) raw |= ~mask;  // sign extend
    return static_cast<std::int64_t>(raw);
  }
};

template <>
struct GroupTraits<DiscretePoint3> {
  using Point = DiscretePoint3;
  static constexpr int kGenerators = 4;
  static constexpr const char* kName = "H3";

  static constexpr std::array<Point, 4> generators() {
    return {{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}}};
  }

  static Point vertical(const Point& p, std::int64_t t) {
    return {p.a, p.c, checked::add(p.e, t)};
  }
  static std::int64_t height(const Point& p) { return p.e; }
  static Point with_height(Point p, std::int64_t e) {
    p.e = e;
    return p;
  }

  static constexpr int kHorizBits = 21;
  static constexpr int kVertBits = 22;

  static bool packable(const Point& p) {
    using H5 = GroupTraits<DiscretePoint>;
    return H5::fits(p.a, kHorizBits) && H5::fits(p.c, kHorizBits) && H5::fits(p.e, kVertBits);
  }

  static std::uint64_t pack(const Point& p) {
    using H5 = GroupTraits<DiscretePoint>;
    if (!packable(p)) throw OverflowError("point outside the packable key range");
    return H5::field(p.a, kHorizBits, 0) | H5::field(p.c, kHorizBits, 21) |
           H5::field(p.e, kVertBits, 42);
  }

  static Point unpack(std::uint64_t k) {
    using H5 = GroupTraits<DiscretePoint>;
    return {H5::extract(k, kHorizBits, 0), H5::extract(k, kHorizBits, 21),
            H5::extract(k, kVertBits, 42)};
  }

  static std::uint64_t fiber(const Point& p) { return pack(with_height(p, 0)); }
};

/// Right multiplication by every generator: the Cayley-graph neighbors.
template <class P>
auto neighbors(const P& p) {
  std::array<P, GroupTraits<P>::kGenerators> out;
  const auto gens = GroupTraits<P>::generators();
  for (std::size_t i = 0; i < gens.size(); ++i) out[i] = mul(p, gens[i]);
  return out;
}

/// Z^n in either group.
template <class P>
P central_power(std::int64_t n) {
  return GroupTraits<P>::vertical(P{}, n);
}

// ---------------------------------------------------------------------------
// Continuous group H^5, symmetric model:
//   uv = u + v + ½(x1(u)y1(v) − y1(u)x1(v) + x2(u)y2(v) − y2(u)x2(v)) Z

struct ContinuousPoint {
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0, z = 0;

  friend bool operator==(const ContinuousPoint&, const ContinuousPoint&) = default;

  bool finite() const {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(y1) && std::isfinite(y2) &&
           std::isfinite(z);
  }
};

inline std::ostream& operator<<(std::ostream& os, const ContinuousPoint& u) {
  return os << '(' << u.x1 << ',' << u.x2 << ',' << u.y1 << ',' << u.y2 << ',' << u.z << ')';
}

inline ContinuousPoint mul_cont(const ContinuousPoint& u, const ContinuousPoint& v) {
  if (!u.finite() || !v.finite()) throw DomainError("non-finite coordinate in group product");
  const double omega = u.x1 * v.y1 - u.y1 * v.x1 + u.x2 * v.y2 - u.y2 * v.x2;
  return {u.x1 + v.x1, u.x2 + v.x2, u.y1 + v.y1, u.y2 + v.y2, u.z + v.z + 0.5 * omega};
}

inline ContinuousPoint inv_cont(const ContinuousPoint& u) {
  if (!u.finite()) throw DomainError("non-finite coordinate in group inverse");
  return {-u.x1, -u.x2, -u.y1, -u.y2, -u.z};
}

/// (a,b,c,d,e) -> (a,b,c,d, e - (ac+bd)/2); an isomorphism onto the
/// integer points of the symmetric model's discrete subgroup.
inline ContinuousPoint polarized_to_symmetric(const DiscretePoint& p) {
  const auto twice_shift = checked::add(checked::mul(p.a, p.c), checked::mul(p.b, p.d));
  return {static_cast<double>(p.a), static_cast<double>(p.b), static_cast<double>(p.c),
          static_cast<double>(p.d),
          static_cast<double>(p.e) - 0.5 * static_cast<double>(twice_shift)};
}

/// Heisenberg dilation s_θ.
inline ContinuousPoint scale(double theta, const ContinuousPoint& u) {
  return {theta * u.x1, theta * u.x2, theta * u.y1, theta * u.y2, theta * theta * u.z};
}

/// |x1|+|x2|+|y1|+|y2|+4√|z|, comparable to the Carnot–Carathéodory norm.
inline double quasi_norm(const ContinuousPoint& u) {
  return std::abs(u.x1) + std::abs(u.x2) + std::abs(u.y1) + std::abs(u.y2) +
         4.0 * std::sqrt(std::abs(u.z));
}

inline double quasi_dist(const ContinuousPoint& u, const ContinuousPoint& v) {
  return quasi_norm(mul_cont(inv_cont(u), v));
}

namespace cgen {
inline constexpr ContinuousPoint X1{1, 0, 0, 0, 0};
inline constexpr ContinuousPoint X2{0, 1, 0, 0, 0};
inline constexpr ContinuousPoint Y1{0, 0, 1, 0, 0};
inline constexpr ContinuousPoint Y2{0, 0, 0, 1, 0};
inline constexpr ContinuousPoint Z{0, 0, 0, 0, 1};
}  // namespace cgen

/// h^t in exponential coordinates: (t h_1, ..., t h_5).
inline ContinuousPoint power(const ContinuousPoint& h, double t) {
  return {t * h.x1, t * h.x2, t * h.y1, t * h.y2, t * h.z};
}

/// Point of H^3 = span{X1, Y1, Z} in coordinates (x, y, z).
struct ContinuousPoint3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const ContinuousPoint3&, const ContinuousPoint3&) = default;
};

inline ContinuousPoint lift(const ContinuousPoint3& h) { return {h.x, 0, h.y, 0, h.z}; }

inline ContinuousPoint3 mul_cont(const ContinuousPoint3& g, const ContinuousPoint3& h) {
  return {g.x + h.x, g.y + h.y, g.z + h.z + 0.5 * (g.x * h.y - g.y * h.x)};
}

inline double quasi_norm(const ContinuousPoint3& h) {
  return std::abs(h.x) + std::abs(h.y) + 4.0 * std::sqrt(std::abs(h.z));
}

inline double quasi_dist(const ContinuousPoint3& g, const ContinuousPoint3& h) {
  return quasi_norm(mul_cont(ContinuousPoint3{-g.x, -g.y, -g.z}, h));
}

/// Comparability constant C of the quasi-norm gauge: the true metric d
/// satisfies d <= quasi_norm <= (C/2) d. Existential; carried as a knob.
inline constexpr double kDefaultComparability = 8.0;

}  // namespace heis

template <>
struct std::hash<heis::DiscretePoint> {
  std::size_t operator()(const heis::DiscretePoint& p) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : {p.a, p.b, p.c, p.d, p.e}) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};
