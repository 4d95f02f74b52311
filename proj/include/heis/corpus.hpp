#pragma once

// Deterministic families of finite subsets of H^5_Z used to scan the
// vertical-versus-horizontal perimeter ratio.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heis/ball.hpp"
#include "heis/perimeter.hpp"

namespace heis {

struct NamedSet {
  std::string family;
  std::string params;
  LatticeSet5 set;
};

/// Uniform integer in [lo, hi] from a 64-bit engine. Plain modulo keeps the
/// stream identical across standard libraries.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(rng() % span);
}

/// Box {0 ≤ a < sa, ..., 0 ≤ e < se} translated to start at `origin`.
inline LatticeSet5 box_set(std::int64_t sa, std::int64_t sb, std::int64_t sc, std::int64_t sd,
                           std::int64_t se, DiscretePoint origin = {}) {
  std::vector<DiscretePoint> pts;
  pts.reserve(static_cast<std::size_t>(sa * sb * sc * sd * se));
  for (std::int64_t a = 0; a < sa; ++a)
    for (std::int64_t b = 0; b < sb; ++b)
      for (std::int64_t c = 0; c < sc; ++c)
        for (std::int64_t d = 0; d < sd; ++d)
          for (std::int64_t e = 0; e < se; ++e)
            pts.push_back({origin.a + a, origin.b + b, origin.c + c, origin.d + d, origin.e + e});
  return LatticeSet5(pts);
}

/// {Z^i : 0 ≤ i < n}
inline LatticeSet5 vertical_segment(std::int64_t n) {
  std::vector<DiscretePoint> pts;
  for (std::int64_t i = 0; i < n; ++i) pts.push_back({0, 0, 0, 0, i});
  return LatticeSet5(pts);
}

inline LatticeSet5 ball_set(int radius, std::size_t cap = kDefaultBallCap) {
  return LatticeSet5(word_ball<DiscretePoint>(radius, cap).points());
}

/// Union of 1..6 random boxes ("cells") near the origin. Vertical sides
/// are drawn up to the square of the horizontal ones.
inline LatticeSet5 random_cellular(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  const auto cells = uniform_int(rng, 1, 6);
  std::vector<DiscretePoint> pts;
  for (std::int64_t k = 0; k < cells; ++k) {
    const auto side = uniform_int(rng, 1, 3);
    std::int64_t s[4];
    for (auto& v : s) v = uniform_int(rng, 1, side);
    const auto se = uniform_int(rng, 1, side * side + 1);
    DiscretePoint o{uniform_int(rng, -3, 3), uniform_int(rng, -3, 3), uniform_int(rng, -3, 3),
                    uniform_int(rng, -3, 3), uniform_int(rng, -8, 8)};
    for (const auto& p : box_set(s[0], s[1], s[2], s[3], se, o).points()) pts.push_back(p);
  }
  return LatticeSet5(pts);
}

/// Box [-n, n)^4 × [-n², n²) cut by the tilted half-space e ≥ ka·a + kc·c.
inline LatticeSet5 tilted_halfspace(std::int64_t n, std::int64_t ka, std::int64_t kc) {
  std::vector<DiscretePoint> pts;
  for (std::int64_t a = -n; a < n; ++a)
    for (std::int64_t b = -n; b < n; ++b)
      for (std::int64_t c = -n; c < n; ++c)
        for (std::int64_t d = -n; d < n; ++d)
          for (std::int64_t e = -n * n; e < n * n; ++e)
            if (e >= ka * a + kc * c) pts.push_back({a, b, c, d, e});
  return LatticeSet5(pts);
}

struct CorpusSpec {
  int max_ball = 6;
  std::vector<std::int64_t> aniso_boxes{1, 2, 3, 4, 6, 8};  // (n,n,n,n,n²)
  std::vector<std::int64_t> iso_boxes{2, 3, 4, 6};           // (n,n,n,n,n)
  std::vector<std::int64_t> segments{1, 2, 4, 8, 16, 32, 64};
  std::uint64_t seed = 7;
  std::uint64_t random_count = 200;
  std::vector<std::int64_t> tilted{2, 3};
  std::size_t cap = kDefaultBallCap;
};

/// Calls `sink(NamedSet)` for every member of the corpus, in a fixed order.
template <class Sink>
void for_each_corpus_set(const CorpusSpec& spec, Sink&& sink) {
  auto str = [](auto... xs) {
    std::ostringstream os;
    const char* sep = "";
    ((os << sep << xs, sep = ";"), ...);
    return os.str();
  };
  for (int r = 0; r <= spec.max_ball; ++r) {
    sink(NamedSet{"ball", str("R=" + std::to_string(r)), ball_set(r, spec.cap)});
  }
  for (auto n : spec.aniso_boxes) {
    if (static_cast<std::size_t>(n * n * n * n * n * n) > spec.cap)
      throw ResourceError("box exceeds point cap", n * n * n * n * n * n, spec.cap);
    sink(NamedSet{"box", str(n, n, n, n, n * n), box_set(n, n, n, n, n * n)});
  }
  for (auto n : spec.iso_boxes) {
    sink(NamedSet{"box", str(n, n, n, n, n), box_set(n, n, n, n, n)});
  }
  for (auto n : spec.segments) {
    sink(NamedSet{"segment", str("n=" + std::to_string(n)), vertical_segment(n)});
  }
  for (auto n : spec.tilted) {
    sink(NamedSet{"tilted", str("n=" + std::to_string(n), "ka=1", "kc=0"),
                  tilted_halfspace(n, 1, 0)});
    sink(NamedSet{"tilted", str("n=" + std::to_string(n), "ka=1", "kc=1"),
                  tilted_halfspace(n, 1, 1)});
  }
  for (std::uint64_t i = 0; i < spec.random_count; ++i) {
    sink(NamedSet{"random", str("seed=" + std::to_string(spec.seed), "i=" + std::to_string(i)),
                  random_cellular(spec.seed, i)});
  }
}

}  // namespace heis
