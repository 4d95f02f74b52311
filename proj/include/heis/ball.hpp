#pragma once

// Word-metric balls of the discrete Heisenberg groups by breadth-first
// search over the Cayley graph, and exact word distances by bidirectional
// search.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/error.hpp"

namespace heis {

/// Default limit on the number of points a single search may hold.
inline constexpr std::size_t kDefaultBallCap = std::size_t{1} << 26;

namespace detail {

// Sorted, deduplicated packed keys of all neighbors of `layer`, minus the
// two previous layers. In a Cayley graph this is exactly the next sphere.
template <class P>
std::vector<std::uint64_t> next_sphere(std::span<const std::uint64_t> layer,
                                       std::span<const std::uint64_t> previous) {
  using T = GroupTraits<P>;
  std::vector<std::uint64_t> out;
  out.reserve(layer.size() * T::kGenerators);
  for (auto key : layer) {
    for (const auto& q : neighbors(T::unpack(key))) out.push_back(T::pack(q));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  auto in_either = [&](std::uint64_t k) {
    return std::binary_search(layer.begin(), layer.end(), k) ||
           std::binary_search(previous.begin(), previous.end(), k);
  };
  out.erase(std::remove_if(out.begin(), out.end(), in_either), out.end());
  return out;
}

}  // namespace detail

/// Closed ball B_R around the identity in the word metric, stored as
/// spheres of sorted packed keys.
template <class P>
class Ball {
 public:
  using Traits = GroupTraits<P>;

  Ball() : spheres_{{Traits::pack(P{})}} {}

  int radius() const { return static_cast<int>(spheres_.size()) - 1; }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : spheres_) n += s.size();
    return n;
  }

  /// |S_r|, the number of points at distance exactly r.
  std::size_t sphere_size(int r) const { return spheres_.at(r).size(); }

  std::span<const std::uint64_t> sphere_keys(int r) const { return spheres_.at(r); }

  std::optional<int> distance(const P& p) const {
    if (!Traits::packable(p)) return std::nullopt;
    const auto k = Traits::pack(p);
    for (std::size_t r = 0; r < spheres_.size(); ++r) {
      if (std::binary_search(spheres_[r].begin(), spheres_[r].end(), k)) return static_cast<int>(r);
    }
    return std::nullopt;
  }

  bool contains(const P& p) const { return distance(p).has_value(); }

  /// Members in order of distance, ties by packed key.
  std::vector<P> points() const {
    std::vector<P> out;
    out.reserve(size());
    for (const auto& s : spheres_)
      for (auto k : s) out.push_back(Traits::unpack(k));
    return out;
  }

  /// Grows the ball by one sphere. Throws ResourceError if the total size
  /// would exceed `cap`; the ball keeps its previous radius in that case.
  void grow(std::size_t cap = kDefaultBallCap) {
    static const std::vector<std::uint64_t> empty;
    const auto& prev = spheres_.size() > 1 ? spheres_[spheres_.size() - 2] : empty;
    auto next = detail::next_sphere<P>(spheres_.back(), prev);
    if (size() + next.size() > cap) {
      throw ResourceError("word ball exceeds point cap at radius " + std::to_string(radius() + 1),
                          size() + next.size(), cap, radius());
    }
    spheres_.push_back(std::move(next));
  }

 private:
  std::vector<std::vector<std::uint64_t>> spheres_;
};

/// B_R by breadth-first search from the identity.
template <class P = DiscretePoint>
Ball<P> word_ball(int radius, std::size_t cap = kDefaultBallCap) {
  if (radius < 0) throw DomainError("ball radius must be nonnegative");
  Ball<P> ball;
  while (ball.radius() < radius) ball.grow(cap);
  return ball;
}

/// Exact d_W(0, p), or nullopt if it exceeds `max_dist`. Searches from both
/// ends; by left invariance the sphere of radius r around p is p·S_r.
template <class P = DiscretePoint>
std::optional<int> word_dist(const P& p, int max_dist, std::size_t cap = kDefaultBallCap) {
  using T = GroupTraits<P>;
  if (max_dist < 0) throw DomainError("distance cap must be nonnegative");
  const auto target = T::pack(p);
  const auto origin = T::pack(P{});
  if (target == origin) return 0;

  struct Side {
    std::vector<std::vector<std::uint64_t>> spheres;
    std::size_t total = 1;
    bool contains(std::uint64_t k) const {
      for (const auto& s : spheres)
        if (std::binary_search(s.begin(), s.end(), k)) return true;
      return false;
    }
    void expand() {
      static const std::vector<std::uint64_t> empty;
      const auto& prev = spheres.size() > 1 ? spheres[spheres.size() - 2] : empty;
      spheres.push_back(detail::next_sphere<P>(spheres.back(), prev));
      total += spheres.back().size();
    }
  };
  Side fwd{{{origin}}}, bwd{{{target}}};

  for (int dist = 1; dist <= max_dist; ++dist) {
    Side& side = fwd.spheres.back().size() <= bwd.spheres.back().size() ? fwd : bwd;
    const Side& other = (&side == &fwd) ? bwd : fwd;
    side.expand();
    if (fwd.total + bwd.total > cap) {
      throw ResourceError("bidirectional search exceeds point cap", fwd.total + bwd.total, cap,
                          dist - 1);
    }
    // Before this step the balls were disjoint, so any new meeting point
    // lies on the sphere just added.
    for (auto k : side.spheres.back()) {
      if (other.contains(k)) return dist;
    }
  }
  return std::nullopt;
}

}  // namespace heis
