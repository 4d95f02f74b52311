#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <set>

#include "heis/ball.hpp"

using namespace heis;

namespace {

using Tuple = std::array<std::int64_t, 5>;

// Naive BFS on tuples with the group law written out by hand.
std::vector<std::size_t> naive_ball_sizes(int R) {
  auto step = [](const Tuple& p, int g) {
    Tuple q = p;
    const int k = g / 2, s = g % 2 ? -1 : 1;
    q[k] += s;
    if (k == 2) q[4] += s * p[0];  // e += a·γ
    if (k == 3) q[4] += s * p[1];  // e += b·δ
    return q;
  };
  std::set<Tuple> seen{{0, 0, 0, 0, 0}};
  std::vector<Tuple> frontier{{0, 0, 0, 0, 0}};
  std::vector<std::size_t> sizes{1};
  for (int r = 1; r <= R; ++r) {
    std::vector<Tuple> next;
    for (const auto& p : frontier)
      for (int g = 0; g < 8; ++g) {
        const auto q = step(p, g);
        if (seen.insert(q).second) next.push_back(q);
      }
    frontier = std::move(next);
    sizes.push_back(seen.size());
  }
  return sizes;
}

}  // namespace

TEST(Ball, SizesMatchNaiveEnumeration) {
  const auto naive = naive_ball_sizes(5);
  Ball<DiscretePoint> b;
  for (int r = 1; r <= 5; ++r) {
    b.grow();
    EXPECT_EQ(b.size(), naive[r]) << "R = " << r;
  }
  EXPECT_EQ(word_ball(1).size(), 9u);
}

TEST(Ball, H3UnitBallHasFivePoints) {
  EXPECT_EQ(word_ball<DiscretePoint3>(1).size(), 5u);
  EXPECT_EQ(word_ball<DiscretePoint3>(2).size(), 17u);  // 1 + 4 + 12
}

TEST(Ball, SpheresPartitionAndDistancesAreConsistent) {
  const auto b = word_ball(4);
  std::size_t total = 0;
  for (int r = 0; r <= 4; ++r) total += b.sphere_size(r);
  EXPECT_EQ(total, b.size());
  // every neighbor of a point at distance r lies at distance r−1, r or r+1
  for (const auto& p : word_ball(3).points()) {
    const int d = *b.distance(p);
    for (const auto& q : neighbors(p)) {
      const int dq = *b.distance(q);
      EXPECT_LE(std::abs(dq - d), 1);
    }
  }
}

TEST(Ball, WordDistAgreesWithBall) {
  const auto b = word_ball(5);
  const auto pts = b.points();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const auto& p = pts[rng() % pts.size()];
    EXPECT_EQ(word_dist(p, 5), b.distance(p));
  }
  EXPECT_FALSE(word_dist(central_power<DiscretePoint>(16), 15).has_value());
}

TEST(Ball, CentralPowers) {
  EXPECT_EQ(word_dist(central_power<DiscretePoint>(1), 10), 4);
  for (int n = 1; n <= 5; ++n) EXPECT_EQ(word_dist(central_power<DiscretePoint>(n * n), 4 * n), 4 * n);
}

TEST(Ball, LeftInvariance) {
  const auto b = word_ball(4);
  std::mt19937_64 rng(2);
  const auto pts = word_ball(2).points();
  for (int i = 0; i < 200; ++i) {
    const auto& x = pts[rng() % pts.size()];
    const auto& y = pts[rng() % pts.size()];
    const DiscretePoint g{static_cast<std::int64_t>(rng() % 7) - 3, 2, -1, 0, 5};
    EXPECT_EQ(word_dist(mul(inv(mul(g, x)), mul(g, y)), 8), b.distance(mul(inv(x), y)));
  }
}

TEST(Ball, CapAndDomainErrors) {
  EXPECT_THROW(word_ball(5, 1000), ResourceError);
  EXPECT_THROW(word_ball(-1), DomainError);
  Ball<DiscretePoint> b;
  b.grow();
  EXPECT_THROW(b.grow(10), ResourceError);
  EXPECT_EQ(b.radius(), 1);
}
