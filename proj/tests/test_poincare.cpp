#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "heis/corpus.hpp"
#include "heis/poincare.hpp"

using namespace heis;

namespace {

using Key = std::array<std::int64_t, 5>;

Key key(const DiscretePoint& p) { return {p.a, p.b, p.c, p.d, p.e}; }
DiscretePoint point(const Key& k) { return {k[0], k[1], k[2], k[3], k[4]}; }

// Finitely supported map with explicit evaluation; everything is recomputed
// by enumerating the points that can contribute.
struct BruteMap {
  std::map<Key, std::vector<double>> values;
  std::vector<double> background;

  std::vector<double> at(const DiscretePoint& p) const {
    const auto it = values.find(key(p));
    return it == values.end() ? background : it->second;
  }
  static double norm_p(const std::vector<double>& x, const std::vector<double>& y, double p) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), p);
    return s;
  }
  double inner(std::int64_t t, double p) const {
    std::set<Key> hs;
    for (const auto& [k, v] : values) {
      hs.insert(k);
      hs.insert(key(GroupTraits<DiscretePoint>::vertical(point(k), -t)));
    }
    double s = 0;
    for (const auto& k : hs) s += norm_p(at(GroupTraits<DiscretePoint>::vertical(point(k), t)), at(point(k)), p);
    return s;
  }
  double rhs_sum(double p) const {
    std::set<std::pair<Key, Key>> edges;
    for (const auto& [k, v] : values) {
      const auto h = point(k);
      for (const auto& y : neighbors(h)) edges.insert({k, key(y)});
      for (const auto& g : GroupTraits<DiscretePoint>::generators()) {
        const auto x = mul(h, inv(g));  // x·g = h
        edges.insert({key(x), k});
      }
    }
    double s = 0;
    for (const auto& [a, b] : edges) s += norm_p(at(point(b)), at(point(a)), p);
    return s;
  }
};

std::pair<VectorEmbedding, BruteMap> random_map(std::mt19937_64& rng, std::size_t dim) {
  VectorEmbedding v;
  BruteMap b;
  std::normal_distribution<double> n01;
  v.background.assign(dim, 0.0);
  for (auto& x : v.background) x = n01(rng);
  b.background = v.background;
  for (const auto& p : ball_set(1).points()) {
    if (rng() % 3 == 0) continue;
    std::vector<double> val(dim);
    for (auto& x : val) x = n01(rng);
    v.points.push_back(p);
    v.values.push_back(val);
    b.values[key(p)] = val;
  }
  v.points.push_back({0, 0, 0, 0, 3});
  v.values.push_back(std::vector<double>(dim, 1.5));
  b.values[key(v.points.back())] = v.values.back();
  return {v, b};
}

}  // namespace

TEST(Poincare, InnerSumsMatchBruteForce) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto [phi, brute] = random_map(rng, 2);
    for (double p : {1.0, 1.5, 2.0}) {
      const auto inner = global_inner_sums(phi, 6, p);
      for (std::int64_t t = 1; t <= 6; ++t) EXPECT_NEAR(inner[t], brute.inner(t, p), 1e-9 * (1 + inner[t]));
      EXPECT_NEAR(global_rhs_sum(phi, p), brute.rhs_sum(p), 1e-9 * (1 + brute.rhs_sum(p)));
      EXPECT_NEAR(global_rhs(phi, p), std::pow(brute.rhs_sum(p), 1 / p), 1e-9 * (1 + brute.rhs_sum(p)));
    }
  }
}

TEST(Poincare, LhsBracketContainsLongSum) {
  std::mt19937_64 rng(2);
  const auto [phi, brute] = random_map(rng, 3);
  const double p = 1;
  const auto lhs = global_lhs(phi, p);
  double s = 0;
  for (std::int64_t t = 1; t <= 20000; ++t) s += std::pow(brute.inner(std::min<std::int64_t>(t, 8), p), 2) / double(t * t);
  // beyond the support extent every inner sum equals its limit; the cutoff error is < K/20000
  const double K = std::pow(brute.inner(50, p), 2);
  EXPECT_LE(lhs.lo, std::sqrt(s + K / 20000.0));
  EXPECT_GE(lhs.hi, std::sqrt(s));
  EXPECT_LE(lhs.width(), 1e-6 * lhs.hi);
}

TEST(Poincare, CutAndVectorFormsAgree) {
  std::mt19937_64 rng(3);
  const auto [phi, brute] = random_map(rng, 2);
  const auto cuts = to_cut_form(phi);
  const auto back = to_vector_form(cuts);
  const auto a = global_poincare(phi, 1), b = global_poincare(cuts, 1), c = global_poincare(back, 1);
  EXPECT_NEAR(a.rhs, b.rhs, 1e-9 * a.rhs);
  EXPECT_NEAR(a.lhs.hi, b.lhs.hi, 1e-9 * a.lhs.hi);
  EXPECT_NEAR(b.rhs, c.rhs, 1e-9 * b.rhs);
  const auto pts = ball_set(1).points();
  for (const auto& x : pts)
    for (const auto& y : pts)
      EXPECT_NEAR(cuts.distance(x, y), BruteMap::norm_p(brute.at(x), brute.at(y), 1), 1e-12);
}

TEST(Poincare, LocalEvaluatorsMatchBruteForce) {
  // φ(h) = (a, e) on B_6, an affine map in coordinates
  auto f = [](const DiscretePoint& h) { return std::vector<double>{double(h.a), 0.25 * double(h.e)}; };
  const auto phi = VectorEmbedding::on_ball(6, 2, f);
  const int n = 1;
  double total = 0;
  for (std::int64_t t = 1; t <= 1; ++t) {
    double s = 0;
    for (const auto& h : word_ball(n).points()) {
      const auto x = f(h), y = f(GroupTraits<DiscretePoint>::vertical(h, t));
      s += std::abs(x[0] - y[0]) + std::abs(x[1] - y[1]);
    }
    total += s * s / double(t * t);
  }
  EXPECT_DOUBLE_EQ(local_lhs(phi, n).hi, std::sqrt(total));
  double rs = 0;
  for (const auto& h : word_ball(2).points())
    for (const auto& y : neighbors(h)) {
      const auto a = f(h), b = f(y);
      rs += std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]);
    }
  EXPECT_DOUBLE_EQ(local_rhs(phi, n, 2.0), rs);
  EXPECT_THROW(local_lhs(phi, 3), DomainError);
  EXPECT_THROW(global_lhs(phi), DomainError);
}

TEST(Poincare, ScalingAndTranslation) {
  const auto s = random_cellular(7, 1);
  const auto phi = CutEmbedding::indicator(s);
  const auto a = global_poincare(phi), b = global_poincare(phi.scaled(3));
  EXPECT_NEAR(b.lhs.hi, 3 * a.lhs.hi, 1e-9 * b.lhs.hi);
  EXPECT_NEAR(b.rhs, 3 * a.rhs, 1e-12 * b.rhs);
  const auto c = global_poincare(CutEmbedding::indicator(s.translated({1, 2, 3, 4, 5})));
  EXPECT_EQ(c.rhs, a.rhs);
  EXPECT_EQ(c.lhs.lo, a.lhs.lo);
}

TEST(Poincare, CentralBandAndChain) {
  const auto band = central_band({1, 4, 9, 16, 25, 36, 49, 64});
  EXPECT_EQ(band.dist[0], 4);
  EXPECT_LE(band.spread(), 4.0);
  EXPECT_GT(band.beta, 0);
  // φ = (a, b, c, d, e/4): 1-Lipschitz horizontally, moves every point by 1/4 under Z
  auto f = [](const DiscretePoint& h) {
    return std::vector<double>{double(h.a), double(h.b), double(h.c), double(h.d), 0.25 * double(h.e)};
  };
  const auto small = to_cut_form(VectorEmbedding::on_ball(2, 5, f));
  // a Y step moves e by |a| ≤ 2 on B_2: at most 1 + 2/4 per generator
  EXPECT_LE(compression_pairs(small, Modulus::linear(1)).max_upper_ratio, 1.5 + 1e-12);
  const auto phi = to_cut_form(VectorEmbedding::on_ball(5, 5, f));
  const auto squares = central_band({1, 4, 9, 16});
  EXPECT_EQ(squares.beta, 4.0);
  EXPECT_EQ(squares.gamma, 4.0);
  // n = 1: local_lhs² = (9/4)², discrete bound 81 (4m)², equal at m = 1/16
  const auto tight = replay_chain(phi, 5, Modulus::linear(1), 1.0 / 16, squares);
  EXPECT_EQ(tight.n, 1);
  EXPECT_DOUBLE_EQ(tight.local_lhs_sq, 81.0 / 16);
  EXPECT_DOUBLE_EQ(tight.discrete_lower, 81.0 / 16);
  EXPECT_TRUE(tight.chain_holds);
  EXPECT_FALSE(replay_chain(phi, 5, Modulus::linear(1), 1.0 / 8, squares).chain_holds);
  EXPECT_THROW(replay_chain(phi, 2, Modulus::linear(1), 0.0, squares), DomainError);
}
