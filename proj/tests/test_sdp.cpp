#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "heis/sdp.hpp"

using namespace heis;

namespace {

// Every nonempty proper subset, both orientations.
double brute_opt(const Instance& inst) {
  const int n = inst.n();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t A = 1; A + 1 < (std::uint64_t{1} << n); ++A) {
    double c = 0, d = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (((A >> i) & 1) && !((A >> j) & 1)) c += inst.C(i, j), d += inst.D(i, j);
    if (d > 0) best = std::min(best, c / d);
  }
  return best;
}

Eigen::MatrixXi cycle(int n) {
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i) adj(i, (i + 1) % n) = adj((i + 1) % n, i) = 1;
  return adj;
}

}  // namespace

TEST(Sdp, OptMatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 40; ++i) {
    const auto inst = random_instance(rng, 3 + i % 8);
    const auto r = opt_exact(inst);
    EXPECT_NEAR(r.value, brute_opt(inst), 1e-12);
    EXPECT_NEAR(Instance::cross(inst.C, r.mask) / Instance::cross(inst.D, r.mask), r.value, 1e-12);
  }
}

TEST(Sdp, FourCycleIsTight) {
  const auto inst = uniform_instance(cycle(4));
  const auto g = integrality_gap(inst);
  EXPECT_NEAR(g.opt.value, 0.5, 1e-12);
  EXPECT_NEAR(g.lp, 0.5, 1e-8);
  EXPECT_NEAR(g.sdp.objective, 0.5, 1e-7);
}

TEST(Sdp, SandwichAndResiduals) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 12; ++i) {
    const auto inst = random_instance(rng, 3 + i % 6);
    const auto g = integrality_gap(inst);
    EXPECT_LE(g.lp - 1e-5, g.sdp.objective);
    EXPECT_LE(g.sdp.objective, g.opt.value + 1e-5);
    EXPECT_LE(g.sdp.residuals.max(), 1e-8);
    // residuals recomputed from the returned Gram alone
    const auto r = sdp_residuals(inst, g.sdp.gram);
    EXPECT_LE(std::max({r.psd_violation, r.triangle_violation, r.normalization_error}), 1e-8);
  }
}

TEST(Sdp, PermutationInvariance) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    const int n = 4 + i;
    const auto inst = random_instance(rng, n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto p = inst.permuted(perm);
    EXPECT_NEAR(sdp_neg(inst).objective, sdp_neg(p).objective, 1e-8);
    EXPECT_NEAR(lp_metric(inst), lp_metric(p), 1e-9);
    EXPECT_DOUBLE_EQ(opt_exact(inst).value, opt_exact(p).value);
  }
}

TEST(Sdp, SparseDemandStillSolves) {
  // demand on a single pair leaves every other distance free
  Instance inst{Eigen::MatrixXd::Zero(5, 5), Eigen::MatrixXd::Zero(5, 5)};
  inst.C(0, 1) = inst.C(1, 0) = 1;
  inst.C(1, 2) = inst.C(2, 1) = 1;
  inst.D(0, 2) = inst.D(2, 0) = 1;
  const auto s = sdp_neg(inst);
  EXPECT_NEAR(s.objective, 1.0, 1e-7);  // d02 ≤ d01 + d12
  EXPECT_LE(s.residuals.max(), 1e-8);
}

TEST(Sdp, ScaleInvariance) {
  std::mt19937_64 rng(4);
  const auto inst = random_instance(rng, 6);
  Instance scaled{3 * inst.C, 0.5 * inst.D};
  EXPECT_NEAR(sdp_neg(scaled).objective, 6 * sdp_neg(inst).objective, 1e-7);
  EXPECT_NEAR(lp_metric(scaled), 6 * lp_metric(inst), 1e-8);
}

TEST(Sdp, HeisenbergPipeline) {
  const auto h = heis_instance<DiscretePoint3>(1, BallTransform::kRaw);
  EXPECT_EQ(h.metric.n(), 5);
  EXPECT_EQ(h.group, "H3");
  ASSERT_TRUE(h.c1.has_value());
  EXPECT_NEAR(h.c1->c1, 1, 1e-9);  // a star of four leaves embeds in L1
  ASSERT_TRUE(h.gap.has_value());
  EXPECT_LE(h.gap->sdp.objective, h.gap->opt.value + 1e-5);
  EXPECT_THROW(heis_instance<DiscretePoint>(2, BallTransform::kRaw), CapabilityError);
}

TEST(Sdp, Errors) {
  std::mt19937_64 rng(5);
  EXPECT_THROW(sdp_neg(random_instance(rng, 13)), CapabilityError);
  Instance bad{Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3)};
  EXPECT_THROW(sdp_neg(bad), DomainError);
  bad.D(0, 1) = 1;
  EXPECT_THROW(sdp_neg(bad), DomainError);  // asymmetric
}
