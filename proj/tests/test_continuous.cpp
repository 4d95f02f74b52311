#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "heis/continuous.hpp"

using namespace heis;

namespace {

double overlap(double lo, double hi, double a, double b) { return std::max(0.0, std::min(hi, b) - std::max(lo, a)); }

// v̄ of the slab {0 < z < h} over B_r, by quadrature in the horizontal
// ℓ₁ radius ρ (density 8ρ³/3); the z-section is [−L, L], L = ((r − ρ)/4)².
double slab_vbar(double h, double r, double s) {
  const double t = std::exp2(2 * s);
  auto section = [&](double rho) {
    const double L = std::pow((r - rho) / 4, 2);
    if (t >= h) return overlap(-L, L, 0, h) + overlap(-L, L, t, t + h);
    return overlap(-L, L, 0, t) + overlap(-L, L, h, h + t);
  };
  const int N = 20000;  // composite Simpson
  const double dx = r / N;
  double sum = 0;
  for (int i = 0; i <= N; ++i) {
    const double rho = i * dx;
    const double w = (i == 0 || i == N) ? 1 : (i % 2 ? 4 : 2);
    sum += w * 8 * rho * rho * rho / 3 * section(rho);
  }
  return sum * dx / 3 / std::exp2(s);
}

McOptions mc(std::size_t budget, std::uint64_t seed = 1) {
  McOptions o;
  o.budget = budget;
  o.seed = seed;
  return o;
}

ContinuousPoint random_point(std::mt19937_64& rng, double scale = 3) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST(Continuous, ReconstructionIdentity) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100000; ++i) {
    const auto u = random_point(rng);
    const auto v = reconstruct(slice_point(u));
    EXPECT_NEAR(v.x1, u.x1, 1e-12);
    EXPECT_NEAR(v.x2, u.x2, 1e-12);
    EXPECT_NEAR(v.y1, u.y1, 1e-12);
    EXPECT_NEAR(v.y2, u.y2, 1e-12);
    ASSERT_NEAR(v.z, u.z, 1e-12);
  }
}

TEST(Continuous, GraphPointsLieOnTheBoundary) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  const auto f = IntrinsicGraphFn::sinusoid(0.7, 1.3);
  for (int i = 0; i < 1000; ++i) {
    const VPoint v{u(rng), u(rng), u(rng), u(rng)};
    const auto g = gamma_point(f, v);
    const auto s = slice_point(g);
    EXPECT_NEAR(s.xi, f_chi(f, s.chi, s.h), 1e-12);
    EXPECT_TRUE(in_half_space(f, mul_cont(g, power(cgen::X2, 1e-6))));
    EXPECT_FALSE(in_half_space(f, mul_cont(g, power(cgen::X2, -1e-6))));
  }
}

TEST(Continuous, FamiliesParseAndDescribe) {
  for (const char* spec : {"zero", "constant:0.5", "linear:1,2,3,0.25", "bump:0.5,2", "sinusoid:0.3,1"}) {
    const auto f = IntrinsicGraphFn::parse(spec);
    const auto g = IntrinsicGraphFn::parse(f.describe());
    EXPECT_EQ(f.params(), g.params());
    EXPECT_EQ(f.family(), g.family());
  }
  EXPECT_THROW(IntrinsicGraphFn::parse("sinusoid:1"), DomainError);
  EXPECT_THROW(IntrinsicGraphFn::parse("wave:1,2"), DomainError);
  EXPECT_DOUBLE_EQ(IntrinsicGraphFn::sinusoid(2, 3)({0, 0, 0, 0.5}), 2 * std::sin(1.5));
}

TEST(Continuous, QuasiBallVolumeByRejection) {
  // uniform points in the bounding box [−r, r]⁴ × [−r²/16, r²/16]
  const double r = 1.5;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> h(-r, r), z(-r * r / 16, r * r / 16);
  const int N = 2'000'000;
  int hit = 0;
  for (int i = 0; i < N; ++i) hit += quasi_norm(ContinuousPoint{h(rng), h(rng), h(rng), h(rng), z(rng)}) < r;
  const double box = std::pow(2 * r, 4) * r * r / 8;
  const double p = double(hit) / N;
  EXPECT_NEAR(box * p, Domain::quasi_ball(r).volume(), 4 * box * std::sqrt(p * (1 - p) / N));
}

TEST(Continuous, SamplerMomentsMatchRejection) {
  const double r = 2;
  const auto dom = Domain::quasi_ball(r);
  std::mt19937_64 rng(4);
  const int N = 400000;
  double m_x = 0, m_z = 0;
  for (int i = 0; i < N; ++i) {
    const auto u = dom.sample(detail::u01_open(rng), rng);
    ASSERT_TRUE(dom.contains(u) || quasi_norm(u) <= r * (1 + 1e-12));
    m_x += std::abs(u.x1);
    m_z += std::abs(u.z);
  }
  std::uniform_real_distribution<double> h(-r, r), z(-r * r / 16, r * r / 16);
  double q_x = 0, q_z = 0;
  const int M = 50000;  // acceptance is 1/360
  int kept = 0;
  while (kept < M) {
    const ContinuousPoint u{h(rng), h(rng), h(rng), h(rng), z(rng)};
    if (quasi_norm(u) >= r) continue;
    ++kept;
    q_x += std::abs(u.x1);
    q_z += std::abs(u.z);
  }
  EXPECT_NEAR(m_x / N, q_x / M, 0.005 * r);
  EXPECT_NEAR(m_z / N, q_z / M, 0.005 * r * r / 16);
}

TEST(Continuous, SlabAgainstQuadrature) {
  const double r = 2, h = 0.05;
  RegionSampler sampler{Domain::quasi_ball(r), mc(400000)};
  const Region slab = [h](const ContinuousPoint& u) { return u.z > 0 && u.z < h; };
  for (double s : {-6.0, -3.0, -2.0, -1.5, -1.0}) {
    const auto p = vbar(sampler, slab, s, 7);
    const double exact = slab_vbar(h, r, s);
    EXPECT_NEAR(p.value, exact, 4 * p.stderr_ + 1e-12) << "s = " << s;
  }
}

TEST(Continuous, ZeroFunctionHasNoVerticalPerimeter) {
  VBarOptions o;
  o.mc = mc(5000);
  const auto c = vbar_l2(half_space(IntrinsicGraphFn::zero()), 1, o);
  for (const auto& p : c.points) EXPECT_EQ(p.value, 0.0);
  EXPECT_EQ(c.l2_grid, 0.0);
  EXPECT_GT(c.tail, 0.0);  // the trivial-bound tail is reported separately
}

TEST(Continuous, TrivialBound) {
  VBarOptions o;
  o.mc = mc(20000);
  const auto c = vbar_l2(half_space(IntrinsicGraphFn::sinusoid(1.4, 1)), 2, o);
  for (const auto& p : c.points) EXPECT_LE(p.value, p.trivial_bound + 3 * p.stderr_);
  EXPECT_GE(c.l2, c.l2_grid);
}

TEST(Continuous, DilationCovariance) {
  const auto E = half_space(IntrinsicGraphFn::sinusoid(0.5, 1));
  const double r = 1;
  for (double th : {2.0, 0.5}) {
    RegionSampler a{Domain::quasi_ball(r), mc(200000, 11)};
    RegionSampler b{Domain::quasi_ball(th * r), mc(200000, 12)};
    for (double s : {-3.0, -1.0, 0.5}) {
      const auto p = vbar(a, E, s);
      const auto q = vbar(b, dilate(E, th), s + std::log2(th));
      const double scale = std::pow(th, 5);
      const double sigma = std::hypot(scale * p.stderr_, q.stderr_);
      EXPECT_NEAR(q.value, scale * p.value, 3 * sigma + 1e-12) << "theta " << th << " s " << s;
    }
  }
}

TEST(Continuous, ThreadCountDoesNotChangeResults) {
  const auto E = half_space(IntrinsicGraphFn::sinusoid(0.5, 1));
  auto o = mc(20000);
  o.threads = 1;
  const auto a = vbar({Domain::quasi_ball(1), o}, E, -2);
  o.threads = 7;
  const auto b = vbar({Domain::quasi_ball(1), o}, E, -2);
  EXPECT_EQ(std::memcmp(&a.value, &b.value, sizeof(double)), 0);
  EXPECT_EQ(std::memcmp(&a.stderr_, &b.stderr_, sizeof(double)), 0);
}

TEST(Continuous, ErrorBarsShrinkLikeRootBudget) {
  const auto E = half_space(IntrinsicGraphFn::sinusoid(0.5, 1));
  const auto a = vbar({Domain::quasi_ball(1), mc(50000)}, E, -2);
  const auto b = vbar({Domain::quasi_ball(1), mc(100000)}, E, -2);
  const double ratio = a.stderr_ / b.stderr_;
  EXPECT_GT(ratio, 1.2);
  EXPECT_LT(ratio, 1.7);
}

TEST(Continuous, SinusoidCalibrationAndSliceBound) {
  const double A = calibrate_sinusoid(0.3, 1, 5000, 1);
  const auto f = IntrinsicGraphFn::sinusoid(A, 1);
  EXPECT_NEAR(intrinsic_lip_estimate(f, sinusoid_box(1), 5000, 1).lambda, 0.3, 1e-9);
  EXPECT_EQ(intrinsic_lip_estimate(IntrinsicGraphFn::zero(), sinusoid_box(1), 1000, 1).lambda, 0.0);
  const auto rep = slice_lip_check(f, 0.3, 1, 0.3, 5000, 1);
  EXPECT_TRUE(rep.within);
  EXPECT_GT(rep.estimate, 0);
  EXPECT_THROW(slice_lip_check(f, 0.3, 1, 0.95, 100, 1), DomainError);
  EXPECT_THROW(calibrate_sinusoid(1.5, 1, 100, 1), DomainError);
}

TEST(Continuous, PsiEnergy) {
  auto o = mc(20000);
  const auto e = psi_energy(clamped_bump(0.5), 1, o, 5000);
  EXPECT_GT(e.lhs, 0);
  EXPECT_GT(e.lip, 0);
  EXPECT_TRUE(std::isfinite(e.ratio));
  EXPECT_LT(e.small_t, 1e-3 * e.lhs);
  const auto zero = psi_energy(slice_function(IntrinsicGraphFn::constant(1), 0.2), 1, o, 1000);
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.ratio, 0.0);
}

TEST(Continuous, DomainErrors) {
  EXPECT_THROW(Domain::quasi_ball(0), DomainError);
  EXPECT_THROW(Domain::box({0, 0, 0, 0, 0}, {1, 1, 0, 1, 1}), DomainError);
  EXPECT_THROW(vbar({Domain::quasi_ball(1), mc(10)}, [](const ContinuousPoint&) { return true; }, 0), DomainError);
  EXPECT_THROW(dilate([](const ContinuousPoint&) { return true; }, 0), DomainError);
  VBarOptions o;
  o.max_step = 0.5;
  EXPECT_THROW(vbar_l2([](const ContinuousPoint&) { return true; }, 1, o), DomainError);
}
