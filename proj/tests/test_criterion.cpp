#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "heis/criterion.hpp"

using namespace heis;

TEST(Criterion, LinearModulusAtE) {
  EXPECT_NEAR(integral_criterion(Modulus::linear(1), 2 * std::numbers::e, 0.5), 1.0, 1e-8);
}

TEST(Criterion, LinearModulusLogGrowth) {
  for (double D : {1.0, 2.0, 5.0})
    for (double R : {10.0, 100.0, 1e6})
      for (double c : {0.2, 0.5, 0.9})
        EXPECT_NEAR(integral_criterion(Modulus::linear(D), R, c), std::log(c * R) / (D * D), 1e-8);
}

TEST(Criterion, PowerTail) {
  const double inf = std::numeric_limits<double>::infinity();
  for (double eps : {0.1, 0.25, 0.5}) {
    EXPECT_NEAR(integral_criterion_upper(Modulus::power(eps), inf), 1 / (2 * eps), 1e-6);
    // finite range: (1 − X^{−2ε})/(2ε)
    EXPECT_NEAR(integral_criterion_upper(Modulus::power(eps), 50.0), (1 - std::pow(50.0, -2 * eps)) / (2 * eps),
                1e-10);
  }
}

TEST(Criterion, TabulatedAgainstHandIntegral) {
  // ω = 2s − 1 on [1, 2], then 3: ∫₁² (2s−1)²/s³ ds = 4 ln 2 − 13/8, tail 9/8
  const auto w = Modulus::tabulated({{1, 1}, {2, 3}, {4, 3}});
  EXPECT_DOUBLE_EQ(w(1.5), 2.0);
  EXPECT_DOUBLE_EQ(w(10), 3.0);
  EXPECT_NEAR(integral_criterion_upper(w, 2.0), 4 * std::log(2.0) - 13.0 / 8, 1e-12);
  EXPECT_NEAR(integral_criterion_upper(w, std::numeric_limits<double>::infinity()), 4 * std::log(2.0) - 0.5,
              1e-10);
  EXPECT_NEAR(modulus_integral(w, 2, 8), 4.5 * (0.25 - 1.0 / 64), 1e-12);
}

TEST(Criterion, LinearGrowthBound) {
  EXPECT_DOUBLE_EQ(Modulus::linear(4).linear_growth_bound(), 0.25);
  EXPECT_DOUBLE_EQ(Modulus::power(0.5, 2).linear_growth_bound(), 0.5);
}

TEST(Criterion, DomainErrors) {
  EXPECT_THROW(Modulus::linear(0), DomainError);
  EXPECT_THROW(Modulus::power(1.0), DomainError);
  EXPECT_THROW(Modulus::tabulated({{1, 2}, {2, 1}}), DomainError);
  EXPECT_THROW(Modulus::tabulated({}), DomainError);
  EXPECT_THROW(integral_criterion(Modulus::linear(1), 10, -1), DomainError);
}
