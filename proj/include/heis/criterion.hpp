#pragma once

// Compression moduli ω and the integrability functional ∫_1^{cR} ω(s)²/s³ ds
// that decides whether a ball of radius R in H^5_Z admits an L1 embedding
// with compression ω.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "heis/error.hpp"

namespace heis {

/// Nondecreasing ω: [1, ∞) → [0, ∞) from a small parametric family.
class Modulus {
 public:
  enum class Kind { kLinear, kPower, kTabulated };

  /// ω(t) = t / D
  static Modulus linear(double D) {
    if (!(D > 0)) throw DomainError("linear modulus needs D > 0");
    Modulus m;
    m.kind_ = Kind::kLinear;
    m.D_ = D;
    return m;
  }

  /// ω(t) = t^{1-ε} / D
  static Modulus power(double eps, double D = 1) {
    if (!(eps > 0 && eps < 1)) throw DomainError("power modulus needs 0 < eps < 1");
    if (!(D > 0)) throw DomainError("power modulus needs D > 0");
    Modulus m;
    m.kind_ = Kind::kPower;
    m.eps_ = eps;
    m.D_ = D;
    return m;
  }

  /// Piecewise-linear through (t_i, ω_i), constant outside the knots.
  static Modulus tabulated(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw DomainError("tabulated modulus needs at least one knot");
    std::sort(knots.begin(), knots.end());
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second) ||
          knots[i].second < 0)
        throw DomainError("tabulated modulus has an invalid knot");
      if (i > 0 && knots[i].first == knots[i - 1].first)
        throw DomainError("tabulated modulus has a repeated abscissa");
      if (i > 0 && knots[i].second < knots[i - 1].second)
        throw DomainError("tabulated modulus is not nondecreasing");
    }
    Modulus m;
    m.kind_ = Kind::kTabulated;
    m.knots_ = std::move(knots);
    return m;
  }

  Kind kind() const { return kind_; }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::kLinear:
        return t / D_;
      case Kind::kPower:
        return std::pow(t, 1 - eps_) / D_;
      case Kind::kTabulated: {
        if (t <= knots_.front().first) return knots_.front().second;
        if (t >= knots_.back().first) return knots_.back().second;
        auto it = std::upper_bound(knots_.begin(), knots_.end(), std::make_pair(t, 0.0),
                                   [](const auto& x, const auto& y) { return x.first < y.first; });
        const auto& [t1, w1] = *(it - 1);
        const auto& [t2, w2] = *it;
        return w1 + (w2 - w1) * (t - t1) / (t2 - t1);
      }
    }
    return 0;
  }

  /// ∫_S^∞ ω(s)²/s³ ds in closed form (+inf for the linear family).
  double tail_integral(double S) const {
    switch (kind_) {
      case Kind::kLinear:
        return std::numeric_limits<double>::infinity();
      case Kind::kPower:
        return std::pow(S, -2 * eps_) / (2 * eps_ * D_ * D_);
      case Kind::kTabulated: {
        if (S < knots_.back().first)
          throw DomainError("tabulated tail must start beyond the last knot");
        const double w = knots_.back().second;
        return w * w / (2 * S * S);
      }
    }
    return 0;
  }

  /// Points where ω has a kink.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    if (kind_ == Kind::kTabulated)
      for (const auto& k : knots_) out.push_back(k.first);
    return out;
  }

  /// sup_{t ≥ 1} ω(t)/t, the K in ω(t) ≤ K t.
  double linear_growth_bound() const {
    switch (kind_) {
      case Kind::kLinear:
        return 1 / D_;
      case Kind::kPower:
        return 1 / D_;
      case Kind::kTabulated: {
        double k = knots_.front().second;  // value at t = 1 for knots starting at or before 1
        for (const auto& [t, w] : knots_)
          if (t >= 1) k = std::max(k, w / t);
        return k;
      }
    }
    return 0;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::kLinear:
        os << "linear:D=" << D_;
        break;
      case Kind::kPower:
        os << "power:eps=" << eps_ << ",D=" << D_;
        break;
      case Kind::kTabulated:
        os << "table:";
        for (std::size_t i = 0; i < knots_.size(); ++i)
          os << (i ? "," : "") << knots_[i].first << ':' << knots_[i].second;
        break;
    }
    return os.str();
  }

 private:
  Kind kind_ = Kind::kLinear;
  double D_ = 1;
  double eps_ = 0;
  std::vector<std::pair<double, double>> knots_;
};

/// ∫_a^b ω(s)²/s³ ds for 0 < a ≤ b < ∞, adaptive Gauss–Kronrod in u = ln s
/// (the integrand becomes ω(e^u)² e^{-2u}), split at the kinks of ω.
inline double modulus_integral(const Modulus& omega, double a, double b) {
  if (!(a > 0) || !(b >= a) || !std::isfinite(b)) throw DomainError("bad integration range");
  if (a == b) return 0;
  std::vector<double> cuts{std::log(a)};
  for (double t : omega.breakpoints())
    if (t > a && t < b) cuts.push_back(std::log(t));
  cuts.push_back(std::log(b));
  auto f = [&](double u) {
    const double w = omega(std::exp(u));
    return w * w * std::exp(-2 * u);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0;
    total += GK::integrate(f, cuts[i], cuts[i + 1], 20, 1e-13, &err);
  }
  return total;
}

/// ∫_1^{cR} ω(s)²/s³ ds. `upper` = cR may be +inf, in which case the range
/// beyond a finite cutoff is closed analytically.
inline double integral_criterion_upper(const Modulus& omega, double upper) {
  if (!(upper > 1)) throw DomainError("integral criterion needs cR > 1");
  if (std::isfinite(upper)) return modulus_integral(omega, 1, upper);
  double cutoff = std::exp(10.0);
  for (double t : omega.breakpoints()) cutoff = std::max(cutoff, t);
  return modulus_integral(omega, 1, cutoff) + omega.tail_integral(cutoff);
}

inline double integral_criterion(const Modulus& omega, double R, double c) {
  if (!(R >= 2)) throw DomainError("integral criterion needs R >= 2");
  if (!(c > 0 && c < 1)) throw DomainError("integral criterion needs 0 < c < 1");
  return integral_criterion_upper(omega, c * R);
}

}  // namespace heis
