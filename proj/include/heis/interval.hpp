#pragma once

#include <algorithm>
#include <cmath>

namespace heis {

/// Closed interval [lo, hi] bracketing a quantity that is only known up to
/// a certified truncation error.
struct Interval {
  double lo = 0;
  double hi = 0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  /// Relative width hi−lo over hi (0 for the zero interval).
  double relative_width() const { return hi > 0 ? (hi - lo) / hi : 0.0; }

  friend Interval operator/(const Interval& x, double s) { return {x.lo / s, x.hi / s}; }
  friend Interval operator*(const Interval& x, double s) { return {x.lo * s, x.hi * s}; }
};

inline Interval sqrt(const Interval& x) { return {std::sqrt(x.lo), std::sqrt(x.hi)}; }
inline Interval pow(const Interval& x, double e) { return {std::pow(x.lo, e), std::pow(x.hi, e)}; }

/// finite + K·Σ_{t>first-1} t^{-s}, s > 1, bracketed by summing terms
/// explicitly and enclosing the remainder between the two integral bounds.
/// Stops once the relative width of the bracket is at most `rel_tol`.
inline Interval certified_power_tail(double finite, double K, double s, long first,
                                     double rel_tol = 1e-6) {
  if (K == 0) return {finite, finite};
  double partial = 0;
  long m = first - 1;  // terms 1..m of the tail block are summed
  for (;;) {
    // Σ_{t>m} t^{-s} ∈ [(m+1)^{1-s}, m^{1-s}] / (s-1)   (m >= 1)
    const double mm = static_cast<double>(std::max(m, 1L));
    double rest_lo = std::pow(mm + 1, 1 - s) / (s - 1);
    double rest_hi = std::pow(mm, 1 - s) / (s - 1);
    if (m == 0) {  // nothing summed yet: include t = 1 explicitly
      rest_lo += 1;
      rest_hi += 1;
    }
    const Interval total{finite + K * (partial + rest_lo), finite + K * (partial + rest_hi)};
    if (total.relative_width() <= rel_tol) return total;
    const long next = std::max(2 * m, m + 1024);
    for (long t = m + 1; t <= next; ++t) partial += std::pow(static_cast<double>(t), -s);
    m = next;
  }
}

}  // namespace heis
