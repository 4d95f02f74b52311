#pragma once

// Finite metrics: negative type, Hilbert realizations of √d, exact L1
// distortion over the cut cone, and the dual capacity/demand certificate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "heis/error.hpp"
#include "heis/instance.hpp"
#include "heis/lp.hpp"

namespace heis {

/// Symmetric nonnegative n×n matrix with zero diagonal satisfying the
/// triangle inequality up to `kTriangleTol`. Zero off-diagonal entries
/// (semi-metrics) are allowed.
struct FiniteMetric {
  static constexpr double kTriangleTol = 1e-9;

  Eigen::MatrixXd dist;

  FiniteMetric() = default;
  explicit FiniteMetric(Eigen::MatrixXd d) : dist(std::move(d)) { validate(); }

  int n() const { return static_cast<int>(dist.rows()); }
  double operator()(int i, int j) const { return dist(i, j); }

  double max_distance() const { return n() ? dist.maxCoeff() : 0.0; }

  void validate() const {
    if (dist.rows() != dist.cols()) throw DomainError("metric matrix must be square");
    const auto n = dist.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dist(i, i) != 0) throw DomainError("metric needs a zero diagonal");
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!std::isfinite(dist(i, j)) || dist(i, j) < 0)
          throw DomainError("metric entries must be finite and nonnegative");
        if (dist(i, j) != dist(j, i)) throw DomainError("metric matrix must be symmetric");
      }
    }
    if (max_triangle_violation() > kTriangleTol) throw DomainError("triangle inequality fails");
  }

  /// max over i,j,k of d_ij − d_ik − d_kj (≤ 0 for a metric).
  double max_triangle_violation() const {
    double worst = -std::numeric_limits<double>::infinity();
    const auto n = dist.rows();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
          if (k != i && k != j && i != j) worst = std::max(worst, dist(i, j) - dist(i, k) - dist(k, j));
    return n < 3 ? 0.0 : worst;
  }
};

/// Shortest-path metric of an unweighted connected graph.
inline FiniteMetric graph_metric(const Eigen::MatrixXi& adjacency) {
  const auto n = adjacency.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && adjacency(i, j)) d(i, j) = 1;
  }
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  if (!d.allFinite()) throw DomainError("graph is disconnected");
  return FiniteMetric(d);
}

struct NegTypeResult {
  bool negative_type = true;
  double min_eigenvalue = 0;
  Eigen::VectorXd witness;  // Σx = 0 and Σ x_i x_j d_ij > 0 when not negative type
};

/// Tolerance on the smallest eigenvalue of the centered matrix, scaled by
/// max(1, max d).
inline constexpr double kNegTypeTol = 1e-9;

/// Schoenberg: d is of negative type iff −½ P d P ⪰ 0 with P = I − J/n.
inline NegTypeResult is_negative_type(const FiniteMetric& m) {
  const auto n = m.dist.rows();
  NegTypeResult r;
  if (n <= 1) return r;
  const Eigen::MatrixXd P =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd G = -0.5 * P * m.dist * P;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  r.min_eigenvalue = es.eigenvalues()(0);
  const double tol = kNegTypeTol * std::max(1.0, m.max_distance());
  if (r.min_eigenvalue < -tol) {
    r.negative_type = false;
    Eigen::VectorXd x = es.eigenvectors().col(0);
    x -= Eigen::VectorXd::Constant(n, x.mean());
    r.witness = x;
  }
  return r;
}

/// Σ_ij x_i x_j d_ij, positive on a witness against negative type.
inline double negtype_form(const FiniteMetric& m, const Eigen::VectorXd& x) {
  return x.dot(m.dist * x);
}

/// Points v_i (rows) with ‖v_i − v_j‖² = d_ij, from the eigendecomposition of
/// the centered matrix with tiny negative eigenvalues clipped to zero.
inline Eigen::MatrixXd sqrt_embed(const FiniteMetric& m) {
  const auto n = m.dist.rows();
  if (n == 0) return {};
  auto neg = is_negative_type(m);
  if (!neg.negative_type) {
    throw DomainError("metric is not of negative type (witness form " +
                      std::to_string(negtype_form(m, neg.witness)) + ")");
  }
  const Eigen::MatrixXd P =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd G = -0.5 * P * m.dist * P;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

/// Entrywise d^{1−ε}.
inline FiniteMetric snowflake(const FiniteMetric& m, double eps) {
  if (!(eps >= 0 && eps < 1)) throw DomainError("snowflake exponent needs 0 <= eps < 1");
  Eigen::MatrixXd d = m.dist.unaryExpr([eps](double x) { return x == 0 ? 0.0 : std::pow(x, 1 - eps); });
  return FiniteMetric(d);
}

struct CutWeight {
  std::uint64_t mask = 0;
  double weight = 0;
};

/// c1 = 1/t* of the cut-cone program
///   max t  s.t.  Σ_S λ_S δ_S(i,j) ≤ d_ij,  t·d_ij − Σ_S λ_S δ_S(i,j) ≤ 0,  λ ≥ 0.
/// Dual multipliers u, w of the two row families form a capacity/demand
/// pair: every cut has u(S) ≥ w(S) and Σ u d / Σ w d = 1/c1.
struct DistortionCertificate {
  double c1 = 1;
  double t = 1;
  std::vector<CutWeight> cuts;  // λ in the metric's own scale
  Eigen::MatrixXd capacity;     // u, symmetric, zero diagonal
  Eigen::MatrixXd demand;       // w
  double primal_objective = 0;  // t*
  double dual_objective = 0;    // Σ_{i<j} u_ij d_ij / max d
  std::size_t iterations = 0;

  /// max over pairs of (Σλδ − d)⁺ and (d − c1·Σλδ)⁺.
  double primal_violation(const FiniteMetric& m) const {
    double worst = 0;
    for (int i = 0; i < m.n(); ++i)
      for (int j = i + 1; j < m.n(); ++j) {
        double s = 0;
        for (const auto& c : cuts)
          if (((c.mask >> i) & 1) != ((c.mask >> j) & 1)) s += c.weight;
        worst = std::max({worst, s - m(i, j), m(i, j) - c1 * s});
      }
    return worst;
  }
};

inline constexpr int kMaxC1Points = 16;

inline DistortionCertificate c1_exact(const FiniteMetric& m, const LpOptions& opt = {}) {
  const int n = m.n();
  if (n > kMaxC1Points) throw CapabilityError("exact c1 supports at most 16 points", n, kMaxC1Points);
  if (n < 2 || !(m.max_distance() > 0)) throw DomainError("c1 needs a metric with a positive distance");
  const double scale = m.max_distance();
  const std::uint64_t ncuts = (std::uint64_t{1} << (n - 1)) - 1;
  const std::size_t nv = static_cast<std::size_t>(ncuts) + 1;  // λ_1..λ_K, then t
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  LpProblem lp;
  lp.num_vars = nv;
  lp.objective.assign(nv, 0.0);
  lp.objective[nv - 1] = 1.0;
  for (int fam = 0; fam < 2; ++fam) {
    for (auto [i, j] : pairs) {
      const double dij = m(i, j) / scale;
      std::vector<double> row(nv, 0.0);
      for (std::uint64_t s = 1; s <= ncuts; ++s)
        if (((s >> i) & 1) != ((s >> j) & 1)) row[s - 1] = fam == 0 ? 1.0 : -1.0;
      if (fam == 0) {
        lp.add_row(std::move(row), Sense::kLe, dij);
      } else {
        row[nv - 1] = dij;
        lp.add_row(std::move(row), Sense::kLe, 0.0);
      }
    }
  }
  const auto sol = solve_lp(lp, opt);
  if (sol.status != LpSolution::Status::kOptimal) throw NonConvergence("c1 program not solved", {});

  DistortionCertificate cert;
  cert.t = sol.objective;
  cert.c1 = 1 / cert.t;
  cert.primal_objective = sol.objective;
  cert.iterations = sol.iterations;
  for (std::uint64_t s = 1; s <= ncuts; ++s)
    if (sol.x[s - 1] > 0) cert.cuts.push_back({s, sol.x[s - 1] * scale});
  cert.capacity = Eigen::MatrixXd::Zero(n, n);
  cert.demand = Eigen::MatrixXd::Zero(n, n);
  const std::size_t P = pairs.size();
  // Multipliers at round-off level are pivoting noise; dropping them keeps
  // the pair usable as a sparse instance.
  double top = 0;
  for (double y : sol.duals) top = std::max(top, y);
  auto clean = [&](double y) { return y > 1e-12 * top ? y : 0.0; };
  for (std::size_t k = 0; k < P; ++k) {
    const auto [i, j] = pairs[k];
    const double u = clean(sol.duals[k]);
    const double w = clean(sol.duals[P + k]);
    cert.capacity(i, j) = cert.capacity(j, i) = u;
    cert.demand(i, j) = cert.demand(j, i) = w;
    cert.dual_objective += u * m(i, j) / scale;
  }
  return cert;
}

/// Dual pair (C*, D*) of the c1 program with its checked guarantees:
/// OPT(C*, D*) / ratio ≥ c1 − tol, where ratio = Σ C* d / Σ D* d.
struct GapCertificate {
  Instance instance;
  double c1 = 1;
  double ratio = 0;  // Σ C* d / Σ D* d
  double opt = 0;    // OPT(C*, D*)
  double gap_lower_bound = 1;  // opt / ratio
};

inline GapCertificate gap_certificate(const FiniteMetric& m, double tol = 1e-6) {
  const auto neg = is_negative_type(m);
  if (!neg.negative_type) throw DomainError("gap certificate needs a negative type metric");
  const auto cert = c1_exact(m);
  GapCertificate g;
  g.c1 = cert.c1;
  g.instance = Instance{cert.capacity, cert.demand};
  const double num = (cert.capacity.array() * m.dist.array()).sum();
  const double den = (cert.demand.array() * m.dist.array()).sum();
  if (!(den > 0)) throw DomainError("dual demand vanishes on the metric");
  g.ratio = num / den;
  g.opt = opt_exact(g.instance).value;
  g.gap_lower_bound = g.opt / g.ratio;
  if (g.gap_lower_bound < g.c1 - tol)
    throw NonConvergence("dual certificate fails its OPT check", {g.gap_lower_bound, g.c1});
  return g;
}

/// Standard normal by Box–Muller over a 53-bit uniform, identical across
/// standard libraries.
inline double standard_normal(std::mt19937_64& rng) {
  auto unif = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  const double u1 = unif(), u2 = unif();
  return std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
}

/// Squared Euclidean distances of Gaussian points, closed under shortest
/// paths; resampled until the result is of negative type.
inline FiniteMetric random_negative_type(std::mt19937_64& rng, int n, int dim = 3,
                                         int max_tries = 1000) {
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    Eigen::MatrixXd x(n, dim);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < dim; ++k) x(i, k) = standard_normal(rng);
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = (x.row(i) - x.row(j)).squaredNorm();
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    d = 0.5 * (d + d.transpose());
    FiniteMetric m(d);
    if (is_negative_type(m).negative_type) return m;
  }
  throw ResourceError("no negative type sample found", static_cast<std::size_t>(max_tries),
                      static_cast<std::size_t>(max_tries));
}

}  // namespace heis
