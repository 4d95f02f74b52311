#pragma once

// Relaxations of sparsest cut with the sums Σ_{i,j} taken over ordered pairs:
//
//   LP   = min Σ C_ij d_ij  over semimetrics d with Σ D_ij d_ij = 1
//   SDP  = min Σ C_ij d_ij  over d_ij = ‖v_i − v_j‖², d a semimetric, Σ D d = 1
//   OPT  = min over cuts of C(A, Aᶜ)/D(A, Aᶜ)
//
// SDP is solved by a primal barrier method in the distance variables: with
// v_{n−1} = 0 the Gram matrix of v_0..v_{n−2} is G(d)_ij = (d_{i,n−1} +
// d_{j,n−1} − d_ij)/2, linear in d, so G(d) ⪰ 0 and the triangle rows are
// kept strictly feasible by −log det G − Σ log(slack).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include "heis/ball.hpp"
#include "heis/core.hpp"
#include "heis/embed.hpp"
#include "heis/error.hpp"
#include "heis/instance.hpp"
#include "heis/lp.hpp"

namespace heis {

namespace detail {

struct PairIndex {
  int n;
  explicit PairIndex(int n_) : n(n_) {}
  int size() const { return n * (n - 1) / 2; }
  int operator()(int i, int j) const {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }
};

// (long side, a, b) index triples: slack = d_a + d_b − d_long ≥ 0.
inline std::vector<std::array<int, 3>> triangle_rows(int n) {
  PairIndex idx(n);
  std::vector<std::array<int, 3>> rows;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const int ij = idx(i, j), ik = idx(i, k), jk = idx(j, k);
        rows.push_back({ij, ik, jk});
        rows.push_back({ik, ij, jk});
        rows.push_back({jk, ij, ik});
      }
  return rows;
}

inline Eigen::MatrixXd distances_from(const Eigen::VectorXd& d, int n) {
  PairIndex idx(n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) M(i, j) = M(j, i) = d(idx(i, j));
  return M;
}

}  // namespace detail

/// Semimetric LP relaxation. All triangle rows for n ≤ 12, otherwise rows
/// are added in rounds of the most violated ones.
inline double lp_metric(const Instance& inst, const LpOptions& opt = {}) {
  inst.validate();
  const int n = inst.n();
  if (n > 30) throw CapabilityError("metric LP supports at most 30 points", n, 30);
  detail::PairIndex idx(n);
  const int m = idx.size();
  LpProblem lp;
  lp.num_vars = static_cast<std::size_t>(m);
  lp.objective.assign(m, 0.0);
  std::vector<double> norm(m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      lp.objective[idx(i, j)] = -(inst.C(i, j) + inst.C(j, i));
      norm[idx(i, j)] = inst.D(i, j) + inst.D(j, i);
    }
  lp.add_row(norm, Sense::kEq, 1.0);
  const auto all = detail::triangle_rows(n);
  auto add_tri = [&](const std::array<int, 3>& r) {
    std::vector<double> row(m, 0.0);
    row[r[0]] = 1;
    row[r[1]] = -1;
    row[r[2]] = -1;
    lp.add_row(std::move(row), Sense::kLe, 0.0);
  };
  const bool lazy = n > 12;
  if (!lazy)
    for (const auto& r : all) add_tri(r);
  for (;;) {
    const auto sol = solve_lp(lp, opt);
    if (sol.status != LpSolution::Status::kOptimal) throw NonConvergence("metric LP not solved", {});
    if (!lazy) return -sol.objective;
    std::vector<std::pair<double, std::size_t>> viol;
    for (std::size_t k = 0; k < all.size(); ++k) {
      const auto& r = all[k];
      const double v = sol.x[r[0]] - sol.x[r[1]] - sol.x[r[2]];
      if (v > 1e-9) viol.emplace_back(-v, k);
    }
    if (viol.empty()) return -sol.objective;
    std::sort(viol.begin(), viol.end());
    const std::size_t take = std::min<std::size_t>(viol.size(), static_cast<std::size_t>(4 * n));
    for (std::size_t k = 0; k < take; ++k) add_tri(all[viol[k].second]);
  }
}

struct SdpResiduals {
  double psd_violation = 0;       // most negative Gram eigenvalue, as a magnitude
  double triangle_violation = 0;  // max (d_ij − d_ik − d_kj)⁺
  double normalization_error = 0; // |Σ D d − 1|
  double stationarity = 0;        // barrier duality-gap bound ν/τ

  double max() const { return std::max({psd_violation, triangle_violation, normalization_error, stationarity}); }
};

struct SdpSolution {
  Eigen::MatrixXd gram;       // centered Gram matrix of v_0..v_{n−1}
  Eigen::MatrixXd distances;  // d_ij = G_ii + G_jj − 2 G_ij
  double objective = 0;       // Σ C_ij d_ij
  SdpResiduals residuals;
  int newton_steps = 0;
};

/// Residuals recomputed from a Gram matrix alone.
inline SdpResiduals sdp_residuals(const Instance& inst, const Eigen::MatrixXd& gram) {
  const int n = inst.n();
  SdpResiduals r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  r.psd_violation = std::max(0.0, -es.eigenvalues()(0));
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = gram(i, i) + gram(j, j) - 2 * gram(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (i != j && k != i && k != j)
          r.triangle_violation = std::max(r.triangle_violation, d(i, j) - d(i, k) - d(k, j));
  r.normalization_error = std::abs((inst.D.array() * d.array()).sum() - 1);
  return r;
}

struct SdpOptions {
  double gap_tol = 1e-9;  // stop once ν/τ ≤ gap_tol·max(1, objective)
  double tau_factor = 8;
  int max_newton = 5000;
  double residual_tol = 1e-8;
};

inline constexpr int kMaxSdpPoints = 12;

namespace detail {

// Barrier path following for the SDP in scalar type Real, from the strictly
// feasible d with weight τ, until ν/τ ≤ target. Returns false on a stall
// (no acceptable step), leaving d and τ at the last centered point.
template <class Real>
struct BarrierPath {
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

  int n, m, N;
  std::vector<std::array<int, 3>> tri;
  Vec c, a;
  std::vector<Mat> A;  // G(d) = Σ_k d_k A_k
  Real bound;          // Σ_k d_k < bound
  Real nu;

  BarrierPath(const Instance& inst) : n(inst.n()), m(n * (n - 1) / 2), N(n - 1), tri(triangle_rows(n)) {
    PairIndex idx(n);
    c.resize(m);
    a.resize(m);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        c(idx(i, j)) = inst.C(i, j) + inst.C(j, i);
        a(idx(i, j)) = inst.D(i, j) + inst.D(j, i);
      }
    A.assign(m, Mat::Zero(N, N));
    const Real half = Real(1) / 2;
    for (int i = 0; i < N; ++i) {
      A[idx(i, N)](i, i) += 1;
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        A[idx(i, N)](i, j) += half;
        A[idx(j, N)](i, j) += half;
        A[idx(i, j)](i, j) -= half;
      }
    }
    // When D misses some pairs the cone {Σ D d = 1} is unbounded and the
    // barrier has no minimizer. Some optimum has every d_k below
    // (n−1)·max(1/a_k, obj₀/c_k) inside each component of supp(C + D), and
    // components can sit in orthogonal coordinates at comparable distance,
    // so this bound leaves the optimum unchanged.
    Real amin = 0, cmin = 0;
    for (int k = 0; k < m; ++k) {
      if (a(k) > 0 && (amin == 0 || a(k) < amin)) amin = a(k);
      if (c(k) > 0 && (cmin == 0 || c(k) < cmin)) cmin = c(k);
    }
    const Real obj0 = c.sum() / a.sum();
    Real pair = 1 / amin;
    if (cmin > 0 && obj0 / cmin > pair) pair = obj0 / cmin;
    bound = Real(10) * Real(n) * Real(n) * Real(n) * pair;
    nu = Real(N) + Real(static_cast<long>(tri.size())) + 1;
  }

  Mat gram(const Vec& d) const {
    Mat G = Mat::Zero(N, N);
    for (int k = 0; k < m; ++k) G += d(k) * A[k];
    return G;
  }

  Vec slacks(const Vec& d) const {
    Vec s(static_cast<Eigen::Index>(tri.size()));
    for (std::size_t r = 0; r < tri.size(); ++r) s(r) = d(tri[r][1]) + d(tri[r][2]) - d(tri[r][0]);
    return s;
  }

  // −log det G − Σ log s, or nullopt outside the open feasible region.
  std::optional<Real> barrier(const Vec& d) const {
    using std::log;
    Eigen::LLT<Mat> llt(gram(d));
    if (llt.info() != Eigen::Success) return std::nullopt;
    Real v = 0;
    for (int i = 0; i < N; ++i) {
      const Real l = llt.matrixL()(i, i);
      if (!(l > 0)) return std::nullopt;
      v -= 2 * log(l);
    }
    const auto s = slacks(d);
    for (Eigen::Index r = 0; r < s.size(); ++r) {
      if (!(s(r) > 0)) return std::nullopt;
      v -= log(s(r));
    }
    const Real room = bound - d.sum();
    if (!(room > 0)) return std::nullopt;
    return v - log(room);
  }

  bool run(Vec& d, Real& tau, double target, double factor, int& steps, int max_steps) const {
    for (;;) {
      for (;;) {  // centering by equality-constrained Newton
        if (++steps > max_steps) {
          throw NonConvergence("SDP barrier method hit its Newton step cap",
                               {static_cast<double>(c.dot(d)), static_cast<double>(nu / tau)});
        }
        // H = BᵀB with B = [vec(L⁻¹ A_k L⁻ᵀ) ; triangle rows / slack],
        // G = L Lᵀ; solved through a QR factor of B.
        Eigen::LLT<Mat> llt(gram(d));
        const auto L = llt.matrixL();
        const auto s = slacks(d);
        const Eigen::Index rows_g = static_cast<Eigen::Index>(N) * N;
        Mat B = Mat::Zero(rows_g + s.size() + 1, m);
        Vec g = Vec::Zero(m);
        for (int k = 0; k < m; ++k) {
          const Mat X = L.solve(A[k]);
          const Mat Mk = L.solve(X.transpose());
          B.col(k).head(rows_g) = Eigen::Map<const Vec>(Mk.data(), rows_g);
          g(k) = -Mk.trace();
        }
        const std::array<Real, 3> coef{Real(-1), Real(1), Real(1)};
        for (std::size_t r = 0; r < tri.size(); ++r) {
          const Real inv_s = 1 / s(r);
          for (int x = 0; x < 3; ++x) {
            g(tri[r][x]) -= coef[x] * inv_s;
            B(rows_g + static_cast<Eigen::Index>(r), tri[r][x]) = coef[x] * inv_s;
          }
        }
        const Real inv_room = 1 / (bound - d.sum());
        g.array() += inv_room;
        B.row(B.rows() - 1).setConstant(inv_room);
        const Vec grad = tau * c + g;
        // Newton step on {a·Δ = 0} via the Schur complement of the KKT system.
        Eigen::ColPivHouseholderQR<Mat> qr(B);
        const auto R = qr.matrixR().topLeftCorner(m, m).template triangularView<Eigen::Upper>();
        const auto& perm = qr.colsPermutation();
        auto h_solve = [&](const Vec& v) -> Vec {
          Vec w = perm.transpose() * v;
          w = R.transpose().solve(w);
          w = R.solve(w);
          return perm * w;
        };
        const Vec hg = h_solve(grad);
        const Vec ha = h_solve(a);
        const Real lambda = -a.dot(hg) / a.dot(ha);
        const Vec step = -(hg + lambda * ha);
        const Real decrement = (B * step).squaredNorm();
        if (decrement < Real(1e-10)) break;
        // Differences only: τ·c·d itself dwarfs the decrease.
        const Real b0 = *barrier(d);
        const Real slope = grad.dot(step);
        if (!(slope < 0)) return false;
        Real alpha = 1;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, alpha /= 2) {
          const auto b1 = barrier(d + alpha * step);
          if (b1 && tau * c.dot(alpha * step) + (*b1 - b0) <= alpha * slope / 4) {
            accepted = true;
            break;
          }
        }
        if (!accepted) return false;
        // The feasible set is a cone, so rescaling restores Σ D d = 1.
        Vec next = d + alpha * step;
        next /= a.dot(next);
        if (!barrier(next)) return false;
        d = next;
      }
      if (static_cast<double>(nu / tau) <= target) return true;
      tau *= factor;
    }
  }
};

}  // namespace detail

/// Barrier path following in long double down to a gap of 1e-6, then in
/// quad precision: near the optimum the slacks and small Gram eigenvalues
/// shrink like 1/τ and the Newton systems outrun double precision.
inline SdpSolution sdp_neg(const Instance& inst, const SdpOptions& opt = {}) {
  using boost::multiprecision::float128;
  inst.validate();
  const int n = inst.n();
  if (n > kMaxSdpPoints) throw CapabilityError("SDP supports at most 12 points", n, kMaxSdpPoints);

  detail::BarrierPath<long double> coarse(inst);
  // Equilateral start: G = κ(I + J)/2 ≻ 0 and every slack equals κ.
  Eigen::Matrix<long double, Eigen::Dynamic, 1> d0 =
      Eigen::Matrix<long double, Eigen::Dynamic, 1>::Constant(coarse.m, 1 / coarse.a.sum());
  long double tau0 = coarse.nu / std::max<long double>(1e-12L, std::abs(coarse.c.dot(d0)));
  int steps = 0;
  coarse.run(d0, tau0, 1e-6, opt.tau_factor, steps, opt.max_newton);

  detail::BarrierPath<float128> fine(inst);
  Eigen::Matrix<float128, Eigen::Dynamic, 1> d = d0.cast<float128>();
  d /= fine.a.dot(d);
  float128 tau = tau0;
  const double scale = std::max(1.0, std::abs(static_cast<double>(fine.c.dot(d))));
  if (!fine.run(d, tau, opt.gap_tol * scale, opt.tau_factor, steps, opt.max_newton)) {
    const double gap = static_cast<double>(fine.nu / tau);
    if (gap > opt.residual_tol)
      throw NonConvergence("SDP barrier method stalled", {static_cast<double>(fine.c.dot(d)), gap});
  }

  SdpSolution out;
  Eigen::VectorXd dd(fine.m);
  for (int k = 0; k < fine.m; ++k) dd(k) = static_cast<double>(d(k));
  const auto Gq = fine.gram(d);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) G(i, j) = static_cast<double>(Gq(i, j));
  const Eigen::MatrixXd P =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  out.gram = P * G * P;
  out.gram = 0.5 * (out.gram + out.gram.transpose());
  out.distances = detail::distances_from(dd, n);
  out.objective = (inst.C.array() * out.distances.array()).sum();
  out.residuals = sdp_residuals(inst, out.gram);
  out.residuals.stationarity = static_cast<double>(fine.nu / tau);
  out.newton_steps = steps;
  if (out.residuals.max() > opt.residual_tol) {
    throw NonConvergence("SDP residuals above tolerance",
                         {out.residuals.psd_violation, out.residuals.triangle_violation,
                          out.residuals.normalization_error, out.residuals.stationarity});
  }
  return out;
}

struct GapReport {
  int n = 0;
  double lp = 0;
  SdpSolution sdp;
  OptResult opt;
  double gap = 1;  // opt / sdp
};

inline GapReport integrality_gap(const Instance& inst) {
  GapReport r;
  r.n = inst.n();
  r.lp = lp_metric(inst);
  r.sdp = sdp_neg(inst);
  r.opt = opt_exact(inst);
  r.gap = r.opt.value / r.sdp.objective;
  return r;
}

/// C = adjacency, D = all ones off the diagonal.
inline Instance uniform_instance(const Eigen::MatrixXi& adjacency) {
  const auto n = adjacency.rows();
  if (adjacency.cols() != n) throw DomainError("adjacency matrix must be square");
  Instance inst{adjacency.cast<double>(), Eigen::MatrixXd::Constant(n, n, 1.0)};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0) throw DomainError("adjacency matrix must have a zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j)
      if (adjacency(i, j) != adjacency(j, i) || (adjacency(i, j) != 0 && adjacency(i, j) != 1))
        throw DomainError("adjacency matrix must be symmetric 0/1");
    inst.D(i, i) = 0;
  }
  return inst;
}

/// Random instance with integer entries in [0, 3] and at least one
/// positive demand.
inline Instance random_instance(std::mt19937_64& rng, int n) {
  for (;;) {
    Instance inst{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        inst.C(i, j) = inst.C(j, i) = static_cast<double>(rng() % 4);
        inst.D(i, j) = inst.D(j, i) = static_cast<double>(rng() % 4);
      }
    if (inst.D.sum() > 0) return inst;
  }
}

enum class BallTransform { kRaw, kSqrt, kSnowflake };

struct HeisPipeline {
  std::string group;
  int radius = 0;
  BallTransform transform = BallTransform::kRaw;
  double eps = 0;
  FiniteMetric metric;
  Instance instance;  // C = Cayley edges inside the ball, uniform D
  NegTypeResult negtype;
  std::optional<DistortionCertificate> c1;
  std::optional<GapCertificate> certificate;
  std::optional<GapReport> gap;
};

/// Word metric on B_R (raw, √d, or d^{1−ε}), its negative type verdict, and
/// the exact pipeline where the size caps allow it.
template <class P = DiscretePoint>
HeisPipeline heis_instance(int R, BallTransform transform, double eps = 0.5) {
  using T = GroupTraits<P>;
  const auto ball = word_ball<P>(R);
  const auto big = word_ball<P>(2 * R);
  const auto pts = ball.points();
  const int n = static_cast<int>(pts.size());
  if (n > kMaxOptPoints) throw CapabilityError("ball too large for the exact pipeline", n, kMaxOptPoints);
  Eigen::MatrixXd d(n, n);
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      d(i, j) = *big.distance(mul(inv(pts[i]), pts[j]));
      adj(i, j) = d(i, j) == 1 ? 1 : 0;
    }
  HeisPipeline h;
  h.group = T::kName;
  h.radius = R;
  h.transform = transform;
  h.eps = eps;
  FiniteMetric raw(d);
  switch (transform) {
    case BallTransform::kRaw:
      h.metric = raw;
      break;
    case BallTransform::kSqrt:
      h.metric = snowflake(raw, 0.5);
      break;
    case BallTransform::kSnowflake:
      h.metric = snowflake(raw, eps);
      break;
  }
  h.instance = uniform_instance(adj);
  h.negtype = is_negative_type(h.metric);
  if (n <= kMaxC1Points) h.c1 = c1_exact(h.metric);
  if (n <= kMaxSdpPoints) {
    h.gap = integrality_gap(h.instance);
    if (h.negtype.negative_type) h.certificate = gap_certificate(h.metric);
  }
  return h;
}

}  // namespace heis
