#pragma once

// Dense two-phase simplex for small linear programs
//
//   maximize c·x  subject to  A_i·x (≤ | ≥ | =) b_i,  x ≥ 0.
//
// Dantzig pricing with a switch to Bland's rule after a run of degenerate
// pivots. Duals are recovered from the optimal basis by solving Bᵀy = c_B.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "heis/error.hpp"

namespace heis {

enum class Sense { kLe, kGe, kEq };

struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;          // c, maximized
  std::vector<std::vector<double>> rows;  // dense A
  std::vector<Sense> senses;
  std::vector<double> rhs;

  void add_row(std::vector<double> a, Sense s, double b) {
    rows.push_back(std::move(a));
    senses.push_back(s);
    rhs.push_back(b);
  }
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  std::size_t max_iterations = 1'000'000;
  std::size_t degenerate_switch = 50;  // degenerate pivots before Bland's rule
};

struct LpSolution {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kOptimal;
  double objective = 0;
  std::vector<double> x;
  std::vector<double> duals;  // one per row; b·y equals the optimum
  std::size_t iterations = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_((m + 1) * (n + 1), 0.0), basis_(m) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double& obj(std::size_t j) { return at(m_, j); }
  std::vector<std::size_t>& basis() { return basis_; }

  // Objective row r_j = Σ_i cost[B_i] T_ij − cost_j (and the value in the rhs slot).
  void set_objective(const std::vector<double>& cost) {
    for (std::size_t j = 0; j <= n_; ++j) {
      double r = j < n_ ? -cost[j] : 0.0;
      for (std::size_t i = 0; i < m_; ++i) r += cost[basis_[i]] * at(i, j);
      obj(j) = r;
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    const double p = at(r, e);
    double* row = &t_[r * (n_ + 1)];
    for (std::size_t j = 0; j <= n_; ++j) row[j] /= p;
    row[e] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* other = &t_[i * (n_ + 1)];
      const double f = other[e];
      if (f == 0) continue;
      for (std::size_t j = 0; j <= n_; ++j) other[j] -= f * row[j];
      other[e] = 0.0;
    }
    basis_[r] = e;
  }

  // Runs the simplex on the current objective row over columns with
  // allowed[j]. Returns false if unbounded.
  bool optimize(const std::vector<bool>& allowed, const LpOptions& opt, std::size_t& iters) {
    std::size_t degenerate = 0;
    for (;;) {
      if (iters >= opt.max_iterations)
        throw NonConvergence("simplex iteration cap reached", {static_cast<double>(iters)});
      const bool bland = degenerate >= opt.degenerate_switch;
      std::size_t e = n_;
      double best = -opt.optimality_tol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!allowed[j]) continue;
        const double r = obj(j);
        if (r < best) {
          e = j;
          best = r;
          if (bland) break;
        }
      }
      if (e == n_) return true;
      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, e);
        if (a <= opt.feasibility_tol) continue;
        const double q = std::max(rhs(i), 0.0) / a;
        if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave == m_) return false;
      degenerate = ratio <= opt.feasibility_tol ? degenerate + 1 : 0;
      pivot(leave, e);
      ++iters;
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& lp, const LpOptions& opt = {}) {
  const std::size_t m = lp.rows.size();
  const std::size_t nv = lp.num_vars;
  if (lp.objective.size() != nv || lp.senses.size() != m || lp.rhs.size() != m)
    throw DomainError("inconsistent linear program dimensions");
  for (const auto& r : lp.rows)
    if (r.size() != nv) throw DomainError("linear program row has the wrong length");

  // Column layout: structural | one slack per inequality | one artificial per ≥/= row.
  std::vector<std::size_t> slack_col(m, SIZE_MAX), art_col(m, SIZE_MAX);
  std::size_t col = nv;
  for (std::size_t i = 0; i < m; ++i)
    if (lp.senses[i] != Sense::kEq) slack_col[i] = col++;
  const std::size_t first_art = col;
  std::vector<bool> flip(m);
  for (std::size_t i = 0; i < m; ++i) {
    flip[i] = lp.rhs[i] < 0;
    const Sense s = lp.senses[i];
    // After flipping to b ≥ 0, a ≤ row keeps +slack as its basic variable.
    const bool le = (s == Sense::kLe && !flip[i]) || (s == Sense::kGe && flip[i]);
    if (!le) art_col[i] = col++;
  }
  const std::size_t N = col;

  detail::Tableau T(m, N);
  for (std::size_t i = 0; i < m; ++i) {
    const double sg = flip[i] ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nv; ++j) T.at(i, j) = sg * lp.rows[i][j];
    if (slack_col[i] != SIZE_MAX) {
      const double s = lp.senses[i] == Sense::kLe ? 1.0 : -1.0;
      T.at(i, slack_col[i]) = sg * s;
    }
    if (art_col[i] != SIZE_MAX) T.at(i, art_col[i]) = 1.0;
    T.rhs(i) = sg * lp.rhs[i];
    T.basis()[i] = art_col[i] != SIZE_MAX ? art_col[i] : slack_col[i];
  }

  LpSolution sol;
  std::vector<bool> allowed(N, true);
  double bscale = 1;
  for (double b : lp.rhs) bscale = std::max(bscale, std::abs(b));

  if (first_art < N) {
    std::vector<double> cost(N, 0.0);
    for (std::size_t j = first_art; j < N; ++j) cost[j] = -1.0;
    T.set_objective(cost);
    T.optimize(allowed, opt, sol.iterations);
    if (T.obj(N) < -opt.feasibility_tol * bscale * static_cast<double>(m)) {
      sol.status = LpSolution::Status::kInfeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (T.basis()[i] < first_art) continue;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(T.at(i, j)) > 1e-7) {
          T.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = first_art; j < N; ++j) allowed[j] = false;
  }

  std::vector<double> cost(N, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), cost.begin());
  T.set_objective(cost);
  if (!T.optimize(allowed, opt, sol.iterations)) {
    sol.status = LpSolution::Status::kUnbounded;
    return sol;
  }

  sol.x.assign(nv, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (T.basis()[i] < nv) sol.x[T.basis()[i]] = std::max(0.0, T.rhs(i));
  sol.objective = 0;
  for (std::size_t j = 0; j < nv; ++j) sol.objective += lp.objective[j] * sol.x[j];

  // Bᵀ y = c_B on the original (unflipped) columns.
  if (m > 0) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t j = T.basis()[k];
      const auto K = static_cast<Eigen::Index>(k);
      cb(K) = j < nv ? lp.objective[j] : 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto I = static_cast<Eigen::Index>(i);
        if (j < nv) {
          B(I, K) = lp.rows[i][j];
        } else if (j == slack_col[i]) {
          B(I, K) = lp.senses[i] == Sense::kLe ? 1.0 : -1.0;
        } else if (j == art_col[i]) {
          B(I, K) = flip[i] ? -1.0 : 1.0;
        }
      }
    }
    const Eigen::VectorXd y = B.transpose().fullPivLu().solve(cb);
    sol.duals.assign(y.data(), y.data() + m);
  }
  return sol;
}

}  // namespace heis
