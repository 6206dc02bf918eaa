#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "scoring/error.hpp"

namespace scoring::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::Infeasible;
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

/// Dense row-major matrix used for the constraint block.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// maximize c.x subject to A x <= b, x >= 0.
///
/// Two-phase tableau simplex over the non-basic columns only, so the tableau
/// is (m+2) x (n+2). Phase one introduces a single auxiliary column when some
/// b_i is negative. Entering variable: most negative reduced cost with
/// smallest-index tie break; leaving: minimum ratio, smallest basic index on
/// ties.
class Simplex {
 public:
  Simplex(const Matrix& a, std::span<const double> b, std::span<const double> c, double eps = 1e-9)
      : m_(a.rows), n_(a.cols), eps_(eps), d_(m_ + 2, n_ + 2), basic_(m_), nonbasic_(n_ + 1) {
    if (b.size() != m_ || c.size() != n_) fail(ErrorKind::BadInput, "lp: dimension mismatch");
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) d_(i, j) = a(i, j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      basic_[i] = static_cast<long>(n_ + i);
      d_(i, n_) = -1.0;
      d_(i, n_ + 1) = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = static_cast<long>(j);
      d_(m_, j) = -c[j];
    }
    nonbasic_[n_] = -1;
    d_(m_ + 1, n_) = 1.0;
  }

  Solution solve(std::size_t max_pivots = 100000) {
    max_pivots_ = max_pivots;
    Solution sol;
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i) {
      if (d_(i, n_ + 1) < d_(r, n_ + 1)) r = i;
    }
    if (m_ > 0 && d_(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      const Status phase1 = run(true);
      if (phase1 == Status::IterationLimit) {
        sol.status = phase1;
        return sol;
      }
      if (phase1 != Status::Optimal || d_(m_ + 1, n_ + 1) < -eps_) {
        sol.status = Status::Infeasible;
        return sol;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basic_[i] == -1) {
          std::size_t s = 0;
          for (std::size_t j = 1; j <= n_; ++j) {
            if (d_(i, j) < d_(i, s) || (d_(i, j) == d_(i, s) && nonbasic_[j] < nonbasic_[s])) s = j;
          }
          pivot(i, s);
        }
      }
    }
    const Status phase2 = run(false);
    sol.status = phase2;
    if (phase2 != Status::Optimal) return sol;
    sol.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basic_[i] >= 0 && static_cast<std::size_t>(basic_[i]) < n_) {
        sol.x[static_cast<std::size_t>(basic_[i])] = d_(i, n_ + 1);
      }
    }
    sol.objective = d_(m_, n_ + 1);
    return sol;
  }

 private:
  void pivot(std::size_t r, std::size_t s) {
    const double inv = 1.0 / d_(r, s);
    const std::size_t width = n_ + 2;
    double* row_r = &d_.data[r * width];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      double* row_i = &d_.data[i * width];
      const double factor = row_i[s] * inv;
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) {
        if (j != s) row_i[j] -= row_r[j] * factor;
      }
      row_i[s] = -factor;
    }
    for (std::size_t j = 0; j < width; ++j) {
      if (j != s) row_r[j] *= inv;
    }
    row_r[s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  Status run(bool phase1) {
    const std::size_t obj = phase1 ? m_ + 1 : m_;
    for (std::size_t iter = 0;; ++iter) {
      if (iter >= max_pivots_) return Status::IterationLimit;
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (!phase1 && nonbasic_[j] == -1) continue;
        if (s == n_ + 1 || d_(obj, j) < d_(obj, s) ||
            (d_(obj, j) == d_(obj, s) && nonbasic_[j] < nonbasic_[s])) {
          s = j;
        }
      }
      if (s == n_ + 1 || d_(obj, s) > -eps_) return Status::Optimal;
      std::size_t r = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (d_(i, s) < eps_) continue;
        if (r == m_) {
          r = i;
          continue;
        }
        const double lhs = d_(i, n_ + 1) / d_(i, s);
        const double rhs = d_(r, n_ + 1) / d_(r, s);
        if (lhs < rhs || (lhs == rhs && basic_[i] < basic_[r])) r = i;
      }
      if (r == m_) return Status::Unbounded;
      pivot(r, s);
    }
  }

  std::size_t m_;
  std::size_t n_;
  double eps_;
  Matrix d_;
  std::vector<long> basic_;
  std::vector<long> nonbasic_;
  std::size_t max_pivots_ = 100000;
};

inline Solution maximize(const Matrix& a, std::span<const double> b, std::span<const double> c, double eps = 1e-9) {
  Simplex s(a, b, c, eps);
  return s.solve();
}

}  // namespace scoring::lp
