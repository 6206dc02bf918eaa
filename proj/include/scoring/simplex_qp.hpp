#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "scoring/error.hpp"

namespace scoring::qp {

/// Gaussian elimination with partial pivoting on a small dense system.
/// Returns false when the matrix is numerically singular.
inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-14) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return true;
}

struct SimplexQpResult {
  std::vector<double> weights;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// minimize 1/2 x'Hx - f'x over the probability simplex {x >= 0, sum x = 1}
/// with H symmetric positive definite.
///
/// Primal active-set method: the working set holds the coordinates fixed at
/// zero. Each iteration solves the equality-constrained KKT system on the free
/// coordinates, steps toward its solution until a free coordinate hits zero,
/// and releases the fixed coordinate with the most negative multiplier once the
/// subproblem is solved exactly.
inline SimplexQpResult minimize_on_simplex(const std::vector<std::vector<double>>& h, const std::vector<double>& f,
                                           std::size_t max_iterations = 1000) {
  const std::size_t n = f.size();
  if (n == 0 || h.size() != n) fail(ErrorKind::BadInput, "simplex qp: dimension mismatch");

  // Start at the best vertex.
  std::size_t best = 0;
  double best_val = 0.5 * h[0][0] - f[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double v = 0.5 * h[i][i] - f[i];
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  std::vector<double> x(n, 0.0);
  x[best] = 1.0;
  std::vector<bool> free(n, false);
  free[best] = true;

  SimplexQpResult result;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter + 1;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (free[i]) idx.push_back(i);
    }
    const std::size_t k = idx.size();
    // KKT: [H_FF 1; 1' 0] [y; mu] = [f_F; 1]
    std::vector<std::vector<double>> kkt(k + 1, std::vector<double>(k + 1, 0.0));
    std::vector<double> rhs(k + 1, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) kkt[a][b] = h[idx[a]][idx[b]];
      kkt[a][k] = 1.0;
      kkt[k][a] = 1.0;
      rhs[a] = f[idx[a]];
    }
    rhs[k] = 1.0;
    std::vector<double> sol;
    if (!solve_dense(kkt, rhs, sol)) fail(ErrorKind::BadInput, "simplex qp: singular KKT system");

    bool at_subproblem_optimum = true;
    double step = 1.0;
    std::size_t blocking = n;
    for (std::size_t a = 0; a < k; ++a) {
      const double target = sol[a];
      const double cur = x[idx[a]];
      if (target < 0.0) {
        at_subproblem_optimum = false;
        const double t = cur / (cur - target);
        if (t < step) {
          step = t;
          blocking = idx[a];
        }
      }
    }
    for (std::size_t a = 0; a < k; ++a) x[idx[a]] += step * (sol[a] - x[idx[a]]);
    if (!at_subproblem_optimum) {
      x[blocking] = 0.0;
      free[blocking] = false;
      continue;
    }

    // Multiplier for fixed coordinate j: (Hx - f)_j + mu must be >= 0 at the optimum,
    // where the KKT solution gives -mu = (Hx - f)_i on free coordinates.
    const double mu = -sol[k];
    std::size_t release = n;
    double most_negative = -1e-12;
    for (std::size_t j = 0; j < n; ++j) {
      if (free[j]) continue;
      double g = -f[j];
      for (std::size_t i = 0; i < n; ++i) g += h[j][i] * x[i];
      const double lambda = g - mu;
      if (lambda < most_negative) {
        most_negative = lambda;
        release = j;
      }
    }
    if (release == n) break;
    free[release] = true;
  }

  for (double& v : x) v = std::max(0.0, v);
  double sum = 0.0;
  for (double v : x) sum += v;
  for (double& v : x) v /= sum;
  double obj = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    obj -= f[i] * x[i];
    for (std::size_t j = 0; j < n; ++j) obj += 0.5 * x[i] * h[i][j] * x[j];
  }
  result.weights = std::move(x);
  result.objective = obj;
  return result;
}

}  // namespace scoring::qp
