#pragma once

// Independent reference computations used by the tests. None of them share
// code paths with the library solvers beyond the data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "wimop/loss.hpp"
#include "wimop/model.hpp"
#include "wimop/wro.hpp"

namespace oracle {

using wimop::Matrix;
using wimop::Vector;

// Stacked constraints C x <= d of a region: rows of A, then -x <= 0.
inline void stacked_constraints(const wimop::MqpInstance& region, Matrix& C, Vector& d, std::vector<bool>& eq) {
  const int n = region.n();
  const int q = region.q();
  C = Matrix::Zero(q + n, n);
  d = Vector::Zero(q + n);
  C.topRows(q) = region.A();
  d.head(q) = region.b();
  C.bottomRows(n) = -Matrix::Identity(n, n);
  eq.assign(static_cast<size_t>(q + n), false);
  for (int r = 0; r < q; ++r) eq[static_cast<size_t>(r)] = region.is_equality(r);
}

// Projected gradient on the dual of min 1/2 x'Hx + g'x s.t. Cx <= d (H
// positive definite). The dual feasible set is a box (u >= 0 on inequality
// rows, free on equality rows), so the projection is a clamp. Accelerated with
// adaptive restart. Returns the primal point recovered from the final dual.
inline Vector qp_dual_projected_gradient(const Matrix& H, const Vector& g, const wimop::MqpInstance& region,
                                         int max_iterations = 400000, double tol = 1e-13) {
  Matrix C;
  Vector d;
  std::vector<bool> eq;
  stacked_constraints(region, C, d, eq);
  const Eigen::LLT<Matrix> llt(H);
  const Matrix Hinv = llt.solve(Matrix::Identity(H.rows(), H.cols()));
  const Matrix M = C * Hinv * C.transpose();
  const Vector h = C * Hinv * g + d;
  // Dual (minimization form): phi(u) = 1/2 u'Mu + h'u.
  const double L = std::max(M.norm(), 1e-12);
  const auto project = [&](Vector u) {
    for (Eigen::Index r = 0; r < u.size(); ++r) {
      if (!eq[static_cast<size_t>(r)]) u(r) = std::max(0.0, u(r));
    }
    return u;
  };
  const auto phi = [&](const Vector& u) { return 0.5 * u.dot(M * u) + h.dot(u); };
  Vector u = Vector::Zero(C.rows());
  Vector z = u;
  double tk = 1.0;
  double prev = phi(u);
  for (int it = 0; it < max_iterations; ++it) {
    const Vector un = project(z - (M * z + h) / L);
    const double val = phi(un);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    if (val > prev) {
      // Restart momentum.
      z = u;
      tk = 1.0;
      continue;
    }
    z = un + ((tk - 1.0) / tn) * (un - u);
    const double step = (un - u).lpNorm<Eigen::Infinity>();
    u = un;
    tk = tn;
    prev = val;
    if (step < tol && it > 10) break;
  }
  return -Hinv * (g + C.transpose() * u);
}

// Convex piecewise-linear objective of the inner v-problem for a fixed t.
inline double inner_objective(const std::vector<std::vector<wimop::CutLine>>& lines, double epsilon, double t) {
  double total = 0.0;
  for (const auto& li : lines) {
    double v = 0.0;
    for (const wimop::CutLine& c : li) v = std::max(v, c.loss - t * c.distance);
    total += v;
  }
  return epsilon * t + total / static_cast<double>(lines.size());
}

// Dense grid over [0, t_max] followed by ternary refinement in the best cell's
// neighbourhood (valid since the objective is convex).
inline double inner_grid_oracle(const std::vector<std::vector<wimop::CutLine>>& lines, double epsilon, double t_max,
                                int points = 100000) {
  double best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k < points; ++k) {
    const double t = t_max * k / (points - 1);
    const double v = inner_objective(lines, epsilon, t);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  double a = t_max * std::max(0, best_k - 1) / (points - 1);
  double b = t_max * std::min(points - 1, best_k + 1) / (points - 1);
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (inner_objective(lines, epsilon, m1) <= inner_objective(lines, epsilon, m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return std::min(best, inner_objective(lines, epsilon, 0.5 * (a + b)));
}

// max over a 2-D box of min_k ||y - x_k||^2 - t ||y - y_i|| - v_i by a
// resolution x resolution grid, then repeated local zoom grids around the best
// few grid maxima.
inline double violation_grid_oracle(const wimop::Frontier& frontier, const Vector& yi, double t, double vi,
                                    const Vector& lo, const Vector& hi, int resolution = 401) {
  const auto phi = [&](double a, double b) {
    Vector y(2);
    y << a, b;
    return frontier.min_sq_distance(y) - t * (y - yi).norm() - vi;
  };
  const double hx = (hi(0) - lo(0)) / (resolution - 1);
  const double hy = (hi(1) - lo(1)) / (resolution - 1);
  std::vector<double> vals(static_cast<size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) vals[static_cast<size_t>(i) * resolution + j] = phi(lo(0) + i * hx, lo(1) + j * hy);
  }
  // Local maxima over the 8-neighbourhood, best first.
  std::vector<std::pair<double, std::pair<int, int>>> peaks;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double v = vals[static_cast<size_t>(i) * resolution + j];
      bool peak = true;
      for (int di = -1; di <= 1 && peak; ++di) {
        for (int dj = -1; dj <= 1 && peak; ++dj) {
          const int a = i + di;
          const int b = j + dj;
          if ((di || dj) && a >= 0 && b >= 0 && a < resolution && b < resolution) {
            peak = v >= vals[static_cast<size_t>(a) * resolution + b];
          }
        }
      }
      if (peak) peaks.push_back({v, {i, j}});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  double best = peaks.empty() ? -std::numeric_limits<double>::infinity() : peaks.front().first;
  const size_t zooms = std::min<size_t>(peaks.size(), 8);
  for (size_t p = 0; p < zooms; ++p) {
    double cx = lo(0) + peaks[p].second.first * hx;
    double cy = lo(1) + peaks[p].second.second * hy;
    double rx = hx;
    double ry = hy;
    for (int level = 0; level < 12; ++level) {
      double bx = cx;
      double by = cy;
      double bv = phi(cx, cy);
      for (int i = -10; i <= 10; ++i) {
        for (int j = -10; j <= 10; ++j) {
          const double a = std::clamp(cx + rx * i / 10.0, lo(0), hi(0));
          const double b = std::clamp(cy + ry * j / 10.0, lo(1), hi(1));
          const double v = phi(a, b);
          if (v > bv) {
            bv = v;
            bx = a;
            by = b;
          }
        }
      }
      best = std::max(best, bv);
      cx = bx;
      cy = by;
      rx *= 0.3;
      ry *= 0.3;
    }
  }
  return best;
}

// Random strongly convex QP data on a bounded random polytope
// {x >= 0, A x <= b} with nonnegative A, optionally one equality row.
struct RandomQp {
  wimop::MqpInstance region;
  Matrix H;
  Vector g;
};

inline RandomQp random_qp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ndist(1, 4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = ndist(rng);
  std::uniform_int_distribution<int> qdist(1, 8);
  const int q = qdist(rng);
  while (true) {
    Matrix A(q, n);
    Vector b(q);
    std::vector<bool> eq(static_cast<size_t>(q), false);
    for (int r = 0; r < q; ++r) {
      for (int j = 0; j < n; ++j) A(r, j) = unif(rng) < 0.25 ? 0.0 : 0.1 + unif(rng);
      b(r) = 0.5 + 2.0 * unif(rng);
    }
    // Guarantee boundedness: the first row covers every coordinate.
    for (int j = 0; j < n; ++j) A(0, j) = std::max(A(0, j), 0.2);
    if (q > 1 && unif(rng) < 0.3) eq[static_cast<size_t>(q - 1)] = true;
    Matrix M(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) M(i, j) = normal(rng);
    }
    Matrix H = M.transpose() * M + (0.2 + unif(rng)) * Matrix::Identity(n, n);
    H = 0.5 * (H + H.transpose());
    Vector g(n);
    for (int j = 0; j < n; ++j) g(j) = 3.0 * normal(rng);
    try {
      std::vector<wimop::Objective> objs{{H, g}, {Matrix::Identity(n, n), Vector::Zero(n)}};
      wimop::MqpInstance region = wimop::MqpInstance::create(objs, A, b, eq);
      return {std::move(region), H, g};
    } catch (const wimop::Error&) {
      // Infeasible equality row; draw again.
    }
  }
}

}  // namespace oracle
