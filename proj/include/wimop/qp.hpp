#pragma once

#include <span>
#include <vector>

#include "wimop/model.hpp"

namespace wimop {

/// A point of the standard simplex: w >= 0, sum w = 1 (within 1e-12).
class WeightVector {
 public:
  explicit WeightVector(Vector w);

  const Vector& w() const { return w_; }
  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int l) const { return w_(l); }

 private:
  Vector w_;
};

struct QpOptions {
  /// Accept a singular weighted Hessian by adding 1e-8 I; the result is then
  /// flagged non-unique.
  bool ridge_tie_break = false;
  double feasibility_tol = 1e-9;
  double kkt_tol = 1e-8;
  /// 0 selects 50 (n + q).
  int max_iterations = 0;
};

/// Previous solution used to seed the working set. The feasible region does
/// not depend on the weights or on theta, so any previous x is feasible.
struct QpWarmStart {
  Vector x;
  std::vector<int> active_set;
};

/// Constraint numbering: rows 0..q-1 are the rows of A, rows q..q+n-1 are the
/// bounds -x_j <= 0. u holds one multiplier per row with the Lagrangian
/// 1/2 x^T H x + g^T x + u^T (C x - d); inequality multipliers are >= 0.
struct QpSolution {
  Vector x;
  Vector u;
  double objective = 0.0;
  /// Max of stationarity, complementarity, primal and dual infeasibility.
  double kkt_residual = 0.0;
  std::vector<int> active_set;
  int iterations = 0;
  bool unique = true;
};

/// Residual breakdown of a KKT certificate.
struct KktResiduals {
  double stationarity = 0.0;
  double complementarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;

  double max() const { return std::max(std::max(stationarity, complementarity), std::max(primal, dual)); }
};

KktResiduals kkt_residuals(const Matrix& H, const Vector& g, const MqpInstance& region, const Vector& x,
                           const Vector& u);

/// min 1/2 x^T H x + g^T x over the feasible region of `region`.
QpSolution solve_qp(const Matrix& H, const Vector& g, const MqpInstance& region, const QpOptions& options = {},
                    const QpWarmStart* warm = nullptr);

/// Weighted-sum scalarization: H = sum w_l Q_l, g = sum w_l c_l.
QpSolution solve_wp(const MqpInstance& instance, const WeightVector& w, const QpOptions& options = {},
                    const QpWarmStart* warm = nullptr);

/// One solve per weight, in order, each warm-started from the previous one.
std::vector<QpSolution> solve_frontier(const MqpInstance& instance, std::span<const WeightVector> weights,
                                       const QpOptions& options = {});

}  // namespace wimop
