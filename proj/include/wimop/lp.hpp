#pragma once

#include "wimop/model.hpp"

namespace wimop {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double value = 0.0;
};

/// Dense two-phase simplex (Bland's rule) for
///
///   max c^T x  s.t.  A x <= b on rows not flagged, A x = b on flagged rows, x >= 0.
///
/// Intended for the handful of small LPs needed to validate a feasible region.
LpResult solve_lp(const Vector& c, const Matrix& A, const Vector& b, const std::vector<bool>& eq_rows);

}  // namespace wimop
