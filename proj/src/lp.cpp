#include "wimop/lp.hpp"

#include <limits>

namespace wimop {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-10;

// Canonical-form tableau: rows are constraints, the last column is the rhs.
class Tableau {
 public:
  Tableau(int rows, int cols) : T_(Matrix::Zero(rows, cols + 1)), basis_(static_cast<size_t>(rows), -1) {}

  Matrix& T() { return T_; }
  std::vector<int>& basis() { return basis_; }
  int rows() const { return static_cast<int>(T_.rows()); }
  int cols() const { return static_cast<int>(T_.cols()) - 1; }
  double rhs(int r) const { return T_(r, cols()); }

  void pivot(int r, int c) {
    T_.row(r) /= T_(r, c);
    for (int i = 0; i < rows(); ++i) {
      if (i != r && T_(i, c) != 0.0) {
        T_.row(i) -= T_(i, c) * T_.row(r);
      }
    }
    basis_[static_cast<size_t>(r)] = c;
  }

  // Maximizes cost^T z over the tableau. Columns with allowed[j] == false never
  // enter. Returns false when unbounded.
  bool maximize(const Vector& cost, const std::vector<bool>& allowed) {
    const int max_pivots = 50 * (rows() + cols()) + 100;
    for (int it = 0; it < max_pivots; ++it) {
      int enter = -1;
      for (int j = 0; j < cols(); ++j) {
        if (!allowed[static_cast<size_t>(j)]) continue;
        double reduced = cost(j);
        for (int i = 0; i < rows(); ++i) reduced -= cost(basis_[static_cast<size_t>(i)]) * T_(i, j);
        if (reduced > kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows(); ++i) {
        if (T_(i, enter) <= kPivotTol) continue;
        const double ratio = rhs(i) / T_(i, enter);
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave >= 0 &&
             basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw Error(ErrorCode::IterationLimit, "simplex pivot limit reached");
  }

  double value(const Vector& cost) const {
    double v = 0.0;
    for (int i = 0; i < rows(); ++i) v += cost(basis_[static_cast<size_t>(i)]) * rhs(i);
    return v;
  }

 private:
  Matrix T_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Vector& c, const Matrix& A, const Vector& b, const std::vector<bool>& eq_rows) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  if (c.size() != n || b.size() != m || static_cast<int>(eq_rows.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "solve_lp: inconsistent sizes");
  }

  // Column layout: [x (n) | slack/surplus (one per inequality row) | artificials].
  std::vector<int> slack_col(static_cast<size_t>(m), -1);
  std::vector<int> art_col(static_cast<size_t>(m), -1);
  int next = n;
  for (int i = 0; i < m; ++i) {
    if (!eq_rows[static_cast<size_t>(i)]) slack_col[static_cast<size_t>(i)] = next++;
  }
  const int first_art = next;
  for (int i = 0; i < m; ++i) {
    const bool needs_art = eq_rows[static_cast<size_t>(i)] || b(i) < 0.0;
    if (needs_art) art_col[static_cast<size_t>(i)] = next++;
  }
  const int total = next;

  Tableau tab(m, total);
  Matrix& T = tab.T();
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    T.row(i).head(n) = sign * A.row(i);
    if (slack_col[static_cast<size_t>(i)] >= 0) T(i, slack_col[static_cast<size_t>(i)]) = sign;
    if (art_col[static_cast<size_t>(i)] >= 0) T(i, art_col[static_cast<size_t>(i)]) = 1.0;
    T(i, total) = sign * b(i);
    tab.basis()[static_cast<size_t>(i)] =
        art_col[static_cast<size_t>(i)] >= 0 ? art_col[static_cast<size_t>(i)] : slack_col[static_cast<size_t>(i)];
  }

  std::vector<bool> allowed(static_cast<size_t>(total), true);
  if (total > first_art) {
    Vector phase1 = Vector::Zero(total);
    phase1.tail(total - first_art).setConstant(-1.0);
    tab.maximize(phase1, allowed);
    if (tab.value(phase1) < -1e-8) return LpResult{LpStatus::Infeasible, Vector(), 0.0};
    // Drive remaining (zero-valued) artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[static_cast<size_t>(i)] < first_art) continue;
      for (int j = 0; j < first_art; ++j) {
        if (std::abs(T(i, j)) > kPivotTol) {
          tab.pivot(i, j);
          break;
        }
      }
    }
    for (int j = first_art; j < total; ++j) allowed[static_cast<size_t>(j)] = false;
  }

  Vector cost = Vector::Zero(total);
  cost.head(n) = c;
  if (!tab.maximize(cost, allowed)) return LpResult{LpStatus::Unbounded, Vector(), 0.0};

  LpResult out;
  out.status = LpStatus::Optimal;
  out.x = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int col = tab.basis()[static_cast<size_t>(i)];
    if (col < n) out.x(col) = std::max(0.0, tab.rhs(i));
  }
  out.value = c.dot(out.x);
  return out;
}

}  // namespace wimop
