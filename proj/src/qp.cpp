#include "wimop/qp.hpp"

#include <algorithm>
#include <cmath>

namespace wimop {

WeightVector::WeightVector(Vector w) : w_(std::move(w)) {
  if (w_.size() < 1) throw Error(ErrorCode::DimensionMismatch, "empty weight vector");
  if (!w_.allFinite() || (w_.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
  }
  if (std::abs(w_.sum() - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "weights must sum to one");
}

namespace {

constexpr double kRidge = 1e-8;

// Row k of the stacked constraint system C x <= d.
class Constraints {
 public:
  explicit Constraints(const MqpInstance& region) : A_(region.A()), b_(region.b()), eq_(region.eq_rows()) {}

  int count() const { return static_cast<int>(A_.rows() + A_.cols()); }
  int q() const { return static_cast<int>(A_.rows()); }
  int n() const { return static_cast<int>(A_.cols()); }
  bool equality(int k) const { return k < q() && eq_[static_cast<size_t>(k)]; }

  double dot(int k, const Vector& v) const { return k < q() ? A_.row(k).dot(v) : -v(k - q()); }
  double rhs(int k) const { return k < q() ? b_(k) : 0.0; }

  void fill_row(int k, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const {
    if (k < q()) {
      row = A_.row(k);
    } else {
      row.setZero();
      row(k - q()) = -1.0;
    }
  }

  // C^T u
  Vector transpose_times(const Vector& u) const {
    Vector out = A_.transpose() * u.head(q());
    out -= u.tail(n());
    return out;
  }

 private:
  const Matrix& A_;
  const Vector& b_;
  const std::vector<bool>& eq_;
};

Matrix working_matrix(const Constraints& cons, const std::vector<int>& working) {
  Matrix M(static_cast<Eigen::Index>(working.size()), cons.n());
  for (size_t r = 0; r < working.size(); ++r) cons.fill_row(working[r], M.row(static_cast<Eigen::Index>(r)));
  return M;
}

bool independent_of(const Constraints& cons, const std::vector<int>& working, int k) {
  if (static_cast<int>(working.size()) >= cons.n()) return false;
  std::vector<int> trial = working;
  trial.push_back(k);
  Eigen::FullPivLU<Matrix> lu(working_matrix(cons, trial));
  lu.setThreshold(1e-10);
  return lu.rank() == static_cast<Eigen::Index>(trial.size());
}

// Solves [H W^T; W 0] [a; b] = [r1; r2].
bool solve_kkt(const Matrix& H, const Matrix& W, const Vector& r1, const Vector& r2, Vector& a, Vector& mult) {
  const auto n = H.rows();
  const auto m = W.rows();
  Matrix K = Matrix::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = H;
  K.topRightCorner(n, m) = W.transpose();
  K.bottomLeftCorner(m, n) = W;
  Vector rhs(n + m);
  rhs << r1, r2;
  Eigen::FullPivLU<Matrix> lu(K);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) return false;
  const Vector sol = lu.solve(rhs);
  a = sol.head(n);
  mult = sol.tail(m);
  return true;
}

}  // namespace

KktResiduals kkt_residuals(const Matrix& H, const Vector& g, const MqpInstance& region, const Vector& x,
                           const Vector& u) {
  const Constraints cons(region);
  KktResiduals r;
  r.stationarity = (H * x + g + cons.transpose_times(u)).cwiseAbs().maxCoeff();
  for (int k = 0; k < cons.count(); ++k) {
    const double slack = cons.dot(k, x) - cons.rhs(k);
    if (cons.equality(k)) {
      r.primal = std::max(r.primal, std::abs(slack));
    } else {
      r.primal = std::max(r.primal, std::max(0.0, slack));
      r.dual = std::max(r.dual, std::max(0.0, -u(k)));
      r.complementarity = std::max(r.complementarity, std::abs(u(k) * slack));
    }
  }
  return r;
}

QpSolution solve_qp(const Matrix& H_in, const Vector& g, const MqpInstance& region, const QpOptions& options,
                    const QpWarmStart* warm) {
  const Constraints cons(region);
  const int n = cons.n();
  if (H_in.rows() != n || H_in.cols() != n || g.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "QP data does not match the region dimension");
  }

  Matrix H = H_in;
  bool unique = true;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() <= 1e-12 * scale) {
      if (!options.ridge_tie_break) {
        throw Error(ErrorCode::DegenerateHessian, "weighted Hessian is singular");
      }
      H.diagonal().array() += kRidge;
      unique = false;
    }
  }

  const double tol = options.feasibility_tol;
  Vector x = region.feasible_point();
  std::vector<int> seed_active;
  if (warm != nullptr && warm->x.size() == n) {
    x = warm->x;
    seed_active = warm->active_set;
  }

  auto is_active = [&](int k) { return std::abs(cons.dot(k, x) - cons.rhs(k)) <= tol; };

  std::vector<int> working;
  for (int k = 0; k < cons.q(); ++k) {
    if (cons.equality(k) && independent_of(cons, working, k)) working.push_back(k);
  }
  auto in_working = [&](int k) { return std::find(working.begin(), working.end(), k) != working.end(); };
  for (int k : seed_active) {
    if (k >= 0 && k < cons.count() && !in_working(k) && is_active(k) && independent_of(cons, working, k)) {
      working.push_back(k);
    }
  }
  if (warm == nullptr) {
    for (int k = 0; k < cons.count(); ++k) {
      if (!in_working(k) && is_active(k) && independent_of(cons, working, k)) working.push_back(k);
    }
  }

  const int max_iter = options.max_iterations > 0 ? options.max_iterations : 50 * (n + cons.q());
  int iter = 0;
  Vector multipliers;
  for (;; ++iter) {
    if (iter >= max_iter) throw Error(ErrorCode::IterationLimit, "active-set iteration limit reached");
    const Matrix W = working_matrix(cons, working);
    Vector step;
    if (!solve_kkt(H, W, -(H * x + g), Vector::Zero(W.rows()), step, multipliers)) {
      throw Error(ErrorCode::DegenerateHessian, "singular KKT system in the active-set solver");
    }
    if (step.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + x.cwiseAbs().maxCoeff())) {
      int drop = -1;
      double most_negative = -1e-11;
      for (size_t r = 0; r < working.size(); ++r) {
        const int k = working[r];
        if (cons.equality(k)) continue;
        if (multipliers(static_cast<Eigen::Index>(r)) < most_negative) {
          most_negative = multipliers(static_cast<Eigen::Index>(r));
          drop = static_cast<int>(r);
        }
      }
      if (drop < 0) break;
      working.erase(working.begin() + drop);
      continue;
    }
    double alpha = 1.0;
    int blocking = -1;
    for (int k = 0; k < cons.count(); ++k) {
      if (cons.equality(k) || in_working(k)) continue;
      const double ap = cons.dot(k, step);
      if (ap <= 1e-14) continue;
      const double slack = std::max(0.0, cons.rhs(k) - cons.dot(k, x));
      const double a = slack / ap;
      if (a < alpha) {
        alpha = a;
        blocking = k;
      }
    }
    x += alpha * step;
    if (blocking >= 0) working.push_back(blocking);
  }

  // Re-solve the equality-constrained problem on the final working set so x
  // is exact up to the linear solve rather than accumulated steps.
  {
    const Matrix W = working_matrix(cons, working);
    Vector d(W.rows());
    for (size_t r = 0; r < working.size(); ++r) d(static_cast<Eigen::Index>(r)) = cons.rhs(working[r]);
    Vector x_exact, mult_exact;
    if (solve_kkt(H, W, -g, d, x_exact, mult_exact)) {
      bool feasible = true;
      for (int k = 0; k < cons.count() && feasible; ++k) {
        feasible = cons.dot(k, x_exact) - cons.rhs(k) <= tol;
      }
      if (feasible) {
        x = x_exact;
        multipliers = mult_exact;
      }
    }
  }

  QpSolution sol;
  sol.x = x;
  sol.u = Vector::Zero(cons.count());
  for (size_t r = 0; r < working.size(); ++r) sol.u(working[r]) = multipliers(static_cast<Eigen::Index>(r));
  sol.objective = 0.5 * x.dot(H_in * x) + g.dot(x);
  sol.kkt_residual = kkt_residuals(H, g, region, x, sol.u).max();
  sol.active_set = working;
  sol.iterations = iter;
  sol.unique = unique;
  if (sol.kkt_residual > options.kkt_tol) {
    throw Error(ErrorCode::IterationLimit,
                "active-set solve finished with KKT residual " + std::to_string(sol.kkt_residual));
  }
  return sol;
}

QpSolution solve_wp(const MqpInstance& instance, const WeightVector& w, const QpOptions& options,
                    const QpWarmStart* warm) {
  if (w.size() != instance.p()) throw Error(ErrorCode::DimensionMismatch, "weight length differs from p");
  const int n = instance.n();
  Matrix H = Matrix::Zero(n, n);
  Vector g = Vector::Zero(n);
  for (int l = 0; l < instance.p(); ++l) {
    if (w[l] == 0.0) continue;
    H += w[l] * instance.objective(l).Q;
    g += w[l] * instance.objective(l).c;
  }
  return solve_qp(H, g, instance, options, warm);
}

std::vector<QpSolution> solve_frontier(const MqpInstance& instance, std::span<const WeightVector> weights,
                                       const QpOptions& options) {
  std::vector<QpSolution> out;
  out.reserve(weights.size());
  QpWarmStart warm;
  for (size_t k = 0; k < weights.size(); ++k) {
    try {
      out.push_back(solve_wp(instance, weights[k], options, k == 0 ? nullptr : &warm));
    } catch (const Error& e) {
      throw Error(e.code(), "weight index " + std::to_string(k) + ": " + e.what());
    }
    warm.x = out.back().x;
    warm.active_set = out.back().active_set;
  }
  return out;
}

}  // namespace wimop
