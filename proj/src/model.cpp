#include "wimop/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wimop/lp.hpp"

namespace wimop {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::DegenerateHessian: return "DegenerateHessian";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::BadArity: return "BadArity";
    case ErrorCode::EmptyFrontier: return "EmptyFrontier";
    case ErrorCode::NoObservations: return "NoObservations";
    case ErrorCode::NotStronglyConvex: return "NotStronglyConvex";
    case ErrorCode::EmptyBoundsBox: return "EmptyBoundsBox";
    case ErrorCode::UnknownInstance: return "UnknownInstance";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr long kMaxVertexSystems = 200000;

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > 100 * kMaxVertexSystems) return r;
  }
  return r;
}

// Max ||x|| over the vertices of {A x <= b, eq rows, x >= 0}. Returns a
// negative value when the enumeration would be too large.
double max_vertex_norm(const Matrix& A, const Vector& b, const std::vector<bool>& eq) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  std::vector<int> eq_idx;
  std::vector<int> ineq_idx;  // >= 0: row of A; < 0: bound row -(j+1)
  for (int i = 0; i < m; ++i) (eq[static_cast<size_t>(i)] ? eq_idx : ineq_idx).push_back(i);
  for (int j = 0; j < n; ++j) ineq_idx.push_back(-(j + 1));

  const int n_eq = static_cast<int>(eq_idx.size());
  const int choose = n - n_eq;
  if (choose < 0) return -1.0;
  const int pool = static_cast<int>(ineq_idx.size());
  if (binomial(pool, choose) > kMaxVertexSystems) return -1.0;

  auto row_of = [&](int idx, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, double& rhs) {
    if (idx >= 0) {
      row = A.row(idx);
      rhs = b(idx);
    } else {
      row.setZero();
      row(-idx - 1) = -1.0;
      rhs = 0.0;
    }
  };

  Matrix M(n, n);
  Vector rhs(n);
  for (int r = 0; r < n_eq; ++r) {
    double v = 0.0;
    row_of(eq_idx[static_cast<size_t>(r)], M.row(r), v);
    rhs(r) = v;
  }

  double best = -1.0;
  std::vector<int> pick(static_cast<size_t>(choose));
  for (int i = 0; i < choose; ++i) pick[static_cast<size_t>(i)] = i;
  while (true) {
    for (int r = 0; r < choose; ++r) {
      double v = 0.0;
      row_of(ineq_idx[static_cast<size_t>(pick[static_cast<size_t>(r)])], M.row(n_eq + r), v);
      rhs(n_eq + r) = v;
    }
    Eigen::FullPivLU<Matrix> lu(M);
    if (lu.rank() == n) {
      const Vector x = lu.solve(rhs);
      bool feasible = (x.array() >= -kFeasTol).all();
      for (int i = 0; feasible && i < m; ++i) {
        const double g = A.row(i).dot(x) - b(i);
        feasible = eq[static_cast<size_t>(i)] ? std::abs(g) <= kFeasTol : g <= kFeasTol;
      }
      if (feasible) best = std::max(best, x.norm());
    }
    // next combination
    int k = choose - 1;
    while (k >= 0 && pick[static_cast<size_t>(k)] == pool - choose + k) --k;
    if (k < 0) break;
    ++pick[static_cast<size_t>(k)];
    for (int r = k + 1; r < choose; ++r) pick[static_cast<size_t>(r)] = pick[static_cast<size_t>(r - 1)] + 1;
  }
  return best;
}

}  // namespace

MqpInstance MqpInstance::create(std::vector<Objective> objectives, Matrix A, Vector b,
                                std::vector<bool> eq_rows) {
  if (objectives.size() < 2) throw Error(ErrorCode::BadArity, "need at least two objectives");
  const auto n = A.cols();
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "decision dimension must be positive");
  if (b.size() != A.rows() || static_cast<Eigen::Index>(eq_rows.size()) != A.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "A, b and eq_rows disagree on the row count");
  }

  MqpInstance inst;
  for (size_t l = 0; l < objectives.size(); ++l) {
    const Objective& obj = objectives[l];
    if (obj.Q.rows() != n || obj.Q.cols() != n || obj.c.size() != n) {
      throw Error(ErrorCode::DimensionMismatch, "objective " + std::to_string(l) + " has wrong shape");
    }
    if ((obj.Q - obj.Q.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
      throw Error(ErrorCode::InvalidArgument, "Q_" + std::to_string(l) + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(obj.Q, Eigen::EigenvaluesOnly);
    double lmin = eig.eigenvalues().minCoeff();
    const double scale = std::max(1.0, obj.Q.cwiseAbs().maxCoeff());
    if (lmin < -1e-10 * scale) {
      throw Error(ErrorCode::InvalidArgument, "Q_" + std::to_string(l) + " is not positive semidefinite");
    }
    if (std::abs(lmin) <= 1e-12 * scale) lmin = 0.0;
    inst.lambda_l_.push_back(lmin);
  }
  inst.lambda_ = *std::min_element(inst.lambda_l_.begin(), inst.lambda_l_.end());
  inst.objectives_ = std::move(objectives);
  inst.A_ = std::move(A);
  inst.b_ = std::move(b);
  inst.eq_rows_ = std::move(eq_rows);

  inst.region_lo_.resize(n);
  inst.region_hi_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector c = Vector::Zero(n);
    c(j) = 1.0;
    const LpResult up = solve_lp(c, inst.A_, inst.b_, inst.eq_rows_);
    if (up.status == LpStatus::Infeasible) throw Error(ErrorCode::Infeasible, "feasible region is empty");
    if (up.status == LpStatus::Unbounded) throw Error(ErrorCode::Unbounded, "feasible region is unbounded");
    if (j == 0) inst.feasible_point_ = up.x;
    const LpResult down = solve_lp(-c, inst.A_, inst.b_, inst.eq_rows_);
    inst.region_hi_(j) = up.value;
    inst.region_lo_(j) = -down.value;
  }

  const double vertex_b = max_vertex_norm(inst.A_, inst.b_, inst.eq_rows_);
  if (vertex_b >= 0.0) {
    inst.B_ = vertex_b;
    inst.B_exact_ = true;
  } else {
    inst.B_ = box_corner_norm(inst.region_lo_, inst.region_hi_);
    inst.B_exact_ = false;
  }
  return inst;
}

Vector MqpInstance::evaluate(const Vector& x) const {
  Vector f(p());
  for (int l = 0; l < p(); ++l) {
    const Objective& o = objective(l);
    f(l) = 0.5 * x.dot(o.Q * x) + o.c.dot(x);
  }
  return f;
}

MqpInstance MqpInstance::with_linear_term(int l, const Vector& c) const {
  if (l < 0 || l >= p()) throw Error(ErrorCode::OutOfBounds, "objective index out of range");
  if (c.size() != n()) throw Error(ErrorCode::DimensionMismatch, "linear term has wrong length");
  MqpInstance out = *this;
  out.objectives_[static_cast<size_t>(l)].c = c;
  return out;
}

ThetaSpec::ThetaSpec(std::vector<ThetaEntry> layout, Vector lower, Vector upper)
    : layout_(std::move(layout)), lower_(std::move(lower)), upper_(std::move(upper)) {
  const auto k = static_cast<Eigen::Index>(layout_.size());
  if (lower_.size() != k || upper_.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "theta bounds must match the layout length");
  }
  if ((lower_.array() > upper_.array()).any()) {
    throw Error(ErrorCode::InvalidArgument, "theta lower bound exceeds upper bound");
  }
  for (const ThetaEntry& e : layout_) {
    if (e.scale == 0.0) throw Error(ErrorCode::InvalidArgument, "theta entry scale must be nonzero");
  }
}

double ThetaSpec::D() const {
  if (layout_.empty()) return 0.0;
  return lower_.cwiseAbs().cwiseMax(upper_.cwiseAbs()).norm();
}

bool ThetaSpec::contains(const Vector& theta, double tol) const {
  if (theta.size() != n_theta()) return false;
  return (theta.array() >= lower_.array() - tol).all() && (theta.array() <= upper_.array() + tol).all();
}

Vector ThetaSpec::project(const Vector& theta) const { return theta.cwiseMax(lower_).cwiseMin(upper_); }

Vector ThetaSpec::extract(const MqpInstance& instance) const {
  check_against(instance);
  Vector out(n_theta());
  for (int j = 0; j < n_theta(); ++j) {
    const ThetaEntry& e = layout_[static_cast<size_t>(j)];
    out(j) = instance.objective(e.objective).c(e.coord) / e.scale;
  }
  return out;
}

void ThetaSpec::check_against(const MqpInstance& instance) const {
  for (const ThetaEntry& e : layout_) {
    if (e.objective < 0 || e.objective >= instance.p() || e.coord < 0 || e.coord >= instance.n()) {
      throw Error(ErrorCode::OutOfBounds, "theta layout addresses an entry outside the instance");
    }
  }
}

MqpInstance apply_theta(const MqpInstance& instance, const ThetaSpec& spec, const Vector& theta) {
  if (theta.size() != spec.n_theta()) {
    throw Error(ErrorCode::DimensionMismatch,
                "theta has length " + std::to_string(theta.size()) + ", expected " + std::to_string(spec.n_theta()));
  }
  if (!theta.allFinite() || !spec.contains(theta, 1e-12)) {
    throw Error(ErrorCode::OutOfBounds, "theta lies outside the parameter box");
  }
  spec.check_against(instance);
  std::vector<Vector> cs;
  for (int l = 0; l < instance.p(); ++l) cs.push_back(instance.objective(l).c);
  for (int j = 0; j < spec.n_theta(); ++j) {
    const ThetaEntry& e = spec.layout()[static_cast<size_t>(j)];
    cs[static_cast<size_t>(e.objective)](e.coord) = e.scale * theta(j);
  }
  MqpInstance out = instance;
  for (int l = 0; l < instance.p(); ++l) {
    if (cs[static_cast<size_t>(l)] != instance.objective(l).c) out = out.with_linear_term(l, cs[static_cast<size_t>(l)]);
  }
  return out;
}

double box_corner_norm(const Vector& lo, const Vector& hi) {
  return lo.cwiseAbs().cwiseMax(hi.cwiseAbs()).norm();
}

ObservationSet::ObservationSet(std::vector<Vector> points, Vector box_lower, Vector box_upper)
    : points_(std::move(points)), box_lo_(std::move(box_lower)), box_hi_(std::move(box_upper)) {
  if (box_lo_.size() != box_hi_.size() || box_lo_.size() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "support box bounds disagree in length");
  }
  if ((box_lo_.array() > box_hi_.array()).any()) {
    throw Error(ErrorCode::InvalidArgument, "support box lower bound exceeds upper bound");
  }
  for (size_t i = 0; i < points_.size(); ++i) {
    const Vector& y = points_[i];
    if (y.size() != box_lo_.size()) {
      throw Error(ErrorCode::DimensionMismatch, "observation " + std::to_string(i) + " has wrong length");
    }
    if ((y.array() < box_lo_.array() - 1e-12).any() || (y.array() > box_hi_.array() + 1e-12).any()) {
      throw Error(ErrorCode::OutOfBounds, "observation " + std::to_string(i) + " lies outside the support box");
    }
  }
  R_ = box_corner_norm(box_lo_, box_hi_);
}

ObservationSet ObservationSet::with_points(std::vector<Vector> points) const {
  return ObservationSet(std::move(points), box_lo_, box_hi_);
}

ObservationSet ObservationSet::head(int count) const {
  if (count < 0 || count > size()) throw Error(ErrorCode::OutOfBounds, "head: count out of range");
  return with_points(std::vector<Vector>(points_.begin(), points_.begin() + count));
}

const char* to_string(CutPolicy policy) {
  return policy == CutPolicy::AllViolated ? "all" : "max";
}

CutPolicy cut_policy_from_string(const std::string& name) {
  if (name == "all" || name == "all-violated") return CutPolicy::AllViolated;
  if (name == "max" || name == "max-only") return CutPolicy::MaxOnly;
  throw Error(ErrorCode::InvalidArgument, "unknown cut policy '" + name + "'");
}

void WroConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw Error(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "m must be >= 0");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  if (grid_resolution < 2) throw Error(ErrorCode::InvalidArgument, "grid_resolution must be >= 2");
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
  if (cut_threshold < 0.0) throw Error(ErrorCode::InvalidArgument, "cut_threshold must be >= 0");
}

VBounds make_vbounds(double B, double R, int m, double epsilon) {
  if (B < 0.0 || R < 0.0 || m < 0 || epsilon < 0.0) {
    throw Error(ErrorCode::EmptyBoundsBox, "inconsistent inputs for the V box");
  }
  VBounds vb;
  vb.V1 = 0.0;
  vb.V2 = (B + R) * (B + R);
  vb.v_last_max = epsilon > 0.0 ? (vb.V2 - vb.V1) / epsilon : std::numeric_limits<double>::infinity();
  vb.v_i_max = (m + 1) * vb.V2 - m * vb.V1;
  return vb;
}

MqpInstance build_synthetic_instance() {
  Matrix Q1 = Matrix::Zero(2, 2);
  Q1.diagonal() << 1.0, 2.0;
  Matrix Q2 = Matrix::Zero(2, 2);
  Q2.diagonal() << 2.0, 1.0;
  Vector c1(2), c2(2);
  c1 << -0.5, -1.0;
  c2 << -5.0, -2.5;
  Matrix A = Matrix::Identity(2, 2);
  Vector b(2);
  b << 3.0, 3.0;
  return MqpInstance::create({{Q1, c1}, {Q2, c2}}, A, b, {false, false});
}

ThetaSpec synthetic_theta_spec() {
  return ThetaSpec({{0, 1, 1.0}, {1, 1, 1.0}}, Vector::Constant(2, -6.0), Vector::Constant(2, 0.0));
}

Vector portfolio_expected_return() {
  Vector r(8);
  r << 0.1791, 0.1143, 0.1357, 0.0837, 0.1653, 0.1808, 0.0352, 0.0368;
  return r;
}

Matrix portfolio_covariance() {
  Matrix C(8, 8);
  C << 0.1641, 0.0299, 0.0478, 0.0491, 0.0580, 0.0871, 0.0603, 0.0492,
       0.0299, 0.0720, 0.0511, 0.0287, 0.0527, 0.0297, 0.0291, 0.0326,
       0.0478, 0.0511, 0.0794, 0.0498, 0.0664, 0.0479, 0.0395, 0.0523,
       0.0491, 0.0287, 0.0498, 0.1148, 0.0336, 0.0503, 0.0326, 0.0447,
       0.0580, 0.0527, 0.0664, 0.0336, 0.1073, 0.0483, 0.0402, 0.0533,
       0.0871, 0.0297, 0.0479, 0.0503, 0.0483, 0.1134, 0.0591, 0.0387,
       0.0603, 0.0291, 0.0395, 0.0326, 0.0402, 0.0591, 0.0704, 0.0244,
       0.0492, 0.0326, 0.0523, 0.0447, 0.0533, 0.0387, 0.0244, 0.1028;
  return C;
}

MqpInstance build_portfolio_instance() {
  constexpr int n = 8;
  Matrix A(n + 1, n);
  A.topRows(n) = Matrix::Identity(n, n);
  A.row(n).setOnes();
  Vector b = Vector::Ones(n + 1);
  std::vector<bool> eq(n + 1, false);
  eq[n] = true;
  return MqpInstance::create({{Matrix::Zero(n, n), -portfolio_expected_return()},
                              {2.0 * portfolio_covariance(), Vector::Zero(n)}},
                             A, b, eq);
}

ThetaSpec portfolio_theta_spec() {
  std::vector<ThetaEntry> layout;
  for (int j = 0; j < 4; ++j) layout.push_back({0, j, -1.0});
  return ThetaSpec(layout, Vector::Zero(4), Vector::Constant(4, 0.3));
}

}  // namespace wimop
