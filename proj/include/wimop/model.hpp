#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wimop/error.hpp"

namespace wimop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One objective f(x) = 1/2 x^T Q x + c^T x.
struct Objective {
  Matrix Q;
  Vector c;
};

/// Parametrized multiobjective quadratic program
///
///   min { f_1(x), ..., f_p(x) }  s.t.  A x <= b (rows flagged in eq_rows hold
///   with equality),  x >= 0.
///
/// Construction validates symmetry and positive semidefiniteness of every Q,
/// checks that the feasible region is nonempty and bounded, and records its
/// bounding box together with B = max ||x||_2 over the region. The region does
/// not depend on the learnable parameters, so these quantities survive
/// apply_theta unchanged.
class MqpInstance {
 public:
  static MqpInstance create(std::vector<Objective> objectives, Matrix A, Vector b,
                            std::vector<bool> eq_rows);

  int p() const { return static_cast<int>(objectives_.size()); }
  int n() const { return static_cast<int>(A_.cols()); }
  int q() const { return static_cast<int>(A_.rows()); }

  const std::vector<Objective>& objectives() const { return objectives_; }
  const Objective& objective(int l) const { return objectives_.at(static_cast<size_t>(l)); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const std::vector<bool>& eq_rows() const { return eq_rows_; }
  bool is_equality(int row) const { return eq_rows_.at(static_cast<size_t>(row)); }

  /// Smallest eigenvalue of each Q_l.
  const std::vector<double>& lambda_per_objective() const { return lambda_l_; }
  /// min_l lambda_l.
  double lambda() const { return lambda_; }
  bool strongly_convex() const { return lambda_ > 0.0; }

  /// Componentwise bounds of the feasible region (from 2n bound LPs).
  const Vector& region_lower() const { return region_lo_; }
  const Vector& region_upper() const { return region_hi_; }
  /// max ||x||_2 over the feasible region.
  double B() const { return B_; }
  /// True when B was obtained by vertex enumeration rather than the bounding
  /// box corner (an upper bound).
  bool B_is_exact() const { return B_exact_; }
  /// A feasible point of the region, used to start the primal QP solver.
  const Vector& feasible_point() const { return feasible_point_; }

  /// Evaluate every objective at x.
  Vector evaluate(const Vector& x) const;

  /// Copy with the linear term of objective l replaced.
  MqpInstance with_linear_term(int l, const Vector& c) const;

 private:
  MqpInstance() = default;

  std::vector<Objective> objectives_;
  Matrix A_;
  Vector b_;
  std::vector<bool> eq_rows_;
  std::vector<double> lambda_l_;
  double lambda_ = 0.0;
  Vector region_lo_;
  Vector region_hi_;
  double B_ = 0.0;
  bool B_exact_ = false;
  Vector feasible_point_;
};

/// Names one learnable entry: coordinate `coord` of the linear term of
/// objective `objective` equals scale * theta_j. The portfolio form uses
/// scale = -1 so that theta is the expected-return vector itself.
struct ThetaEntry {
  int objective = 0;
  int coord = 0;
  double scale = 1.0;

  bool operator==(const ThetaEntry&) const = default;
};

/// Box-shaped parameter space over selected linear-term coefficients.
class ThetaSpec {
 public:
  ThetaSpec() = default;
  ThetaSpec(std::vector<ThetaEntry> layout, Vector lower, Vector upper);

  const std::vector<ThetaEntry>& layout() const { return layout_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  int n_theta() const { return static_cast<int>(layout_.size()); }
  /// Radius bound: norm of the per-coordinate max(|lower|, |upper|).
  double D() const;

  bool contains(const Vector& theta, double tol = 0.0) const;
  /// Clamp into the box.
  Vector project(const Vector& theta) const;
  /// Current values of the learnable entries in `instance`.
  Vector extract(const MqpInstance& instance) const;

  /// Throws unless the layout addresses valid entries of `instance`.
  void check_against(const MqpInstance& instance) const;

 private:
  std::vector<ThetaEntry> layout_;
  Vector lower_;
  Vector upper_;
};

/// Overwrite the learnable entries of `instance` with `theta`.
MqpInstance apply_theta(const MqpInstance& instance, const ThetaSpec& spec, const Vector& theta);

/// N observed decisions together with their box support.
class ObservationSet {
 public:
  ObservationSet() = default;
  ObservationSet(std::vector<Vector> points, Vector box_lower, Vector box_upper);

  int size() const { return static_cast<int>(points_.size()); }
  bool empty() const { return points_.empty(); }
  int dim() const { return static_cast<int>(box_lo_.size()); }
  const std::vector<Vector>& points() const { return points_; }
  const Vector& point(int i) const { return points_.at(static_cast<size_t>(i)); }
  const Vector& box_lower() const { return box_lo_; }
  const Vector& box_upper() const { return box_hi_; }
  /// Largest corner norm of the support box.
  double R() const { return R_; }

  /// Same support box, different points.
  ObservationSet with_points(std::vector<Vector> points) const;
  /// The first `count` observations.
  ObservationSet head(int count) const;

 private:
  std::vector<Vector> points_;
  Vector box_lo_;
  Vector box_hi_;
  double R_ = 0.0;
};

/// Largest Euclidean norm over the corners of [lo, hi].
double box_corner_norm(const Vector& lo, const Vector& hi);

enum class CutPolicy { AllViolated, MaxOnly };

const char* to_string(CutPolicy policy);
CutPolicy cut_policy_from_string(const std::string& name);

struct WroConfig {
  double epsilon = 0.01;
  double delta = 0.1;
  int K = 6;
  /// Slack-expansion integer of the box V for v_1..v_N.
  int m = 1;
  int max_iterations = 100;
  /// Points per axis of the coarse scan in the violation subproblem.
  int grid_resolution = 41;
  /// Number of polished starts in the parameter search.
  int restarts = 4;
  std::uint64_t seed = 1;
  CutPolicy cut_policy = CutPolicy::AllViolated;
  /// A witness becomes a cut when its violation exceeds this value.
  double cut_threshold = 0.0;

  void validate() const;
};

/// Bounds of the box V for the epigraph variables.
struct VBounds {
  double V1 = 0.0;
  double V2 = 0.0;
  /// Upper bound on v_{N+1}; +inf when epsilon == 0.
  double v_last_max = 0.0;
  /// Upper bound on v_i, i <= N.
  double v_i_max = 0.0;
};

VBounds make_vbounds(double B, double R, int m, double epsilon);

/// The two-objective quadratic test problem with diagonal Hessians on [0,3]^2.
MqpInstance build_synthetic_instance();
/// Learnable second coordinates of c_1 and c_2 in [-6, 0].
ThetaSpec synthetic_theta_spec();

/// Mean-variance portfolio over 8 securities: f_1 = -r^T x, f_2 = x^T C x,
/// 0 <= x <= 1, sum x = 1. Stored in 1/2 x^T Q x form, so Q_2 = 2 C.
MqpInstance build_portfolio_instance();
/// Expected returns of the 8 securities.
Vector portfolio_expected_return();
/// Return covariance of the 8 securities.
Matrix portfolio_covariance();
/// Learnable expected returns of the first four securities.
ThetaSpec portfolio_theta_spec();

}  // namespace wimop
