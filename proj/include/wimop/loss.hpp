#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wimop/model.hpp"
#include "wimop/pareto.hpp"
#include "wimop/qp.hpp"

namespace wimop {

/// The sampled Pareto points x_1..x_K, stored column-wise.
class Frontier {
 public:
  Frontier() = default;
  explicit Frontier(Matrix points) : X_(std::move(points)) {}
  static Frontier from_solutions(std::span<const QpSolution> solutions);
  static Frontier from_points(std::span<const Vector> points);

  int size() const { return static_cast<int>(X_.cols()); }
  int dim() const { return static_cast<int>(X_.rows()); }
  bool empty() const { return X_.cols() == 0; }
  auto point(int k) const { return X_.col(k); }
  const Matrix& points() const { return X_; }

  /// min_k ||y - x_k||^2 without bookkeeping; the frontier must be nonempty.
  double min_sq_distance(const Vector& y) const;

 private:
  Matrix X_;
};

struct LossEvaluation {
  double value = 0.0;
  int argmin_k = -1;
  Vector nearest_x;
};

/// l_K(y) = min_k ||y - x_k||^2; ties go to the smallest k.
LossEvaluation surrogate_loss(const Vector& y, const Frontier& frontier);

/// Solve the K weighted-sum problems at theta.
Frontier frontier_at(const MqpInstance& instance, const ThetaSpec& spec, const Vector& theta, const WeightGrid& grid,
                     const QpOptions& qp = {});

/// Mean surrogate loss over `obs` against a given frontier.
double mean_loss(const Frontier& frontier, const ObservationSet& obs);

/// (1/N) sum_i l_K(y_i, theta), one frontier solve per call.
double empirical_risk(const Vector& theta, const MqpInstance& instance, const ThetaSpec& spec,
                      const WeightGrid& grid, const ObservationSet& obs);

/// Mean surrogate loss over a held-out set at theta_hat, using the training
/// weight grid.
double prediction_error(const Vector& theta_hat, const MqpInstance& instance, const ThetaSpec& spec,
                        const WeightGrid& grid, const ObservationSet& validation);

struct ConstantsBundle {
  double B = 0.0;
  double R = 0.0;
  double D = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  int N = 0;
  int n_theta = 0;
  double epsilon = 0.0;
  int m = 0;
  /// Absent when lambda == 0.
  std::optional<double> G;
  /// Absent when epsilon == 0.
  std::optional<double> R0;
  double H = 0.0;
  /// Why an optional field is absent.
  std::vector<std::string> notes;

  /// 2(B + R): Lipschitz constant of l_K in y.
  double lipschitz_y() const { return 2.0 * (B + R); }
  /// 4(B + R) kappa / lambda: Lipschitz constant of l_K in theta.
  std::optional<double> lipschitz_theta() const;
  /// (G R0 / delta + 1)^(n_theta + N + 1), reported in log10 to stay finite.
  std::optional<double> log10_iteration_bound(double delta) const;
};

/// Closed-form constants. With `strict`, lambda == 0 raises NotStronglyConvex.
ConstantsBundle compute_constants(const MqpInstance& instance, const ThetaSpec& spec, const ObservationSet& obs,
                                  const WroConfig& config, bool strict = false);

}  // namespace wimop
