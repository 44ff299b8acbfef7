#include "wimop/loss.hpp"

#include <cmath>
#include <limits>

namespace wimop {

Frontier Frontier::from_solutions(std::span<const QpSolution> solutions) {
  if (solutions.empty()) return Frontier();
  Matrix X(solutions.front().x.size(), static_cast<Eigen::Index>(solutions.size()));
  for (size_t k = 0; k < solutions.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = solutions[k].x;
  return Frontier(std::move(X));
}

Frontier Frontier::from_points(std::span<const Vector> points) {
  if (points.empty()) return Frontier();
  Matrix X(points.front().size(), static_cast<Eigen::Index>(points.size()));
  for (size_t k = 0; k < points.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = points[k];
  return Frontier(std::move(X));
}

double Frontier::min_sq_distance(const Vector& y) const {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < X_.cols(); ++k) best = std::min(best, (X_.col(k) - y).squaredNorm());
  return best;
}

LossEvaluation surrogate_loss(const Vector& y, const Frontier& frontier) {
  if (frontier.empty()) throw Error(ErrorCode::EmptyFrontier, "surrogate loss needs at least one frontier point");
  if (y.size() != frontier.dim()) throw Error(ErrorCode::DimensionMismatch, "observation and frontier dimensions differ");
  LossEvaluation out;
  out.value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < frontier.size(); ++k) {
    const double d = (frontier.point(k) - y).squaredNorm();
    if (d < out.value) {
      out.value = d;
      out.argmin_k = k;
    }
  }
  out.nearest_x = frontier.point(out.argmin_k);
  return out;
}

Frontier frontier_at(const MqpInstance& instance, const ThetaSpec& spec, const Vector& theta, const WeightGrid& grid,
                     const QpOptions& qp) {
  const MqpInstance applied = apply_theta(instance, spec, theta);
  const std::vector<QpSolution> sols = solve_frontier(applied, grid.weights, qp);
  return Frontier::from_solutions(sols);
}

double mean_loss(const Frontier& frontier, const ObservationSet& obs) {
  if (obs.empty()) throw Error(ErrorCode::NoObservations, "mean loss over an empty set");
  if (frontier.empty()) throw Error(ErrorCode::EmptyFrontier, "mean loss needs at least one frontier point");
  double total = 0.0;
  for (const Vector& y : obs.points()) total += frontier.min_sq_distance(y);
  return total / obs.size();
}

double empirical_risk(const Vector& theta, const MqpInstance& instance, const ThetaSpec& spec,
                      const WeightGrid& grid, const ObservationSet& obs) {
  return mean_loss(frontier_at(instance, spec, theta, grid), obs);
}

double prediction_error(const Vector& theta_hat, const MqpInstance& instance, const ThetaSpec& spec,
                        const WeightGrid& grid, const ObservationSet& validation) {
  return empirical_risk(theta_hat, instance, spec, grid, validation);
}

std::optional<double> ConstantsBundle::lipschitz_theta() const {
  if (!(lambda > 0.0)) return std::nullopt;
  return 4.0 * (B + R) * kappa / lambda;
}

std::optional<double> ConstantsBundle::log10_iteration_bound(double delta) const {
  if (!G || !R0 || !(delta > 0.0)) return std::nullopt;
  return (n_theta + N + 1) * std::log10(*G * *R0 / delta + 1.0);
}

ConstantsBundle compute_constants(const MqpInstance& instance, const ThetaSpec& spec, const ObservationSet& obs,
                                  const WroConfig& config, bool strict) {
  ConstantsBundle c;
  c.B = instance.B();
  c.R = obs.R();
  c.D = spec.D();
  c.kappa = 2.0 * c.R;
  c.lambda = instance.lambda();
  c.N = obs.size();
  c.n_theta = spec.n_theta();
  c.epsilon = config.epsilon;
  c.m = config.m;
  const VBounds vb = make_vbounds(c.B, c.R, config.m, config.epsilon);
  c.V1 = vb.V1;
  c.V2 = vb.V2;

  if (c.lambda > 0.0) {
    c.G = 1.0 + 2.0 * c.R + 4.0 * (c.B + c.R) * c.kappa / c.lambda;
  } else {
    if (strict) throw Error(ErrorCode::NotStronglyConvex, "lambda = 0: G and the theta-Lipschitz constant are undefined");
    c.notes.emplace_back("G omitted: lambda = 0 (some objective is not strongly convex)");
  }
  if (config.epsilon > 0.0) {
    const double vi = vb.v_i_max;
    c.R0 = std::sqrt(c.D * c.D + c.N * vi * vi + vb.v_last_max * vb.v_last_max);
  } else {
    c.notes.emplace_back("R0 omitted: epsilon = 0");
  }
  if (c.kappa > 0.0) {
    c.H = 96.0 * (3.0 * c.D * std::sqrt(static_cast<double>(c.n_theta)) / c.kappa + 2.0 * c.R) * (c.B + c.R);
  }
  return c;
}

}  // namespace wimop
