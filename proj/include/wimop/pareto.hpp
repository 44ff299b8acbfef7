#pragma once

#include <cstdint>
#include <vector>

#include "wimop/model.hpp"
#include "wimop/qp.hpp"

namespace wimop {

/// Margin used to pull weights into the interior of the simplex.
inline constexpr double kInteriorMargin = 1e-3;

struct WeightGrid {
  std::vector<WeightVector> weights;
  bool interior_only = false;

  int size() const { return static_cast<int>(weights.size()); }
};

/// For p = 2: w_k = ((k-1)/(K-1), 1 - (k-1)/(K-1)). For p > 2: stratified
/// Dirichlet(1,...,1) draws from `seed`. With interior_only every weight is
/// mapped to (1 - p*margin) w + margin, which keeps the sum at one. K = 1
/// yields the barycenter.
WeightGrid sample_weight_grid(int p, int K, bool interior_only, std::uint64_t seed = 0);

struct NoiseModel {
  enum class Kind { Uniform, Rounding };
  Kind kind = Kind::Uniform;
  /// Uniform noise on [-half_width, half_width] per coordinate.
  double half_width = 0.25;
  /// Rounding to this many decimal places.
  int places = 3;

  static NoiseModel uniform(double half_width);
  static NoiseModel rounding(int places);
  void validate() const;
};

/// Observations along with the weights and noiseless decisions behind them.
struct GeneratedData {
  ObservationSet observations;
  std::vector<WeightVector> weights;
  std::vector<Vector> clean;
};

/// Each observation is the weighted-sum solution at a uniformly random simplex
/// weight, perturbed by `noise`. Uniform noise uses the feasible bounding box
/// inflated by half_width as support; rounding uses the bounding box itself
/// (outward-rounded to the grid of the rounding).
GeneratedData generate_observations_detailed(const MqpInstance& instance, std::uint64_t seed, int N,
                                             const NoiseModel& noise, const QpOptions& qp = {});

ObservationSet generate_observations(const MqpInstance& instance, std::uint64_t seed, int N,
                                     const NoiseModel& noise, const QpOptions& qp = {});

/// Weighted-sum solutions on an evenly spaced two-objective grid of
/// `points` weights, used for frontier tables. Endpoints are pulled into the
/// interior when the instance is not strongly convex.
std::vector<QpSolution> frontier_table(const MqpInstance& instance, int points);

}  // namespace wimop
