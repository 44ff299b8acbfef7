#include "wimop/pareto.hpp"

#include <cmath>
#include <random>

namespace wimop {

WeightGrid sample_weight_grid(int p, int K, bool interior_only, std::uint64_t seed) {
  if (p < 2) throw Error(ErrorCode::BadArity, "weight grids need p >= 2");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "weight grids need K >= 1");

  std::vector<Vector> raw;
  if (K == 1) {
    raw.push_back(Vector::Constant(p, 1.0 / p));
  } else if (p == 2) {
    for (int k = 0; k < K; ++k) {
      const double a = static_cast<double>(k) / (K - 1);
      Vector w(2);
      w << a, 1.0 - a;
      raw.push_back(w);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < K; ++k) {
      Vector e(p);
      // Stratify the first exponential draw so the sample spreads over the simplex.
      e(0) = -std::log(1.0 - (k + unif(rng)) / K);
      for (int l = 1; l < p; ++l) e(l) = -std::log(1.0 - unif(rng));
      raw.push_back(e / e.sum());
    }
  }

  WeightGrid grid;
  grid.interior_only = interior_only;
  for (Vector w : raw) {
    if (interior_only) w = (1.0 - p * kInteriorMargin) * w.array() + kInteriorMargin;
    w /= w.sum();
    grid.weights.emplace_back(w);
  }
  return grid;
}

NoiseModel NoiseModel::uniform(double half_width) {
  NoiseModel m;
  m.kind = Kind::Uniform;
  m.half_width = half_width;
  m.validate();
  return m;
}

NoiseModel NoiseModel::rounding(int places) {
  NoiseModel m;
  m.kind = Kind::Rounding;
  m.places = places;
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (kind == Kind::Uniform && !(half_width >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "uniform noise needs half_width >= 0");
  }
  if (kind == Kind::Rounding && places < 1) throw Error(ErrorCode::InvalidArgument, "rounding needs places >= 1");
}

GeneratedData generate_observations_detailed(const MqpInstance& instance, std::uint64_t seed, int N,
                                             const NoiseModel& noise, const QpOptions& qp) {
  noise.validate();
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "observation count must be >= 0");
  const int n = instance.n();
  const int p = instance.p();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Vector box_lo = instance.region_lower();
  Vector box_hi = instance.region_upper();
  double scale = 1.0;
  if (noise.kind == NoiseModel::Kind::Uniform) {
    box_lo.array() -= noise.half_width;
    box_hi.array() += noise.half_width;
  } else {
    scale = std::pow(10.0, noise.places);
    box_lo = (box_lo * scale).array().floor() / scale;
    box_hi = (box_hi * scale).array().ceil() / scale;
  }

  GeneratedData out;
  std::vector<Vector> points;
  QpWarmStart warm;
  for (int i = 0; i < N; ++i) {
    Vector w(p);
    if (p == 2) {
      w(0) = unif(rng);
      w(1) = 1.0 - w(0);
    } else {
      for (int l = 0; l < p; ++l) w(l) = -std::log(1.0 - unif(rng));
      w /= w.sum();
    }
    WeightVector wv(w);
    const QpSolution sol = solve_wp(instance, wv, qp, i == 0 ? nullptr : &warm);
    warm.x = sol.x;
    warm.active_set = sol.active_set;

    Vector y = sol.x;
    if (noise.kind == NoiseModel::Kind::Uniform) {
      for (int j = 0; j < n; ++j) y(j) += noise.half_width * (2.0 * unif(rng) - 1.0);
    } else {
      y = (y * scale).array().round() / scale;
    }
    y = y.cwiseMax(box_lo).cwiseMin(box_hi);
    out.weights.push_back(std::move(wv));
    out.clean.push_back(sol.x);
    points.push_back(std::move(y));
  }
  out.observations = ObservationSet(std::move(points), box_lo, box_hi);
  return out;
}

ObservationSet generate_observations(const MqpInstance& instance, std::uint64_t seed, int N,
                                     const NoiseModel& noise, const QpOptions& qp) {
  return generate_observations_detailed(instance, seed, N, noise, qp).observations;
}

std::vector<QpSolution> frontier_table(const MqpInstance& instance, int points) {
  if (instance.p() != 2) throw Error(ErrorCode::BadArity, "frontier tables are defined for p = 2");
  const WeightGrid grid = sample_weight_grid(2, points, !instance.strongly_convex());
  return solve_frontier(instance, grid.weights);
}

}  // namespace wimop
