#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "wimop/model.hpp"

namespace wimop {

using Objective1 = std::function<double(const Vector&)>;

/// Compass search on a box. Steps are measured in box-normalized units, so a
/// step of 0.25 moves a quarter of each coordinate's range. The poll set is
/// +/- each axis plus `random_directions` pairs of random unit directions
/// redrawn at every poll, which lets the search follow ridges that are not
/// axis-aligned.
struct PatternSearchOptions {
  double initial_step = 0.25;
  double min_step = 1e-4;
  int max_evaluations = 400;
  /// Double the step after a successful poll (capped at initial_step).
  bool expand_on_success = false;
  int random_directions = 0;
  std::uint64_t seed = 0;
};

struct SearchPoint {
  Vector x;
  double value = 0.0;
};

struct PatternSearchResult {
  Vector x;
  double value = 0.0;
  int evaluations = 0;
  /// True when the final poll at min_step found no improvement.
  bool stencil_converged = false;
  /// Accepted iterates, starting with the start point.
  std::vector<SearchPoint> trace;
};

/// Minimizes f from `start` (clamped into [lo, hi]). `start_value`, when
/// finite, is used instead of re-evaluating f at the start.
PatternSearchResult pattern_search(const Objective1& f, const Vector& lo, const Vector& hi, const Vector& start,
                                   const PatternSearchOptions& options,
                                   double start_value = std::numeric_limits<double>::quiet_NaN());

/// Latin-hypercube sample of `count` points in [lo, hi].
std::vector<Vector> stratified_points(const Vector& lo, const Vector& hi, int count, std::mt19937_64& rng);

/// Tensor grid with `per_axis` points per coordinate (endpoints included).
std::vector<Vector> grid_points(const Vector& lo, const Vector& hi, int per_axis);

struct MultiStartOptions {
  /// Budget for the initial scan; a full grid is used when it fits.
  int scan_budget = 441;
  /// Number of scan points (plus extra starts) that get polished.
  int restarts = 4;
  PatternSearchOptions polish;
  std::uint64_t seed = 1;
};

struct MultiStartResult {
  Vector x;
  double value = 0.0;
  int evaluations = 0;
  int restarts_used = 0;
  bool stencil_converged = false;
  /// Trace of the winning polish.
  std::vector<SearchPoint> trace;
};

/// Scan, then polish the best distinct scan points and every extra start.
/// Ties go to the lowest restart index; extra starts come first.
MultiStartResult multistart_minimize(const Objective1& f, const Vector& lo, const Vector& hi,
                                     const std::vector<Vector>& extra_starts, const MultiStartOptions& options);

}  // namespace wimop
