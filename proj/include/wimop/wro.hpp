#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wimop/erm.hpp"
#include "wimop/loss.hpp"
#include "wimop/model.hpp"
#include "wimop/pareto.hpp"

namespace wimop {

/// Witness points per observation.
using CutSets = std::vector<std::vector<Vector>>;

/// One affine piece L - t*d of an observation's constraint family.
struct CutLine {
  double loss = 0.0;
  double distance = 0.0;
};

struct InnerVSolution {
  /// v_1..v_N followed by the transport multiplier v_{N+1}.
  Vector v;
  double objective = 0.0;
};

/// Exact minimizer over the V box of eps*t + (1/N) sum_i v_i subject to
/// v_i >= L_ij - t*d_ij for every cut. For fixed t each v_i is the upper
/// envelope of its lines and the zero line, so the objective is convex
/// piecewise linear in t; the minimizer is found by sweeping the envelope
/// breakpoints until the right derivative turns nonnegative.
InnerVSolution inner_v_solve(const std::vector<std::vector<CutLine>>& lines, const VBounds& bounds, double epsilon);

/// Same, with the lines built from a frontier and the cut sets.
InnerVSolution inner_v_solve(const Frontier& frontier, const CutSets& cuts, const ObservationSet& obs,
                             const VBounds& bounds, double epsilon);

struct MasterSolution {
  Vector theta;
  Vector v;
  double objective = 0.0;
  int evaluations = 0;
  bool stencil_converged = false;
};

/// Multistart pattern search over theta with inner_v_solve as the exact
/// inner evaluation. `extra_starts` are polished in addition to the scan.
MasterSolution solve_master(const CutSets& cuts, const MqpInstance& instance, const ThetaSpec& spec,
                            const WeightGrid& grid, const ObservationSet& obs, const WroConfig& config,
                            const VBounds& bounds, const std::vector<Vector>& extra_starts = {});

struct Violation {
  double cv = 0.0;
  Vector witness;
  int evaluations = 0;
};

/// max over the box of min_k ||y - x_k||^2 - t*||y - y_i|| - v_i, by a coarse
/// scan followed by local polish from the best scan points, from y_i, and from
/// the corner farthest from each x_k.
Violation max_violation(const Frontier& frontier, const Vector& y_i, double t, double v_i, const Vector& box_lo,
                        const Vector& box_hi, const WroConfig& config, std::uint64_t seed);

struct IterationRecord {
  int iteration = 0;
  double master_objective = 0.0;
  double max_cv = 0.0;
  int cuts_added = 0;
  Vector theta;
};

struct CuttingPlaneState {
  CutSets cut_sets;
  Vector incumbent_theta;
  Vector incumbent_v;
  Vector cv;
  int iteration = 0;
  std::vector<IterationRecord> history;
};

struct WroResult {
  Vector theta_hat;
  Vector v_hat;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Set when witnesses kept landing on existing cuts.
  bool stagnated = false;
  /// Set when epsilon == 0 and the fit was handed to the ERM estimator.
  bool delegated_to_erm = false;
  std::string note;
  CuttingPlaneState state;
};

/// Cutting-plane loop: master, one violation subproblem per observation, cut
/// appending, until max CV <= delta or max_iterations.
WroResult fit_wro(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                  const ObservationSet& obs, const WroConfig& config);

struct WorstCaseValue {
  double objective = 0.0;
  Vector v;
  double max_cv = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Worst-case expected loss over the ball at a fixed theta, by the same cut
/// loop with the master reduced to inner_v_solve.
WorstCaseValue worst_case_objective(const Vector& theta, const MqpInstance& instance, const ThetaSpec& spec,
                                    const WeightGrid& grid, const ObservationSet& obs, const WroConfig& config);

struct RadiusRow {
  double epsilon = 0.0;
  double prediction_error = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct RadiusSelection {
  double best_epsilon = 0.0;
  int best_index = 0;
  std::vector<RadiusRow> rows;
  std::vector<WroResult> fits;
};

/// One fit per radius, scored by prediction error on `validation`; ties go to
/// the smaller radius.
RadiusSelection select_radius(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                              const ObservationSet& obs, const std::vector<double>& radii,
                              const ObservationSet& validation, const WroConfig& config);

}  // namespace wimop
