#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "wimop/loss.hpp"
#include "wimop/model.hpp"
#include "wimop/pareto.hpp"
#include "wimop/search.hpp"

namespace wimop {

struct ErmResult {
  Vector theta_hat;
  double objective = 0.0;
  /// Accepted iterates of the winning polish; objective non-increasing.
  std::vector<SearchPoint> trace;
  int restarts_used = 0;
  int evaluations = 0;
  bool stencil_converged = false;
};

/// Search settings shared by the ERM fit and the robust master problem.
MultiStartOptions theta_search_options(const ThetaSpec& spec, const WroConfig& config);

/// Non-robust estimator: minimize the empirical mean surrogate loss over the
/// theta box. Outer derivative-free search (grid scan + pattern-search polish),
/// inner exact weighted-sum QP solves.
ErmResult fit_erm(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                  const ObservationSet& obs, const WroConfig& config);

/// Single-level mixed-binary reformulation of the ERM problem (KKT conditions
/// of every weighted-sum problem, complementarity via binaries t_k, selection
/// via binaries z_{i,k} with big-M linearization). Emitted for external
/// solvers; never solved here.
nlohmann::json emit_kkt_formulation(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                                    const ObservationSet& obs);

/// Plain-text rendering of a formulation document.
std::string render_formulation_text(const nlohmann::json& doc);

}  // namespace wimop
