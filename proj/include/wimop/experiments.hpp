#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "wimop/erm.hpp"
#include "wimop/loss.hpp"
#include "wimop/wro.hpp"

namespace wimop {

struct RunConfig {
  std::string experiment = "synthetic";
  std::vector<int> n_list{10, 15, 20};
  int repetitions = 10;
  std::vector<double> radii{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  double delta = 0.1;
  int K = 6;
  int m = 1;
  int max_iterations = 100;
  int grid_resolution = 41;
  int restarts = 4;
  std::uint64_t seed = 1;
  CutPolicy cut_policy = CutPolicy::AllViolated;
  double cut_threshold = 0.0;
  int validation_size = 10000;
  /// Synthetic experiment: uniform noise half width.
  double noise_half_width = 0.25;
  /// Portfolio experiment: decimal places of the rounding noise.
  int rounding_places = 3;
  /// Portfolio experiment: number of leading expected returns to learn.
  int learnable = 4;
  /// Output directory; empty means no files are written.
  std::string out_dir;
  int jobs = 1;

  static RunConfig synthetic_defaults();
  static RunConfig portfolio_defaults();

  void validate() const;
  WroConfig wro_config(double epsilon) const;
  nlohmann::json to_json() const;
  /// Overlays the fields present in `j` onto `base`.
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);
};

struct RepetitionRecord {
  int N = 0;
  int repetition = 0;
  std::uint64_t seed = 0;
  Vector theta_erm;
  Vector theta_wro;
  double chosen_epsilon = 0.0;
  double error_erm = 0.0;
  double error_wro = 0.0;
  double objective_erm = 0.0;
  double objective_wro = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<RadiusRow> sweep;
  std::vector<IterationRecord> history;
};

struct Aggregate {
  int N = 0;
  /// 0 = ERM, 1 = WRO.
  int method = 0;
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct EstimatorReport {
  std::string experiment;
  RunConfig config;
  std::vector<RepetitionRecord> records;
  std::vector<Aggregate> aggregates;
  ConstantsBundle constants;
  /// Portfolio only: decision-space frontier tables, one column per weight.
  Matrix frontier_true;
  Matrix frontier_erm;
  Matrix frontier_wro;
  /// Portfolio only: mean over true frontier points of the squared distance to
  /// the nearest estimated point.
  double frontier_distance_erm = 0.0;
  double frontier_distance_wro = 0.0;
  Vector r_true;
  Vector r_erm;
  Vector r_wro;

  nlohmann::json to_json() const;
};

/// Mean and sample standard deviation per (N, method), recomputed from records.
std::vector<Aggregate> aggregate_records(const std::vector<RepetitionRecord>& records);

/// Seed of repetition r at sample size N.
std::uint64_t repetition_seed(std::uint64_t base, int N, int r);

/// Mean over the points (columns) of `reference` of the squared distance to the nearest
/// column of `estimate`.
double frontier_distance(const Matrix& reference, const Matrix& estimate);

/// Decision-space frontier at theta on `points` evenly spaced weights.
Matrix frontier_points(const MqpInstance& instance, const ThetaSpec& spec, const Vector& theta, int points);

EstimatorReport cmd_run_synthetic(const RunConfig& config);
EstimatorReport cmd_run_portfolio(const RunConfig& config);

/// Writes <out>/{report.json, error_vs_n.csv, convergence_<run>.csv,
/// constants.csv} and, for the portfolio, frontier_{true,erm,wro}.csv.
std::vector<std::string> write_report(const EstimatorReport& report, const std::string& out_dir);

/// Writes <name>_instance.json, <name>_constants.csv and the KKT formulation
/// as <name>_kkt.json (format "json") or <name>_kkt.txt (format "text").
/// Unknown names raise UnknownInstance.
std::vector<std::string> cmd_export(const std::string& name, const std::string& format, const std::string& out_dir);

}  // namespace wimop
