#include "wimop/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <future>
#include <map>

#include "wimop/io.hpp"

namespace wimop {

RunConfig RunConfig::synthetic_defaults() { return RunConfig{}; }

RunConfig RunConfig::portfolio_defaults() {
  RunConfig c;
  c.experiment = "portfolio";
  c.n_list = {20};
  c.repetitions = 1;
  return c;
}

void RunConfig::validate() const {
  if (experiment != "synthetic" && experiment != "portfolio") {
    throw Error(ErrorCode::InvalidArgument, "experiment must be synthetic or portfolio");
  }
  if (n_list.empty()) throw Error(ErrorCode::InvalidArgument, "N list is empty");
  for (int n : n_list) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "every N must be >= 1");
  }
  if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 1");
  if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "radius list is empty");
  for (double r : radii) wro_config(r).validate();
  if (validation_size < 1) throw Error(ErrorCode::InvalidArgument, "validation size must be >= 1");
  if (!(noise_half_width >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise half width must be >= 0");
  if (rounding_places < 1) throw Error(ErrorCode::InvalidArgument, "rounding places must be >= 1");
  if (learnable < 0 || learnable > 4) throw Error(ErrorCode::InvalidArgument, "learnable must be in [0, 4]");
  if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
}

WroConfig RunConfig::wro_config(double epsilon) const {
  WroConfig w;
  w.epsilon = epsilon;
  w.delta = delta;
  w.K = K;
  w.m = m;
  w.max_iterations = max_iterations;
  w.grid_resolution = grid_resolution;
  w.restarts = restarts;
  w.seed = seed;
  w.cut_policy = cut_policy;
  w.cut_threshold = cut_threshold;
  return w;
}

nlohmann::json RunConfig::to_json() const {
  return {{"experiment", experiment},
          {"n_list", n_list},
          {"repetitions", repetitions},
          {"radii", radii},
          {"delta", delta},
          {"K", K},
          {"m", m},
          {"max_iterations", max_iterations},
          {"grid_resolution", grid_resolution},
          {"restarts", restarts},
          {"seed", seed},
          {"cut_policy", to_string(cut_policy)},
          {"cut_threshold", cut_threshold},
          {"validation_size", validation_size},
          {"noise_half_width", noise_half_width},
          {"rounding_places", rounding_places},
          {"learnable", learnable},
          {"jobs", jobs}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j, RunConfig c) {
  c.experiment = j.value("experiment", c.experiment);
  c.n_list = j.value("n_list", c.n_list);
  c.repetitions = j.value("repetitions", c.repetitions);
  c.radii = j.value("radii", c.radii);
  c.delta = j.value("delta", c.delta);
  c.K = j.value("K", c.K);
  c.m = j.value("m", c.m);
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
  c.restarts = j.value("restarts", c.restarts);
  c.seed = j.value("seed", c.seed);
  if (j.contains("cut_policy")) c.cut_policy = cut_policy_from_string(j.at("cut_policy").get<std::string>());
  c.cut_threshold = j.value("cut_threshold", c.cut_threshold);
  c.validation_size = j.value("validation_size", c.validation_size);
  c.noise_half_width = j.value("noise_half_width", c.noise_half_width);
  c.rounding_places = j.value("rounding_places", c.rounding_places);
  c.learnable = j.value("learnable", c.learnable);
  c.out_dir = j.value("out", c.out_dir);
  c.jobs = j.value("jobs", c.jobs);
  return c;
}

std::uint64_t repetition_seed(std::uint64_t base, int N, int r) {
  return base * 1000003ULL + static_cast<std::uint64_t>(N) * 1009ULL + static_cast<std::uint64_t>(r);
}

std::vector<Aggregate> aggregate_records(const std::vector<RepetitionRecord>& records) {
  std::map<std::pair<int, int>, std::vector<double>> groups;
  for (const RepetitionRecord& r : records) {
    groups[{r.N, 0}].push_back(r.error_erm);
    groups[{r.N, 1}].push_back(r.error_wro);
  }
  std::vector<Aggregate> out;
  for (const auto& [key, vals] : groups) {
    Aggregate a;
    a.N = key.first;
    a.method = key.second;
    a.count = static_cast<int>(vals.size());
    double sum = 0.0;
    for (double v : vals) sum += v;
    a.mean = sum / a.count;
    double ss = 0.0;
    for (double v : vals) ss += (v - a.mean) * (v - a.mean);
    a.stddev = a.count > 1 ? std::sqrt(ss / (a.count - 1)) : 0.0;
    out.push_back(a);
  }
  return out;
}

double frontier_distance(const Matrix& reference, const Matrix& estimate) {
  if (reference.cols() == 0 || estimate.cols() == 0) throw Error(ErrorCode::EmptyFrontier, "frontier distance needs points");
  const Frontier est(estimate);
  double total = 0.0;
  for (Eigen::Index k = 0; k < reference.cols(); ++k) total += est.min_sq_distance(reference.col(k));
  return total / static_cast<double>(reference.cols());
}

Matrix frontier_points(const MqpInstance& instance, const ThetaSpec& spec, const Vector& theta, int points) {
  const MqpInstance applied = spec.n_theta() > 0 ? apply_theta(instance, spec, theta) : instance;
  return Frontier::from_solutions(frontier_table(applied, points)).points();
}

namespace {

template <class Task>
std::vector<RepetitionRecord> run_jobs(const std::vector<Task>& tasks, int jobs) {
  std::vector<RepetitionRecord> out(tasks.size());
  for (size_t start = 0; start < tasks.size(); start += static_cast<size_t>(jobs)) {
    std::vector<std::future<RepetitionRecord>> batch;
    const size_t end = std::min(tasks.size(), start + static_cast<size_t>(jobs));
    for (size_t t = start; t < end; ++t) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, tasks[t]));
    }
    for (size_t t = start; t < end; ++t) out[t] = batch[t - start].get();
  }
  return out;
}

RepetitionRecord fit_both(const MqpInstance& instance, const ThetaSpec& spec, const WeightGrid& grid,
                          const ObservationSet& obs, const ObservationSet& validation, const RunConfig& config) {
  RepetitionRecord rec;
  rec.N = obs.size();
  const ErmResult erm = fit_erm(instance, spec, grid, obs, config.wro_config(config.radii.front()));
  rec.theta_erm = erm.theta_hat;
  rec.objective_erm = erm.objective;
  rec.error_erm = prediction_error(erm.theta_hat, instance, spec, grid, validation);

  const RadiusSelection sel =
      select_radius(instance, spec, grid, obs, config.radii, validation, config.wro_config(config.radii.front()));
  const WroResult& best = sel.fits[static_cast<size_t>(sel.best_index)];
  rec.theta_wro = best.theta_hat;
  rec.chosen_epsilon = sel.best_epsilon;
  rec.error_wro = sel.rows[static_cast<size_t>(sel.best_index)].prediction_error;
  rec.objective_wro = best.objective;
  rec.iterations = best.iterations;
  rec.converged = best.converged;
  rec.sweep = sel.rows;
  rec.history = best.state.history;
  return rec;
}

ThetaSpec portfolio_spec_with(int learnable) {
  const ThetaSpec full = portfolio_theta_spec();
  std::vector<ThetaEntry> layout(full.layout().begin(), full.layout().begin() + learnable);
  return ThetaSpec(std::move(layout), full.lower().head(learnable), full.upper().head(learnable));
}

// Full expected-return vector with the learnable entries replaced.
Vector returns_with(const Vector& r_true, const Vector& theta) {
  Vector r = r_true;
  r.head(theta.size()) = theta;
  return r;
}

}  // namespace

EstimatorReport cmd_run_synthetic(const RunConfig& config) {
  config.validate();
  const MqpInstance instance = build_synthetic_instance();
  const ThetaSpec spec = synthetic_theta_spec();
  const WeightGrid grid = sample_weight_grid(instance.p(), config.K, !instance.strongly_convex(), config.seed);
  const NoiseModel noise = NoiseModel::uniform(config.noise_half_width);

  std::vector<std::function<RepetitionRecord()>> tasks;
  for (int N : config.n_list) {
    for (int r = 0; r < config.repetitions; ++r) {
      tasks.push_back([&, N, r] {
        const std::uint64_t s = repetition_seed(config.seed, N, r);
        const ObservationSet obs = generate_observations(instance, s, N, noise);
        const ObservationSet val = generate_observations(instance, s ^ 0x5bd1e995ULL, config.validation_size, noise);
        RepetitionRecord rec = fit_both(instance, spec, grid, obs, val, config);
        rec.repetition = r;
        rec.seed = s;
        return rec;
      });
    }
  }

  EstimatorReport report;
  report.experiment = "synthetic";
  report.config = config;
  report.records = run_jobs(tasks, config.jobs);
  report.aggregates = aggregate_records(report.records);
  const RepetitionRecord& first = report.records.front();
  const ObservationSet obs0 = generate_observations(instance, first.seed, first.N, noise);
  report.constants = compute_constants(instance, spec, obs0, config.wro_config(first.chosen_epsilon));
  return report;
}

EstimatorReport cmd_run_portfolio(const RunConfig& config) {
  config.validate();
  const MqpInstance instance = build_portfolio_instance();
  const ThetaSpec spec = portfolio_spec_with(config.learnable);
  const WeightGrid grid = sample_weight_grid(instance.p(), config.K, !instance.strongly_convex(), config.seed);
  const NoiseModel noise = NoiseModel::rounding(config.rounding_places);
  constexpr int kFrontierPoints = 50;

  EstimatorReport report;
  report.experiment = "portfolio";
  report.config = config;
  report.r_true = portfolio_expected_return();

  for (int N : config.n_list) {
    for (int r = 0; r < config.repetitions; ++r) {
      const std::uint64_t s = repetition_seed(config.seed, N, r);
      const ObservationSet obs = generate_observations(instance, s, N, noise);
      RepetitionRecord rec;
      if (spec.n_theta() == 0) {
        rec.N = N;
        rec.theta_erm = rec.theta_wro = Vector(0);
        rec.converged = true;
        const ObservationSet val = generate_observations(instance, s ^ 0x5bd1e995ULL, config.validation_size, noise);
        rec.error_erm = rec.error_wro = prediction_error(Vector(0), instance, spec, grid, val);
        rec.chosen_epsilon = config.radii.front();
      } else {
        const ObservationSet val = generate_observations(instance, s ^ 0x5bd1e995ULL, config.validation_size, noise);
        rec = fit_both(instance, spec, grid, obs, val, config);
      }
      rec.repetition = r;
      rec.seed = s;
      report.records.push_back(std::move(rec));
      if (report.records.size() == 1) {
        report.constants = compute_constants(instance, spec, obs, config.wro_config(report.records.front().chosen_epsilon));
      }
    }
  }
  report.aggregates = aggregate_records(report.records);

  const RepetitionRecord& first = report.records.front();
  report.r_erm = returns_with(report.r_true, first.theta_erm);
  report.r_wro = returns_with(report.r_true, first.theta_wro);
  report.frontier_true = frontier_points(instance, spec, spec.extract(instance), kFrontierPoints);
  report.frontier_erm = frontier_points(instance, spec, first.theta_erm, kFrontierPoints);
  report.frontier_wro = frontier_points(instance, spec, first.theta_wro, kFrontierPoints);
  report.frontier_distance_erm = frontier_distance(report.frontier_true, report.frontier_erm);
  report.frontier_distance_wro = frontier_distance(report.frontier_true, report.frontier_wro);
  return report;
}

nlohmann::json EstimatorReport::to_json() const {
  using nlohmann::json;
  json recs = json::array();
  for (const RepetitionRecord& r : records) {
    json sweep = json::array();
    for (const RadiusRow& row : r.sweep) {
      sweep.push_back({{"epsilon", row.epsilon},
                       {"prediction_error", row.prediction_error},
                       {"objective", row.objective},
                       {"iterations", row.iterations},
                       {"converged", row.converged}});
    }
    recs.push_back({{"N", r.N},
                    {"repetition", r.repetition},
                    {"seed", r.seed},
                    {"theta_erm", vector_to_json(r.theta_erm)},
                    {"theta_wro", vector_to_json(r.theta_wro)},
                    {"chosen_epsilon", r.chosen_epsilon},
                    {"error_erm", r.error_erm},
                    {"error_wro", r.error_wro},
                    {"objective_erm", r.objective_erm},
                    {"objective_wro", r.objective_wro},
                    {"iterations", r.iterations},
                    {"converged", r.converged},
                    {"radius_sweep", sweep}});
  }
  json aggs = json::array();
  for (const Aggregate& a : aggregates) {
    aggs.push_back({{"N", a.N}, {"method", a.method == 0 ? "erm" : "wro"}, {"count", a.count}, {"mean", a.mean},
                    {"stddev", a.stddev}});
  }
  json j = {{"experiment", experiment},
            {"config", config.to_json()},
            {"prediction_error_metric", "mean surrogate loss on the validation set with the training weight grid"},
            {"records", recs},
            {"aggregates", aggs},
            {"constants", constants_to_json(constants)}};
  if (experiment == "portfolio") {
    j["r_true"] = vector_to_json(r_true);
    j["r_erm"] = vector_to_json(r_erm);
    j["r_wro"] = vector_to_json(r_wro);
    j["frontier_distance_erm"] = frontier_distance_erm;
    j["frontier_distance_wro"] = frontier_distance_wro;
  }
  return j;
}

std::vector<std::string> write_report(const EstimatorReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());
  std::vector<std::string> written;
  const auto put = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(out_dir) / name).string();
    write_text_file(path, content);
    written.push_back(path);
  };

  put("report.json", report.to_json().dump(2) + "\n");
  std::vector<std::vector<double>> rows;
  for (const Aggregate& a : report.aggregates) {
    rows.push_back({static_cast<double>(a.N), static_cast<double>(a.method), a.mean, a.stddev, static_cast<double>(a.count)});
  }
  put("error_vs_n.csv", csv_table({"N", "method", "mean_error", "stddev_error", "count"}, rows));
  for (const RepetitionRecord& r : report.records) {
    put("convergence_N" + std::to_string(r.N) + "_rep" + std::to_string(r.repetition) + ".csv", convergence_csv(r.history));
  }
  put("constants.csv", constants_csv(report.constants));
  if (report.experiment == "portfolio") {
    put("frontier_true.csv", frontier_csv(report.frontier_true));
    put("frontier_erm.csv", frontier_csv(report.frontier_erm));
    put("frontier_wro.csv", frontier_csv(report.frontier_wro));
  }
  return written;
}

std::vector<std::string> cmd_export(const std::string& name, const std::string& format, const std::string& out_dir) {
  if (format != "json" && format != "text") throw Error(ErrorCode::InvalidArgument, "format must be json or text");
  MqpInstance instance = [&] {
    if (name == "synthetic") return build_synthetic_instance();
    if (name == "portfolio") return build_portfolio_instance();
    throw Error(ErrorCode::UnknownInstance, "unknown instance '" + name + "' (expected synthetic or portfolio)");
  }();
  const bool synthetic = name == "synthetic";
  const ThetaSpec spec = synthetic ? synthetic_theta_spec() : portfolio_theta_spec();
  const RunConfig defaults = synthetic ? RunConfig::synthetic_defaults() : RunConfig::portfolio_defaults();
  const int N = synthetic ? 15 : 20;
  const NoiseModel noise = synthetic ? NoiseModel::uniform(defaults.noise_half_width)
                                     : NoiseModel::rounding(defaults.rounding_places);
  const ObservationSet obs = generate_observations(instance, defaults.seed, N, noise);
  const WeightGrid grid = sample_weight_grid(instance.p(), defaults.K, !instance.strongly_convex(), defaults.seed);
  const WroConfig wc = defaults.wro_config(0.01);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());
  std::vector<std::string> written;
  const auto put = [&](const std::string& file, const std::string& content) {
    const std::string path = (fs::path(out_dir) / (name + file)).string();
    write_text_file(path, content);
    written.push_back(path);
  };
  put("_instance.json", instance_to_json(instance, &spec).dump(2) + "\n");
  const nlohmann::json kkt = emit_kkt_formulation(instance, spec, grid, obs);
  if (format == "json") {
    put("_kkt.json", kkt.dump(2) + "\n");
  } else {
    put("_kkt.txt", render_formulation_text(kkt));
  }
  put("_constants.csv", constants_csv(compute_constants(instance, spec, obs, wc)));
  return written;
}

}  // namespace wimop
