// Command-line driver for the synthetic and portfolio experiments and for
// exporting the built-in instances.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wimop/experiments.hpp"
#include "wimop/io.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

int exit_code_for(wimop::ErrorCode code) {
  switch (code) {
    case wimop::ErrorCode::InvalidArgument:
    case wimop::ErrorCode::UnknownInstance:
    case wimop::ErrorCode::DimensionMismatch:
    case wimop::ErrorCode::OutOfBounds:
    case wimop::ErrorCode::BadArity:
    case wimop::ErrorCode::NoObservations:
    case wimop::ErrorCode::Io:
      return kExitUsage;
    default:
      return kExitNumerical;
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw wimop::Error(wimop::ErrorCode::InvalidArgument, "bad number '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

void print_summary(const wimop::EstimatorReport& report) {
  std::printf("%-6s %-6s %-6s %-16s %-16s\n", "N", "method", "count", "mean_error", "stddev");
  for (const wimop::Aggregate& a : report.aggregates) {
    std::printf("%-6d %-6s %-6d %-16.8g %-16.8g\n", a.N, a.method == 0 ? "erm" : "wro", a.count, a.mean, a.stddev);
  }
  if (report.experiment == "portfolio") {
    std::printf("frontier distance: erm %.8g, wro %.8g\n", report.frontier_distance_erm, report.frontier_distance_wro);
    std::printf("r true: %s\n", wimop::vector_to_json(report.r_true).dump().c_str());
    std::printf("r erm:  %s\n", wimop::vector_to_json(report.r_erm).dump().c_str());
    std::printf("r wro:  %s\n", wimop::vector_to_json(report.r_wro).dump().c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein distributionally robust inverse multiobjective QP estimation"};
  app.require_subcommand(1);

  std::string experiment = "synthetic";
  std::string config_path;
  std::string n_text;
  std::string eps_text;
  int reps = -1;
  double delta = -1.0;
  int K = -1;
  long long seed = -1;
  std::string out_dir = "out";
  std::string cut_policy;
  int validation_size = -1;
  int jobs = 1;
  double half_width = -1.0;
  int learnable = -1;
  int max_iterations = -1;

  CLI::App* run = app.add_subcommand("run", "Run an experiment and write its report");
  run->add_option("--experiment", experiment, "synthetic or portfolio")->check(CLI::IsMember({"synthetic", "portfolio"}));
  run->add_option("--config", config_path, "JSON config file; flags override its fields");
  run->add_option("--n", n_text, "Comma-separated sample sizes");
  run->add_option("--reps", reps, "Repetitions per sample size")->check(CLI::PositiveNumber);
  run->add_option("--epsilon-list", eps_text, "Comma-separated radii");
  run->add_option("--delta", delta, "Stopping tolerance on the max constraint violation");
  run->add_option("--k", K, "Weight grid size")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Base seed")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--cut-policy", cut_policy, "all or max")->check(CLI::IsMember({"all", "max"}));
  run->add_option("--validation-size", validation_size, "Validation observations")->check(CLI::PositiveNumber);
  run->add_option("--max-iterations", max_iterations, "Cutting-plane iteration cap")->check(CLI::PositiveNumber);
  run->add_option("--half-width", half_width, "Uniform noise half width (synthetic)");
  run->add_option("--learnable", learnable, "Learnable expected returns (portfolio)")->check(CLI::Range(0, 4));
  run->add_option("--jobs", jobs, "Concurrent repetitions")->check(CLI::PositiveNumber);

  std::string export_name;
  std::string export_format = "json";
  std::string export_out = "out";
  CLI::App* exp = app.add_subcommand("export", "Export a built-in instance, its KKT formulation and constants");
  exp->add_option("name", export_name, "synthetic or portfolio")->required();
  exp->add_option("--format", export_format, "json or text")->check(CLI::IsMember({"json", "text"}));
  exp->add_option("--out", export_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*exp) {
      for (const std::string& path : wimop::cmd_export(export_name, export_format, export_out)) std::cout << path << "\n";
      return 0;
    }

    wimop::RunConfig cfg =
        experiment == "portfolio" ? wimop::RunConfig::portfolio_defaults() : wimop::RunConfig::synthetic_defaults();
    if (!config_path.empty()) {
      const auto j = nlohmann::json::parse(wimop::read_text_file(config_path));
      const std::string name = j.value("experiment", experiment);
      cfg = wimop::RunConfig::from_json(
          j, name == "portfolio" ? wimop::RunConfig::portfolio_defaults() : wimop::RunConfig::synthetic_defaults());
    }
    if (run->count("--experiment")) cfg.experiment = experiment;
    if (!n_text.empty()) {
      cfg.n_list.clear();
      for (double v : parse_list(n_text)) cfg.n_list.push_back(static_cast<int>(v));
    }
    if (reps > 0) cfg.repetitions = reps;
    if (!eps_text.empty()) cfg.radii = parse_list(eps_text);
    if (run->count("--delta")) cfg.delta = delta;
    if (K > 0) cfg.K = K;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!cut_policy.empty()) cfg.cut_policy = wimop::cut_policy_from_string(cut_policy);
    if (validation_size > 0) cfg.validation_size = validation_size;
    if (max_iterations > 0) cfg.max_iterations = max_iterations;
    if (run->count("--half-width")) cfg.noise_half_width = half_width;
    if (learnable >= 0) cfg.learnable = learnable;
    if (run->count("--out") || cfg.out_dir.empty()) cfg.out_dir = out_dir;
    cfg.jobs = jobs;
    cfg.validate();

    const wimop::EstimatorReport report =
        cfg.experiment == "portfolio" ? wimop::cmd_run_portfolio(cfg) : wimop::cmd_run_synthetic(cfg);
    print_summary(report);
    for (const std::string& path : wimop::write_report(report, cfg.out_dir)) std::cout << path << "\n";
    return 0;
  } catch (const wimop::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [config]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error [usage]: " << e.what() << "\n";
    return kExitUsage;
  }
}
