#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "wimop/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(WIMOP_CLI_PATH) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) o.output += buf;
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wimop_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("export writes the instance, formulation and constants") {
  const fs::path dir = scratch("export");
  const Outcome port = run("export portfolio --out " + dir.string());
  CHECK(port.code == 0);
  const std::string inst = wimop::read_text_file((dir / "portfolio_instance.json").string());
  CHECK(inst.find("0.1791") != std::string::npos);
  CHECK(fs::exists(dir / "portfolio_kkt.json"));
  CHECK(fs::exists(dir / "portfolio_constants.csv"));

  const Outcome syn = run("export synthetic --format text --out " + dir.string());
  CHECK(syn.code == 0);
  const auto j = nlohmann::json::parse(wimop::read_text_file((dir / "synthetic_instance.json").string()));
  CHECK(j.at("b") == nlohmann::json::array({3.0, 3.0}));
  CHECK(wimop::read_text_file((dir / "synthetic_kkt.txt").string()).find("linearization blocks") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("export bogus --out " + scratch("bogus").string()).code == 1);
  CHECK(run("run --no-such-flag").code == 1);
  CHECK(run("").code == 1);
  CHECK(run("run --experiment synthetic --delta -1 --out " + scratch("neg").string()).code == 1);
  CHECK(run("run --config /nonexistent/config.json").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("small synthetic run is reproducible") {
  const fs::path a = scratch("run_a");
  const fs::path b = scratch("run_b");
  const std::string args =
      "run --experiment synthetic --n 4 --reps 2 --epsilon-list 0.01,0.1 --validation-size 200 --seed 3 --out ";
  const Outcome ra = run(args + a.string());
  REQUIRE(ra.code == 0);
  const Outcome rb = run(args + b.string());
  REQUIRE(rb.code == 0);
  const fs::path c = scratch("run_c");
  const Outcome rc = run(args + c.string() + " --jobs 2");
  REQUIRE(rc.code == 0);
  for (const char* f : {"report.json", "error_vs_n.csv", "constants.csv", "convergence_N4_rep0.csv",
                        "convergence_N4_rep1.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(wimop::read_text_file((a / f).string()) == wimop::read_text_file((b / f).string()));
    // Concurrency changes only the recorded job count.
    if (std::string(f) != "report.json") {
      CHECK(wimop::read_text_file((a / f).string()) == wimop::read_text_file((c / f).string()));
    }
  }

  // The summary table is recomputable from the per-repetition records.
  const auto rep = nlohmann::json::parse(wimop::read_text_file((a / "report.json").string()));
  double erm = 0.0;
  double wro = 0.0;
  int count = 0;
  for (const auto& r : rep.at("records")) {
    erm += r.at("error_erm").get<double>();
    wro += r.at("error_wro").get<double>();
    ++count;
  }
  REQUIRE(count == 2);
  const std::string table = wimop::read_text_file((a / "error_vs_n.csv").string());
  CHECK(table.find("4.000000000000,0.000000000000," + wimop::format_cell(erm / count)) != std::string::npos);
  CHECK(table.find("4.000000000000,1.000000000000," + wimop::format_cell(wro / count)) != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("portfolio run without learnable returns") {
  const fs::path dir = scratch("port");
  const Outcome o = run("run --experiment portfolio --learnable 0 --validation-size 100 --out " + dir.string());
  CHECK(o.code == 0);
  for (const char* f : {"frontier_true.csv", "frontier_erm.csv", "frontier_wro.csv"}) CHECK(fs::exists(dir / f));
  fs::remove_all(dir);
}
