#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <limits>

#include "wimop/experiments.hpp"
#include "wimop/io.hpp"

using namespace wimop;

TEST_CASE("instance round trip") {
  for (const MqpInstance& inst : {build_synthetic_instance(), build_portfolio_instance()}) {
    const ThetaSpec spec = inst.n() == 2 ? synthetic_theta_spec() : portfolio_theta_spec();
    const json j = instance_to_json(inst, &spec);
    const MqpInstance back = instance_from_json(j);
    CHECK(back.p() == inst.p());
    CHECK((back.A() - inst.A()).norm() == 0.0);
    CHECK((back.b() - inst.b()).norm() == 0.0);
    CHECK(back.eq_rows() == inst.eq_rows());
    for (int l = 0; l < inst.p(); ++l) {
      CHECK((back.objective(l).Q - inst.objective(l).Q).norm() == 0.0);
      CHECK((back.objective(l).c - inst.objective(l).c).norm() == 0.0);
    }
    CHECK(back.B() == doctest::Approx(inst.B()));
    const ThetaSpec sb = theta_spec_from_json(j.at("theta_spec"));
    CHECK(sb.layout() == spec.layout());
    CHECK((sb.lower() - spec.lower()).norm() == 0.0);
    CHECK((sb.upper() - spec.upper()).norm() == 0.0);
  }
  CHECK_FALSE(instance_to_json(build_synthetic_instance()).contains("theta_spec"));
}

TEST_CASE("observation round trips") {
  const MqpInstance inst = build_synthetic_instance();
  const ObservationSet obs = generate_observations(inst, 2, 7, NoiseModel::uniform(0.25));
  const ObservationSet j = observations_from_json(observations_to_json(obs));
  const ObservationSet c = observations_from_csv(observations_to_csv(obs), obs.box_lower(), obs.box_upper());
  REQUIRE(j.size() == 7);
  REQUIRE(c.size() == 7);
  for (int i = 0; i < 7; ++i) {
    CHECK((j.point(i) - obs.point(i)).norm() == 0.0);
    CHECK((c.point(i) - obs.point(i)).lpNorm<Eigen::Infinity>() <= 5e-13);
  }
  CHECK(j.R() == obs.R());
  CHECK(observations_to_csv(obs).rfind("y0,y1\n", 0) == 0);
}

TEST_CASE("cell formatting") {
  CHECK(format_cell(1.5) == "1.500000000000");
  CHECK(format_cell(-1e-15) == "0.000000000000");
  CHECK_THROWS_AS(format_cell(std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK_THROWS_AS(format_cell(std::numeric_limits<double>::infinity()), Error);
  CHECK(csv_table({"a", "b"}, {{1.0, 2.0}}) == "a,b\n1.000000000000,2.000000000000\n");
  CHECK_THROWS_AS(csv_table({"a"}, {{1.0, 2.0}}), Error);
}

TEST_CASE("report tables") {
  std::vector<IterationRecord> hist(2);
  hist[0] = {1, 0.5, 0.3, 4, Vector::Zero(2)};
  hist[1] = {2, 0.6, 0.05, 0, Vector::Zero(2)};
  const std::string conv = convergence_csv(hist);
  CHECK(conv.rfind("iteration,max_cv,objective,cuts_added\n", 0) == 0);
  CHECK(conv.find("2.000000000000,0.050000000000,0.600000000000,0.000000000000") != std::string::npos);

  const MqpInstance port = build_portfolio_instance();
  const ObservationSet obs = generate_observations(port, 1, 20, NoiseModel::rounding(3));
  const std::string cs = constants_csv(compute_constants(port, portfolio_theta_spec(), obs, WroConfig{}));
  CHECK(cs.rfind("name,value\n", 0) == 0);
  CHECK(cs.find("\nG,") == std::string::npos);
  CHECK(cs.find("\nB,") != std::string::npos);

  Matrix pts(2, 3);
  pts << 1, 2, 3, 4, 5, 6;
  const std::string fc = frontier_csv(pts);
  CHECK(fc.rfind("x0,x1\n1.000000000000,4.000000000000\n", 0) == 0);
}

TEST_CASE("aggregates and frontier distance") {
  std::vector<RepetitionRecord> recs(3);
  const double errs[3] = {1.0, 2.0, 4.0};
  for (int r = 0; r < 3; ++r) {
    recs[static_cast<size_t>(r)].N = 10;
    recs[static_cast<size_t>(r)].repetition = r;
    recs[static_cast<size_t>(r)].error_erm = errs[r];
    recs[static_cast<size_t>(r)].error_wro = 2.0 * errs[r];
  }
  const std::vector<Aggregate> agg = aggregate_records(recs);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].method == 0);
  CHECK(agg[0].count == 3);
  CHECK(agg[0].mean == doctest::Approx(7.0 / 3.0));
  CHECK(agg[0].stddev == doctest::Approx(std::sqrt(((1 - 7.0 / 3) * (1 - 7.0 / 3) + (2 - 7.0 / 3) * (2 - 7.0 / 3) +
                                                    (4 - 7.0 / 3) * (4 - 7.0 / 3)) / 2.0)));
  CHECK(agg[1].mean == doctest::Approx(14.0 / 3.0));

  Matrix a(1, 2);
  a << 0.0, 1.0;
  Matrix b(1, 1);
  b << 0.0;
  CHECK(frontier_distance(a, a) == 0.0);
  CHECK(frontier_distance(a, b) == doctest::Approx(0.5));
  CHECK(repetition_seed(1, 10, 0) != repetition_seed(1, 10, 1));
}

TEST_CASE("run config json") {
  RunConfig c = RunConfig::synthetic_defaults();
  c.n_list = {5, 7};
  c.radii = {0.5};
  c.cut_policy = CutPolicy::MaxOnly;
  const RunConfig back = RunConfig::from_json(c.to_json(), RunConfig::portfolio_defaults());
  CHECK(back.experiment == "synthetic");
  CHECK(back.n_list == c.n_list);
  CHECK(back.radii == c.radii);
  CHECK(back.cut_policy == CutPolicy::MaxOnly);
  const RunConfig partial = RunConfig::from_json(json{{"repetitions", 3}}, RunConfig::synthetic_defaults());
  CHECK(partial.repetitions == 3);
  CHECK(partial.K == 6);
  RunConfig bad = c;
  bad.repetitions = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "wimop_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "x.txt").string();
  write_text_file(path, "hello\n");
  CHECK(read_text_file(path) == "hello\n");
  CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()), Error);
  std::filesystem::remove_all(dir);
}
