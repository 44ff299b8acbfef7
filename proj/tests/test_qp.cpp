#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <string>

#include "oracles.hpp"
#include "wimop/lp.hpp"
#include "wimop/qp.hpp"

using namespace wimop;

namespace {

WeightVector weight(double a) {
  Vector w(2);
  w << a, 1.0 - a;
  return WeightVector(w);
}

}  // namespace

TEST_CASE("synthetic weighted-sum solutions") {
  const MqpInstance inst = build_synthetic_instance();
  const QpSolution s1 = solve_wp(inst, weight(1.0));
  const QpSolution s2 = solve_wp(inst, weight(0.0));
  const QpSolution s3 = solve_wp(inst, weight(0.5));
  CHECK(std::abs(s1.x(0) - 0.5) <= 1e-9);
  CHECK(std::abs(s1.x(1) - 0.5) <= 1e-9);
  CHECK(std::abs(s2.x(0) - 2.5) <= 1e-9);
  CHECK(std::abs(s2.x(1) - 2.5) <= 1e-9);
  CHECK(std::abs(s3.x(0) - 11.0 / 6.0) <= 1e-9);
  CHECK(std::abs(s3.x(1) - 7.0 / 6.0) <= 1e-9);
  for (const QpSolution* s : {&s1, &s2, &s3}) {
    CHECK(s->kkt_residual <= 1e-8);
    CHECK(s->unique);
  }
}

TEST_CASE("active bounds are reported") {
  // Pushing c_2 far negative drives x against the box x <= 3.
  MqpInstance inst = build_synthetic_instance();
  Vector c(2);
  c << -10.0, -10.0;
  inst = inst.with_linear_term(1, c);
  const QpSolution s = solve_wp(inst, weight(0.0));
  CHECK(s.x(0) == doctest::Approx(3.0));
  CHECK(s.x(1) == doctest::Approx(3.0));
  CHECK(s.active_set.size() == 2);
  CHECK(s.u(0) > 0.0);
  CHECK(s.kkt_residual <= 1e-8);
}

TEST_CASE("random strongly convex QPs agree with the dual projected-gradient oracle") {
  std::mt19937_64 rng(12345);
  for (int t = 0; t < 60; ++t) {
    const oracle::RandomQp qp = oracle::random_qp(rng);
    const QpSolution s = solve_qp(qp.H, qp.g, qp.region);
    const Vector ref = oracle::qp_dual_projected_gradient(qp.H, qp.g, qp.region);
    CAPTURE(t);
    CHECK((s.x - ref).lpNorm<Eigen::Infinity>() <= 1e-5);
    CHECK(s.kkt_residual <= 1e-8);
    const KktResiduals r = kkt_residuals(qp.H, qp.g, qp.region, s.x, s.u);
    CHECK(r.max() <= 1e-8);
  }
}

TEST_CASE("warm start reproduces the cold solution") {
  const MqpInstance inst = build_portfolio_instance();
  const QpSolution cold_a = solve_wp(inst, weight(0.3));
  QpWarmStart warm{cold_a.x, cold_a.active_set};
  const QpSolution warm_b = solve_wp(inst, weight(0.6), {}, &warm);
  const QpSolution cold_b = solve_wp(inst, weight(0.6));
  CHECK((warm_b.x - cold_b.x).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(std::abs(warm_b.x.sum() - 1.0) <= 1e-9);
}

TEST_CASE("singular weighted Hessian") {
  const MqpInstance inst = build_portfolio_instance();
  bool thrown = false;
  try {
    solve_wp(inst, weight(1.0));
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::DegenerateHessian;
  }
  CHECK(thrown);

  QpOptions ridge;
  ridge.ridge_tie_break = true;
  const QpSolution s = solve_wp(inst, weight(1.0), ridge);
  CHECK_FALSE(s.unique);
  // Pure return maximization puts everything on the best security.
  Eigen::Index best = 0;
  portfolio_expected_return().maxCoeff(&best);
  CHECK(s.x(best) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("frontier solve tags errors with the weight index") {
  const MqpInstance inst = build_portfolio_instance();
  const std::vector<WeightVector> ws{weight(0.5), weight(1.0)};
  std::string msg;
  try {
    solve_frontier(inst, ws);
  } catch (const Error& e) {
    msg = e.what();
  }
  CHECK(msg.find("weight index 1") != std::string::npos);
}

TEST_CASE("weight vector validation") {
  Vector bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(WeightVector{bad}, Error);
  bad << -0.1, 1.1;
  CHECK_THROWS_AS(WeightVector{bad}, Error);
  CHECK_THROWS_AS(solve_wp(build_synthetic_instance(), WeightVector(Vector::Constant(3, 1.0 / 3.0))), Error);
}

TEST_CASE("simplex LP") {
  // max x1 + x2 s.t. x1 + 2 x2 <= 4, 3 x1 + x2 <= 6.
  Matrix A(2, 2);
  A << 1, 2, 3, 1;
  Vector b(2);
  b << 4, 6;
  Vector c(2);
  c << 1, 1;
  const LpResult r = solve_lp(c, A, b, {false, false});
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(2.8));
  CHECK(r.x(0) == doctest::Approx(1.6));
  CHECK(r.x(1) == doctest::Approx(1.2));

  Matrix A2(1, 2);
  A2 << 1, -1;
  CHECK(solve_lp(c, A2, Vector::Constant(1, 1.0), {false}).status == LpStatus::Unbounded);
  CHECK(solve_lp(c, A2, Vector::Constant(1, -1.0), {true}).status == LpStatus::Unbounded);
  Matrix A3(1, 2);
  A3 << 1, 1;
  CHECK(solve_lp(c, A3, Vector::Constant(1, -1.0), {true}).status == LpStatus::Infeasible);
}
