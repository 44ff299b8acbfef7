#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wimop/model.hpp"

using namespace wimop;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("synthetic instance geometry") {
  const MqpInstance inst = build_synthetic_instance();
  CHECK(inst.p() == 2);
  CHECK(inst.n() == 2);
  CHECK(inst.q() == 2);
  CHECK(inst.lambda() == doctest::Approx(1.0));
  CHECK(inst.strongly_convex());
  CHECK(inst.B() == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(inst.B_is_exact());
  for (int j = 0; j < 2; ++j) {
    CHECK(inst.region_lower()(j) == doctest::Approx(0.0));
    CHECK(inst.region_upper()(j) == doctest::Approx(3.0));
  }
  CHECK(inst.b()(0) == 3.0);
  CHECK(inst.b()(1) == 3.0);
}

TEST_CASE("portfolio instance") {
  const MqpInstance inst = build_portfolio_instance();
  CHECK(inst.p() == 2);
  CHECK(inst.n() == 8);
  CHECK(inst.q() == 9);
  CHECK(inst.is_equality(8));
  CHECK_FALSE(inst.is_equality(0));
  CHECK(inst.lambda() == doctest::Approx(0.0));
  CHECK_FALSE(inst.strongly_convex());
  CHECK(inst.B() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(portfolio_expected_return()(0) == 0.1791);
  const Matrix C = portfolio_covariance();
  CHECK((C - C.transpose()).norm() == doctest::Approx(0.0));
  CHECK((inst.objective(1).Q - 2.0 * C).norm() == doctest::Approx(0.0));
  CHECK((inst.objective(0).c + portfolio_expected_return()).norm() == doctest::Approx(0.0));
}

TEST_CASE("instance validation errors") {
  const Matrix I = Matrix::Identity(2, 2);
  const Vector z = Vector::Zero(2);
  Matrix A = Matrix::Identity(2, 2);
  Vector b = Vector::Constant(2, 1.0);
  const std::vector<bool> eq(2, false);

  CHECK(code_of([&] { MqpInstance::create({{I, z}}, A, b, eq); }) == ErrorCode::BadArity);
  Matrix asym = I;
  asym(0, 1) = 1.0;
  CHECK(code_of([&] { MqpInstance::create({{asym, z}, {I, z}}, A, b, eq); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { MqpInstance::create({{-I, z}, {I, z}}, A, b, eq); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { MqpInstance::create({{I, Vector::Zero(3)}, {I, z}}, A, b, eq); }) == ErrorCode::DimensionMismatch);

  // x1 + x2 <= -1 with x >= 0 is empty.
  Matrix A1(1, 2);
  A1 << 1.0, 1.0;
  CHECK(code_of([&] { MqpInstance::create({{I, z}, {I, z}}, A1, Vector::Constant(1, -1.0), {false}); }) ==
        ErrorCode::Infeasible);
  // x1 - x2 <= 1 leaves x2 unbounded.
  Matrix A2(1, 2);
  A2 << 1.0, -1.0;
  CHECK(code_of([&] { MqpInstance::create({{I, z}, {I, z}}, A2, Vector::Constant(1, 1.0), {false}); }) ==
        ErrorCode::Unbounded);
}

TEST_CASE("theta spec and apply_theta") {
  const MqpInstance inst = build_synthetic_instance();
  const ThetaSpec spec = synthetic_theta_spec();
  CHECK(spec.n_theta() == 2);
  CHECK(spec.D() == doctest::Approx(6.0 * std::sqrt(2.0)));
  const Vector truth = spec.extract(inst);
  CHECK(truth(0) == doctest::Approx(-1.0));
  CHECK(truth(1) == doctest::Approx(-2.5));

  Vector theta(2);
  theta << -3.0, -4.0;
  const MqpInstance moved = apply_theta(inst, spec, theta);
  CHECK(moved.objective(0).c(1) == -3.0);
  CHECK(moved.objective(1).c(1) == -4.0);
  CHECK(moved.objective(0).c(0) == inst.objective(0).c(0));
  CHECK(moved.B() == inst.B());

  Vector outside(2);
  outside << 0.5, -1.0;
  CHECK(code_of([&] { apply_theta(inst, spec, outside); }) == ErrorCode::OutOfBounds);
  CHECK(code_of([&] { apply_theta(inst, spec, Vector::Zero(3)); }) == ErrorCode::DimensionMismatch);

  const ThetaSpec bad({{0, 5, 1.0}}, Vector::Constant(1, -1.0), Vector::Constant(1, 0.0));
  CHECK(code_of([&] { bad.check_against(inst); }) == ErrorCode::OutOfBounds);
}

TEST_CASE("portfolio theta uses the expected returns directly") {
  const MqpInstance inst = build_portfolio_instance();
  const ThetaSpec spec = portfolio_theta_spec();
  CHECK(spec.n_theta() == 4);
  const Vector r = spec.extract(inst);
  for (int j = 0; j < 4; ++j) CHECK(r(j) == doctest::Approx(portfolio_expected_return()(j)));
  Vector theta = r;
  theta(0) = 0.25;
  const MqpInstance moved = apply_theta(inst, spec, theta);
  CHECK(moved.objective(0).c(0) == doctest::Approx(-0.25));
}

TEST_CASE("observation set support box and R") {
  Vector lo(2), hi(2);
  lo << -0.25, -0.25;
  hi << 3.25, 3.25;
  Vector y(2);
  y << 1.0, 2.0;
  const ObservationSet obs({y, y}, lo, hi);
  CHECK(obs.size() == 2);
  CHECK(obs.R() == doctest::Approx(3.25 * std::sqrt(2.0)));
  CHECK(obs.head(1).size() == 1);
  Vector far(2);
  far << 4.0, 0.0;
  CHECK(code_of([&] { ObservationSet({far}, lo, hi); }) == ErrorCode::OutOfBounds);
  CHECK(box_corner_norm(lo, hi) == doctest::Approx(3.25 * std::sqrt(2.0)));
}

TEST_CASE("V box bounds") {
  const double B = 3.0 * std::sqrt(2.0);
  const double R = 3.25 * std::sqrt(2.0);
  const VBounds vb = make_vbounds(B, R, 1, 0.01);
  CHECK(vb.V1 == 0.0);
  CHECK(vb.V2 == doctest::Approx(78.125));
  CHECK(vb.v_last_max == doctest::Approx(7812.5));
  CHECK(vb.v_i_max == doctest::Approx(2 * 78.125));
  CHECK(std::isinf(make_vbounds(B, R, 1, 0.0).v_last_max));
  CHECK(code_of([&] { make_vbounds(-1.0, R, 1, 0.1); }) == ErrorCode::EmptyBoundsBox);
}

TEST_CASE("config validation") {
  WroConfig c;
  CHECK_NOTHROW(c.validate());
  c.delta = 0.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
  c = WroConfig{};
  c.epsilon = -1.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
  CHECK(cut_policy_from_string("max") == CutPolicy::MaxOnly);
  CHECK(std::string(to_string(CutPolicy::AllViolated)) == "all");
  CHECK(code_of([&] { cut_policy_from_string("some"); }) == ErrorCode::InvalidArgument);
}
