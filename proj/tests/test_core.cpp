#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "plgame/core.hpp"
#include "plgame/problems.hpp"

using namespace plgame;

TEST_CASE("vector construction rejects empty and non-finite input") {
  CHECK_THROWS_AS(Vector(std::size_t{0}), ValidationError);
  CHECK_THROWS_AS(Vector({1.0, std::nan("")}), ValidationError);
  CHECK_THROWS_AS(Vector({std::numeric_limits<double>::infinity()}), ValidationError);
  Vector v{3.0, 4.0};
  CHECK(v.size() == 2);
  CHECK(v.norm() == doctest::Approx(5.0));
  CHECK(v.squared_norm() == 25.0);
}

TEST_CASE("vector arithmetic") {
  Vector a{1.0, 2.0};
  Vector b{3.0, -1.0};
  CHECK((a + b) == Vector{4.0, 1.0});
  CHECK((a - b) == Vector{-2.0, 3.0});
  CHECK((2.0 * a) == Vector{2.0, 4.0});
  CHECK((a * 0.5) == Vector{0.5, 1.0});
  CHECK(a.dot(b) == 1.0);
  a.axpy(2.0, b);
  CHECK(a == Vector{7.0, 0.0});
  CHECK(distance(Vector{0.0, 0.0}, Vector{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(Vector{-2.5}.norm() == 2.5);
}

TEST_CASE("smoothness constants validate") {
  SmoothnessConstants c{1.0, 4.0, std::sqrt(2.0), 1.0};
  CHECK_NOTHROW(c.validate());
  CHECK(c.kappa() == 4.0);
  CHECK(c.rho() == 0.75);
  CHECK(c.l_bar() == 4.0);
  CHECK_THROWS_AS((SmoothnessConstants{1.0, 1.0, 1.0, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((SmoothnessConstants{1.0, 1.0, 1.0, 2.0}.validate()), ValidationError);
  CHECK_THROWS_AS((SmoothnessConstants{-1.0, 1.0, 1.0, 1.0}.validate()), ValidationError);
}

TEST_CASE("quad-2d gradient at the origin and at (1, (0, 0))") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  auto n = stationarity_norms(p, Vector{0.0}, Vector{0.0, 0.0});
  CHECK(n.theta == 0.0);
  CHECK(n.alpha == 0.0);
  n = stationarity_norms(p, Vector{1.0}, Vector{0.0, 0.0});
  CHECK(n.theta == doctest::Approx(1.0));
  CHECK(n.alpha == doctest::Approx(std::sqrt(2.0)));
  CHECK(p.grad_alpha(Vector{1.0}, Vector{0.0, 0.0}) == Vector{1.0, 1.0});
}

TEST_CASE("finite-difference check on quadratics") {
  for (auto which : {BuiltinProblem::QuadSc, BuiltinProblem::Quad2d, BuiltinProblem::QuadDegenerate}) {
    const auto p = make_problem(which);
    const auto r = check_gradients(p, Vector{0.7}, Vector(p.dim_alpha, -0.3), 1e-3);
    CHECK(r.max_error() <= 1e-10);
  }
}

TEST_CASE("finite-difference check agrees on 100 random points for every problem") {
  std::mt19937_64 rng(7);
  for (auto which : kAllBuiltins) {
    const auto p = make_problem(which);
    std::uniform_real_distribution<double> u(p.box.lo, p.box.hi);
    for (int i = 0; i < 100; ++i) {
      Vector theta(p.dim_theta);
      Vector alpha(p.dim_alpha);
      for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = u(rng);
      for (std::size_t j = 0; j < alpha.size(); ++j) alpha[j] = u(rng);
      CHECK(check_gradients(p, theta, alpha).max_error() <= 1e-5);
    }
  }
}

TEST_CASE("finite-difference check catches a wrong gradient") {
  auto p = make_problem(BuiltinProblem::Quad2d);
  p.grad_theta = [](const Vector& t, const Vector& a) { return Vector{t[0] + a[0]}; };
  const auto r = check_gradients(p, Vector{1.0}, Vector{0.5, 0.5});
  CHECK(r.theta_rel_error > 0.1);
  CHECK(r.theta_worst_coord == 0);
}

TEST_CASE("finite-difference step bounds") {
  const auto p = make_problem(BuiltinProblem::QuadSc);
  CHECK_THROWS_AS(check_gradients(p, Vector{0.0}, Vector{0.0}, 1e-9), ValidationError);
  CHECK_THROWS_AS(check_gradients(p, Vector{0.0}, Vector{0.0}, 1e-2), ValidationError);
}

TEST_CASE("non-finite objective is reported with block and coordinate") {
  auto p = make_problem(BuiltinProblem::Quad2d);
  p.eval_f = [](const Vector& t, const Vector& a) {
    return a[1] > 0.0 ? std::numeric_limits<double>::infinity() : t[0] + a[0];
  };
  try {
    check_gradients(p, Vector{0.0}, Vector{0.0, 0.0});
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  CHECK_THROWS_AS(p.check_dims(Vector{1.0}, Vector{1.0}), ValidationError);
  CHECK_THROWS_AS(stationarity_norms(p, Vector{1.0, 2.0}, Vector{0.0, 0.0}), ValidationError);
}

TEST_CASE("non-finite gradient output throws") {
  GradientFn bad = [](const Vector&, const Vector&) {
    return Vector::unchecked({std::nan("")});
  };
  CHECK_THROWS_AS(checked_gradient(bad, Vector{0.0}, Vector{0.0}, "theta"), EvaluationError);
}

TEST_CASE("stationarity norms scale with the objective") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  const Vector theta{0.375};
  const Vector alpha{-1.25, 0.5};
  const auto base = stationarity_norms(p, theta, alpha);
  for (double c : {0.25, 2.0, 8.0}) {
    auto scaled = p;
    scaled.grad_theta = [&p, c](const Vector& t, const Vector& a) { return c * p.grad_theta(t, a); };
    scaled.grad_alpha = [&p, c](const Vector& t, const Vector& a) { return c * p.grad_alpha(t, a); };
    const auto n = stationarity_norms(scaled, theta, alpha);
    CHECK(n.theta == c * base.theta);
    CHECK(n.alpha == c * base.alpha);
  }
}

TEST_CASE("problem without an oracle refuses oracle queries") {
  auto p = make_problem(BuiltinProblem::QuadSc);
  p.inner_oracle.reset();
  CHECK_FALSE(p.has_oracle());
  CHECK_THROWS_AS(p.oracle(), UnsupportedOperation);
}
