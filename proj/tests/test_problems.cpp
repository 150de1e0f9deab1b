#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "plgame/problems.hpp"

using namespace plgame;

TEST_CASE("names round-trip") {
  for (auto which : kAllBuiltins) {
    auto parsed = parse_problem(problem_name(which));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == which);
    CHECK(make_problem(which).name == std::string(problem_name(which)));
  }
  CHECK_FALSE(parse_problem("quad-3d").has_value());
  CHECK(problem_names().find("pl-sin") != std::string::npos);
}

TEST_CASE("declared constants") {
  auto c = make_problem(BuiltinProblem::Quad2d).constants;
  CHECK(c.l11 == 1.0);
  CHECK(c.l22 == 4.0);
  CHECK(c.l12 == doctest::Approx(std::sqrt(2.0)));
  CHECK(c.mu == 1.0);
  c = make_problem(BuiltinProblem::PlSin).constants;
  CHECK(c.kappa() == doctest::Approx(256.0));
  c = make_problem(BuiltinProblem::QuadDegenerate).constants;
  CHECK(c.l11 == 0.0);
  CHECK(c.mu == 2.0);
  CHECK(c.rho() == 0.0);
}

TEST_CASE("oracle argmax attains g and dominates random alphas") {
  std::mt19937_64 rng(11);
  for (auto which : kAllBuiltins) {
    const auto p = make_problem(which);
    const auto& o = p.oracle();
    std::uniform_real_distribution<double> u(p.box.lo, p.box.hi);
    for (int i = 0; i < 50; ++i) {
      const Vector theta{u(rng) * 0.5};
      const Vector star = o.argmax_point(theta);
      const double g = o.g_value(theta);
      CHECK(p.eval_f(theta, star) == doctest::Approx(g).epsilon(1e-12));
      CHECK(p.grad_alpha(theta, star).norm() <= 1e-12 * std::max(1.0, theta.norm()));
      for (int j = 0; j < 20; ++j) {
        Vector alpha(p.dim_alpha);
        for (std::size_t k = 0; k < alpha.size(); ++k) alpha[k] = u(rng);
        CHECK(p.eval_f(theta, alpha) <= g + 1e-12 * std::max(1.0, std::abs(g)));
      }
    }
  }
}

TEST_CASE("oracle gradient of g matches grad_theta f at the argmax and a difference quotient") {
  for (auto which : kAllBuiltins) {
    const auto p = make_problem(which);
    const auto& o = p.oracle();
    for (double t : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
      const Vector theta{t};
      const Vector grad = o.g_grad(theta);
      CHECK(distance(grad, p.grad_theta(theta, o.argmax_point(theta))) <= 1e-12);
      const double h = 1e-4;
      const double fd = (o.g_value(Vector{t + h}) - o.g_value(Vector{t - h})) / (2 * h);
      CHECK(fd == doctest::Approx(grad[0]).epsilon(1e-7));
    }
  }
}

TEST_CASE("analytic gap agrees with g - f") {
  std::mt19937_64 rng(5);
  for (auto which : kAllBuiltins) {
    const auto p = make_problem(which);
    REQUIRE(p.oracle().gap);
    std::uniform_real_distribution<double> u(p.box.lo, p.box.hi);
    for (int i = 0; i < 200; ++i) {
      const Vector theta{u(rng)};
      Vector alpha(p.dim_alpha);
      for (std::size_t k = 0; k < alpha.size(); ++k) alpha[k] = u(rng);
      const double direct = p.oracle().g_value(theta) - p.eval_f(theta, alpha);
      const double gap = p.oracle().value_gap(theta, alpha, p.eval_f);
      CHECK(gap >= 0.0);
      CHECK(gap == doctest::Approx(direct).epsilon(1e-12).scale(100.0));
    }
  }
}

TEST_CASE("closed forms") {
  const auto q = make_problem(BuiltinProblem::Quad2d);
  CHECK(q.oracle().g_value(Vector{2.0}) == 4.5);
  CHECK(q.oracle().argmax_point(Vector{2.0}) == Vector{2.0, 0.5});
  const auto s = make_problem(BuiltinProblem::QuadSc);
  CHECK(s.oracle().g_value(Vector{3.0}) == 9.0);
  const auto d = make_problem(BuiltinProblem::QuadDegenerate);
  CHECK(d.oracle().g_value(Vector{1.0}) == 1.5);
  CHECK(*d.oracle().g_min == -0.5);
  CHECK(d.oracle().g_grad(Vector{-1.0})[0] == 0.0);
  const auto pl = make_problem(BuiltinProblem::PlSin);
  CHECK(pl.oracle().g_value(Vector{2.0}) == 2.0);
  CHECK(pl.eval_f(Vector{2.0}, Vector{2.0}) == 2.0);
}

TEST_CASE("degenerate argmax is a line") {
  const auto d = make_problem(BuiltinProblem::QuadDegenerate);
  const Vector theta{0.5};
  // any point on alpha1 + alpha2 = 1.5 is a maximizer
  for (double a : {-3.0, 0.0, 0.75, 4.0}) {
    const Vector alpha{a, 1.5 - a};
    CHECK(d.eval_f(theta, alpha) == doctest::Approx(d.oracle().g_value(theta)));
    CHECK(d.oracle().point_distance(theta, alpha) == doctest::Approx(0.0).epsilon(1e-15));
  }
  CHECK(d.oracle().point_distance(theta, Vector{0.0, 0.0}) == doctest::Approx(1.5 / std::sqrt(2.0)));
  CHECK(oracle_argmax_distance(BuiltinProblem::QuadDegenerate, 0.0, 1.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(oracle_argmax_distance(BuiltinProblem::Quad2d, 0.0, 1.0) ==
        doctest::Approx(std::sqrt(1.0 + 1.0 / 16.0)));
}

TEST_CASE("pl-sin residual derivatives") {
  for (double x : {-7.0, -2.2, 0.0, 0.4, 5.5}) {
    const double h = 1e-5;
    CHECK((pl_sin_residual(x + h) - pl_sin_residual(x - h)) / (2 * h) ==
          doctest::Approx(pl_sin_residual_d1(x)).epsilon(1e-8));
    CHECK((pl_sin_residual_d1(x + h) - pl_sin_residual_d1(x - h)) / (2 * h) ==
          doctest::Approx(pl_sin_residual_d2(x)).epsilon(1e-7));
  }
  CHECK(pl_sin_residual(0.0) == 0.0);
}

TEST_CASE("pl-sin inner problem is nonconcave") {
  // residual has negative curvature somewhere, so the inner problem is not concave
  CHECK(pl_sin_residual_d2(M_PI / 2) < 0.0);
}

TEST_CASE("default initial points have matching dimensions") {
  for (auto which : kAllBuiltins) {
    const auto p = make_problem(which);
    CHECK_NOTHROW(p.check_dims(p.default_init.first, p.default_init.second));
  }
}
