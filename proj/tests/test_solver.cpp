#include <cmath>

#include "doctest.h"
#include "plgame/problems.hpp"
#include "plgame/solver.hpp"

using namespace plgame;

namespace {
const SmoothnessConstants kQuad2d{1.0, 4.0, std::sqrt(2.0), 1.0};
}

TEST_CASE("outer smoothness") {
  CHECK(compute_outer_smoothness(kQuad2d) == doctest::Approx(3.0));
  CHECK(compute_outer_smoothness({0.0, 2.0, std::sqrt(2.0), 2.0}) == doctest::Approx(1.0));
  CHECK(compute_outer_smoothness({1.0, 1.0, 1.0, 1.0}) == 2.0);
}

TEST_CASE("inner budget") {
  const double n1 = (2 * std::log(10.0) + std::log(160.0)) / std::log(4.0 / 3.0);
  CHECK(inner_budget_bound(0.1, kQuad2d, 0.625) == doctest::Approx(n1));
  CHECK(n1 == doctest::Approx(33.65).epsilon(1e-3));
  CHECK(compute_inner_budget(0.1, kQuad2d, 0.625, {1.0, 0}) == 34);
  CHECK(compute_inner_budget(0.1, kQuad2d, 0.625) == static_cast<std::int64_t>(std::ceil(1.5 * n1)) + 5);
  // rho = 0: one exact step
  CHECK(compute_inner_budget(1e-6, {1.0, 1.0, 1.0, 1.0}, 1.0, {1.0, 0}) == 1);
  CHECK(compute_inner_budget(1e-6, {1.0, 1.0, 1.0, 1.0}, 1.0) == 6);
  // log argument equal to one
  CHECK(compute_inner_budget(1.0, {1.0, 1.0, 1.0, 0.5}, 0.5 / 16.0, {1.0, 0}) == 1);
  CHECK_THROWS_AS(compute_inner_budget(0.0, kQuad2d, 1.0), ValidationError);
  CHECK_THROWS_AS(compute_inner_budget(0.1, kQuad2d, 0.0), ValidationError);
}

TEST_CASE("outer budget") {
  CHECK(compute_outer_budget(0.1, 3.0, 1.125) == 6075);
  CHECK(compute_outer_budget(0.05, 3.0, 1.125) == 24300);
  CHECK(compute_outer_budget(0.1, 3.0, 0.0) == 1);
  // L computed from sqrt(2)^2 carries rounding; the budget must not pick up a spurious step
  CHECK(compute_outer_budget(1e-3, 1.0 + std::sqrt(2.0) * std::sqrt(2.0), 1.125) == 60750000);
  CHECK(compute_outer_budget(0.1, 3.0, 1.0001) == 5401);
  CHECK_THROWS(compute_outer_budget(1e-300, 3.0, 1.0));
}

TEST_CASE("derived schedule for quad-2d") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  const auto s = derive_schedule(p, 0.1, Vector{1.0}, Vector{0.0, 0.0});
  CHECK(s.eta1 == 0.25);
  CHECK(s.eta2 == doctest::Approx(1.0 / 3.0));
  CHECK(s.rho == 0.75);
  CHECK(s.kappa == 4.0);
  CHECK(s.l_bar == 4.0);
  CHECK(s.l_outer == doctest::Approx(3.0));
  CHECK(s.delta_g == 1.125);
  // 4 * (g(1) - f(1, 0)) = 4 * (1.125 - 0.5)
  CHECK(s.delta_inner == doctest::Approx(2.5));
  CHECK(s.t_outer == 6075);
  CHECK(s.k_inner == compute_inner_budget(0.1, p.constants, 2.5));
  CHECK(s.manual.empty());
  CHECK(validate_schedule(p, s).empty());
}

TEST_CASE("schedule overrides and warnings") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  ScheduleOverrides o;
  o.eta1 = 0.5;
  o.k_inner = 3;
  const auto s = derive_schedule(p, 0.1, Vector{1.0}, Vector{0.0, 0.0}, o);
  CHECK(s.eta1 == 0.5);
  CHECK(s.k_inner == 3);
  CHECK(s.manual.size() == 2);
  CHECK_FALSE(validate_schedule(p, s).empty());
  ScheduleParams bad = s;
  bad.k_inner = 0;
  CHECK_THROWS_AS(validate_schedule(p, bad), ValidationError);
  bad = s;
  bad.eta2 = -1.0;
  CHECK_THROWS_AS(validate_schedule(p, bad), ValidationError);
}

TEST_CASE("non-oracle problems need explicit gaps") {
  auto p = make_problem(BuiltinProblem::Quad2d);
  p.inner_oracle.reset();
  CHECK_THROWS_AS(derive_schedule(p, 0.1, Vector{1.0}, Vector{0.0, 0.0}), ValidationError);
  ScheduleOverrides o;
  o.delta_inner = 1.0;
  o.delta_g = 1.0;
  CHECK_NOTHROW(derive_schedule(p, 0.1, Vector{1.0}, Vector{0.0, 0.0}, o));
}

TEST_CASE("inner ascent examples") {
  auto sc = make_problem(BuiltinProblem::QuadSc);
  auto r = inner_ascent(sc, Vector{2.0}, Vector{0.0}, 1, 1.0);
  CHECK(r.alpha == Vector{2.0});
  auto dg = make_problem(BuiltinProblem::QuadDegenerate);
  r = inner_ascent(dg, Vector{0.0}, Vector{0.0, 0.0}, 1, 0.5);
  CHECK(r.alpha == Vector{0.5, 0.5});
  CHECK(dg.grad_alpha(Vector{0.0}, r.alpha).norm() == 0.0);
  auto q = make_problem(BuiltinProblem::Quad2d);
  const Vector star = q.oracle().argmax_point(Vector{1.0});
  r = inner_ascent(q, Vector{1.0}, star, 25, 0.25);
  CHECK(r.alpha == star);
}

TEST_CASE("inner ascent is monotone with step 1/l22") {
  for (auto which : kAllBuiltins) {
    const auto p = make_problem(which);
    const auto r = inner_ascent(p, Vector{0.8}, Vector(p.dim_alpha, -3.0), 200, 1.0 / p.constants.l22);
    REQUIRE(r.f_values.size() == 201);
    for (std::size_t k = 1; k < r.f_values.size(); ++k) {
      CHECK(r.f_values[k] >= r.f_values[k - 1] - 1e-12 * std::max(1.0, std::abs(r.f_values[k])));
    }
  }
}

TEST_CASE("inner ascent divergence carries the step index") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  try {
    inner_ascent(p, Vector{1.0}, Vector{0.0, 0.0}, 2000, 10.0);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() > 0);
    CHECK(e.step() < 2000);
  }
  CHECK_THROWS_AS(inner_ascent(p, Vector{1.0}, Vector{0.0, 0.0}, 0, 0.25), ValidationError);
}

TEST_CASE("multistep gda on quad-2d reaches 1e-3") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  const auto [theta0, alpha0] = p.default_init;
  const auto s = derive_schedule(p, 1e-3, theta0, alpha0);
  const auto run = run_multistep_gda(p, s, theta0, alpha0, {.early_exit = true});
  REQUIRE(run.report.first_hit.has_value());
  CHECK(*run.report.first_hit <= s.t_outer);
  CHECK(run.status == RunStatus::Converged);
  CHECK(run.report.converged);
  const auto& hit = run.trace.at(static_cast<std::size_t>(*run.report.first_hit));
  CHECK(hit.grad_theta_norm <= 1e-3);
  CHECK(hit.grad_alpha_norm <= 1e-3);
  CHECK(run.trace.size() == static_cast<std::size_t>(*run.report.first_hit) + 1);
}

TEST_CASE("start at the saddle") {
  const auto p = make_problem(BuiltinProblem::QuadSc);
  const auto s = derive_schedule(p, 0.1, Vector{0.0}, Vector{0.0});
  const auto run = run_multistep_gda(p, s, Vector{0.0}, Vector{0.0}, {.early_exit = true});
  REQUIRE(run.report.first_hit.has_value());
  CHECK(*run.report.first_hit == 0);
  CHECK(run.report.best_norms.theta == 0.0);
  CHECK(run.report.best_norms.alpha == 0.0);
}

TEST_CASE("first_hit and best_index agree with an independent rescan") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  auto s = derive_schedule(p, 0.05, Vector{1.0}, Vector{0.0, 0.0});
  s.t_outer = 40;
  const auto run = run_multistep_gda(p, s, Vector{1.0}, Vector{0.0, 0.0});
  REQUIRE(run.trace.size() == 40);
  std::optional<std::int64_t> hit;
  std::size_t best = 0;
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    const auto& r = run.trace[i];
    CHECK(r.t == static_cast<std::int64_t>(i));
    if (!hit && r.grad_theta_norm <= 0.05 && r.grad_alpha_norm <= 0.05) hit = r.t;
    const auto worst = [](const TraceRecord& x) { return std::max(x.grad_theta_norm, x.grad_alpha_norm); };
    if (worst(r) < worst(run.trace[best])) best = i;
  }
  CHECK(hit == run.report.first_hit);
  CHECK(run.report.best_index == static_cast<std::int64_t>(best));
}

TEST_CASE("trace records satisfy the max property and warm start") {
  const auto p = make_problem(BuiltinProblem::PlSin);
  auto s = derive_schedule(p, 0.1, Vector{2.0}, Vector{0.0});
  s.t_outer = 30;
  const auto run = run_multistep_gda(p, s, Vector{2.0}, Vector{0.0}, {.adaptive_k = false});
  Vector alpha{0.0};
  for (const auto& r : run.trace) {
    REQUIRE(r.g_gap.has_value());
    CHECK(*r.g_gap >= -1e-10);
    CHECK(r.inner_iters_used == s.k_inner);
    // warm start: replaying the inner loop from the previous alpha reproduces this record
    const auto replay = inner_ascent(p, r.theta, alpha, s.k_inner, s.eta1, false);
    CHECK(replay.alpha == r.alpha);
    alpha = r.alpha;
  }
}

TEST_CASE("runs are bit-identical") {
  const auto p = make_problem(BuiltinProblem::PlSin);
  auto s = derive_schedule(p, 0.1, Vector{2.0}, Vector{0.0});
  s.t_outer = 50;
  const auto a = run_multistep_gda(p, s, Vector{2.0}, Vector{0.0});
  const auto b = run_multistep_gda(p, s, Vector{2.0}, Vector{0.0});
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].theta == b.trace[i].theta);
    CHECK(a.trace[i].alpha == b.trace[i].alpha);
    CHECK(a.trace[i].f_value == b.trace[i].f_value);
  }
}

TEST_CASE("gradient evaluation counters") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  auto s = derive_schedule(p, 0.1, Vector{1.0}, Vector{0.0, 0.0});
  s.t_outer = 12;
  const auto run = run_multistep_gda(p, s, Vector{1.0}, Vector{0.0, 0.0}, {.adaptive_k = false});
  CHECK(run.stats.total_outer_grad_evals == 12);
  CHECK(run.stats.total_inner_grad_evals == 12 * s.k_inner);
  CHECK(run.stats.k_doublings == 0);
}

TEST_CASE("adaptive K doubles when the inner loop is too short") {
  const auto p = make_problem(BuiltinProblem::PlSin);
  auto s = derive_schedule(p, 0.1, Vector{2.0}, Vector{0.0});
  s.k_inner = 2;
  s.t_outer = 3;
  const auto run = run_multistep_gda(p, s, Vector{2.0}, Vector{0.0});
  CHECK(run.stats.k_doublings > 0);
  std::int64_t used = 0;
  for (const auto& r : run.trace) used += r.inner_iters_used;
  CHECK(used == run.stats.total_inner_grad_evals);
  CHECK(run.trace[0].inner_iters_used > 2);
}

TEST_CASE("inner checks on quad-2d") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  auto s = derive_schedule(p, 0.01, Vector{1.0}, Vector{0.0, 0.0});
  s.t_outer = 25;
  const auto run = run_multistep_gda(p, s, Vector{1.0}, Vector{0.0, 0.0}, {.check_inner = true});
  CHECK(run.stats.inner_rate_checks > 0);
  CHECK(run.stats.inner_rate_violations == 0);
  CHECK(run.stats.inner_monotonicity_violations == 0);
}

TEST_CASE("divergent run keeps the partial trace") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  auto s = derive_schedule(p, 0.1, Vector{1.0}, Vector{0.0, 0.0});
  s.eta2 = 50.0;
  s.k_inner = 1;
  s.t_outer = 5000;
  try {
    run_multistep_gda(p, s, Vector{1.0}, Vector{0.0, 0.0}, {.adaptive_k = false});
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.partial().status == RunStatus::Diverged);
    CHECK_FALSE(e.partial().trace.empty());
  }
}

TEST_CASE("one-step gda") {
  const auto sc = make_problem(BuiltinProblem::QuadSc);
  auto run = run_onestep_gda(sc, 1.0, 0.5, 20, 0.1, Vector{0.0}, Vector{0.0});
  for (const auto& r : run.trace) {
    CHECK(r.theta == Vector{0.0});
    CHECK(r.alpha == Vector{0.0});
    CHECK(r.inner_iters_used == 1);
  }
  const auto pl = make_problem(BuiltinProblem::PlSin);
  run = run_onestep_gda(pl, 0.125, 1.0 / 9.0, 1000, 1e-9, Vector{2.0}, Vector{0.0});
  CHECK(run.trace.size() == 1000);
  for (const auto& r : run.trace) {
    CHECK(r.theta.is_finite());
    CHECK(r.alpha.is_finite());
  }
}

TEST_CASE("oracle gd without noise contracts by 0.25 on quad-2d") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  const auto r = run_oracle_gd(p, 1.0 / 3.0, 12, Vector{1.0});
  REQUIRE(r.trace.size() == 12);
  for (std::size_t t = 0; t < r.trace.size(); ++t) {
    CHECK(r.trace[t].grad_g_norm == doctest::Approx(2.25 * std::pow(0.25, static_cast<double>(t))));
    CHECK(r.trace[t].error_norm == 0.0);
  }
  CHECK(r.descent_violations == 0);
}

TEST_CASE("oracle gd at the minimizer stays put") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  const auto r = run_oracle_gd(p, 1.0 / 3.0, 5, Vector{0.0});
  for (const auto& rec : r.trace) CHECK(rec.grad_g_norm == 0.0);
}

TEST_CASE("oracle gd noise respects its magnitude and seed") {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  for (auto mode : {NoiseMode::Random, NoiseMode::Adversarial}) {
    const Perturbation noise{mode, 0.025, 9};
    const auto a = run_oracle_gd(p, 1.0 / 3.0, 200, Vector{1.0}, noise);
    const auto b = run_oracle_gd(p, 1.0 / 3.0, 200, Vector{1.0}, noise);
    for (std::size_t t = 0; t < a.trace.size(); ++t) {
      CHECK(a.trace[t].error_norm <= 0.025 * (1 + 1e-12));
      CHECK(a.trace[t].theta == b.trace[t].theta);
    }
    CHECK(a.descent_violations == 0);
  }
}

TEST_CASE("oracle gd needs an oracle") {
  auto p = make_problem(BuiltinProblem::Quad2d);
  p.inner_oracle.reset();
  CHECK_THROWS_AS(run_oracle_gd(p, 1.0 / 3.0, 5, Vector{1.0}), UnsupportedOperation);
}

TEST_CASE("noise mode names") {
  for (auto m : {NoiseMode::None, NoiseMode::Random, NoiseMode::Adversarial}) {
    CHECK(parse_noise_mode(to_string(m)) == m);
  }
  CHECK_FALSE(parse_noise_mode("gaussian").has_value());
}
