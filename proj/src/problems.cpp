#include "plgame/problems.hpp"

#include <cmath>

namespace plgame {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

ProblemSpec quad_sc() {
  ProblemSpec p;
  p.name = "quad-sc";
  p.dim_theta = 1;
  p.dim_alpha = 1;
  p.eval_f = [](const Vector& t, const Vector& a) {
    return 0.5 * t[0] * t[0] + t[0] * a[0] - 0.5 * a[0] * a[0];
  };
  p.grad_theta = [](const Vector& t, const Vector& a) {
    return Vector::unchecked({t[0] + a[0]});
  };
  p.grad_alpha = [](const Vector& t, const Vector& a) {
    return Vector::unchecked({t[0] - a[0]});
  };
  p.constants = {.l11 = 1.0, .l22 = 1.0, .l12 = 1.0, .mu = 1.0};
  InnerOracle o;
  o.g_value = [](const Vector& t) { return t[0] * t[0]; };
  o.g_grad = [](const Vector& t) { return Vector::unchecked({2.0 * t[0]}); };
  o.argmax_point = [](const Vector& t) { return Vector::unchecked({t[0]}); };
  o.gap = [](const Vector& t, const Vector& a) {
    const double d = a[0] - t[0];
    return 0.5 * d * d;
  };
  o.g_min = 0.0;
  p.inner_oracle = std::move(o);
  p.default_init = {Vector{1.0}, Vector{0.0}};
  return p;
}

ProblemSpec quad_2d() {
  ProblemSpec p;
  p.name = "quad-2d";
  p.dim_theta = 1;
  p.dim_alpha = 2;
  p.eval_f = [](const Vector& t, const Vector& a) {
    return 0.5 * t[0] * t[0] + t[0] * (a[0] + a[1]) - 0.5 * (a[0] * a[0] + 4.0 * a[1] * a[1]);
  };
  p.grad_theta = [](const Vector& t, const Vector& a) {
    return Vector::unchecked({t[0] + a[0] + a[1]});
  };
  p.grad_alpha = [](const Vector& t, const Vector& a) {
    return Vector::unchecked({t[0] - a[0], t[0] - 4.0 * a[1]});
  };
  p.constants = {.l11 = 1.0, .l22 = 4.0, .l12 = kSqrt2, .mu = 1.0};
  InnerOracle o;
  o.g_value = [](const Vector& t) { return 1.125 * t[0] * t[0]; };
  o.g_grad = [](const Vector& t) { return Vector::unchecked({2.25 * t[0]}); };
  o.argmax_point = [](const Vector& t) { return Vector::unchecked({t[0], 0.25 * t[0]}); };
  o.gap = [](const Vector& t, const Vector& a) {
    const double d0 = a[0] - t[0];
    const double d1 = a[1] - 0.25 * t[0];
    return 0.5 * d0 * d0 + 2.0 * d1 * d1;
  };
  o.g_min = 0.0;
  p.inner_oracle = std::move(o);
  p.default_init = {Vector{1.0}, Vector{0.0, 0.0}};
  return p;
}

ProblemSpec pl_sin() {
  ProblemSpec p;
  p.name = "pl-sin";
  p.dim_theta = 1;
  p.dim_alpha = 1;
  p.eval_f = [](const Vector& t, const Vector& a) {
    return 0.5 * t[0] * t[0] - pl_sin_residual(a[0] - t[0]);
  };
  p.grad_theta = [](const Vector& t, const Vector& a) {
    return Vector::unchecked({t[0] + pl_sin_residual_d1(a[0] - t[0])});
  };
  p.grad_alpha = [](const Vector& t, const Vector& a) {
    return Vector::unchecked({-pl_sin_residual_d1(a[0] - t[0])});
  };
  // |h''| <= 8 bounds l22 and l12; d/dt of grad_theta is 1 - h'' so 9 is safe.
  p.constants = {.l11 = 9.0, .l22 = 8.0, .l12 = 8.0, .mu = 1.0 / 32.0};
  InnerOracle o;
  o.g_value = [](const Vector& t) { return 0.5 * t[0] * t[0]; };
  o.g_grad = [](const Vector& t) { return Vector::unchecked({t[0]}); };
  o.argmax_point = [](const Vector& t) { return Vector::unchecked({t[0]}); };
  o.gap = [](const Vector& t, const Vector& a) { return pl_sin_residual(a[0] - t[0]); };
  o.g_min = 0.0;
  p.inner_oracle = std::move(o);
  p.default_init = {Vector{2.0}, Vector{0.0}};
  return p;
}

ProblemSpec quad_degenerate() {
  ProblemSpec p;
  p.name = "quad-degenerate";
  p.dim_theta = 1;
  p.dim_alpha = 2;
  p.eval_f = [](const Vector& t, const Vector& a) {
    const double r = a[0] + a[1] - 1.0;
    return t[0] * (a[0] + a[1]) - 0.5 * r * r;
  };
  p.grad_theta = [](const Vector&, const Vector& a) { return Vector::unchecked({a[0] + a[1]}); };
  p.grad_alpha = [](const Vector& t, const Vector& a) {
    const double d = t[0] - (a[0] + a[1] - 1.0);
    return Vector::unchecked({d, d});
  };
  p.constants = {.l11 = 0.0, .l22 = 2.0, .l12 = kSqrt2, .mu = 2.0};
  InnerOracle o;
  o.g_value = [](const Vector& t) { return 0.5 * t[0] * t[0] + t[0]; };
  o.g_grad = [](const Vector& t) { return Vector::unchecked({t[0] + 1.0}); };
  // Closest point of the line a1 + a2 = 1 + t to the origin.
  o.argmax_point = [](const Vector& t) {
    const double c = 0.5 * (1.0 + t[0]);
    return Vector::unchecked({c, c});
  };
  o.argmax_set_distance = [](const Vector& t1, const Vector& t2) {
    return std::abs(t1[0] - t2[0]) / kSqrt2;
  };
  o.distance_to_argmax = [](const Vector& t, const Vector& a) {
    return std::abs(t[0] - (a[0] + a[1] - 1.0)) / kSqrt2;
  };
  o.gap = [](const Vector& t, const Vector& a) {
    const double d = t[0] - (a[0] + a[1] - 1.0);
    return 0.5 * d * d;
  };
  o.g_min = -0.5;
  p.inner_oracle = std::move(o);
  p.default_init = {Vector{1.0}, Vector{0.0, 0.0}};
  return p;
}

}  // namespace

double pl_sin_residual(double x) {
  const double s = std::sin(x);
  return x * x + 3.0 * s * s;
}

double pl_sin_residual_d1(double x) { return 2.0 * x + 3.0 * std::sin(2.0 * x); }

double pl_sin_residual_d2(double x) { return 2.0 + 6.0 * std::cos(2.0 * x); }

std::string_view problem_name(BuiltinProblem which) {
  switch (which) {
    case BuiltinProblem::QuadSc: return "quad-sc";
    case BuiltinProblem::Quad2d: return "quad-2d";
    case BuiltinProblem::PlSin: return "pl-sin";
    case BuiltinProblem::QuadDegenerate: return "quad-degenerate";
  }
  return "unknown";
}

std::optional<BuiltinProblem> parse_problem(std::string_view name) {
  for (BuiltinProblem p : kAllBuiltins) {
    if (problem_name(p) == name) return p;
  }
  return std::nullopt;
}

std::string problem_names() {
  std::string out;
  for (BuiltinProblem p : kAllBuiltins) {
    if (!out.empty()) out += ", ";
    out += problem_name(p);
  }
  return out;
}

ProblemSpec make_problem(BuiltinProblem which) {
  switch (which) {
    case BuiltinProblem::QuadSc: return quad_sc();
    case BuiltinProblem::Quad2d: return quad_2d();
    case BuiltinProblem::PlSin: return pl_sin();
    case BuiltinProblem::QuadDegenerate: return quad_degenerate();
  }
  throw ValidationError("unknown built-in problem");
}

double oracle_argmax_distance(const ProblemSpec& problem, double theta1, double theta2) {
  if (problem.dim_theta != 1) {
    throw ValidationError("oracle_argmax_distance takes scalar theta");
  }
  return problem.oracle().set_distance(Vector{theta1}, Vector{theta2});
}

double oracle_argmax_distance(BuiltinProblem which, double theta1, double theta2) {
  return oracle_argmax_distance(make_problem(which), theta1, theta2);
}

}  // namespace plgame
