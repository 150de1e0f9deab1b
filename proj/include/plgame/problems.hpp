#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "plgame/core.hpp"

namespace plgame {

/// Built-in test games. Each has hand-derived constants and a closed-form
/// inner oracle.
///
///   quad-sc          f = 0.5 t^2 + t a - 0.5 a^2                (kappa = 1)
///   quad-2d          f = 0.5 t^2 + t (a1 + a2) - 0.5 (a1^2 + 4 a2^2)
///   pl-sin           f = 0.5 t^2 - (a - t)^2 - 3 sin^2(a - t)   (PL, non-concave)
///   quad-degenerate  f = t (a1 + a2) - 0.5 (a1 + a2 - 1)^2      (argmax is a line)
enum class BuiltinProblem { QuadSc, Quad2d, PlSin, QuadDegenerate };

inline constexpr std::array<BuiltinProblem, 4> kAllBuiltins = {
    BuiltinProblem::QuadSc, BuiltinProblem::Quad2d, BuiltinProblem::PlSin,
    BuiltinProblem::QuadDegenerate};

std::string_view problem_name(BuiltinProblem which);
std::optional<BuiltinProblem> parse_problem(std::string_view name);
/// Comma separated list of valid names, for usage messages.
std::string problem_names();

ProblemSpec make_problem(BuiltinProblem which);

/// Exact minimal pairing distance between A(theta1) and A(theta2).
double oracle_argmax_distance(const ProblemSpec& problem, double theta1, double theta2);
double oracle_argmax_distance(BuiltinProblem which, double theta1, double theta2);

/// x^2 + 3 sin^2 x, the inner residual of pl-sin, and its derivatives.
double pl_sin_residual(double x);
double pl_sin_residual_d1(double x);
double pl_sin_residual_d2(double x);

}  // namespace plgame
