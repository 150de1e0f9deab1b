#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "plgame/errors.hpp"
#include "plgame/vector.hpp"

namespace plgame {

/// Lipschitz constants of the partial gradients and the inner PL constant.
struct SmoothnessConstants {
  double l11 = 0.0;
  double l22 = 0.0;
  double l12 = 0.0;
  double mu = 1.0;

  /// Throws ValidationError unless all constants are finite and non-negative,
  /// mu > 0 and mu <= l22.
  void validate() const;

  double kappa() const { return l22 / mu; }
  double rho() const { return 1.0 - mu / l22; }
  double l_bar() const { return std::max(l12, l22); }
};

/// Axis-aligned sampling box for numerical checks, one interval for every
/// coordinate of both players.
struct Box {
  double lo = -10.0;
  double hi = 10.0;
};

using ObjectiveFn = std::function<double(const Vector& theta, const Vector& alpha)>;
using GradientFn = std::function<Vector(const Vector& theta, const Vector& alpha)>;

/// Closed-form information about the inner maximization g(theta) = max_alpha f.
struct InnerOracle {
  std::function<double(const Vector& theta)> g_value;
  std::function<Vector(const Vector& theta)> g_grad;
  /// One element of the argmax set.
  std::function<Vector(const Vector& theta)> argmax_point;
  /// Minimal pairing distance between argmax sets. Absent means the argmax is
  /// unique and the distance is ||argmax_point(t1) - argmax_point(t2)||.
  std::function<double(const Vector& theta1, const Vector& theta2)> argmax_set_distance;
  /// Distance from alpha to the argmax set at theta. Absent means unique argmax.
  std::function<double(const Vector& theta, const Vector& alpha)> distance_to_argmax;
  /// g(theta) - f(theta, alpha) in a form that keeps its digits near the
  /// argmax. Absent means g_value(theta) - f(theta, alpha).
  std::function<double(const Vector& theta, const Vector& alpha)> gap;
  /// min_theta g(theta), when known in closed form.
  std::optional<double> g_min;

  double set_distance(const Vector& theta1, const Vector& theta2) const;
  double point_distance(const Vector& theta, const Vector& alpha) const;
  double value_gap(const Vector& theta, const Vector& alpha, const ObjectiveFn& f) const;
};

/// A min-max instance min_theta max_alpha f(theta, alpha).
///
/// Evaluators must be pure: they are called concurrently from estimator
/// kernels.
struct ProblemSpec {
  std::string name;
  std::size_t dim_theta = 1;
  std::size_t dim_alpha = 1;
  ObjectiveFn eval_f;
  GradientFn grad_theta;
  GradientFn grad_alpha;
  SmoothnessConstants constants;
  std::optional<InnerOracle> inner_oracle;
  std::pair<Vector, Vector> default_init{Vector(1), Vector(1)};
  Box box;

  bool has_oracle() const noexcept { return inner_oracle.has_value(); }
  const InnerOracle& oracle() const;  // throws UnsupportedOperation

  /// Throws ValidationError if theta/alpha do not match the declared dims.
  void check_dims(const Vector& theta, const Vector& alpha) const;
};

struct GradCheckReport {
  double theta_rel_error = 0.0;
  double alpha_rel_error = 0.0;
  std::size_t theta_worst_coord = 0;
  std::size_t alpha_worst_coord = 0;

  double max_error() const { return std::max(theta_rel_error, alpha_rel_error); }
};

inline constexpr double kDefaultFdStep = 1e-6;

/// Compares analytic partial gradients with central differences of eval_f.
/// Per coordinate the error is |fd - analytic| / max(1, |analytic|); the
/// report keeps the maximum of each block.
GradCheckReport check_gradients(const ProblemSpec& problem, const Vector& theta,
                                const Vector& alpha, double step = kDefaultFdStep);

struct StationarityNorms {
  double theta = 0.0;
  double alpha = 0.0;

  bool within(double eps_theta, double eps_alpha) const {
    return theta <= eps_theta && alpha <= eps_alpha;
  }
  double worst() const { return std::max(theta, alpha); }
};

StationarityNorms stationarity_norms(const ProblemSpec& problem, const Vector& theta,
                                     const Vector& alpha);

/// Evaluates a gradient callback and throws EvaluationError on non-finite output.
Vector checked_gradient(const GradientFn& fn, const Vector& theta, const Vector& alpha,
                        const char* which);

}  // namespace plgame
