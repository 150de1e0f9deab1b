#include "plgame/core.hpp"

#include <cmath>

namespace plgame {

void SmoothnessConstants::validate() const {
  for (double c : {l11, l22, l12, mu}) {
    if (!std::isfinite(c) || c < 0.0) {
      throw ValidationError("smoothness constants must be finite and non-negative");
    }
  }
  if (!(mu > 0.0)) throw ValidationError("PL constant mu must be positive");
  if (mu > l22) throw ValidationError("PL constant mu must not exceed l22 (kappa >= 1)");
}

double InnerOracle::set_distance(const Vector& theta1, const Vector& theta2) const {
  if (argmax_set_distance) return argmax_set_distance(theta1, theta2);
  return distance(argmax_point(theta1), argmax_point(theta2));
}

double InnerOracle::point_distance(const Vector& theta, const Vector& alpha) const {
  if (distance_to_argmax) return distance_to_argmax(theta, alpha);
  return distance(alpha, argmax_point(theta));
}

double InnerOracle::value_gap(const Vector& theta, const Vector& alpha, const ObjectiveFn& f) const {
  if (gap) return gap(theta, alpha);
  return g_value(theta) - f(theta, alpha);
}

const InnerOracle& ProblemSpec::oracle() const {
  if (!inner_oracle) {
    throw UnsupportedOperation("problem '" + name + "' has no inner oracle");
  }
  return *inner_oracle;
}

void ProblemSpec::check_dims(const Vector& theta, const Vector& alpha) const {
  if (theta.size() != dim_theta || alpha.size() != dim_alpha) {
    throw ValidationError("problem '" + name + "' expects dim_theta=" + std::to_string(dim_theta) +
                          ", dim_alpha=" + std::to_string(dim_alpha) + "; got " +
                          std::to_string(theta.size()) + ", " + std::to_string(alpha.size()));
  }
}

Vector checked_gradient(const GradientFn& fn, const Vector& theta, const Vector& alpha,
                        const char* which) {
  Vector g = fn(theta, alpha);
  if (!g.is_finite()) {
    throw EvaluationError(std::string("non-finite ") + which + " at theta=" + to_string(theta) +
                          ", alpha=" + to_string(alpha));
  }
  return g;
}

namespace {

double probe(const ProblemSpec& problem, const Vector& theta, const Vector& alpha,
             const char* block, std::size_t coord) {
  const double v = problem.eval_f(theta, alpha);
  if (!std::isfinite(v)) {
    throw EvaluationError(std::string("non-finite f at finite-difference probe of ") + block +
                          " coordinate " + std::to_string(coord));
  }
  return v;
}

double relative_error(double fd, double analytic) {
  return std::abs(fd - analytic) / std::max(1.0, std::abs(analytic));
}

}  // namespace

GradCheckReport check_gradients(const ProblemSpec& problem, const Vector& theta,
                                const Vector& alpha, double step) {
  problem.check_dims(theta, alpha);
  if (!(step >= 1e-8 && step <= 1e-3)) {
    throw ValidationError("finite-difference step must lie in [1e-8, 1e-3]");
  }
  const Vector gt = checked_gradient(problem.grad_theta, theta, alpha, "grad_theta");
  const Vector ga = checked_gradient(problem.grad_alpha, theta, alpha, "grad_alpha");

  GradCheckReport report;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    Vector plus = theta, minus = theta;
    plus[i] += step;
    minus[i] -= step;
    const double fd = (probe(problem, plus, alpha, "theta", i) -
                       probe(problem, minus, alpha, "theta", i)) /
                      (plus[i] - minus[i]);
    const double err = relative_error(fd, gt[i]);
    if (err > report.theta_rel_error) {
      report.theta_rel_error = err;
      report.theta_worst_coord = i;
    }
  }
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    Vector plus = alpha, minus = alpha;
    plus[j] += step;
    minus[j] -= step;
    const double fd = (probe(problem, theta, plus, "alpha", j) -
                       probe(problem, theta, minus, "alpha", j)) /
                      (plus[j] - minus[j]);
    const double err = relative_error(fd, ga[j]);
    if (err > report.alpha_rel_error) {
      report.alpha_rel_error = err;
      report.alpha_worst_coord = j;
    }
  }
  return report;
}

StationarityNorms stationarity_norms(const ProblemSpec& problem, const Vector& theta,
                                     const Vector& alpha) {
  problem.check_dims(theta, alpha);
  return {checked_gradient(problem.grad_theta, theta, alpha, "grad_theta").norm(),
          checked_gradient(problem.grad_alpha, theta, alpha, "grad_alpha").norm()};
}

}  // namespace plgame
