#include "plgame/solver.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace plgame {

namespace {

constexpr double kMaxBudget = 4.0e18;

std::int64_t ceil_to_budget(double x, const char* what) {
  if (!std::isfinite(x) || x > kMaxBudget) {
    throw ValidationError(std::string(what) + " overflows the iteration counter");
  }
  // a product that lands within rounding of an integer counts as that integer,
  // so 54 * 1.125 / 1e-6 gives 60750000 and not 60750001
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace

double compute_outer_smoothness(const SmoothnessConstants& c) {
  return c.l11 + c.l12 * c.l12 / c.mu;
}

double inner_budget_bound(double epsilon, const SmoothnessConstants& c, double delta_inner) {
  const double rho = c.rho();
  if (rho <= 0.0) return std::numeric_limits<double>::infinity();
  const double lbar = c.l_bar();
  return (2.0 * std::log(1.0 / epsilon) + std::log(16.0 * lbar * lbar * delta_inner / c.mu)) /
         std::log(1.0 / rho);
}

std::int64_t compute_inner_budget(double epsilon, const SmoothnessConstants& c,
                                  double delta_inner, SafetyFactors safety) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(delta_inner > 0.0)) throw ValidationError("delta_inner must be positive");
  if (safety.multiplier < 1.0 || safety.additive < 0) {
    throw ValidationError("K safety factors need multiplier >= 1 and additive >= 0");
  }
  c.validate();
  const std::int64_t exact = std::max<std::int64_t>(1, safety.additive + 1);
  // kappa = 1: one step of size 1/l22 lands on the argmax.
  if (c.rho() <= 0.0) return exact;
  const double n1 = inner_budget_bound(epsilon, c, delta_inner);
  if (n1 <= 0.0) return exact;
  return std::max<std::int64_t>(
      1, ceil_to_budget(safety.multiplier * n1, "inner budget") + safety.additive);
}

std::int64_t compute_outer_budget(double epsilon, double l_outer, double delta_g) {
  if (!(epsilon > 0.0) || !(l_outer > 0.0) || !(delta_g >= 0.0)) {
    throw ValidationError("outer budget needs epsilon > 0, L > 0, delta_g >= 0");
  }
  return std::max<std::int64_t>(
      1, ceil_to_budget(18.0 * l_outer * delta_g / (epsilon * epsilon), "outer budget"));
}

ScheduleParams derive_schedule(const ProblemSpec& problem, double epsilon, const Vector& theta0,
                               const Vector& alpha0, const ScheduleOverrides& ov) {
  problem.check_dims(theta0, alpha0);
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be positive and finite");
  }
  const SmoothnessConstants& c = problem.constants;
  c.validate();

  ScheduleParams s;
  s.epsilon = epsilon;
  s.kappa = c.kappa();
  s.rho = c.rho();
  s.l_outer = compute_outer_smoothness(c);
  s.l_bar = c.l_bar();

  auto mark = [&s](const char* key, bool manual) {
    if (manual) s.manual.emplace_back(key);
  };

  s.epsilon_alpha = ov.epsilon_alpha.value_or(epsilon);
  mark("epsilon_alpha", ov.epsilon_alpha.has_value());

  if (ov.eta1) {
    s.eta1 = *ov.eta1;
  } else {
    if (!(c.l22 > 0.0)) throw ValidationError("l22 = 0: eta1 must be given explicitly");
    s.eta1 = 1.0 / c.l22;
  }
  mark("eta1", ov.eta1.has_value());

  if (ov.eta2) {
    s.eta2 = *ov.eta2;
  } else {
    if (!(s.l_outer > 0.0)) throw ValidationError("L = 0: eta2 must be given explicitly");
    s.eta2 = 1.0 / s.l_outer;
  }
  mark("eta2", ov.eta2.has_value());

  s.k_safety_multiplier = ov.k_safety_multiplier.value_or(SafetyFactors{}.multiplier);
  s.k_safety_additive = ov.k_safety_additive.value_or(SafetyFactors{}.additive);
  mark("k_safety_multiplier", ov.k_safety_multiplier.has_value());
  mark("k_safety_additive", ov.k_safety_additive.has_value());

  if (ov.delta_inner) {
    s.delta_inner = *ov.delta_inner;
  } else {
    if (!problem.has_oracle()) {
      throw ValidationError("problem '" + problem.name +
                            "' has no inner oracle: delta_inner must be given");
    }
    const double gap = problem.oracle().g_value(theta0) - problem.eval_f(theta0, alpha0);
    // A start on the argmax measures zero; eps^2 keeps the bound positive.
    s.delta_inner = std::max(4.0 * gap, epsilon * epsilon);
  }
  mark("delta_inner", ov.delta_inner.has_value());

  if (ov.delta_g) {
    s.delta_g = *ov.delta_g;
  } else {
    if (!problem.has_oracle() || !problem.oracle().g_min) {
      throw ValidationError("problem '" + problem.name +
                            "' has no closed-form min of g: delta_g must be given");
    }
    s.delta_g = std::max(0.0, problem.oracle().g_value(theta0) - *problem.oracle().g_min);
  }
  mark("delta_g", ov.delta_g.has_value());

  if (ov.k_inner) {
    s.k_inner = *ov.k_inner;
  } else {
    s.k_inner = compute_inner_budget(epsilon, c, s.delta_inner,
                                     {s.k_safety_multiplier, s.k_safety_additive});
  }
  mark("k_inner", ov.k_inner.has_value());

  s.t_outer = ov.t_outer ? *ov.t_outer : compute_outer_budget(epsilon, s.l_outer, s.delta_g);
  mark("t_outer", ov.t_outer.has_value());
  return s;
}

std::vector<std::string> validate_schedule(const ProblemSpec& problem, const ScheduleParams& s) {
  if (s.k_inner < 1) throw ValidationError("k_inner must be at least 1");
  if (s.t_outer < 1) throw ValidationError("t_outer must be at least 1");
  if (!(s.eta1 > 0.0) || !std::isfinite(s.eta1)) throw ValidationError("eta1 must be positive");
  if (!(s.eta2 > 0.0) || !std::isfinite(s.eta2)) throw ValidationError("eta2 must be positive");
  if (!(s.epsilon > 0.0) || !(s.epsilon_alpha > 0.0)) {
    throw ValidationError("epsilon must be positive");
  }

  std::vector<std::string> warnings;
  const SmoothnessConstants& c = problem.constants;
  const double rel = 1e-12;
  if (c.l22 > 0.0 && s.eta1 > (1.0 + rel) / c.l22) {
    warnings.push_back("eta1 exceeds 1/l22; inner ascent may not be monotone");
  }
  const double l = compute_outer_smoothness(c);
  if (l > 0.0 && s.eta2 > (1.0 + rel) / l) {
    warnings.push_back("eta2 exceeds 1/L; outer descent guarantee void");
  }
  if (std::abs(s.rho - c.rho()) > rel || std::abs(s.kappa - c.kappa()) > rel * c.kappa()) {
    warnings.push_back("schedule rho/kappa do not match the problem constants");
  }
  return warnings;
}

InnerAscentResult inner_ascent(const ProblemSpec& problem, const Vector& theta,
                               const Vector& alpha0, std::int64_t k_steps, double eta1,
                               bool record_f_values) {
  problem.check_dims(theta, alpha0);
  if (k_steps < 1) throw ValidationError("inner_ascent needs K >= 1");
  if (!(eta1 > 0.0)) throw ValidationError("inner_ascent needs eta1 > 0");

  InnerAscentResult out{alpha0, {}};
  if (record_f_values) {
    out.f_values.reserve(static_cast<std::size_t>(k_steps) + 1);
    out.f_values.push_back(problem.eval_f(theta, out.alpha));
  }
  for (std::int64_t k = 0; k < k_steps; ++k) {
    out.alpha.axpy(eta1, problem.grad_alpha(theta, out.alpha));
    if (!out.alpha.is_finite()) {
      throw DivergenceError("inner ascent produced a non-finite iterate at step " +
                                std::to_string(k + 1),
                            k + 1);
    }
    if (record_f_values) out.f_values.push_back(problem.eval_f(theta, out.alpha));
  }
  return out;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::BudgetExhausted: return "budget_exhausted";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

namespace {

/// Per-loop monotonicity and linear-rate bookkeeping.
class InnerLoopCheck {
 public:
  InnerLoopCheck(const ProblemSpec& problem, const Vector& theta, const Vector& alpha0,
                 double rho, std::optional<double> g_theta, RunStats& stats)
      : problem_(problem), theta_(theta), rho_(rho), g_theta_(g_theta), stats_(stats) {
    f_prev_ = problem_.eval_f(theta_, alpha0);
    if (g_theta_) gap0_ = *g_theta_ - f_prev_;
  }

  void after_step(std::int64_t k, const Vector& alpha) {
    const double f = problem_.eval_f(theta_, alpha);
    if (f < f_prev_ - 1e-12 * std::max(1.0, std::abs(f_prev_))) {
      ++stats_.inner_monotonicity_violations;
    }
    f_prev_ = f;
    if (g_theta_ && rho_ > 0.0) {
      const double bound = std::pow(rho_, static_cast<double>(k)) * gap0_ * (1.0 + 1e-9) +
                           1e-12 * std::max(1.0, std::abs(*g_theta_));
      ++stats_.inner_rate_checks;
      if (*g_theta_ - f > bound) ++stats_.inner_rate_violations;
    }
  }

 private:
  const ProblemSpec& problem_;
  const Vector& theta_;
  double rho_;
  std::optional<double> g_theta_;
  RunStats& stats_;
  double f_prev_ = 0.0;
  double gap0_ = 0.0;
};

}  // namespace

RunResult run_multistep_gda(const ProblemSpec& problem, const ScheduleParams& schedule,
                            const Vector& theta0, const Vector& alpha0,
                            const RunOptions& options) {
  problem.check_dims(theta0, alpha0);
  RunResult result;
  result.stats.warnings = validate_schedule(problem, schedule);
  result.report.schedule = schedule;

  const InnerOracle* oracle = problem.has_oracle() ? &problem.oracle() : nullptr;
  Vector theta = theta0;
  Vector alpha = alpha0;
  double best_worst = std::numeric_limits<double>::infinity();

  auto diverge = [&](const std::string& what, std::int64_t t) {
    result.status = RunStatus::Diverged;
    throw DivergenceError(what + " at outer iteration " + std::to_string(t), t,
                          std::move(result));
  };

  for (std::int64_t t = 0; t < schedule.t_outer; ++t) {
    // alpha already holds the previous loop's output: warm start.
    std::optional<double> g_theta;
    if (oracle) g_theta = oracle->g_value(theta);
    std::optional<InnerLoopCheck> check;
    if (options.check_inner) check.emplace(problem, theta, alpha, schedule.rho, g_theta, result.stats);

    std::int64_t used = 0;
    auto ascend = [&](std::int64_t steps) {
      for (std::int64_t k = 0; k < steps; ++k) {
        alpha.axpy(schedule.eta1, problem.grad_alpha(theta, alpha));
        ++used;
        if (!alpha.is_finite()) diverge("non-finite alpha", t);
        if (check) check->after_step(used, alpha);
      }
    };

    ascend(schedule.k_inner);
    Vector grad_a = checked_gradient(problem.grad_alpha, theta, alpha, "grad_alpha");
    if (options.adaptive_k) {
      for (int d = 0; d < options.max_k_doublings && grad_a.norm() > schedule.epsilon_alpha; ++d) {
        ascend(used);
        ++result.stats.k_doublings;
        grad_a = checked_gradient(problem.grad_alpha, theta, alpha, "grad_alpha");
      }
    }
    const Vector grad_t = checked_gradient(problem.grad_theta, theta, alpha, "grad_theta");

    TraceRecord rec;
    rec.t = t;
    rec.theta = theta;
    rec.alpha = alpha;
    rec.grad_theta_norm = grad_t.norm();
    rec.grad_alpha_norm = grad_a.norm();
    rec.inner_iters_used = used;
    rec.f_value = problem.eval_f(theta, alpha);
    if (oracle) {
      rec.g_gap = oracle->value_gap(theta, alpha, problem.eval_f);
      rec.danskin_gap = (grad_t - oracle->g_grad(theta)).norm();
    }
    result.stats.total_inner_grad_evals += used;
    result.stats.total_outer_grad_evals += 1;

    const StationarityNorms norms{rec.grad_theta_norm, rec.grad_alpha_norm};
    const bool hit = norms.within(schedule.epsilon, schedule.epsilon_alpha);
    if (hit && !result.report.first_hit) result.report.first_hit = t;
    if (norms.worst() < best_worst) {
      best_worst = norms.worst();
      result.report.best_index = t;
      result.report.best_norms = norms;
    }
    result.trace.push_back(std::move(rec));
    if (hit && options.early_exit) break;

    theta.axpy(-schedule.eta2, grad_t);
    if (!theta.is_finite()) diverge("non-finite theta", t);
  }

  result.report.converged = result.report.first_hit.has_value();
  result.status = result.report.converged ? RunStatus::Converged : RunStatus::BudgetExhausted;
  return result;
}

RunResult run_onestep_gda(const ProblemSpec& problem, double eta1, double eta2,
                          std::int64_t t_outer, double epsilon, const Vector& theta0,
                          const Vector& alpha0, const RunOptions& options) {
  const SmoothnessConstants& c = problem.constants;
  c.validate();
  ScheduleParams s;
  s.eta1 = eta1;
  s.eta2 = eta2;
  s.k_inner = 1;
  s.t_outer = t_outer;
  s.rho = c.rho();
  s.kappa = c.kappa();
  s.l_outer = compute_outer_smoothness(c);
  s.l_bar = c.l_bar();
  s.epsilon = epsilon;
  s.epsilon_alpha = epsilon;
  s.manual = {"eta1", "eta2", "k_inner", "t_outer"};
  RunOptions opts = options;
  opts.adaptive_k = false;
  return run_multistep_gda(problem, s, theta0, alpha0, opts);
}

std::string to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::None: return "none";
    case NoiseMode::Random: return "random";
    case NoiseMode::Adversarial: return "adversarial";
  }
  return "unknown";
}

std::optional<NoiseMode> parse_noise_mode(std::string_view name) {
  for (NoiseMode m : {NoiseMode::None, NoiseMode::Random, NoiseMode::Adversarial}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

Vector random_direction(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : v) {
      x = normal(rng);
      n2 += x * x;
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
  return Vector(std::move(v));
}

}  // namespace

OracleGdResult run_oracle_gd(const ProblemSpec& problem, double eta2, std::int64_t t_outer,
                             const Vector& theta0, const Perturbation& perturbation,
                             double epsilon, bool early_exit, double descent_tolerance) {
  const InnerOracle& oracle = problem.oracle();
  if (theta0.size() != problem.dim_theta) throw ValidationError("theta0 has wrong dimension");
  if (!(eta2 > 0.0)) throw ValidationError("eta2 must be positive");
  if (t_outer < 1) throw ValidationError("t_outer must be at least 1");
  if (!(perturbation.magnitude >= 0.0)) {
    throw ValidationError("perturbation magnitude must be non-negative");
  }

  OracleGdResult out;
  out.descent_tolerance = descent_tolerance;
  out.min_grad_norm = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(perturbation.seed);
  const double delta = perturbation.mode == NoiseMode::None ? 0.0 : perturbation.magnitude;
  const double half_step = 0.5 * eta2;  // 1 / 2L with L = 1 / eta2

  Vector theta = theta0;
  for (std::int64_t t = 0; t < t_outer; ++t) {
    const double g = oracle.g_value(theta);
    const Vector grad = oracle.g_grad(theta);
    const double gn = grad.norm();

    Vector error(problem.dim_theta, 0.0);
    if (perturbation.mode == NoiseMode::Random ||
        (perturbation.mode == NoiseMode::Adversarial && gn == 0.0)) {
      error = random_direction(problem.dim_theta, rng) * delta;
    } else if (perturbation.mode == NoiseMode::Adversarial) {
      error = grad * (-delta / gn);
    }

    out.trace.push_back({t, theta, g, gn, error.norm()});
    if (gn < out.min_grad_norm) {
      out.min_grad_norm = gn;
      out.best_index = t;
    }
    const bool hit = gn <= epsilon;
    if (hit && !out.first_hit) out.first_hit = t;
    if (hit && early_exit) break;

    Vector next = theta;
    next.axpy(-eta2, grad + error);
    if (!next.is_finite()) {
      throw DivergenceError("oracle gradient descent diverged at iteration " + std::to_string(t),
                            t);
    }
    const double g_next = oracle.g_value(next);
    const double decrease = half_step * gn * gn;
    const double slack = half_step * delta * delta;
    const double rhs = g - decrease + slack;
    const double scale = std::max({std::abs(g), std::abs(g_next), decrease, slack});
    if (g_next > rhs + descent_tolerance * scale) ++out.descent_violations;
    theta = std::move(next);
  }
  return out;
}

}  // namespace plgame
