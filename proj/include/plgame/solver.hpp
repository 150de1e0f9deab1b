#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plgame/core.hpp"

namespace plgame {

struct SafetyFactors {
  double multiplier = 1.5;
  std::int64_t additive = 5;
};

/// Run parameters of multi-step GDA, derived from the problem constants or
/// overridden by the caller. Overridden fields are listed in `manual`.
struct ScheduleParams {
  double eta1 = 0.0;
  double eta2 = 0.0;
  std::int64_t k_inner = 1;
  std::int64_t t_outer = 1;
  double rho = 0.0;
  double kappa = 1.0;
  double l_outer = 0.0;
  double l_bar = 0.0;
  double delta_inner = 0.0;
  double delta_g = 0.0;
  double epsilon = 0.0;
  /// Tolerance on ||grad_alpha||. Equal to epsilon unless configured.
  double epsilon_alpha = 0.0;
  double k_safety_multiplier = 1.5;
  std::int64_t k_safety_additive = 5;
  std::vector<std::string> manual;
};

struct ScheduleOverrides {
  std::optional<double> eta1;
  std::optional<double> eta2;
  std::optional<std::int64_t> k_inner;
  std::optional<std::int64_t> t_outer;
  std::optional<double> k_safety_multiplier;
  std::optional<std::int64_t> k_safety_additive;
  std::optional<double> delta_inner;
  std::optional<double> delta_g;
  std::optional<double> epsilon_alpha;
};

/// L = l11 + l12^2 / mu, the smoothness constant of g used for the outer step.
double compute_outer_smoothness(const SmoothnessConstants& c);

/// (2 log(1/eps) + log(16 lbar^2 delta / mu)) / log(1/rho). Infinite when rho = 0.
double inner_budget_bound(double epsilon, const SmoothnessConstants& c, double delta_inner);

/// K = max(1, ceil(multiplier * N1) + additive). When rho = 0 or N1 <= 0 a
/// single exact step suffices and max(1, additive + 1) is returned.
std::int64_t compute_inner_budget(double epsilon, const SmoothnessConstants& c,
                                  double delta_inner, SafetyFactors safety = {});

/// T = max(1, ceil(18 L delta_g / eps^2)).
std::int64_t compute_outer_budget(double epsilon, double l_outer, double delta_g);

/// Fills every unspecified field from the problem constants. delta_inner
/// defaults to 4 (g(theta0) - f(theta0, alpha0)) and delta_g to
/// g(theta0) - g_min; both need the inner oracle when not overridden.
ScheduleParams derive_schedule(const ProblemSpec& problem, double epsilon, const Vector& theta0,
                               const Vector& alpha0, const ScheduleOverrides& overrides = {});

/// Throws ValidationError for unusable schedules (non-positive steps or
/// budgets). Returns warnings for schedules that void the convergence
/// guarantee, e.g. eta1 > 1/l22.
std::vector<std::string> validate_schedule(const ProblemSpec& problem, const ScheduleParams& s);

struct InnerAscentResult {
  Vector alpha;
  /// f(theta, alpha_k) for k = 0..K when requested, else empty.
  std::vector<double> f_values;
};

/// K plain gradient-ascent steps on f(theta, .) from alpha0.
InnerAscentResult inner_ascent(const ProblemSpec& problem, const Vector& theta,
                               const Vector& alpha0, std::int64_t k_steps, double eta1,
                               bool record_f_values = true);

struct TraceRecord {
  std::int64_t t = 0;
  Vector theta{0.0};
  /// The inner loop's output paired with theta_t.
  Vector alpha{0.0};
  double grad_theta_norm = 0.0;
  double grad_alpha_norm = 0.0;
  std::int64_t inner_iters_used = 0;
  double f_value = 0.0;
  std::optional<double> g_gap;
  std::optional<double> danskin_gap;
};

struct StationarityReport {
  std::optional<std::int64_t> first_hit;
  std::int64_t best_index = 0;
  StationarityNorms best_norms;
  ScheduleParams schedule;
  bool converged = false;
};

enum class RunStatus { Converged, BudgetExhausted, Diverged };
std::string to_string(RunStatus status);

struct RunOptions {
  /// Stop right after the first epsilon-stationary record.
  bool early_exit = false;
  /// Double K (up to max_k_doublings times) when ||grad_alpha|| > eps_alpha
  /// after the scheduled inner loop.
  bool adaptive_k = true;
  int max_k_doublings = 3;
  /// Track inner-loop monotonicity and, on oracle problems with rho > 0, the
  /// linear-rate bound gap_k <= rho^k gap_0. Costs one f evaluation per step.
  bool check_inner = false;
};

struct RunStats {
  std::int64_t total_inner_grad_evals = 0;
  std::int64_t total_outer_grad_evals = 0;
  std::int64_t k_doublings = 0;
  std::int64_t inner_monotonicity_violations = 0;
  std::int64_t inner_rate_violations = 0;
  std::int64_t inner_rate_checks = 0;
  std::vector<std::string> warnings;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  StationarityReport report;
  RunStats stats;
  RunStatus status = RunStatus::BudgetExhausted;
};

/// Non-finite iterate. Carries the step index (inner step for inner_ascent,
/// outer iteration for runs) and the trace recorded before the failure.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::int64_t step, RunResult partial = {})
      : Error(what), step_(step), partial_(std::make_shared<RunResult>(std::move(partial))) {}
  std::int64_t step() const noexcept { return step_; }
  const RunResult& partial() const { return *partial_; }

 private:
  std::int64_t step_;
  std::shared_ptr<RunResult> partial_;
};

/// Multi-step gradient descent-ascent: per outer step, K warm-started ascent
/// steps on alpha followed by one descent step on theta.
RunResult run_multistep_gda(const ProblemSpec& problem, const ScheduleParams& schedule,
                            const Vector& theta0, const Vector& alpha0,
                            const RunOptions& options = {});

/// Baseline with a single ascent step per descent step.
RunResult run_onestep_gda(const ProblemSpec& problem, double eta1, double eta2,
                          std::int64_t t_outer, double epsilon, const Vector& theta0,
                          const Vector& alpha0, const RunOptions& options = {});

enum class NoiseMode { None, Random, Adversarial };
std::string to_string(NoiseMode mode);
std::optional<NoiseMode> parse_noise_mode(std::string_view name);

/// Gradient error injected into oracle gradient descent, ||e_t|| = magnitude.
/// Random draws a seeded uniform direction; Adversarial points against the
/// true gradient (seeded random direction where the gradient vanishes).
struct Perturbation {
  NoiseMode mode = NoiseMode::None;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

struct OracleGdRecord {
  std::int64_t t = 0;
  Vector theta{0.0};
  double g_value = 0.0;
  double grad_g_norm = 0.0;
  double error_norm = 0.0;
};

struct OracleGdResult {
  std::vector<OracleGdRecord> trace;
  std::optional<std::int64_t> first_hit;
  std::int64_t best_index = 0;
  double min_grad_norm = 0.0;
  /// Steps violating g(t+1) <= g(t) - |grad g|^2 / 2L + delta^2 / 2L, L = 1/eta2.
  std::int64_t descent_violations = 0;
  double descent_tolerance = 1e-9;
};

/// Gradient descent on g using the oracle gradient plus a bounded error.
OracleGdResult run_oracle_gd(const ProblemSpec& problem, double eta2, std::int64_t t_outer,
                             const Vector& theta0, const Perturbation& perturbation = {},
                             double epsilon = 0.0, bool early_exit = false,
                             double descent_tolerance = 1e-9);

}  // namespace plgame
