#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "plgame/core.hpp"
#include "plgame/kernels.hpp"

namespace plgame {

using kernels::Execution;

enum class SampleMode { Grid, Random };

/// How estimators draw points. Samples are generated serially from `seed`
/// before evaluation, so serial and parallel execution see the same set.
struct SampleSpec {
  SampleMode mode = SampleMode::Random;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  /// Defaults to the problem's box.
  std::optional<Box> box;
  /// Refine the extremal sample with a compass search.
  bool polish = true;
};

/// Samples with h - h* at or below this are excluded (0/0 at the argmax).
inline constexpr double kDegenerateGap = 1e-12;

struct Estimate {
  double value = 0.0;
  std::size_t samples_used = 0;
};

/// min over samples of 0.5 ||grad_alpha f||^2 / (g(theta) - f(theta, alpha)).
/// inner_max overrides the oracle's g(theta).
Estimate estimate_pl_constant(const ProblemSpec& problem, const Vector& theta,
                              const SampleSpec& spec, Execution exec = Execution::Parallel,
                              std::optional<double> inner_max = std::nullopt);

/// min over samples of 2 (g(theta) - f(theta, alpha)) / dist(alpha, A(theta))^2.
Estimate estimate_qg_constant(const ProblemSpec& problem, const Vector& theta,
                              const SampleSpec& spec, Execution exec = Execution::Parallel);

struct LipschitzEstimate {
  double l11 = 0.0;
  double l22 = 0.0;
  double l12 = 0.0;
  std::size_t samples_used = 0;
};

/// Max gradient-difference ratios over n displaced sample pairs. Displacements
/// cycle through the coordinate axes and one random direction per block.
LipschitzEstimate estimate_lipschitz(const ProblemSpec& problem, const SampleSpec& spec,
                                     Execution exec = Execution::Parallel);

struct StabilityResult {
  double max_ratio = 0.0;
  std::vector<double> ratios;  // one per non-degenerate pair, in input order
  std::size_t skipped = 0;     // pairs with theta1 == theta2
};

/// dist(A(theta1), A(theta2)) / ||theta1 - theta2|| for each pair.
StabilityResult verify_stability(const ProblemSpec& problem,
                                 const std::vector<std::pair<Vector, Vector>>& pairs);
/// Same on n seeded sample pairs.
StabilityResult verify_stability(const ProblemSpec& problem, const SampleSpec& spec,
                                 Execution exec = Execution::Parallel);

/// max over sample pairs of ||grad g(theta1) - grad g(theta2)|| / ||theta1 - theta2||.
Estimate verify_g_smoothness(const ProblemSpec& problem, const SampleSpec& spec,
                             Execution exec = Execution::Parallel);

/// ||grad_theta f(theta, alpha) - grad g(theta)||.
double danskin_gap(const ProblemSpec& problem, const Vector& theta, const Vector& alpha);

/// Outcome of one claim: whether it holds with the constant as printed in the
/// source analysis, only with the corrected constant, or not at all.
enum class Verdict { HoldsWithPaperConstant, HoldsWithCorrectedConstant, Violated, Skipped };
std::string to_string(Verdict v);

enum class Relation { AtLeast, AtMost };

struct ClaimCheck {
  std::string name;
  Relation relation = Relation::AtMost;
  std::optional<double> measured;
  double paper_bound = 0.0;
  double corrected_bound = 0.0;
  double tolerance = 1e-6;
  bool must_hold = true;
  Verdict verdict = Verdict::Skipped;

  bool paper_holds() const;
  bool corrected_holds() const;
};

/// Classifies a measured value against both bounds.
ClaimCheck make_claim(std::string name, Relation relation, std::optional<double> measured,
                      double paper_bound, double corrected_bound, double tolerance = 1e-6);

struct DiagnosticsConfig {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  /// Number of theta values at which the inner-problem estimators run; the
  /// first is the problem's default start.
  std::size_t theta_probes = 5;
  Execution exec = Execution::Parallel;
};

struct DiagnosticsReport {
  std::string problem;
  std::optional<double> mu_hat;
  std::optional<double> gamma_hat;
  double l11_hat = 0.0;
  double l22_hat = 0.0;
  double l12_hat = 0.0;
  std::optional<double> stability_ratio_max;
  std::optional<double> g_smoothness_hat;
  std::size_t samples_used = 0;
  std::uint64_t seed = 0;
  std::vector<ClaimCheck> claims;

  bool all_must_hold_pass() const;
  const ClaimCheck& claim(const std::string& name) const;
};

DiagnosticsReport run_diagnostics(const ProblemSpec& problem, const DiagnosticsConfig& config = {});

nlohmann::json to_json(const DiagnosticsReport& report);

}  // namespace plgame
