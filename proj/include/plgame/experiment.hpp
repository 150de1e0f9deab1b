#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "plgame/problems.hpp"
#include "plgame/solver.hpp"

namespace plgame {

enum class Algorithm { MultistepGda, OnestepGda, OracleGd };
std::string to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// Everything needed to reproduce a run. Unset schedule fields are derived
/// from the problem constants at run time.
struct RunConfig {
  std::string problem = "quad-2d";
  /// One value for a single run; at least three for a sweep.
  std::vector<double> epsilon;
  ScheduleOverrides schedule;
  std::optional<std::vector<double>> theta0;
  std::optional<std::vector<double>> alpha0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::MultistepGda;
  std::string output;
  bool early_exit = false;
  bool adaptive_k = true;
  bool check_inner = false;
  /// Gradient error for oracle-gd. Magnitude defaults to epsilon / 4.
  NoiseMode noise_mode = NoiseMode::None;
  std::optional<double> noise_delta;
};

/// Throws ValidationError on unusable configs (no epsilon, non-positive
/// values, k_inner or t_outer < 1, unknown problem) before anything runs.
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
/// Unknown keys are rejected. A "resolved" section (written by
/// run_experiment) is accepted and ignored.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ScheduleParams& s);

struct RunOutcome {
  std::filesystem::path dir;
  RunStatus status = RunStatus::BudgetExhausted;
  StationarityReport report;
  RunStats stats;
  std::size_t trace_length = 0;
  std::int64_t wall_nanoseconds = 0;
};

/// Runs one configuration (exactly one epsilon) and persists trace.csv,
/// summary.json and config.json under config.output. Divergence is reported
/// through the outcome status with the partial trace persisted.
RunOutcome run_experiment(const RunConfig& config);

struct SweepRow {
  double epsilon = 0.0;
  /// first_hit + 1, i.e. outer iterations executed up to the first hit; 0 if
  /// the run did not converge.
  std::int64_t first_hit_outer_iters = 0;
  std::int64_t total_inner_grad_evals = 0;
  std::int64_t total_outer_grad_evals = 0;
  std::int64_t wall_nanoseconds = 0;
  bool converged = false;
  std::filesystem::path run_dir;
};

struct SweepResult {
  /// Sorted by decreasing epsilon.
  std::vector<SweepRow> rows;
  /// Least-squares slope of log(first_hit_outer_iters) against log(1/eps)
  /// over converged rows; absent with fewer than three.
  std::optional<double> fitted_slope;
  /// Same for log(total_inner_grad_evals).
  std::optional<double> inner_fitted_slope;
};

/// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// Runs base with each epsilon in its own directory (base.output/eps-<i>),
/// up to `jobs` at a time, then writes sweep.csv and sweep.json.
SweepResult run_sweep(const RunConfig& base, std::vector<double> epsilons, int jobs = 1);

/// Writes plot_trace.{csv,svg} for a run directory and/or
/// plot_sweep.{csv,svg} for a sweep directory. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& dir);

}  // namespace plgame
