// plgame: solve, sweep, diagnose and plot min-max PL games from the command line.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 no epsilon-stationary point
// within budget (or divergence), 3 diagnostics must-hold failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plgame/diagnostics.hpp"
#include "plgame/experiment.hpp"
#include "plgame/io.hpp"
#include "plgame/problems.hpp"

namespace fs = std::filesystem;
using namespace plgame;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitDiagnostics = 3;

fs::path output_root() {
  if (const char* env = std::getenv("PLGAME_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  for (auto field : io::split(text, ',')) {
    try {
      out.push_back(io::parse_double(field, 0));
    } catch (const ParseError&) {
      throw ValidationError(std::string("--") + flag + ": '" + std::string(field) +
                            "' is not a number");
    }
  }
  return out;
}

/// Flags shared by solve and sweep. Each maps one-to-one onto a config key.
struct RunFlags {
  std::string config;
  std::string problem;
  std::optional<double> epsilon_alpha, eta1, eta2, delta_inner, delta_g, k_safety_multiplier,
      noise_delta;
  std::optional<std::int64_t> k_inner, t_outer, k_safety_additive;
  std::string theta0, alpha0, algorithm, output, noise_mode;
  std::optional<std::uint64_t> seed;
  CLI::Option* early_exit_opt = nullptr;
  bool early_exit = true;
  CLI::Option* adaptive_opt = nullptr;
  bool adaptive_k = true;
  bool check_inner = false;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "JSON config file; flags override its values");
    app.add_option("--problem", problem, "Built-in problem: " + problem_names());
    app.add_option("--epsilon-alpha", epsilon_alpha, "Separate tolerance for ||grad_alpha f||");
    app.add_option("--eta1", eta1, "Inner ascent step (default 1/l22)");
    app.add_option("--eta2", eta2, "Outer descent step (default 1/L)");
    app.add_option("--k-inner", k_inner, "Inner steps per outer step (default derived)");
    app.add_option("--t-outer", t_outer, "Outer iteration budget (default derived)");
    app.add_option("--k-safety-multiplier", k_safety_multiplier, "Multiplier on the inner bound");
    app.add_option("--k-safety-additive", k_safety_additive, "Steps added to the inner bound");
    app.add_option("--delta-inner", delta_inner, "Bound on the inner gap at loop starts");
    app.add_option("--delta-g", delta_g, "Initial outer gap g(theta0) - min g");
    app.add_option("--theta0", theta0, "Comma-separated initial theta");
    app.add_option("--alpha0", alpha0, "Comma-separated initial alpha");
    app.add_option("--seed", seed, "Seed for noise generation");
    app.add_option("--algorithm", algorithm, "multistep-gda | onestep-gda | oracle-gd");
    app.add_option("--output", output, "Run directory (default $PLGAME_OUTPUT_ROOT/...)");
    early_exit_opt = app.add_flag("--early-exit,!--no-early-exit", early_exit,
                                  "Stop at the first epsilon-stationary iterate (default on)");
    adaptive_opt = app.add_flag("--adaptive-k,!--no-adaptive-k", adaptive_k,
                                "Double K when ||grad_alpha f|| > eps after the inner loop");
    app.add_flag("--check-inner", check_inner, "Record inner monotonicity and rate checks");
    app.add_option("--noise-mode", noise_mode, "oracle-gd gradient error: none | random | adversarial");
    app.add_option("--noise-delta", noise_delta, "oracle-gd error magnitude (default eps/4)");
  }

  RunConfig resolve(const CLI::App& app) const {
    RunConfig c;
    c.early_exit = true;
    if (!config.empty()) c = load_config(config);
    if (!problem.empty()) c.problem = problem;
    auto& s = c.schedule;
    if (epsilon_alpha) s.epsilon_alpha = epsilon_alpha;
    if (eta1) s.eta1 = eta1;
    if (eta2) s.eta2 = eta2;
    if (k_inner) s.k_inner = k_inner;
    if (t_outer) s.t_outer = t_outer;
    if (k_safety_multiplier) s.k_safety_multiplier = k_safety_multiplier;
    if (k_safety_additive) s.k_safety_additive = k_safety_additive;
    if (delta_inner) s.delta_inner = delta_inner;
    if (delta_g) s.delta_g = delta_g;
    if (!theta0.empty()) c.theta0 = parse_list(theta0, "theta0");
    if (!alpha0.empty()) c.alpha0 = parse_list(alpha0, "alpha0");
    if (seed) c.seed = *seed;
    if (!algorithm.empty()) {
      auto a = parse_algorithm(algorithm);
      if (!a) throw ValidationError("unknown algorithm '" + algorithm + "'");
      c.algorithm = *a;
    }
    if (!output.empty()) c.output = output;
    if (early_exit_opt->count() > 0) c.early_exit = early_exit;
    if (adaptive_opt->count() > 0) c.adaptive_k = adaptive_k;
    if (check_inner) c.check_inner = true;
    if (!noise_mode.empty()) {
      auto m = parse_noise_mode(noise_mode);
      if (!m) throw ValidationError("unknown noise mode '" + noise_mode + "'");
      c.noise_mode = *m;
    }
    if (noise_delta) c.noise_delta = noise_delta;
    (void)app;
    return c;
  }
};

int cmd_solve(const RunFlags& flags, const CLI::App& app, std::optional<double> epsilon) {
  RunConfig c = flags.resolve(app);
  if (epsilon) c.epsilon = {*epsilon};
  if (c.epsilon.empty()) throw ValidationError("--epsilon (or a config with epsilon) is required");
  if (c.output.empty()) {
    c.output = (output_root() / ("solve-" + c.problem + "-eps" + io::format_double(c.epsilon.front())))
                   .string();
  }
  const RunOutcome o = run_experiment(c);
  const auto& r = o.report;
  std::cout << "problem:     " << c.problem << "\n"
            << "algorithm:   " << to_string(c.algorithm) << "\n"
            << "status:      " << to_string(o.status) << "\n"
            << "first_hit:   " << (r.first_hit ? std::to_string(*r.first_hit) : "none") << "\n"
            << "best_index:  " << r.best_index << "\n"
            << "best_norms:  theta=" << io::format_double(r.best_norms.theta)
            << " alpha=" << io::format_double(r.best_norms.alpha) << "\n"
            << "schedule:    K=" << r.schedule.k_inner << " T=" << r.schedule.t_outer
            << " eta1=" << io::format_double(r.schedule.eta1)
            << " eta2=" << io::format_double(r.schedule.eta2) << "\n"
            << "grad evals:  inner=" << o.stats.total_inner_grad_evals
            << " outer=" << o.stats.total_outer_grad_evals << "\n"
            << "run_dir:     " << o.dir.string() << "\n";
  for (const auto& w : o.stats.warnings) std::cerr << "warning: " << w << "\n";
  return o.status == RunStatus::Converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const RunFlags& flags, const CLI::App& app, const std::string& epsilons, int jobs) {
  RunConfig c = flags.resolve(app);
  std::vector<double> eps = epsilons.empty() ? c.epsilon : parse_list(epsilons, "epsilons");
  if (eps.size() < 3) throw ValidationError("a sweep needs at least three epsilons (--epsilons)");
  if (c.output.empty()) c.output = (output_root() / ("sweep-" + c.problem)).string();
  const SweepResult s = run_sweep(c, eps, jobs);
  std::cout << "epsilon        first_hit_iters  inner_grad_evals  outer_grad_evals  converged\n";
  for (const auto& r : s.rows) {
    std::cout << io::format_double(r.epsilon) << "\t" << r.first_hit_outer_iters << "\t\t"
              << r.total_inner_grad_evals << "\t\t" << r.total_outer_grad_evals << "\t\t"
              << (r.converged ? "yes" : "no") << "\n";
  }
  std::cout << "fitted_slope (log first-hit vs log 1/eps): "
            << (s.fitted_slope ? io::format_double(*s.fitted_slope) : "n/a") << "\n"
            << "inner_fitted_slope (log inner evals vs log 1/eps): "
            << (s.inner_fitted_slope ? io::format_double(*s.inner_fitted_slope) : "n/a") << "\n"
            << "sweep_dir: " << c.output << "\n";
  return kExitOk;
}

int cmd_diagnose(const std::string& problem, const DiagnosticsConfig& config,
                 const std::string& output) {
  const auto which = parse_problem(problem);
  if (!which) {
    throw ValidationError("unknown problem '" + problem + "'; valid names: " + problem_names());
  }
  const DiagnosticsReport report = run_diagnostics(make_problem(*which), config);
  const std::string text = to_json(report).dump(2) + "\n";
  std::cout << text;
  if (!output.empty()) io::write_file(output, text);
  return report.all_must_hold_pass() ? kExitOk : kExitDiagnostics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plgame: multi-step gradient descent-ascent for PL min-max games"};
  app.require_subcommand(1);

  RunFlags solve_flags;
  std::optional<double> solve_epsilon;
  auto* solve = app.add_subcommand("solve", "Run one configuration and persist its trace");
  solve_flags.attach(*solve);
  solve->add_option("--epsilon", solve_epsilon, "Stationarity tolerance");

  RunFlags sweep_flags;
  std::string sweep_eps;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run an epsilon sweep and fit the iteration scaling");
  sweep_flags.attach(*sweep);
  sweep->add_option("--epsilons", sweep_eps, "Comma-separated epsilons (at least three)");
  sweep->add_option("--jobs", jobs, "Concurrent runs (0 = hardware threads)");

  std::string diag_problem;
  DiagnosticsConfig diag;
  bool serial = false;
  std::string diag_output;
  auto* diagnose = app.add_subcommand("diagnose", "Estimate constants and check each claim");
  diagnose->add_option("--problem", diag_problem, "Built-in problem: " + problem_names())
      ->required();
  diagnose->add_option("--seed", diag.seed, "Sampling seed");
  diagnose->add_option("--samples", diag.samples, "Samples per estimator");
  diagnose->add_option("--theta-probes", diag.theta_probes, "Theta values for inner estimators");
  diagnose->add_flag("--serial", serial, "Use the serial reference kernels");
  diagnose->add_option("--output", diag_output, "Also write the JSON report to this file");

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "Emit plot CSV and SVG for a run or sweep directory");
  plot->add_option("dir", plot_dir, "Run or sweep directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_flags, *solve, solve_epsilon);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, *sweep, sweep_eps, jobs);
    if (diagnose->parsed()) {
      if (diag.samples < 100) throw ValidationError("--samples must be at least 100");
      diag.exec = serial ? Execution::Serial : Execution::Parallel;
      return cmd_diagnose(diag_problem, diag, diag_output);
    }
    if (plot->parsed()) {
      for (const auto& f : emit_plot_data(plot_dir)) std::cout << f.string() << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
