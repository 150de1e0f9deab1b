#include "plgame/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>
#include <thread>

#include "plgame/io.hpp"

namespace plgame {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::MultistepGda: return "multistep-gda";
    case Algorithm::OnestepGda: return "onestep-gda";
    case Algorithm::OracleGd: return "oracle-gd";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::MultistepGda, Algorithm::OnestepGda, Algorithm::OracleGd}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

void validate(const RunConfig& c) {
  if (!parse_problem(c.problem)) {
    throw ValidationError("unknown problem '" + c.problem + "'; valid names: " + problem_names());
  }
  if (c.epsilon.empty()) throw ValidationError("epsilon is required");
  for (double e : c.epsilon) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ValidationError("epsilon values must be positive");
  }
  const auto& s = c.schedule;
  auto positive = [](const std::optional<double>& v, const char* key) {
    if (v && (!(*v > 0.0) || !std::isfinite(*v))) {
      throw ValidationError(std::string(key) + " must be positive");
    }
  };
  positive(s.eta1, "eta1");
  positive(s.eta2, "eta2");
  positive(s.delta_inner, "delta_inner");
  positive(s.epsilon_alpha, "epsilon_alpha");
  if (s.delta_g && !(*s.delta_g >= 0.0)) throw ValidationError("delta_g must be non-negative");
  if (s.k_inner && *s.k_inner < 1) throw ValidationError("k_inner must be at least 1");
  if (s.t_outer && *s.t_outer < 1) throw ValidationError("t_outer must be at least 1");
  if (s.k_safety_multiplier && !(*s.k_safety_multiplier >= 1.0)) {
    throw ValidationError("k_safety_multiplier must be >= 1");
  }
  if (s.k_safety_additive && *s.k_safety_additive < 0) {
    throw ValidationError("k_safety_additive must be >= 0");
  }
  if (c.noise_delta && !(*c.noise_delta >= 0.0)) {
    throw ValidationError("noise_delta must be non-negative");
  }
  const ProblemSpec p = make_problem(*parse_problem(c.problem));
  if (c.theta0 && c.theta0->size() != p.dim_theta) {
    throw ValidationError("theta0 must have " + std::to_string(p.dim_theta) + " entries");
  }
  if (c.alpha0 && c.alpha0->size() != p.dim_alpha) {
    throw ValidationError("alpha0 must have " + std::to_string(p.dim_alpha) + " entries");
  }
}

namespace {

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "problem",      "epsilon",     "epsilon_alpha", "eta1",       "eta2",
      "k_inner",      "t_outer",     "k_safety_multiplier",       "k_safety_additive",
      "delta_inner",  "delta_g",     "theta0",        "alpha0",     "seed",
      "algorithm",    "output",      "early_exit",    "adaptive_k", "check_inner",
      "noise_mode",   "noise_delta", "resolved"};
  return keys;
}

}  // namespace

json to_json(const RunConfig& c) {
  const auto& s = c.schedule;
  return {
      {"problem", c.problem},
      {"epsilon", c.epsilon.size() == 1 ? json(c.epsilon.front()) : json(c.epsilon)},
      {"epsilon_alpha", opt_json(s.epsilon_alpha)},
      {"eta1", opt_json(s.eta1)},
      {"eta2", opt_json(s.eta2)},
      {"k_inner", opt_json(s.k_inner)},
      {"t_outer", opt_json(s.t_outer)},
      {"k_safety_multiplier", opt_json(s.k_safety_multiplier)},
      {"k_safety_additive", opt_json(s.k_safety_additive)},
      {"delta_inner", opt_json(s.delta_inner)},
      {"delta_g", opt_json(s.delta_g)},
      {"theta0", opt_json(c.theta0)},
      {"alpha0", opt_json(c.alpha0)},
      {"seed", c.seed},
      {"algorithm", to_string(c.algorithm)},
      {"output", c.output},
      {"early_exit", c.early_exit},
      {"adaptive_k", c.adaptive_k},
      {"check_inner", c.check_inner},
      {"noise_mode", to_string(c.noise_mode)},
      {"noise_delta", opt_json(c.noise_delta)},
  };
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().contains(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  RunConfig c;
  try {
    if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
    if (j.contains("epsilon") && !j.at("epsilon").is_null()) {
      const json& e = j.at("epsilon");
      c.epsilon = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
    }
    auto& s = c.schedule;
    s.epsilon_alpha = opt_get<double>(j, "epsilon_alpha");
    s.eta1 = opt_get<double>(j, "eta1");
    s.eta2 = opt_get<double>(j, "eta2");
    s.k_inner = opt_get<std::int64_t>(j, "k_inner");
    s.t_outer = opt_get<std::int64_t>(j, "t_outer");
    s.k_safety_multiplier = opt_get<double>(j, "k_safety_multiplier");
    s.k_safety_additive = opt_get<std::int64_t>(j, "k_safety_additive");
    s.delta_inner = opt_get<double>(j, "delta_inner");
    s.delta_g = opt_get<double>(j, "delta_g");
    c.theta0 = opt_get<std::vector<double>>(j, "theta0");
    c.alpha0 = opt_get<std::vector<double>>(j, "alpha0");
    c.seed = opt_get<std::uint64_t>(j, "seed").value_or(0);
    if (auto a = opt_get<std::string>(j, "algorithm")) {
      auto parsed = parse_algorithm(*a);
      if (!parsed) throw ValidationError("unknown algorithm '" + *a + "'");
      c.algorithm = *parsed;
    }
    c.output = opt_get<std::string>(j, "output").value_or("");
    c.early_exit = opt_get<bool>(j, "early_exit").value_or(false);
    c.adaptive_k = opt_get<bool>(j, "adaptive_k").value_or(true);
    c.check_inner = opt_get<bool>(j, "check_inner").value_or(false);
    if (auto m = opt_get<std::string>(j, "noise_mode")) {
      auto parsed = parse_noise_mode(*m);
      if (!parsed) throw ValidationError("unknown noise_mode '" + *m + "'");
      c.noise_mode = *parsed;
    }
    c.noise_delta = opt_get<double>(j, "noise_delta");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("cannot parse " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json to_json(const ScheduleParams& s) {
  return {
      {"eta1", s.eta1},
      {"eta2", s.eta2},
      {"k_inner", s.k_inner},
      {"t_outer", s.t_outer},
      {"rho", s.rho},
      {"kappa", s.kappa},
      {"l_outer", s.l_outer},
      {"l_bar", s.l_bar},
      {"delta_inner", s.delta_inner},
      {"delta_g", s.delta_g},
      {"epsilon", s.epsilon},
      {"epsilon_alpha", s.epsilon_alpha},
      {"k_safety_multiplier", s.k_safety_multiplier},
      {"k_safety_additive", s.k_safety_additive},
      {"manual", s.manual},
  };
}

namespace {

/// Oracle gradient descent expressed in the common trace schema: alpha is the
/// oracle argmax, f_value is g, danskin_gap is the injected error norm.
RunResult oracle_gd_as_run(const ProblemSpec& problem, const OracleGdResult& r,
                           const ScheduleParams& schedule) {
  RunResult out;
  out.report.schedule = schedule;
  const InnerOracle& o = problem.oracle();
  for (const OracleGdRecord& rec : r.trace) {
    TraceRecord t;
    t.t = rec.t;
    t.theta = rec.theta;
    t.alpha = o.argmax_point(rec.theta);
    t.grad_theta_norm = rec.grad_g_norm;
    t.grad_alpha_norm = problem.grad_alpha(rec.theta, t.alpha).norm();
    t.inner_iters_used = 0;
    t.f_value = rec.g_value;
    t.g_gap = 0.0;
    t.danskin_gap = rec.error_norm;
    out.trace.push_back(std::move(t));
  }
  out.stats.total_outer_grad_evals = static_cast<std::int64_t>(r.trace.size());
  out.report.first_hit = r.first_hit;
  out.report.best_index = r.best_index;
  if (!r.trace.empty()) {
    const TraceRecord& best = out.trace[static_cast<std::size_t>(r.best_index)];
    out.report.best_norms = {best.grad_theta_norm, best.grad_alpha_norm};
  }
  out.report.converged = r.first_hit.has_value();
  out.status = out.report.converged ? RunStatus::Converged : RunStatus::BudgetExhausted;
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

}  // namespace

RunOutcome run_experiment(const RunConfig& config) {
  validate(config);
  if (config.epsilon.size() != 1) {
    throw ValidationError("a single run takes exactly one epsilon");
  }
  if (config.output.empty()) throw ValidationError("output directory is required");
  const double eps = config.epsilon.front();
  const ProblemSpec problem = make_problem(*parse_problem(config.problem));
  const Vector theta0 = config.theta0 ? Vector(*config.theta0) : problem.default_init.first;
  const Vector alpha0 = config.alpha0 ? Vector(*config.alpha0) : problem.default_init.second;

  ScheduleOverrides overrides = config.schedule;
  if (config.algorithm == Algorithm::OnestepGda) overrides.k_inner = 1;
  const ScheduleParams schedule = derive_schedule(problem, eps, theta0, alpha0, overrides);
  validate_schedule(problem, schedule);

  const fs::path dir(config.output);
  ensure_dir(dir);

  RunOptions options;
  options.early_exit = config.early_exit;
  options.adaptive_k = config.adaptive_k;
  options.check_inner = config.check_inner;

  RunResult result;
  json extra = json::object();
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (config.algorithm) {
      case Algorithm::MultistepGda:
        result = run_multistep_gda(problem, schedule, theta0, alpha0, options);
        break;
      case Algorithm::OnestepGda:
        result = run_onestep_gda(problem, schedule.eta1, schedule.eta2, schedule.t_outer, eps,
                                 theta0, alpha0, options);
        break;
      case Algorithm::OracleGd: {
        const Perturbation noise{config.noise_mode, config.noise_delta.value_or(eps / 4.0),
                                 config.seed};
        const OracleGdResult r = run_oracle_gd(problem, schedule.eta2, schedule.t_outer, theta0,
                                               noise, eps, config.early_exit);
        result = oracle_gd_as_run(problem, r, schedule);
        extra["descent_violations"] = r.descent_violations;
        extra["min_grad_g_norm"] = r.min_grad_norm;
        extra["noise_delta"] = noise.magnitude;
        break;
      }
    }
  } catch (const DivergenceError& e) {
    result = e.partial();
    result.status = RunStatus::Diverged;
    result.report.schedule = schedule;
    extra["divergence"] = e.what();
  }
  const auto wall = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();

  std::ostringstream csv;
  io::write_trace_csv(csv, result.trace, problem.dim_theta, problem.dim_alpha);
  io::write_file(dir / "trace.csv", csv.str());

  const StationarityReport& rep = result.report;
  json summary = {
      {"problem", problem.name},
      {"algorithm", to_string(config.algorithm)},
      {"status", to_string(result.status)},
      {"converged", rep.converged},
      {"first_hit", opt_json(rep.first_hit)},
      {"best_index", rep.best_index},
      {"best_norms", {{"theta", rep.best_norms.theta}, {"alpha", rep.best_norms.alpha}}},
      {"schedule", to_json(rep.schedule)},
      {"counters",
       {{"total_inner_grad_evals", result.stats.total_inner_grad_evals},
        {"total_outer_grad_evals", result.stats.total_outer_grad_evals},
        {"k_doublings", result.stats.k_doublings},
        {"inner_monotonicity_violations", result.stats.inner_monotonicity_violations},
        {"inner_rate_violations", result.stats.inner_rate_violations}}},
      {"trace_length", result.trace.size()},
      {"seed", config.seed},
      {"warnings", result.stats.warnings},
      {"wall_nanoseconds", wall},
  };
  summary.update(extra);
  io::write_file(dir / "summary.json", summary.dump(2) + "\n");

  json resolved = to_json(config);
  resolved["resolved"] = {{"schedule", to_json(schedule)},
                          {"theta0", std::vector<double>(theta0.begin(), theta0.end())},
                          {"alpha0", std::vector<double>(alpha0.begin(), alpha0.end())}};
  io::write_file(dir / "config.json", resolved.dump(2) + "\n");

  RunOutcome out;
  out.dir = dir;
  out.status = result.status;
  out.report = result.report;
  out.stats = result.stats;
  out.trace_length = result.trace.size();
  out.wall_nanoseconds = wall;
  return out;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ValidationError("fit_slope needs at least two paired points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw ValidationError("fit_slope needs distinct x values");
  return sxy / sxx;
}

SweepResult run_sweep(const RunConfig& base, std::vector<double> epsilons, int jobs) {
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());
  if (epsilons.size() < 3) throw ValidationError("a sweep needs at least three distinct epsilons");
  RunConfig probe = base;
  probe.epsilon = epsilons;
  validate(probe);
  if (base.output.empty()) throw ValidationError("output directory is required");
  const fs::path root(base.output);
  ensure_dir(root);

  SweepResult result;
  result.rows.resize(epsilons.size());
  std::vector<std::exception_ptr> errors(epsilons.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < epsilons.size(); i = next++) {
      try {
        RunConfig cfg = base;
        cfg.epsilon = {epsilons[i]};
        cfg.output = (root / ("eps-" + std::to_string(i))).string();
        const RunOutcome o = run_experiment(cfg);
        SweepRow& row = result.rows[i];
        row.epsilon = epsilons[i];
        row.converged = o.report.converged;
        row.first_hit_outer_iters = o.report.first_hit ? *o.report.first_hit + 1 : 0;
        row.total_inner_grad_evals = o.stats.total_inner_grad_evals;
        row.total_outer_grad_evals = o.stats.total_outer_grad_evals;
        row.wall_nanoseconds = o.wall_nanoseconds;
        row.run_dir = o.dir;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads =
      std::clamp(jobs <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : jobs, 1,
                 static_cast<int>(epsilons.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<double> xs, ys, ys_inner;
  for (const SweepRow& r : result.rows) {
    if (!r.converged) continue;
    xs.push_back(std::log(1.0 / r.epsilon));
    ys.push_back(std::log(static_cast<double>(r.first_hit_outer_iters)));
    if (r.total_inner_grad_evals > 0) {
      ys_inner.push_back(std::log(static_cast<double>(r.total_inner_grad_evals)));
    }
  }
  if (xs.size() >= 3) {
    result.fitted_slope = fit_slope(xs, ys);
    if (ys_inner.size() == xs.size()) result.inner_fitted_slope = fit_slope(xs, ys_inner);
  }

  std::ostringstream csv;
  csv << "epsilon,first_hit_outer_iters,total_inner_grad_evals,total_outer_grad_evals,"
         "wall_nanoseconds,converged\n";
  json rows = json::array();
  for (const SweepRow& r : result.rows) {
    csv << io::format_double(r.epsilon) << ',' << r.first_hit_outer_iters << ','
        << r.total_inner_grad_evals << ',' << r.total_outer_grad_evals << ','
        << r.wall_nanoseconds << ',' << (r.converged ? "true" : "false") << '\n';
    rows.push_back({{"epsilon", r.epsilon},
                    {"first_hit_outer_iters", r.first_hit_outer_iters},
                    {"total_inner_grad_evals", r.total_inner_grad_evals},
                    {"total_outer_grad_evals", r.total_outer_grad_evals},
                    {"wall_nanoseconds", r.wall_nanoseconds},
                    {"converged", r.converged},
                    {"run_dir", r.run_dir.string()}});
  }
  io::write_file(root / "sweep.csv", csv.str());
  const json sweep = {{"problem", base.problem},
                      {"rows", rows},
                      {"fitted_slope", opt_json(result.fitted_slope)},
                      {"inner_fitted_slope", opt_json(result.inner_fitted_slope)}};
  io::write_file(root / "sweep.json", sweep.dump(2) + "\n");
  return result;
}

}  // namespace plgame
