#include "plgame/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "plgame/solver.hpp"

namespace plgame {

namespace {

Box box_of(const ProblemSpec& problem, const SampleSpec& spec) {
  const Box b = spec.box.value_or(problem.box);
  if (!(b.hi > b.lo)) throw ValidationError("sampling box must have hi > lo");
  return b;
}

Vector uniform_point(std::size_t dim, const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(box.lo, box.hi);
  std::vector<double> v(dim);
  for (double& x : v) x = u(rng);
  return Vector(std::move(v));
}

Vector unit_direction(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double n2 = 0.0;
  while (n2 == 0.0) {
    n2 = 0.0;
    for (double& x : v) {
      x = normal(rng);
      n2 += x * x;
    }
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
  return Vector(std::move(v));
}

/// Grid (tensor linspace, endpoints included) or seeded uniform samples.
std::vector<Vector> sample_points(std::size_t dim, const SampleSpec& spec, const Box& box) {
  if (spec.n == 0) throw ValidationError("sample count must be positive");
  std::vector<Vector> points;
  if (spec.mode == SampleMode::Random) {
    std::mt19937_64 rng(spec.seed);
    points.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) points.push_back(uniform_point(dim, box, rng));
    return points;
  }
  const auto per_dim = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(spec.n),
                                                      1.0 / static_cast<double>(dim)) +
                                             1e-9)));
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) total *= per_dim;
  points.reserve(total);
  const double h = (box.hi - box.lo) / static_cast<double>(per_dim - 1);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::vector<double> v(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = idx[d] + 1 == per_dim ? box.hi : box.lo + h * static_cast<double>(idx[d]);
    }
    points.emplace_back(std::move(v));
    for (std::size_t d = 0; d < dim; ++d) {
      if (++idx[d] < per_dim) break;
      idx[d] = 0;
    }
  }
  return points;
}

/// A base point plus a displaced point. Displacements cycle through the
/// coordinate axes and one random direction; radii are log-uniform in
/// [1e-3, 1] times the box half-width.
struct DisplacedPair {
  Vector base;
  Vector moved;
};

DisplacedPair displaced(std::size_t dim, std::size_t i, const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> expo(-3.0, 0.0);
  std::bernoulli_distribution coin;
  Vector base = uniform_point(dim, box, rng);
  const double radius = 0.5 * (box.hi - box.lo) * std::pow(10.0, expo(rng));
  const double sign = coin(rng) ? 1.0 : -1.0;
  Vector dir(dim, 0.0);
  const std::size_t slot = i % (dim + 1);
  if (slot < dim) {
    dir[slot] = sign;
  } else {
    dir = unit_direction(dim, rng);
  }
  Vector moved = base;
  moved.axpy(radius, dir);
  return {std::move(base), std::move(moved)};
}

std::vector<DisplacedPair> displaced_pairs(std::size_t dim, const SampleSpec& spec,
                                           const Box& box) {
  if (spec.n == 0) throw ValidationError("sample count must be positive");
  std::mt19937_64 rng(spec.seed);
  std::vector<DisplacedPair> pairs;
  pairs.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) pairs.push_back(displaced(dim, i, box, rng));
  return pairs;
}

void require_clean(const kernels::Extremum& e, const char* what) {
  if (e.failed_index) {
    throw EvaluationError(std::string(what) + ": non-finite value at sample " +
                          std::to_string(*e.failed_index));
  }
}

/// Compass search minimizing fn from x within the box.
template <class Fn>
double compass_polish(Vector x, double fx, Fn&& fn, const Box& box, std::size_t& evals) {
  double step = 0.05 * (box.hi - box.lo);
  for (int iter = 0; iter < 20000 && step > 1e-13; ++iter) {
    bool improved = false;
    for (std::size_t i = 0; i < x.size() && !improved; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector y = x;
        y[i] = std::clamp(y[i] + sign * step, box.lo, box.hi);
        ++evals;
        const std::optional<double> fy = fn(y);
        if (fy && std::isfinite(*fy) && *fy < fx) {
          x = std::move(y);
          fx = *fy;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return fx;
}

double inner_max_at(const ProblemSpec& problem, const Vector& theta,
                    std::optional<double> inner_max) {
  if (inner_max) return *inner_max;
  if (!problem.has_oracle()) {
    throw UnsupportedOperation("problem '" + problem.name +
                               "' has no inner oracle and no inner max was supplied");
  }
  return problem.oracle().g_value(theta);
}

/// Shared driver for the inner-problem ratio estimators: sample, reduce,
/// optionally polish away from the argmax.
template <class RatioFn, class GapFn>
Estimate estimate_inner_min(const ProblemSpec& problem, const SampleSpec& spec, Execution exec,
                            RatioFn&& ratio, GapFn&& gap, double gmax, const char* what) {
  const Box box = box_of(problem, spec);
  const std::vector<Vector> points = sample_points(problem.dim_alpha, spec, box);
  const kernels::Extremum e = kernels::min_ratio(
      points.size(), [&](std::size_t i) { return ratio(points[i]); }, exec);
  require_clean(e, what);
  if (!e.found()) throw EstimationError(std::string(what) + ": no admissible samples");

  Estimate out{e.value, points.size()};
  if (spec.polish) {
    // Stay clear of the argmax, where g - f loses all significant digits.
    const double floor = 1e-8 * std::max(1.0, std::abs(gmax));
    auto guarded = [&](const Vector& a) -> std::optional<double> {
      if (!(gap(a) > floor)) return std::nullopt;
      return ratio(a);
    };
    out.value = compass_polish(points[e.index], e.value, guarded, box, out.samples_used);
  }
  return out;
}

}  // namespace

Estimate estimate_pl_constant(const ProblemSpec& problem, const Vector& theta,
                              const SampleSpec& spec, Execution exec,
                              std::optional<double> inner_max) {
  if (theta.size() != problem.dim_theta) throw ValidationError("theta has wrong dimension");
  const double gmax = inner_max_at(problem, theta, inner_max);
  auto gap = [&](const Vector& a) {
    if (inner_max) return gmax - problem.eval_f(theta, a);
    return problem.oracle().value_gap(theta, a, problem.eval_f);
  };
  auto ratio = [&](const Vector& a) -> std::optional<double> {
    const double h_gap = gap(a);
    if (!std::isfinite(h_gap)) return h_gap;
    if (!(h_gap > kDegenerateGap)) return std::nullopt;
    return 0.5 * problem.grad_alpha(theta, a).squared_norm() / h_gap;
  };
  return estimate_inner_min(problem, spec, exec, ratio, gap, gmax, "estimate_pl_constant");
}

Estimate estimate_qg_constant(const ProblemSpec& problem, const Vector& theta,
                              const SampleSpec& spec, Execution exec) {
  if (theta.size() != problem.dim_theta) throw ValidationError("theta has wrong dimension");
  const InnerOracle& oracle = problem.oracle();
  const double gmax = oracle.g_value(theta);
  auto gap = [&](const Vector& a) { return oracle.value_gap(theta, a, problem.eval_f); };
  auto ratio = [&](const Vector& a) -> std::optional<double> {
    const double h_gap = gap(a);
    if (!std::isfinite(h_gap)) return h_gap;
    if (!(h_gap > kDegenerateGap)) return std::nullopt;
    const double d = oracle.point_distance(theta, a);
    if (!(d > 0.0)) return std::nullopt;
    return 2.0 * h_gap / (d * d);
  };
  return estimate_inner_min(problem, spec, exec, ratio, gap, gmax, "estimate_qg_constant");
}

LipschitzEstimate estimate_lipschitz(const ProblemSpec& problem, const SampleSpec& spec,
                                     Execution exec) {
  const Box box = box_of(problem, spec);
  SampleSpec alpha_spec = spec;
  alpha_spec.seed = spec.seed ^ 0x9e3779b97f4a7c15ULL;
  const auto theta_pairs = displaced_pairs(problem.dim_theta, spec, box);
  const auto alpha_pairs = displaced_pairs(problem.dim_alpha, alpha_spec, box);
  const std::size_t n = theta_pairs.size();

  // Sample i pairs theta_pairs[i] (theta moves) with alpha_pairs[i].base, and
  // alpha_pairs[i] (alpha moves) with theta_pairs[i].base.
  auto ratio = [](const Vector& g1, const Vector& g0, const Vector& x1, const Vector& x0) {
    return (g1 - g0).norm() / (x1 - x0).norm();
  };
  auto l11 = [&](std::size_t i) -> std::optional<double> {
    const auto& [t0, t1] = theta_pairs[i];
    const Vector& a = alpha_pairs[i].base;
    return ratio(problem.grad_theta(t1, a), problem.grad_theta(t0, a), t1, t0);
  };
  auto l12_theta = [&](std::size_t i) -> std::optional<double> {
    const auto& [t0, t1] = theta_pairs[i];
    const Vector& a = alpha_pairs[i].base;
    return ratio(problem.grad_alpha(t1, a), problem.grad_alpha(t0, a), t1, t0);
  };
  auto l22 = [&](std::size_t i) -> std::optional<double> {
    const auto& [a0, a1] = alpha_pairs[i];
    const Vector& t = theta_pairs[i].base;
    return ratio(problem.grad_alpha(t, a1), problem.grad_alpha(t, a0), a1, a0);
  };
  auto l12_alpha = [&](std::size_t i) -> std::optional<double> {
    const auto& [a0, a1] = alpha_pairs[i];
    const Vector& t = theta_pairs[i].base;
    return ratio(problem.grad_theta(t, a1), problem.grad_theta(t, a0), a1, a0);
  };

  const auto e11 = kernels::max_ratio(n, l11, exec);
  const auto e12t = kernels::max_ratio(n, l12_theta, exec);
  const auto e22 = kernels::max_ratio(n, l22, exec);
  const auto e12a = kernels::max_ratio(n, l12_alpha, exec);
  for (const auto* e : {&e11, &e12t, &e22, &e12a}) require_clean(*e, "estimate_lipschitz");

  return {e11.value, e22.value, std::max(e12t.value, e12a.value), 2 * n};
}

StabilityResult verify_stability(const ProblemSpec& problem,
                                 const std::vector<std::pair<Vector, Vector>>& pairs) {
  const InnerOracle& oracle = problem.oracle();
  StabilityResult out;
  for (const auto& [t1, t2] : pairs) {
    const double dt = distance(t1, t2);
    if (dt == 0.0) {
      ++out.skipped;
      continue;
    }
    const double r = oracle.set_distance(t1, t2) / dt;
    out.ratios.push_back(r);
    out.max_ratio = std::max(out.max_ratio, r);
  }
  return out;
}

StabilityResult verify_stability(const ProblemSpec& problem, const SampleSpec& spec,
                                 Execution exec) {
  const InnerOracle& oracle = problem.oracle();
  const auto pairs = displaced_pairs(problem.dim_theta, spec, box_of(problem, spec));
  std::vector<double> ratios(pairs.size(), -1.0);
  const auto e = kernels::max_ratio(
      pairs.size(),
      [&](std::size_t i) -> std::optional<double> {
        const double dt = distance(pairs[i].base, pairs[i].moved);
        if (dt == 0.0) return std::nullopt;
        ratios[i] = oracle.set_distance(pairs[i].base, pairs[i].moved) / dt;
        return ratios[i];
      },
      exec);
  require_clean(e, "verify_stability");
  StabilityResult out;
  out.max_ratio = e.found() ? e.value : 0.0;
  for (double r : ratios) {
    if (r >= 0.0) {
      out.ratios.push_back(r);
    } else {
      ++out.skipped;
    }
  }
  return out;
}

Estimate verify_g_smoothness(const ProblemSpec& problem, const SampleSpec& spec, Execution exec) {
  const InnerOracle& oracle = problem.oracle();
  const auto pairs = displaced_pairs(problem.dim_theta, spec, box_of(problem, spec));
  const auto e = kernels::max_ratio(
      pairs.size(),
      [&](std::size_t i) -> std::optional<double> {
        const double dt = distance(pairs[i].base, pairs[i].moved);
        if (dt == 0.0) return std::nullopt;
        return (oracle.g_grad(pairs[i].moved) - oracle.g_grad(pairs[i].base)).norm() / dt;
      },
      exec);
  require_clean(e, "verify_g_smoothness");
  if (!e.found()) throw EstimationError("verify_g_smoothness: no admissible pairs");
  return {e.value, pairs.size()};
}

double danskin_gap(const ProblemSpec& problem, const Vector& theta, const Vector& alpha) {
  const InnerOracle& oracle = problem.oracle();
  problem.check_dims(theta, alpha);
  return (checked_gradient(problem.grad_theta, theta, alpha, "grad_theta") -
          oracle.g_grad(theta))
      .norm();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsWithPaperConstant: return "holds-with-paper-constant";
    case Verdict::HoldsWithCorrectedConstant: return "holds-with-corrected-constant";
    case Verdict::Violated: return "violated";
    case Verdict::Skipped: return "skipped";
  }
  return "unknown";
}

namespace {

bool satisfies(Relation rel, double measured, double bound, double tol) {
  return rel == Relation::AtLeast ? measured >= bound - tol : measured <= bound + tol;
}

}  // namespace

bool ClaimCheck::paper_holds() const {
  return measured && satisfies(relation, *measured, paper_bound, tolerance);
}

bool ClaimCheck::corrected_holds() const {
  return measured && satisfies(relation, *measured, corrected_bound, tolerance);
}

ClaimCheck make_claim(std::string name, Relation relation, std::optional<double> measured,
                      double paper_bound, double corrected_bound, double tolerance) {
  ClaimCheck c;
  c.name = std::move(name);
  c.relation = relation;
  c.measured = measured;
  c.paper_bound = paper_bound;
  c.corrected_bound = corrected_bound;
  c.tolerance = tolerance;
  if (!measured) {
    c.verdict = Verdict::Skipped;
  } else if (c.paper_holds()) {
    c.verdict = Verdict::HoldsWithPaperConstant;
  } else if (c.corrected_holds()) {
    c.verdict = Verdict::HoldsWithCorrectedConstant;
  } else {
    c.verdict = Verdict::Violated;
  }
  return c;
}

bool DiagnosticsReport::all_must_hold_pass() const {
  return std::all_of(claims.begin(), claims.end(), [](const ClaimCheck& c) {
    return !c.must_hold || c.verdict == Verdict::Skipped || c.corrected_holds();
  });
}

const ClaimCheck& DiagnosticsReport::claim(const std::string& name) const {
  for (const auto& c : claims) {
    if (c.name == name) return c;
  }
  throw ValidationError("no claim named '" + name + "'");
}

namespace {

/// Counts inner-loop steps violating gap_k <= rho^k gap_0 for gradient ascent
/// with step 1/l22 from a random start.
std::int64_t inner_rate_violations(const ProblemSpec& problem, const Vector& theta,
                                   std::mt19937_64& rng, std::size_t& evals) {
  const SmoothnessConstants& c = problem.constants;
  constexpr std::int64_t kSteps = 60;
  const Vector alpha0 = uniform_point(problem.dim_alpha, problem.box, rng);
  const double g = problem.oracle().g_value(theta);
  const auto inner = inner_ascent(problem, theta, alpha0, kSteps, 1.0 / c.l22, true);
  evals += kSteps;
  const double gap0 = g - inner.f_values.front();
  const double abs_tol = 1e-12 * std::max(1.0, std::abs(g));
  std::int64_t violations = 0;
  for (std::size_t k = 1; k < inner.f_values.size(); ++k) {
    const double bound =
        std::pow(c.rho(), static_cast<double>(k)) * gap0 * (1.0 + 1e-9) + abs_tol;
    if (g - inner.f_values[k] > bound) ++violations;
  }
  return violations;
}

}  // namespace

DiagnosticsReport run_diagnostics(const ProblemSpec& problem, const DiagnosticsConfig& config) {
  const SmoothnessConstants& c = problem.constants;
  c.validate();
  DiagnosticsReport report;
  report.problem = problem.name;
  report.seed = config.seed;

  std::mt19937_64 rng(config.seed);
  std::vector<Vector> probes{problem.default_init.first};
  for (std::size_t i = 1; i < config.theta_probes; ++i) {
    probes.push_back(uniform_point(problem.dim_theta, problem.box, rng));
  }

  auto spec_for = [&](std::uint64_t salt) {
    SampleSpec s;
    s.n = config.samples;
    s.seed = config.seed * 1000003ULL + salt;
    return s;
  };

  const LipschitzEstimate lip = estimate_lipschitz(problem, spec_for(1), config.exec);
  report.l11_hat = lip.l11;
  report.l22_hat = lip.l22;
  report.l12_hat = lip.l12;
  report.samples_used += lip.samples_used;

  std::optional<double> danskin_max;
  std::optional<double> rate_violations;
  if (problem.has_oracle()) {
    double mu = std::numeric_limits<double>::infinity();
    double gamma = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    std::int64_t violations = 0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const Estimate pl = estimate_pl_constant(problem, probes[p], spec_for(10 + p), config.exec);
      const Estimate qg = estimate_qg_constant(problem, probes[p], spec_for(100 + p), config.exec);
      mu = std::min(mu, pl.value);
      gamma = std::min(gamma, qg.value);
      report.samples_used += pl.samples_used + qg.samples_used;
      dmax = std::max(dmax, danskin_gap(problem, probes[p], problem.oracle().argmax_point(probes[p])));
      violations += inner_rate_violations(problem, probes[p], rng, report.samples_used);
    }
    report.mu_hat = mu;
    report.gamma_hat = gamma;
    danskin_max = dmax;
    rate_violations = static_cast<double>(violations);

    const StabilityResult stab = verify_stability(problem, spec_for(2), config.exec);
    report.stability_ratio_max = stab.max_ratio;
    const Estimate gs = verify_g_smoothness(problem, spec_for(3), config.exec);
    report.g_smoothness_hat = gs.value;
    report.samples_used += stab.ratios.size() + gs.samples_used;
  }

  const double l_full = compute_outer_smoothness(c);
  const double l_half = c.l11 + c.l12 * c.l12 / (2.0 * c.mu);
  auto& claims = report.claims;
  claims.push_back(make_claim("pl_constant", Relation::AtLeast, report.mu_hat, c.mu, c.mu));
  claims.push_back(
      make_claim("qg_constant", Relation::AtLeast, report.gamma_hat, 4.0 * c.mu, c.mu));
  claims.push_back(make_claim("lipschitz_l11", Relation::AtMost, lip.l11, c.l11, c.l11));
  claims.push_back(make_claim("lipschitz_l22", Relation::AtMost, lip.l22, c.l22, c.l22));
  claims.push_back(make_claim("lipschitz_l12", Relation::AtMost, lip.l12, c.l12, c.l12));
  claims.push_back(make_claim("argmax_stability", Relation::AtMost, report.stability_ratio_max,
                              c.l12 / (2.0 * c.mu), c.l12 / c.mu));
  claims.push_back(make_claim("g_smoothness", Relation::AtMost, report.g_smoothness_hat, l_half,
                              l_full));
  claims.push_back(make_claim("danskin_identity", Relation::AtMost, danskin_max, 1e-10, 1e-10, 0.0));
  claims.push_back(
      make_claim("inner_linear_rate", Relation::AtMost, rate_violations, 0.0, 0.0, 0.0));
  return report;
}

nlohmann::json to_json(const DiagnosticsReport& report) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto side = [](const ClaimCheck& c, bool holds) {
    if (c.verdict == Verdict::Skipped) return "skipped";
    return holds ? "holds" : "violated";
  };
  json claims = json::object();
  for (const ClaimCheck& c : report.claims) {
    claims[c.name] = {
        {"measured", opt(c.measured)},
        {"relation", c.relation == Relation::AtLeast ? "at_least" : "at_most"},
        {"paper_bound", c.paper_bound},
        {"corrected_bound", c.corrected_bound},
        {"tolerance", c.tolerance},
        {"paper_constant", side(c, c.paper_holds())},
        {"corrected_constant", side(c, c.corrected_holds())},
        {"verdict", to_string(c.verdict)},
        {"must_hold", c.must_hold},
    };
  }
  return {
      {"problem", report.problem},
      {"seed", report.seed},
      {"samples_used", report.samples_used},
      {"mu_hat", opt(report.mu_hat)},
      {"gamma_hat", opt(report.gamma_hat)},
      {"l11_hat", report.l11_hat},
      {"l22_hat", report.l22_hat},
      {"l12_hat", report.l12_hat},
      {"stability_ratio_max", opt(report.stability_ratio_max)},
      {"g_smoothness_hat", opt(report.g_smoothness_hat)},
      {"all_must_hold_pass", report.all_must_hold_pass()},
      {"claims", claims},
  };
}

}  // namespace plgame
