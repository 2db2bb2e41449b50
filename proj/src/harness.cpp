#include "accel/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>

#include "accel/cubic.hpp"
#include "accel/errors.hpp"

namespace accel {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string text = trim(value);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ConfigError("invalid number for '" + std::string(key) + "': " + text);
  }
  return v;
}

long long parse_integer(std::string_view key, std::string_view value) {
  const std::string text = trim(value);
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError("invalid integer for '" + std::string(key) + "': " + text);
  }
  return v;
}

std::size_t parse_size(std::string_view key, std::string_view value) {
  const long long v = parse_integer(key, value);
  if (v < 0) throw ConfigError("'" + std::string(key) + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string text = trim(value);
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError("invalid boolean for '" + std::string(key) + "': " + text);
}

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_threshold(double t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.0e", t);
  return buf;
}

std::string restart_label(const ExperimentConfig& cfg) {
  if (cfg.method != Method::nl) return {};
  return cfg.restart_period ? std::to_string(*cfg.restart_period) : "none";
}

std::optional<Heuristic> heuristic_of(Method m) {
  switch (m) {
    case Method::adaptive1: return Heuristic::H1;
    case Method::adaptive2: return Heuristic::H2;
    case Method::adaptive3: return Heuristic::H3;
    case Method::adaptive4: return Heuristic::H4;
    default: return std::nullopt;
  }
}

std::string config_problem_key(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  switch (cfg.problem) {
    case ProblemKind::ridge: {
      RidgeSpec s = cfg.ridge;
      s.seed = cfg.seed;
      return s.key();
    }
    case ProblemKind::bpdn: {
      BpdnSpec s = cfg.bpdn;
      s.seed = cfg.seed;
      return s.key();
    }
    case ProblemKind::bowl:
      os << "bowl:n=" << cfg.bowl.n << ",tau=" << cfg.bowl.tau_ball;
      return os.str();
    case ProblemKind::quadratic:
      os << "quadratic:n=" << cfg.quadratic.n << ",kappa=" << cfg.quadratic.kappa
         << ",mu=" << cfg.quadratic.mu << ",seed=" << cfg.seed;
      return os.str();
  }
  return {};
}

/// Least-squares form of a problem for CGLS: min 1/2||Ax - b||^2 + lambda/2||x||^2.
struct LeastSquaresForm {
  Matrix a;
  DenseVector b;
  double lambda = 0.0;
};

LeastSquaresForm least_squares_form(const ProblemInstance& problem) {
  if (const auto* ridge = std::get_if<RidgeProblem>(&problem)) {
    return {ridge->data->a, ridge->data->b, ridge->spec.lambda};
  }
  if (const auto* quad = std::get_if<QuadraticProblem>(&problem)) {
    // Q = V^T diag(l) V = A^T A with A = diag(sqrt l) V; A^T b = c for
    // b = diag(1 / sqrt l) V c.
    const QuadraticData& d = *quad->data;
    const std::size_t n = d.c.size();
    LeastSquaresForm ls{Matrix(n, n), DenseVector(n), 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      const double root = std::sqrt(d.eigenvalues[k]);
      const auto vk = d.eigenvectors.row(k);
      auto row = ls.a.row(k);
      for (std::size_t j = 0; j < n; ++j) row[j] = root * vk[j];
      ls.b[k] = dot(vk, d.c.span()) / root;
    }
    return ls;
  }
  throw ConfigError("cgls is only available for ridge and quadratic problems");
}

SolverResult run_cgls(const ProblemInstance& problem, const Objective& obj,
                      const DenseVector& x0, const SolverConfig& scfg, const Telemetry& tel) {
  const LeastSquaresForm ls = least_squares_form(problem);
  SolverResult result;
  using clock = std::chrono::steady_clock;
  clock::duration elapsed{};

  auto make_row = [&](long k, const DenseVector& x) {
    TraceRecord r;
    r.k = k;
    r.grad_calls = k;
    r.alpha = kNaN;
    r.fallback = false;
    r.f_x = obj.value(x);
    ++result.extra_value_calls;
    r.f_gap = tel.f_ref ? r.f_x - *tel.f_ref : kNaN;
    r.x_err = tel.x_ref ? distance(x, *tel.x_ref) : kNaN;
    r.elapsed_ns = scfg.record_timing
                       ? std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count()
                       : 0;
    r.phi_star = r.lambda = r.v_err = kNaN;
    result.trace.push_back(r);
    if (scfg.record_trajectory) result.trajectory.push_back(x);
    if (tel.stop_f_gap && !(r.f_gap < *tel.stop_f_gap)) return false;
    if (tel.stop_x_err && !(r.x_err <= *tel.stop_x_err)) return false;
    return tel.stop_f_gap || tel.stop_x_err;
  };

  make_row(0, x0);
  auto start = clock::now();
  const double tol = scfg.tol_grad / std::max(norm2(obj.gradient(x0)), 1e-300);
  const CglsResult sol =
      cgls(ls.a, ls.b, ls.lambda, tol, scfg.max_grad_calls, [&](long it, const DenseVector& x) {
        elapsed += clock::now() - start;
        const bool stop = make_row(it, x);
        start = clock::now();
        return stop;
      });
  result.converged = sol.converged;
  result.iterations = sol.iterations;
  result.grad_calls = sol.iterations;
  result.solution = sol.x;
  result.state.x = sol.x;
  return result;
}

}  // namespace

std::string_view to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::ridge: return "ridge";
    case ProblemKind::bowl: return "bowl";
    case ProblemKind::bpdn: return "bpdn";
    case ProblemKind::quadratic: return "quadratic";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::nl: return "nl";
    case Method::nmul: return "nmul";
    case Method::adaptive1: return "adaptive1";
    case Method::adaptive2: return "adaptive2";
    case Method::adaptive3: return "adaptive3";
    case Method::adaptive4: return "adaptive4";
    case Method::cgls: return "cgls";
  }
  return "?";
}

std::optional<ProblemKind> parse_problem(std::string_view text) {
  for (ProblemKind p : {ProblemKind::ridge, ProblemKind::bowl, ProblemKind::bpdn,
                        ProblemKind::quadratic}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : {Method::nl, Method::nmul, Method::adaptive1, Method::adaptive2,
                   Method::adaptive3, Method::adaptive4, Method::cgls}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (method == Method::cgls && problem != ProblemKind::ridge &&
      problem != ProblemKind::quadratic) {
    throw ConfigError("method cgls requires problem ridge or quadratic");
  }
  if (restart_period && method != Method::nl) {
    throw ConfigError("restart applies only to method nl");
  }
  if (restart_period && *restart_period < 1) throw ConfigError("restart must be >= 1");
  if (!(tol_grad > 0.0)) throw ConfigError("tol-grad must be > 0");
  if (max_grad_calls < 1) throw ConfigError("max-grad-calls must be >= 1");
  if (traj_coords && (traj_coords->first < 1 || traj_coords->second < 1)) {
    throw ConfigError("traj-coords are 1-based");
  }
}

void apply_setting(ExperimentConfig& cfg, std::string_view key_in, std::string_view value) {
  const std::string key = trim(key_in);
  const std::string val = trim(value);
  if (key == "problem") {
    auto p = parse_problem(val);
    if (!p) throw ConfigError("unknown problem: " + val);
    cfg.problem = *p;
  } else if (key == "method") {
    auto m = parse_method(val);
    if (!m) throw ConfigError("unknown method: " + val);
    cfg.method = *m;
  } else if (key == "restart") {
    if (val == "none" || val.empty()) {
      cfg.restart_period.reset();
    } else {
      const long long r = parse_integer(key, val);
      if (r < 1) throw ConfigError("restart must be >= 1 or 'none'");
      cfg.restart_period = r;
    }
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_integer(key, val));
  } else if (key == "tol-grad") {
    cfg.tol_grad = parse_double(key, val);
  } else if (key == "max-grad-calls") {
    cfg.max_grad_calls = static_cast<long>(parse_integer(key, val));
  } else if (key == "out") {
    cfg.out = val;
  } else if (key == "traj") {
    cfg.traj = val;
  } else if (key == "summary") {
    cfg.summary = val;
  } else if (key == "cache-dir") {
    cfg.cache_dir = val;
  } else if (key == "traj-coords") {
    const auto comma = val.find(',');
    if (comma == std::string::npos) throw ConfigError("traj-coords expects i,j");
    cfg.traj_coords = {parse_size(key, val.substr(0, comma)),
                       parse_size(key, val.substr(comma + 1))};
  } else if (key == "no-timing") {
    cfg.no_timing = parse_bool(key, val);
  } else if (key == "stop-f-gap") {
    cfg.stop_f_gap = parse_double(key, val);
  } else if (key == "stop-x-err") {
    cfg.stop_x_err = parse_double(key, val);
  } else if (key == "m") {
    cfg.ridge.m = cfg.bpdn.m = parse_size(key, val);
  } else if (key == "n") {
    const std::size_t n = parse_size(key, val);
    cfg.ridge.n = cfg.bpdn.n = cfg.bowl.n = cfg.quadratic.n = n;
  } else if (key == "lambda") {
    cfg.ridge.lambda = cfg.bpdn.lambda = parse_double(key, val);
  } else if (key == "sigma-max") {
    cfg.ridge.sigma_max = parse_double(key, val);
  } else if (key == "sigma-min") {
    cfg.ridge.sigma_min = parse_double(key, val);
  } else if (key == "tau") {
    cfg.bowl.tau_ball = parse_double(key, val);
  } else if (key == "tau-huber") {
    cfg.bpdn.tau_huber = parse_double(key, val);
  } else if (key == "sigma-scvx") {
    cfg.bpdn.sigma_scvx = parse_double(key, val);
  } else if (key == "nnz") {
    cfg.bpdn.nnz = parse_size(key, val);
  } else if (key == "noise") {
    cfg.bpdn.noise_level = parse_double(key, val);
  } else if (key == "kappa") {
    cfg.quadratic.kappa = parse_double(key, val);
  } else if (key == "mu") {
    cfg.quadratic.mu = parse_double(key, val);
  } else {
    throw ConfigError("unknown setting: " + key);
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(cfg, std::string_view(line).substr(0, eq),
                  std::string_view(line).substr(eq + 1));
  }
}

ProblemInstance build_problem(const ExperimentConfig& cfg) {
  switch (cfg.problem) {
    case ProblemKind::ridge: {
      RidgeSpec spec = cfg.ridge;
      spec.seed = cfg.seed;
      return ridge_load_or_build(spec, cfg.cache_dir);
    }
    case ProblemKind::bowl:
      return bowl_build(cfg.bowl);
    case ProblemKind::bpdn: {
      BpdnSpec spec = cfg.bpdn;
      spec.seed = cfg.seed;
      return bpdn_build(spec);
    }
    case ProblemKind::quadratic: {
      QuadraticSpec spec = cfg.quadratic;
      spec.seed = cfg.seed;
      return quadratic_build(spec);
    }
  }
  throw ConfigError("unknown problem");
}

std::optional<long> Summary::calls_to(std::string_view metric, double threshold) const {
  for (const auto& h : hits) {
    if (h.metric == metric && h.threshold == threshold) return h.grad_calls;
  }
  return std::nullopt;
}

std::optional<std::size_t> first_crossing(const std::vector<TraceRecord>& trace,
                                          std::string_view metric, double threshold) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (metric == "fgap" && trace[i].f_gap < threshold) return i;
    if (metric == "xerr" && trace[i].x_err <= threshold) return i;
  }
  return std::nullopt;
}

Summary summarize(const std::vector<TraceRecord>& trace, const ExperimentConfig& cfg) {
  Summary s;
  s.problem = std::string(to_string(cfg.problem));
  s.method = std::string(to_string(cfg.method));
  s.restart = restart_label(cfg);
  s.seed = cfg.seed;
  if (!trace.empty()) {
    s.iterations = trace.back().k;
    s.grad_calls = trace.back().grad_calls;
  }
  for (const auto& r : trace) s.fallbacks += r.fallback ? 1 : 0;

  auto add = [&](const char* metric, double thr) {
    ThresholdHit hit;
    hit.metric = metric;
    hit.threshold = thr;
    if (auto i = first_crossing(trace, metric, thr)) {
      hit.grad_calls = trace[*i].grad_calls;
      hit.time_ns = trace[*i].elapsed_ns;
    }
    s.hits.push_back(hit);
  };
  for (double t : kFGapThresholds) add("fgap", t);
  for (double t : kXErrThresholds) add("xerr", t);
  return s;
}

long convergence_bound_violations(const std::vector<TraceRecord>& trace, double rho,
                                  double initial_gap) {
  const double rate = 1.0 - std::sqrt(rho);
  long violations = 0;
  for (const auto& r : trace) {
    if (std::isnan(r.f_gap)) continue;
    const double bound = std::pow(rate, static_cast<double>(r.k)) * initial_gap;
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::abs(r.f_x), std::abs(r.f_x - r.f_gap)});
    if (r.f_gap > bound + slack) ++violations;
  }
  return violations;
}

ExperimentResult run_method(const ProblemInstance& problem, const ReferenceSolution& ref,
                            const ExperimentConfig& cfg) {
  cfg.validate();
  const Objective& obj = objective_of(problem);
  const DenseVector x0 = default_start(problem);

  SolverConfig scfg;
  scfg.tol_grad = cfg.tol_grad;
  scfg.max_grad_calls = cfg.max_grad_calls;
  scfg.restart_period = cfg.restart_period;
  scfg.heuristic = heuristic_of(cfg.method);
  scfg.record_trajectory = cfg.traj.has_value();
  scfg.record_timing = !cfg.no_timing;

  Telemetry tel;
  tel.f_ref = ref.f_ref;
  tel.x_ref = ref.x_ref;
  tel.stop_f_gap = cfg.stop_f_gap;
  tel.stop_x_err = cfg.stop_x_err;

  SolverResult sol;
  switch (cfg.method) {
    case Method::nl: sol = nesterov_L_restart(obj, x0, scfg, tel); break;
    case Method::nmul: sol = nesterov_const_step(obj, x0, scfg, tel); break;
    case Method::cgls: sol = run_cgls(problem, obj, x0, scfg, tel); break;
    default: sol = nesterov_adaptive(obj, x0, scfg, tel); break;
  }

  ExperimentResult out;
  out.summary = summarize(sol.trace, cfg);
  out.summary.grad_calls = sol.grad_calls;
  out.summary.converged = sol.converged;
  if (cfg.method == Method::nmul && !obj.feasible_radius && !sol.trace.empty()) {
    const double initial_gap =
        sol.trace.front().f_gap + 0.5 * obj.mu * squared_norm(axpby(1.0, x0, -1.0, ref.x_ref));
    out.summary.bound_violations = convergence_bound_violations(sol.trace, obj.rho(), initial_gap);
  }
  out.trace = std::move(sol.trace);
  out.trajectory = std::move(sol.trajectory);
  out.solution = std::move(sol.solution);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ProblemInstance problem = build_problem(cfg);
  const std::size_t n = objective_of(problem).dim;
  const auto coords = cfg.traj_coords.value_or(std::pair<std::size_t, std::size_t>{1, n});
  if (cfg.traj && (coords.first > n || coords.second > n)) {
    throw ConfigError("traj-coords out of range for dimension " + std::to_string(n));
  }

  ReferenceOptions ropt;
  ropt.cache_dir = cfg.cache_dir;
  const ReferenceSolution ref = reference_solution(problem, ropt);
  ExperimentResult result = run_method(problem, ref, cfg);

  if (cfg.out) {
    std::ofstream os(*cfg.out);
    if (!os) throw ConfigError("cannot write " + cfg.out->string());
    write_trace_csv(os, result.trace);
  }
  if (cfg.traj) {
    std::ofstream os(*cfg.traj);
    if (!os) throw ConfigError("cannot write " + cfg.traj->string());
    write_trajectory_csv(os, trajectory_projection(result.trajectory, coords.first, coords.second),
                         coords.first, coords.second);
  }
  if (cfg.summary) {
    std::ofstream os(*cfg.summary);
    if (!os) throw ConfigError("cannot write " + cfg.summary->string());
    os << summary_header() << '\n';
    write_summary_row(os, result.summary);
  }
  return result;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << r.k << ',' << r.grad_calls << ',' << format_double(r.alpha) << ','
       << (r.fallback ? 1 : 0) << ',' << format_double(r.f_gap) << ','
       << format_double(r.x_err) << ',' << r.elapsed_ns << '\n';
  }
}

std::string summary_header() {
  std::string h = "problem,method,restart,seed,iterations,grad_calls,fallbacks,converged";
  for (double t : kFGapThresholds) {
    h += ",calls_fgap_" + format_threshold(t) + ",time_ns_fgap_" + format_threshold(t);
  }
  for (double t : kXErrThresholds) {
    h += ",calls_xerr_" + format_threshold(t) + ",time_ns_xerr_" + format_threshold(t);
  }
  h += ",bound_violations";
  return h;
}

void write_summary_row(std::ostream& os, const Summary& s) {
  os << s.problem << ',' << s.method << ',' << s.restart << ',' << s.seed << ','
     << s.iterations << ',' << s.grad_calls << ',' << s.fallbacks << ','
     << (s.converged ? 1 : 0);
  for (const auto& h : s.hits) {
    os << ',';
    if (h.grad_calls) os << *h.grad_calls;
    os << ',';
    if (h.time_ns) os << *h.time_ns;
  }
  os << ',';
  if (s.bound_violations) os << *s.bound_violations;
  os << '\n';
}

std::vector<std::pair<double, double>> trajectory_projection(
    const std::vector<DenseVector>& trajectory, std::size_t i, std::size_t j) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(trajectory.size());
  for (const auto& x : trajectory) {
    if (i < 1 || j < 1 || i > x.size() || j > x.size()) {
      throw ConfigError("trajectory coordinate out of range");
    }
    rows.emplace_back(x[i - 1], x[j - 1]);
  }
  return rows;
}

void write_trajectory_csv(std::ostream& os, const std::vector<std::pair<double, double>>& rows,
                          std::size_t i, std::size_t j) {
  os << "k,x" << i << ",x" << j << '\n';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    os << k << ',' << format_double(rows[k].first) << ',' << format_double(rows[k].second)
       << '\n';
  }
}

bool ranks_before(const Summary& a, const Summary& b, const RankTarget& rank) {
  const auto ca = a.calls_to(rank.metric, rank.threshold);
  const auto cb = b.calls_to(rank.metric, rank.threshold);
  if (ca && cb) return *ca < *cb;
  return ca.has_value() && !cb.has_value();
}

std::vector<Summary> compare(const std::vector<ExperimentConfig>& cfgs,
                             const CompareOptions& options) {
  if (cfgs.empty()) throw ConfigError("compare: no experiments");
  const std::string key = config_problem_key(cfgs.front());
  for (const auto& c : cfgs) {
    c.validate();
    if (c.problem != cfgs.front().problem || c.seed != cfgs.front().seed ||
        config_problem_key(c) != key) {
      throw ConfigError("compare: all experiments must share problem and seed");
    }
  }

  const ProblemInstance problem = build_problem(cfgs.front());
  ReferenceOptions ropt;
  ropt.cache_dir = cfgs.front().cache_dir;
  const ReferenceSolution ref = reference_solution(problem, ropt);

  // Expand nl configs without a schedule into one run per schedule.
  std::vector<ExperimentConfig> runs;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    if (cfgs[i].method == Method::nl && !cfgs[i].restart_period) {
      for (const auto& schedule : kRestartSchedules) {
        ExperimentConfig c = cfgs[i];
        c.restart_period = schedule;
        c.out.reset();
        c.traj.reset();
        runs.push_back(c);
        owner.push_back(i);
      }
    } else {
      runs.push_back(cfgs[i]);
      owner.push_back(i);
    }
  }

  std::vector<Summary> results(runs.size());
  if (options.parallel) {
    std::vector<std::future<Summary>> jobs;
    for (const auto& c : runs) {
      jobs.push_back(std::async(std::launch::async,
                                [&problem, &ref, c] { return run_method(problem, ref, c).summary; }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      results[i] = run_method(problem, ref, runs[i]).summary;
    }
  }

  std::vector<std::optional<Summary>> best(cfgs.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    auto& slot = best[owner[r]];
    if (!slot || ranks_before(results[r], *slot, options.rank)) slot = results[r];
  }
  std::vector<Summary> out;
  for (auto& s : best) out.push_back(std::move(*s));
  return out;
}

void write_eta_csv(std::ostream& os, double rho, double d, int samples) {
  if (samples < 2) throw ConfigError("eta: samples must be >= 2");
  const CubicParams p(rho, d);
  os << "alpha,eta\n";
  for (int i = 0; i < samples; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(samples - 1);
    os << format_double(a) << ',' << format_double(eta(p, a)) << '\n';
  }
}

}  // namespace accel
