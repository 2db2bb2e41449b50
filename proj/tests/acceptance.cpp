// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// the number of failures. `acceptance 4 6` runs a subset.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "accel/cubic.hpp"
#include "accel/harness.hpp"
#include "accel/problems.hpp"
#include "accel/reference.hpp"
#include "accel/rng.hpp"
#include "accel/solvers.hpp"
#include "oracles.hpp"

using namespace accel;

namespace {

// Tolerances and limits, one place.
constexpr int kCubicSamples = 100000;
constexpr double kCubicIdentityTol = 1e-12;
constexpr double kCubicRootTol = 1e-10;
constexpr double kCubicSeconds = 5.0;

constexpr long kInvariantIterations = 2000;
constexpr double kInvariantRelSlack = 1e-9;
constexpr double kInvariantSeconds = 30.0;

constexpr long kBoundIterations = 2000;
constexpr double kBoundSeconds = 10.0;

constexpr double kFGapTarget = 1e-12;
constexpr long kBowlAdaptive1Max = 500;
constexpr long kBowlNmulLo = 3000, kBowlNmulHi = 8000;
constexpr long kBowlNlLo = 4000, kBowlNlHi = 10000;
constexpr long kBowlBudget = 20000;
constexpr double kBowlSeconds = 60.0;

constexpr long kBpdnAdaptiveLo = 400, kBpdnAdaptiveHi = 1200;
constexpr long kBpdnNmulLo = 800, kBpdnNmulHi = 2000;
constexpr long kBpdnNlLo = 1200, kBpdnNlHi = 3000;
constexpr long kBpdnBudget = 6000;
constexpr double kBpdnSeconds = 300.0;

constexpr double kXErrTarget = 1e-8;
constexpr double kRidgeGapClosure = 0.15;
constexpr long kRidgeBudget = 6000;
constexpr double kRidgeSeconds = 300.0;

constexpr int kCertifySamples = 10000;
constexpr int kControlSamples = 1000;

constexpr int kFdPoints = 20;
constexpr double kFdRelTol = 1e-5;
constexpr double kFdStep = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string calls_str(std::optional<long> c) { return c ? std::to_string(*c) : "unreached"; }

bool in_range(std::optional<long> c, long lo, long hi) { return c && *c >= lo && *c <= hi; }

std::optional<std::filesystem::path> g_cache;

ExperimentConfig base_config(ProblemKind p, Method m, long budget) {
  ExperimentConfig cfg;
  cfg.problem = p;
  cfg.method = m;
  cfg.max_grad_calls = budget;
  cfg.no_timing = true;
  cfg.cache_dir = g_cache;
  return cfg;
}

/// Calls to the target for the best restart schedule of N_L.
std::optional<long> best_nl(const ProblemInstance& problem, const ReferenceSolution& ref,
                            ExperimentConfig cfg, const std::string& metric, double thr,
                            std::string& which) {
  std::optional<long> best;
  cfg.method = Method::nl;
  for (const auto& schedule : kRestartSchedules) {
    cfg.restart_period = schedule;
    const auto c = run_method(problem, ref, cfg).summary.calls_to(metric, thr);
    if (c && (!best || *c < *best)) {
      best = c;
      which = schedule ? std::to_string(*schedule) : "none";
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  Rng rng(1, 1);
  long bad_identity = 0, bad_root = 0, bad_stationary = 0, bad_order = 0;
  for (int i = 0; i < kCubicSamples; ++i) {
    const double rho = rng.uniform();
    const double d = rng.uniform(0.0, 10.0);
    const CubicParams p(rho, d);
    const double s = std::sqrt(rho);
    const double e = eta(p, s);
    if (!(e <= kCubicIdentityTol && std::abs(e - d * (rho - s)) <= kCubicIdentityTol)) {
      ++bad_identity;
    }
    const double g = gamma(p), b = beta(p);
    if (!(std::abs(eta(p, g)) <= kCubicRootTol)) ++bad_root;
    if (!(std::abs(eta_prime(p, b)) <= kCubicRootTol)) ++bad_stationary;
    if (d > 0 && !(b < g && g < 1.0)) ++bad_order;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = bad_identity == 0 && bad_root == 0 && bad_stationary == 0 && bad_order == 0 &&
           secs < kCubicSeconds;
  o.detail = fmt("%d samples; identity/root/stationary/order failures %ld/%ld/%ld/%ld; %.2fs",
                 kCubicSamples, bad_identity, bad_root, bad_stationary, bad_order, secs);
  return o;
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  RidgeSpec rs;
  rs.m = 120;
  rs.n = 200;
  rs.lambda = 1.0;
  const auto ridge = ridge_build(rs);
  const auto quad = quadratic_build({50, 1e4, 1.0, 0});

  long violations = 0, rows = 0, short_runs = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const Objective* obj : {&ridge.objective, &quad.objective}) {
    const DenseVector x0(obj->dim);
    const double slack = kInvariantRelSlack * std::max(1.0, std::abs(obj->value(x0)));
    SolverConfig cfg;
    cfg.tol_grad = 1e-300;
    cfg.max_grad_calls = 2 * kInvariantIterations + 1;
    cfg.track_estimate_sequence = true;
    cfg.record_timing = false;
    std::vector<std::optional<Heuristic>> variants = {std::nullopt, Heuristic::H1,
                                                      Heuristic::H2, Heuristic::H3,
                                                      Heuristic::H4};
    for (const auto& h : variants) {
      cfg.heuristic = h;
      const auto r = h ? nesterov_adaptive(*obj, x0, cfg) : nesterov_const_step(*obj, x0, cfg);
      if (r.iterations < kInvariantIterations && !r.converged) ++short_runs;
      for (const auto& row : r.trace) {
        if (row.k > kInvariantIterations) break;
        ++rows;
        worst = std::max(worst, (row.f_x - row.phi_star) / slack);
        if (!(row.f_x <= row.phi_star + slack)) ++violations;
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = violations == 0 && short_runs == 0 && secs < kInvariantSeconds;
  o.detail = fmt("%ld rows, %ld violations, max (f - phi*)/slack = %.3g, %ld short runs; %.2fs",
                 rows, violations, worst, short_runs, secs);
  return o;
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  const auto qp = quadratic_build({50, 1e4, 1.0, 0});
  const Objective& obj = qp.objective;
  oracle::Mat q(50, oracle::Vec(50));
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = 0; j < 50; ++j) q[i][j] = qp.data->q(i, j);
  const DenseVector xs(oracle::cholesky_solve(q, qp.data->c.values()));
  const double fstar = obj.value(xs);

  const DenseVector x0(50);
  SolverConfig cfg;
  cfg.tol_grad = 1e-300;
  cfg.max_grad_calls = kBoundIterations;
  cfg.record_trajectory = true;
  cfg.record_timing = false;
  const auto r = nesterov_const_step(obj, x0, cfg);

  const double initial = obj.value(x0) + 0.5 * obj.mu * squared_norm(axpby(1, x0, -1, xs)) - fstar;
  const double rate = 1.0 - std::sqrt(obj.rho());
  long violations = 0;
  for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
    const double fx = obj.value(r.trajectory[k]);
    const double slack = 64 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::abs(fx), std::abs(fstar)});
    if (fx - fstar > std::pow(rate, static_cast<double>(k)) * initial + slack) ++violations;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = violations == 0 && r.iterations == kBoundIterations && secs < kBoundSeconds;
  o.detail = fmt("k = 0..%ld, %ld violations; %.2fs", r.iterations, violations, secs);
  return o;
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = base_config(ProblemKind::bowl, Method::nmul, kBowlBudget);
  cfg.bowl = {500, 4.0};
  cfg.stop_f_gap = kFGapTarget;
  const auto problem = build_problem(cfg);
  const auto ref = reference_solution(problem);

  std::map<Method, std::optional<long>> calls;
  for (auto m : {Method::nmul, Method::adaptive1, Method::adaptive2, Method::adaptive3,
                 Method::adaptive4}) {
    cfg.method = m;
    calls[m] = run_method(problem, ref, cfg).summary.calls_to("fgap", kFGapTarget);
  }
  std::string which;
  const auto nl = best_nl(problem, ref, cfg, "fgap", kFGapTarget, which);

  bool all_beat = calls[Method::nmul].has_value();
  for (auto m : {Method::adaptive1, Method::adaptive2, Method::adaptive3, Method::adaptive4}) {
    all_beat = all_beat && calls[m] && *calls[m] < *calls[Method::nmul];
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = calls[Method::adaptive1] && *calls[Method::adaptive1] <= kBowlAdaptive1Max &&
           in_range(calls[Method::nmul], kBowlNmulLo, kBowlNmulHi) &&
           in_range(nl, kBowlNlLo, kBowlNlHi) && all_beat && secs < kBowlSeconds;
  o.detail = fmt("adaptive1..4 = %s/%s/%s/%s, nmul = %s, nl = %s (restart %s); %.1fs",
                 calls_str(calls[Method::adaptive1]).c_str(),
                 calls_str(calls[Method::adaptive2]).c_str(),
                 calls_str(calls[Method::adaptive3]).c_str(),
                 calls_str(calls[Method::adaptive4]).c_str(),
                 calls_str(calls[Method::nmul]).c_str(), calls_str(nl).c_str(), which.c_str(),
                 secs);
  return o;
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = base_config(ProblemKind::bpdn, Method::nmul, kBpdnBudget);
  cfg.stop_f_gap = kFGapTarget;
  const auto problem = build_problem(cfg);
  ReferenceOptions ropt;
  ropt.cache_dir = g_cache;
  const auto ref = reference_solution(problem, ropt);

  std::map<Method, std::optional<long>> calls;
  bool adaptive_ok = true;
  for (auto m : {Method::nmul, Method::adaptive1, Method::adaptive2, Method::adaptive3,
                 Method::adaptive4}) {
    cfg.method = m;
    calls[m] = run_method(problem, ref, cfg).summary.calls_to("fgap", kFGapTarget);
    if (m != Method::nmul) adaptive_ok = adaptive_ok && in_range(calls[m], kBpdnAdaptiveLo, kBpdnAdaptiveHi);
  }
  std::string which;
  const auto nl = best_nl(problem, ref, cfg, "fgap", kFGapTarget, which);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = adaptive_ok && in_range(calls[Method::nmul], kBpdnNmulLo, kBpdnNmulHi) &&
           in_range(nl, kBpdnNlLo, kBpdnNlHi) && secs < kBpdnSeconds;
  o.detail = fmt("adaptive1..4 = %s/%s/%s/%s, nmul = %s, nl = %s (restart %s); %.1fs",
                 calls_str(calls[Method::adaptive1]).c_str(),
                 calls_str(calls[Method::adaptive2]).c_str(),
                 calls_str(calls[Method::adaptive3]).c_str(),
                 calls_str(calls[Method::adaptive4]).c_str(),
                 calls_str(calls[Method::nmul]).c_str(), calls_str(nl).c_str(), which.c_str(),
                 secs);
  return o;
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = base_config(ProblemKind::ridge, Method::nmul, kRidgeBudget);
  cfg.stop_x_err = kXErrTarget;
  const auto problem = build_problem(cfg);
  ReferenceOptions ropt;
  ropt.cache_dir = g_cache;
  const auto ref = reference_solution(problem, ropt);

  std::map<Method, std::optional<long>> calls;
  for (auto m : {Method::cgls, Method::adaptive1, Method::nmul}) {
    cfg.method = m;
    calls[m] = run_method(problem, ref, cfg).summary.calls_to("xerr", kXErrTarget);
  }
  std::string which;
  const auto nl = best_nl(problem, ref, cfg, "xerr", kXErrTarget, which);
  const auto c = calls[Method::cgls], a = calls[Method::adaptive1], n = calls[Method::nmul];
  // An nl run that misses the target within the budget ranks after every finisher.
  const bool ordered = c && a && n && *c < *a && *a < *n && (!nl || *n < *nl);
  const double closure =
      ordered ? static_cast<double>(*n - *a) / static_cast<double>(*n - *c) : 0.0;
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = ordered && closure >= kRidgeGapClosure && secs < kRidgeSeconds;
  o.detail = fmt("cgls = %s < adaptive1 = %s < nmul = %s < nl = %s (restart %s); "
                 "gap closed %.1f%%; %.1fs",
                 calls_str(c).c_str(), calls_str(a).c_str(), calls_str(n).c_str(),
                 nl ? std::to_string(*nl).c_str() : fmt(">%ld", kRidgeBudget).c_str(),
                 which.empty() ? "-" : which.c_str(), 100 * closure, secs);
  return o;
}

Outcome criterion7() {
  ExperimentConfig cfg = base_config(ProblemKind::ridge, Method::adaptive1, kRidgeBudget);
  cfg.stop_x_err = kXErrTarget;
  const auto problem = build_problem(cfg);
  ReferenceOptions ropt;
  ropt.cache_dir = g_cache;
  const auto ref = reference_solution(problem, ropt);
  auto rate = [&](Method m) {
    cfg.method = m;
    const auto s = run_method(problem, ref, cfg).summary;
    return std::pair<double, long>{static_cast<double>(s.fallbacks) / std::max(1L, s.iterations),
                                   s.iterations};
  };
  const auto [r1, it1] = rate(Method::adaptive1);
  const auto [r4, it4] = rate(Method::adaptive4);
  Outcome o;
  o.pass = r4 > r1;
  o.detail = fmt("fallback rate adaptive4 = %.3f (%ld iterations) vs adaptive1 = %.3f (%ld)",
                 r4, it4, r1, it1);
  return o;
}

Outcome criterion8() {
  long traces = 0, bad_increment = 0, bad_alpha = 0;
  std::vector<ExperimentConfig> problems;
  {
    auto c = base_config(ProblemKind::bowl, Method::nmul, 3000);
    c.bowl = {500, 4.0};
    problems.push_back(c);
    c = base_config(ProblemKind::ridge, Method::nmul, 3000);
    c.ridge = {120, 200, 1.0, 100.0, 1.0, 0};
    problems.push_back(c);
    c = base_config(ProblemKind::bpdn, Method::nmul, 3000);
    c.bpdn.m = 80;
    c.bpdn.n = 200;
    c.bpdn.nnz = 8;
    problems.push_back(c);
    c = base_config(ProblemKind::quadratic, Method::nmul, 3000);
    problems.push_back(c);
  }
  for (auto cfg : problems) {
    cfg.cache_dir.reset();
    const auto problem = build_problem(cfg);
    const auto ref = reference_solution(problem);
    const double sq = std::sqrt(objective_of(problem).rho());
    for (auto m : {Method::nl, Method::nmul, Method::adaptive1, Method::adaptive2,
                   Method::adaptive3, Method::adaptive4}) {
      cfg.method = m;
      const std::vector<std::optional<long>> schedules =
          m == Method::nl ? kRestartSchedules : std::vector<std::optional<long>>{std::nullopt};
      for (const auto& sched : schedules) {
        cfg.restart_period = sched;
        const auto r = run_method(problem, ref, cfg);
        ++traces;
        const bool adaptive = m != Method::nl && m != Method::nmul;
        for (std::size_t k = 1; k < r.trace.size(); ++k) {
          const long inc = r.trace[k].grad_calls - r.trace[k - 1].grad_calls;
          if (adaptive ? (inc != 1 && inc != 2) : inc != 1) ++bad_increment;
        }
        if (m != Method::nl) {
          for (const auto& row : r.trace) {
            if (!(row.alpha >= sq)) ++bad_alpha;
          }
        }
      }
    }
  }
  Outcome o;
  o.pass = bad_increment == 0 && bad_alpha == 0;
  o.detail = fmt("%ld traces; bad increments %ld, alpha below sqrt(rho) %ld", traces,
                 bad_increment, bad_alpha);
  return o;
}

Outcome criterion9() {
  const auto t0 = Clock::now();
  const auto ridge = ridge_load_or_build(RidgeSpec{}, g_cache);
  const auto bowl = bowl_build({500, 4.0});
  const auto bpdn = bpdn_build(BpdnSpec{});
  std::ostringstream detail;
  bool pass = true;
  const std::pair<const char*, const Objective*> items[] = {
      {"ridge", &ridge.objective}, {"bowl", &bowl.objective}, {"bpdn", &bpdn.objective}};
  for (const auto& [name, obj] : items) {
    const auto rep = scvx_lipschitz_certify(*obj, kCertifySamples, 2024);
    pass = pass && rep.passed();
    detail << name << " " << rep.lipschitz_violations + rep.convexity_violations
           << " violations (max L ratio " << fmt("%.3f", rep.worst_lipschitz_ratio) << "); ";
  }
  Objective halved = ridge.objective;
  halved.lip *= 0.5;
  const auto control = scvx_lipschitz_certify(halved, kControlSamples, 2024);
  pass = pass && control.lipschitz_violations > 0;
  detail << "halved-L ridge flagged " << control.lipschitz_violations << "/" << kControlSamples
         << fmt("; %.1fs", seconds_since(t0));
  return {pass, detail.str()};
}

Outcome criterion10() {
  RidgeSpec rs;
  rs.m = 120;
  rs.n = 200;
  BpdnSpec bs;
  bs.m = 80;
  bs.n = 200;
  bs.nnz = 8;
  const auto ridge = ridge_build(rs);
  const auto bowl = bowl_build({500, 4.0});
  const auto bpdn = bpdn_build(bs);
  const auto quad = quadratic_build({50, 1e4, 1.0, 0});
  const std::pair<const char*, const Objective*> items[] = {{"ridge", &ridge.objective},
                                                            {"bowl", &bowl.objective},
                                                            {"bpdn", &bpdn.objective},
                                                            {"quadratic", &quad.objective}};
  Rng rng(10, 10);
  bool pass = true;
  std::ostringstream detail;
  for (const auto& [name, obj] : items) {
    double worst = 0;
    for (int p = 0; p < kFdPoints; ++p) {
      DenseVector x = rng.normal_vector(obj->dim);
      if (obj->feasible_radius) x = scaled(*obj->feasible_radius * rng.uniform() / norm2(x), x);
      // Keep every coordinate well away from the Huber seams.
      for (double& v : x) {
        if (std::abs(std::abs(v) - bs.tau_huber) < 1e3 * kFdStep) v += 2e3 * kFdStep;
      }
      const auto f = [&](const oracle::Vec& v) { return obj->value(DenseVector(v)); };
      const auto fd = oracle::fd_gradient(f, x.values(), kFdStep);
      const DenseVector g = obj->gradient(x);
      double num = 0, den = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        num = std::max(num, std::abs(g[i] - fd[i]));
        den = std::max(den, std::abs(g[i]));
      }
      worst = std::max(worst, num / den);
    }
    pass = pass && worst <= kFdRelTol;
    detail << name << fmt(" %.2e; ", worst);
  }
  detail << kFdPoints << " points each";
  return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  std::string cache;
  app.add_option("criteria", selected, "criterion numbers (default: all)");
  app.add_option("--cache-dir", cache, "cache for generated problems and references");
  CLI11_PARSE(app, argc, argv);
  if (!cache.empty()) {
    std::filesystem::create_directories(cache);
    g_cache = cache;
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"cubic identities", criterion1},
      {"estimate-sequence invariant", criterion2},
      {"constant-step convergence bound", criterion3},
      {"anisotropic bowl gradient calls", criterion4},
      {"smooth BPDN gradient calls", criterion5},
      {"ridge ordering", criterion6},
      {"fallback rate adaptive4 > adaptive1", criterion7},
      {"gradient accounting", criterion8},
      {"class certification", criterion9},
      {"gradient correctness", criterion10},
  };
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::printf("FAIL %2d unknown criterion\n", id);
      ++failures;
      continue;
    }
    const auto& [name, check] = criteria[id - 1];
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures;
}
