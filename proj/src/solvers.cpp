#include "accel/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace accel {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Trace, trajectory and timing bookkeeping shared by the solvers. Time spent
/// in recording (reference-gap values, tracker values) is excluded from the
/// reported elapsed time.
class Recorder {
 public:
  Recorder(const Objective& obj, const SolverConfig& cfg, const Telemetry& telemetry)
      : obj_(obj), cfg_(cfg), telemetry_(telemetry) {}

  void resume() {
    if (cfg_.record_timing) start_ = std::chrono::steady_clock::now();
  }
  void pause() {
    if (cfg_.record_timing) elapsed_ += std::chrono::steady_clock::now() - start_;
  }

  double instrument_value(const DenseVector& x) {
    ++extra_value_calls_;
    return obj_.value(x);
  }

  void record(long k, long grad_calls, double alpha, bool fallback, const DenseVector& x,
              const EstimateTracker* tracker) {
    TraceRecord r;
    r.k = k;
    r.grad_calls = grad_calls;
    r.alpha = alpha;
    r.fallback = fallback;
    r.elapsed_ns =
        cfg_.record_timing
            ? std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed_).count()
            : 0;
    r.f_x = kNaN;
    r.f_gap = kNaN;
    r.x_err = kNaN;
    r.phi_star = kNaN;
    r.lambda = kNaN;
    r.v_err = kNaN;
    if (telemetry_.f_ref || tracker) {
      r.f_x = instrument_value(x);
      if (!std::isfinite(r.f_x)) {
        trace_.push_back(r);
        throw DivergenceError("non-finite function value", trace_);
      }
      if (telemetry_.f_ref) r.f_gap = r.f_x - *telemetry_.f_ref;
    }
    if (telemetry_.x_ref) r.x_err = distance(x, *telemetry_.x_ref);
    if (tracker) {
      r.phi_star = tracker->phi_star;
      r.lambda = tracker->lambda;
      if (telemetry_.x_ref) r.v_err = distance(tracker->v, *telemetry_.x_ref);
    }
    trace_.push_back(r);
    if (cfg_.record_trajectory) trajectory_.push_back(x);
  }

  bool targets_met() const {
    if (trace_.empty()) return false;
    if (!telemetry_.stop_f_gap && !telemetry_.stop_x_err) return false;
    const TraceRecord& last = trace_.back();
    if (telemetry_.stop_f_gap && !(last.f_gap < *telemetry_.stop_f_gap)) return false;
    if (telemetry_.stop_x_err && !(last.x_err <= *telemetry_.stop_x_err)) return false;
    return true;
  }

  [[noreturn]] void diverge(const std::string& what) { throw DivergenceError(what, trace_); }

  void finish(SolverResult& result) {
    result.trace = std::move(trace_);
    result.trajectory = std::move(trajectory_);
    result.extra_value_calls = extra_value_calls_;
  }

 private:
  const Objective& obj_;
  const SolverConfig& cfg_;
  const Telemetry& telemetry_;
  std::chrono::steady_clock::time_point start_{};
  std::chrono::steady_clock::duration elapsed_{};
  std::vector<TraceRecord> trace_;
  std::vector<DenseVector> trajectory_;
  long extra_value_calls_ = 0;
};

void check_start(const Objective& obj, const DenseVector& x0, const SolverConfig& cfg) {
  obj.validate();
  cfg.validate();
  if (x0.size() != obj.dim) throw DimensionError("solver: x0 length does not match objective");
  if (!all_finite(x0)) throw std::invalid_argument("solver: x0 has non-finite entries");
}

/// y - g / L, projected onto the feasible ball if there is one.
DenseVector gradient_step(const Objective& obj, const DenseVector& y, const DenseVector& g) {
  DenseVector x = axpby(1.0, y, -1.0 / obj.lip, g);
  if (obj.feasible_radius) x = project_ball(x, *obj.feasible_radius);
  return x;
}

/// (x + alpha v) / (1 + alpha)
DenseVector extrapolate(const DenseVector& x, const DenseVector& v, double alpha) {
  const double w = 1.0 / (1.0 + alpha);
  return axpby(w, x, alpha * w, v);
}

/// v_{k+1} = (1 - a) v_k + a y_k - (a / mu) f'(y_k)
DenseVector advance_center(const DenseVector& v, const DenseVector& y, const DenseVector& g,
                           double alpha, double mu) {
  DenseVector out = axpby(1.0 - alpha, v, alpha, y);
  axpy(-alpha / mu, g.span(), out.span());
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol_grad > 0.0)) throw ConfigError("SolverConfig: tol_grad must be > 0");
  if (max_grad_calls < 1) throw ConfigError("SolverConfig: max_grad_calls must be >= 1");
  if (restart_period && *restart_period < 1) {
    throw ConfigError("SolverConfig: restart_period must be >= 1");
  }
}

EstimateTracker estimate_tracker_update(const EstimateTracker& t, double alpha,
                                        const DenseVector& y, const DenseVector& grad_y,
                                        double f_y, double mu) {
  const DenseVector y_minus_v = axpby(1.0, y, -1.0, t.v);
  const double coupling =
      0.5 * mu * squared_norm(y_minus_v) - dot(grad_y, y_minus_v);  // <g, v - y>
  EstimateTracker next;
  next.phi_star = (1.0 - alpha) * t.phi_star + alpha * f_y -
                  alpha * alpha / (2.0 * mu) * squared_norm(grad_y) +
                  alpha * (1.0 - alpha) * coupling;
  next.v = advance_center(t.v, y, grad_y, alpha, mu);
  next.lambda = (1.0 - alpha) * t.lambda;
  return next;
}

SolverResult nesterov_const_step(const Objective& obj, const DenseVector& x0,
                                 const SolverConfig& cfg, const Telemetry& telemetry) {
  check_start(obj, x0, cfg);
  const double alpha = std::sqrt(obj.rho());
  const double momentum = (1.0 - alpha) / (1.0 + alpha);

  Recorder rec(obj, cfg, telemetry);
  std::optional<EstimateTracker> tracker;
  if (cfg.track_estimate_sequence) tracker = EstimateTracker::start(rec.instrument_value(x0), x0);
  rec.record(0, 0, alpha, false, x0, tracker ? &*tracker : nullptr);

  SolverResult result;
  DenseVector x = x0;
  DenseVector y = x0;
  DenseVector g;
  double g_norm = 0.0;
  long calls = 0;
  long k = 0;

  rec.resume();
  while (!rec.targets_met() && calls < cfg.max_grad_calls) {
    g = obj.gradient(y);
    ++calls;
    g_norm = norm2(g);
    if (!std::isfinite(g_norm)) {
      rec.pause();
      rec.diverge("nesterov_const_step: non-finite gradient");
    }
    if (g_norm <= cfg.tol_grad) {
      result.converged = true;
      break;
    }
    DenseVector x_next = gradient_step(obj, y, g);
    DenseVector y_next = axpby(1.0 + momentum, x_next, -momentum, x);
    rec.pause();
    if (!all_finite(x_next)) rec.diverge("nesterov_const_step: non-finite iterate");
    if (tracker) {
      tracker = estimate_tracker_update(*tracker, alpha, y, g, rec.instrument_value(y), obj.mu);
    }
    ++k;
    rec.record(k, calls, alpha, false, x_next, tracker ? &*tracker : nullptr);
    rec.resume();
    x = std::move(x_next);
    y = std::move(y_next);
  }
  rec.pause();

  result.iterations = k;
  result.grad_calls = calls;
  result.solution = result.converged ? y : x;
  result.state.x = x;
  result.state.y = y;
  result.state.alpha = alpha;
  // v recovered from y = (x + alpha v) / (1 + alpha).
  result.state.v = tracker ? tracker->v : axpby((1.0 + alpha) / alpha, y, -1.0 / alpha, x);
  result.state.grad_y = std::move(g);
  result.state.grad_y_norm = g_norm;
  rec.finish(result);
  return result;
}

SolverResult nesterov_L_restart(const Objective& obj, const DenseVector& x0,
                                const SolverConfig& cfg, const Telemetry& telemetry) {
  check_start(obj, x0, cfg);
  Recorder rec(obj, cfg, telemetry);
  rec.record(0, 0, kNaN, false, x0, nullptr);

  SolverResult result;
  DenseVector x = x0;
  DenseVector y = x0;
  DenseVector g;
  double g_norm = 0.0;
  double t = 1.0;
  long calls = 0;
  long k = 0;

  rec.resume();
  while (!rec.targets_met() && calls < cfg.max_grad_calls) {
    g = obj.gradient(y);
    ++calls;
    g_norm = norm2(g);
    if (!std::isfinite(g_norm)) {
      rec.pause();
      rec.diverge("nesterov_L_restart: non-finite gradient");
    }
    if (g_norm <= cfg.tol_grad) {
      result.converged = true;
      break;
    }
    DenseVector x_next = gradient_step(obj, y, g);
    ++k;
    if (cfg.restart_period && k % *cfg.restart_period == 0) {
      t = 1.0;
      y = x_next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double momentum = (t - 1.0) / t_next;
      y = axpby(1.0 + momentum, x_next, -momentum, x);
      t = t_next;
    }
    rec.pause();
    if (!all_finite(x_next)) rec.diverge("nesterov_L_restart: non-finite iterate");
    rec.record(k, calls, kNaN, false, x_next, nullptr);
    rec.resume();
    x = std::move(x_next);
  }
  rec.pause();

  result.iterations = k;
  result.grad_calls = calls;
  result.solution = result.converged ? y : x;
  result.state.x = x;
  result.state.y = y;
  result.state.v = x;
  result.state.alpha = kNaN;
  result.state.grad_y = std::move(g);
  result.state.grad_y_norm = g_norm;
  rec.finish(result);
  return result;
}

AdaptiveStep adaptive_iteration(const Objective& obj, const IterState& prev,
                                double prev_grad_norm, Heuristic h, int call_budget) {
  if (!(prev_grad_norm > 0.0) || !std::isfinite(prev_grad_norm)) {
    throw std::invalid_argument("adaptive_iteration: previous gradient norm must be positive");
  }
  if (call_budget < 1) throw std::invalid_argument("adaptive_iteration: no gradient budget");
  const double mu = obj.mu;
  const double rho = obj.rho();
  const double alpha0 = std::sqrt(rho);

  AdaptiveStep step;
  IterState& s = step.state;
  s.v = advance_center(prev.v, prev.y, prev.grad_y, prev.alpha, mu);
  const double gap_sq = squared_norm(axpby(1.0, prev.x, -1.0, s.v));
  const double d = mu * mu * gap_sq / (prev_grad_norm * prev_grad_norm);
  if (!std::isfinite(d)) throw NumericalError("adaptive_iteration: non-finite D_k");

  const CubicParams params(rho, d);
  const double trial = std::max(alpha0, std::min(propose_alpha(params, h), kAlphaCeiling));
  DenseVector y = extrapolate(prev.x, s.v, trial);
  DenseVector g = obj.gradient(y);
  step.grad_calls_used = 1;
  double g_norm = norm2(g);
  if (!std::isfinite(g_norm)) throw NumericalError("adaptive_iteration: non-finite gradient");

  bool valid = trial <= alpha0;
  if (!valid) {
    const double lhs = (trial * trial - rho) * g_norm * g_norm;
    const double rhs = mu * mu * gap_sq * trial * (1.0 - trial) / (1.0 + trial);
    valid = lhs <= rhs;
  }

  if (valid) {
    s.alpha = trial;
  } else {
    step.fallback = true;
    if (call_budget < 2) {
      step.accepted = false;
      return step;
    }
    s.alpha = alpha0;
    y = extrapolate(prev.x, s.v, alpha0);
    g = obj.gradient(y);
    step.grad_calls_used = 2;
    g_norm = norm2(g);
    if (!std::isfinite(g_norm)) throw NumericalError("adaptive_iteration: non-finite gradient");
  }
  s.x = gradient_step(obj, y, g);
  if (!all_finite(s.x)) throw NumericalError("adaptive_iteration: non-finite iterate");
  s.y = std::move(y);
  s.grad_y = std::move(g);
  s.grad_y_norm = g_norm;
  return step;
}

SolverResult nesterov_adaptive(const Objective& obj, const DenseVector& x0,
                               const SolverConfig& cfg, const Telemetry& telemetry) {
  check_start(obj, x0, cfg);
  if (!cfg.heuristic) throw ConfigError("nesterov_adaptive: a heuristic is required");
  const Heuristic h = *cfg.heuristic;
  const double alpha0 = std::sqrt(obj.rho());

  Recorder rec(obj, cfg, telemetry);
  std::optional<EstimateTracker> tracker;
  if (cfg.track_estimate_sequence) tracker = EstimateTracker::start(rec.instrument_value(x0), x0);
  rec.record(0, 0, alpha0, false, x0, tracker ? &*tracker : nullptr);

  SolverResult result;
  IterState state;
  state.x = x0;
  state.v = x0;
  state.y = x0;
  state.alpha = alpha0;
  long calls = 0;
  long k = 0;

  auto finish = [&]() {
    result.iterations = k;
    result.grad_calls = calls;
    result.solution = result.converged ? state.y : state.x;
    result.state = std::move(state);
    rec.finish(result);
    return std::move(result);
  };

  rec.resume();
  if (rec.targets_met() || cfg.max_grad_calls < 1) {
    rec.pause();
    return finish();
  }

  // First step is the plain gradient step from y_0 = x_0.
  state.grad_y = obj.gradient(state.y);
  ++calls;
  state.grad_y_norm = norm2(state.grad_y);
  if (!std::isfinite(state.grad_y_norm)) {
    rec.pause();
    rec.diverge("nesterov_adaptive: non-finite gradient");
  }
  if (state.grad_y_norm <= cfg.tol_grad) {
    rec.pause();
    result.converged = true;
    return finish();
  }
  state.x = gradient_step(obj, state.y, state.grad_y);
  rec.pause();
  if (tracker) {
    tracker = estimate_tracker_update(*tracker, alpha0, state.y, state.grad_y,
                                      rec.instrument_value(state.y), obj.mu);
  }
  k = 1;
  rec.record(k, calls, alpha0, false, state.x, tracker ? &*tracker : nullptr);
  rec.resume();

  while (!rec.targets_met() && calls < cfg.max_grad_calls) {
    AdaptiveStep step;
    try {
      const int budget = static_cast<int>(std::min<long>(2, cfg.max_grad_calls - calls));
      step = adaptive_iteration(obj, state, state.grad_y_norm, h, budget);
    } catch (const NumericalError& e) {
      rec.pause();
      rec.diverge(e.what());
    }
    calls += step.grad_calls_used;
    if (!step.accepted) break;
    const bool done = step.state.grad_y_norm <= cfg.tol_grad;
    if (done) {
      // The accepted gradient certifies y_k; x_{k+1} is not reported.
      state.v = std::move(step.state.v);
      state.y = std::move(step.state.y);
      state.alpha = step.state.alpha;
      state.grad_y = std::move(step.state.grad_y);
      state.grad_y_norm = step.state.grad_y_norm;
      result.converged = true;
      break;
    }
    rec.pause();
    if (tracker) {
      tracker = estimate_tracker_update(*tracker, step.state.alpha, step.state.y,
                                        step.state.grad_y, rec.instrument_value(step.state.y),
                                        obj.mu);
    }
    ++k;
    rec.record(k, calls, step.state.alpha, step.fallback, step.state.x,
               tracker ? &*tracker : nullptr);
    rec.resume();
    state = std::move(step.state);
  }
  rec.pause();
  return finish();
}

}  // namespace accel
