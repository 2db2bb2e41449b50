#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "accel/cubic.hpp"
#include "accel/errors.hpp"
#include "accel/problems.hpp"
#include "accel/vecops.hpp"

namespace accel {

/// Snapshot of one solver iteration.
///
/// `x` is the newest iterate x_{k+1}; `v`, `y`, `alpha` and `grad_y` are the
/// estimate-sequence center v_k, extrapolated point y_k = (x_k + alpha v_k) /
/// (1 + alpha), momentum parameter and gradient that produced it.
struct IterState {
  DenseVector x;
  DenseVector v;
  DenseVector y;
  double alpha = 0.0;
  DenseVector grad_y;
  double grad_y_norm = 0.0;
};

/// Running estimate-sequence data: phi_k(x) = phi_star + mu/2 ||x - v||^2
/// with weight lambda_k = prod (1 - alpha_i).
struct EstimateTracker {
  double lambda = 1.0;
  double phi_star = 0.0;
  DenseVector v;

  /// lambda_0 = 1, phi_0* = f(x0), v_0 = x0.
  static EstimateTracker start(double f_x0, const DenseVector& x0) {
    return {1.0, f_x0, x0};
  }
};

/// Advances the tracker by one step taken with parameter alpha at point y.
/// `t.v` must still be the center v_k that y was built from; phi* is updated
/// with it before v moves to v_{k+1}.
EstimateTracker estimate_tracker_update(const EstimateTracker& t, double alpha,
                                        const DenseVector& y, const DenseVector& grad_y,
                                        double f_y, double mu);

struct SolverConfig {
  double tol_grad = 1e-10;
  long max_grad_calls = 100000;
  /// Required by the adaptive method.
  std::optional<Heuristic> heuristic;
  /// Restart period for the N_L scheme; nullopt means never restart.
  std::optional<long> restart_period;
  bool track_estimate_sequence = false;
  bool record_trajectory = false;
  /// When false, elapsed_ns is reported as 0 (reproducible traces).
  bool record_timing = true;

  void validate() const;
};

/// Reference data used only to fill trace columns and optional early stops.
struct Telemetry {
  std::optional<double> f_ref;
  std::optional<DenseVector> x_ref;
  /// Stop once f(x_k) - f_ref < stop_f_gap (requires f_ref).
  std::optional<double> stop_f_gap;
  /// Stop once ||x_k - x_ref|| <= stop_x_err (requires x_ref).
  std::optional<double> stop_x_err;
};

/// One trace row, describing iterate x_k. Row 0 is the starting point.
struct TraceRecord {
  long k = 0;
  /// Cumulative gradient evaluations.
  long grad_calls = 0;
  /// Momentum parameter that produced x_k; NaN for methods without one.
  double alpha = 0.0;
  bool fallback = false;
  /// f(x_k) - f_ref; NaN without a reference value.
  double f_gap = 0.0;
  /// ||x_k - x_ref||; NaN without a reference point.
  double x_err = 0.0;
  long long elapsed_ns = 0;

  // Instrumentation, filled only when the estimate sequence is tracked.
  double f_x = 0.0;
  double phi_star = 0.0;
  double lambda = 0.0;
  /// ||v_k - x_ref||
  double v_err = 0.0;
};

struct SolverResult {
  IterState state;
  /// The point whose gradient was last evaluated below tolerance if the run
  /// converged, otherwise the newest iterate.
  DenseVector solution;
  bool converged = false;
  long iterations = 0;
  long grad_calls = 0;
  /// Function evaluations spent on instrumentation (not counted as cost).
  long extra_value_calls = 0;
  std::vector<TraceRecord> trace;
  /// x_k per trace row, when recorded.
  std::vector<DenseVector> trajectory;
};

/// Raised when an iterate, value, or gradient becomes non-finite.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::vector<TraceRecord> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  std::vector<TraceRecord> trace_;
};

/// Constant-step scheme for strongly convex functions:
///   x_{k+1} = y_k - f'(y_k) / L
///   y_{k+1} = x_{k+1} + (1 - sqrt(rho)) / (1 + sqrt(rho)) (x_{k+1} - x_k)
/// One gradient call per iteration; x_{k+1} is projected onto the feasible
/// ball when the objective has one.
SolverResult nesterov_const_step(const Objective& obj, const DenseVector& x0,
                                 const SolverConfig& cfg, const Telemetry& telemetry = {});

/// Momentum scheme for L-smooth functions with t_{k+1} = (1 + sqrt(1 + 4
/// t_k^2)) / 2 and momentum (t_k - 1) / t_{k+1}; every `restart_period`
/// iterations the momentum is reset (t = 1, y = x).
SolverResult nesterov_L_restart(const Objective& obj, const DenseVector& x0,
                                const SolverConfig& cfg, const Telemetry& telemetry = {});

struct AdaptiveStep {
  IterState state;
  bool fallback = false;
  int grad_calls_used = 0;
  /// False only when the trial failed and no budget remained for the
  /// fallback evaluation; `state` is then meaningless.
  bool accepted = true;
};

/// Trial upper bound for the momentum parameter; the validation test can
/// never pass at alpha = 1.
inline constexpr double kAlphaCeiling = 1.0 - 1e-12;

/// One adaptive step. `prev` holds x_k together with v_{k-1}, y_{k-1},
/// alpha_{k-1} and f'(y_{k-1}); the result holds x_{k+1} with v_k, y_k,
/// alpha_k and f'(y_k).
///
/// A trial alpha from heuristic `h` is accepted if
///   (a^2 - rho) ||f'(y~)||^2 <= mu^2 ||x_k - v_k||^2 a (1 - a) / (1 + a),
/// otherwise the step is redone with alpha = sqrt(rho) at a second gradient
/// call.
AdaptiveStep adaptive_iteration(const Objective& obj, const IterState& prev,
                                double prev_grad_norm, Heuristic h, int call_budget = 2);

/// Adaptive-momentum variant of the constant-step scheme; requires
/// cfg.heuristic. Uses one or two gradient calls per iteration.
SolverResult nesterov_adaptive(const Objective& obj, const DenseVector& x0,
                               const SolverConfig& cfg, const Telemetry& telemetry = {});

}  // namespace accel
