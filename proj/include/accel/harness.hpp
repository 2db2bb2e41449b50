#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "accel/problems.hpp"
#include "accel/reference.hpp"
#include "accel/solvers.hpp"

namespace accel {

enum class ProblemKind { ridge, bowl, bpdn, quadratic };
enum class Method { nl, nmul, adaptive1, adaptive2, adaptive3, adaptive4, cgls };

std::string_view to_string(ProblemKind p);
std::string_view to_string(Method m);
std::optional<ProblemKind> parse_problem(std::string_view text);
std::optional<Method> parse_method(std::string_view text);

/// Restart schedules tried for the N_L scheme when none is given;
/// nullopt means no restart.
inline const std::vector<std::optional<long>> kRestartSchedules = {10, 100, 1000,
                                                                   std::nullopt};

/// Thresholds reported in summaries.
inline const std::vector<double> kFGapThresholds = {1e-6, 1e-9, 1e-12};
inline const std::vector<double> kXErrThresholds = {1e-8};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::bowl;
  Method method = Method::nmul;
  std::optional<long> restart_period;
  std::uint64_t seed = 0;
  double tol_grad = 1e-13;
  long max_grad_calls = 20000;

  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> traj;
  std::optional<std::filesystem::path> summary;
  std::optional<std::filesystem::path> cache_dir;
  /// 1-based coordinates for the trajectory projection; default (1, n).
  std::optional<std::pair<std::size_t, std::size_t>> traj_coords;
  bool no_timing = false;

  /// Early stop once the reference gap / error drops below these.
  std::optional<double> stop_f_gap;
  std::optional<double> stop_x_err;

  RidgeSpec ridge;
  BowlSpec bowl;
  BpdnSpec bpdn;
  QuadraticSpec quadratic;

  /// Throws ConfigError on incompatible settings.
  void validate() const;
};

/// Applies one `key=value` setting (CLI flag names without the dashes, plus
/// problem parameters such as m, n, lambda, tau). Throws ConfigError.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Reads `key=value` lines (blank lines and `#` comments ignored).
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

ProblemInstance build_problem(const ExperimentConfig& cfg);

struct ThresholdHit {
  std::string metric;  ///< "fgap" or "xerr"
  double threshold = 0.0;
  std::optional<long> grad_calls;
  std::optional<long long> time_ns;
};

struct Summary {
  std::string problem;
  std::string method;
  /// Restart period for nl ("none" for no restart), empty otherwise.
  std::string restart;
  std::uint64_t seed = 0;
  long iterations = 0;
  long grad_calls = 0;
  long fallbacks = 0;
  bool converged = false;
  std::vector<ThresholdHit> hits;
  /// Rows violating the constant-step convergence bound; set for nmul runs
  /// on unconstrained problems.
  std::optional<long> bound_violations;

  std::optional<long> calls_to(std::string_view metric, double threshold) const;
};

struct ExperimentResult {
  Summary summary;
  std::vector<TraceRecord> trace;
  std::vector<DenseVector> trajectory;
  DenseVector solution;
};

/// Runs one method on an already-built problem against its reference.
ExperimentResult run_method(const ProblemInstance& problem, const ReferenceSolution& ref,
                            const ExperimentConfig& cfg);

/// Builds the problem, obtains the reference, runs the method and writes the
/// configured trace / trajectory / summary files.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// First row with f_gap < threshold ("fgap") or x_err <= threshold ("xerr").
std::optional<std::size_t> first_crossing(const std::vector<TraceRecord>& trace,
                                          std::string_view metric, double threshold);

Summary summarize(const std::vector<TraceRecord>& trace, const ExperimentConfig& cfg);

/// Counts rows with f_gap > (1 - sqrt(rho))^k * initial_gap (+ slack), where
/// initial_gap = f(x0) + mu/2 ||x0 - x*||^2 - f*.
long convergence_bound_violations(const std::vector<TraceRecord>& trace, double rho,
                                  double initial_gap);

inline constexpr std::string_view kTraceHeader = "k,grad_calls,alpha,fallback,f_gap,x_err,time_ns";

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);
std::string summary_header();
void write_summary_row(std::ostream& os, const Summary& s);

/// Selected coordinates (1-based) of every recorded iterate. Throws
/// ConfigError if a coordinate is out of range.
std::vector<std::pair<double, double>> trajectory_projection(
    const std::vector<DenseVector>& trajectory, std::size_t i, std::size_t j);
void write_trajectory_csv(std::ostream& os, const std::vector<std::pair<double, double>>& rows,
                          std::size_t i, std::size_t j);

struct RankTarget {
  std::string metric = "fgap";
  double threshold = 1e-12;
};

struct CompareOptions {
  RankTarget rank;
  /// Run member experiments on separate threads.
  bool parallel = false;
};

/// One summary per config; an nl config without a restart period is run for
/// every schedule in kRestartSchedules and the best is reported. All configs
/// must share problem and seed (ConfigError otherwise); the problem and its
/// reference are built once.
std::vector<Summary> compare(const std::vector<ExperimentConfig>& cfgs,
                             const CompareOptions& options = {});

/// Fewer calls to the rank target wins; unreached targets rank last.
bool ranks_before(const Summary& a, const Summary& b, const RankTarget& rank);

/// η(α) sampled at `samples` evenly spaced α in [0, 1].
void write_eta_csv(std::ostream& os, double rho, double d, int samples);

}  // namespace accel
