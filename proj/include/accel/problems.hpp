#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "accel/vecops.hpp"

namespace accel {

/// A function in the class of mu-strongly convex functions with L-Lipschitz
/// gradient, together with its class constants.
struct Objective {
  std::function<double(const DenseVector&)> value;
  std::function<DenseVector(const DenseVector&)> gradient;
  double mu = 0.0;
  double lip = 0.0;
  std::size_t dim = 0;
  /// Radius of the feasible ball around the origin, for constrained problems.
  std::optional<double> feasible_radius;

  double rho() const { return mu / lip; }

  /// Throws std::invalid_argument unless 0 < mu <= lip, dim >= 1 and both
  /// callables are set.
  void validate() const;
};

struct ValueGrad {
  double value = 0.0;
  DenseVector grad;
};

// ---------------------------------------------------------------------------
// Ridge regression: 1/2 ||Ax - b||^2 + lambda/2 ||x||^2

struct RidgeSpec {
  std::size_t m = 1200;
  std::size_t n = 2000;
  double lambda = 1.0;
  double sigma_max = 100.0;
  double sigma_min = 1.0;
  std::uint64_t seed = 0;

  std::string key() const;
};

struct RidgeData {
  Matrix a;
  DenseVector b;
  double lambda = 1.0;
};

struct RidgeProblem {
  RidgeSpec spec;
  /// Seed actually used; differs from spec.seed only after a degenerate draw.
  std::uint64_t seed_used = 0;
  /// Raw power-method estimate of ||A||_2^2 (before inflation).
  double gram_norm_estimate = 0.0;
  std::shared_ptr<const RidgeData> data;
  Objective objective;
};

ValueGrad ridge_value_grad(const Matrix& a, const DenseVector& b, double lambda,
                           const DenseVector& x);

/// A = U diag(sigma) V^T with U (m x m) and V (n x m) orthonormal factors
/// from Gram-Schmidt on seeded Gaussian matrices and sigma linearly spaced
/// from sigma_max down to sigma_min; b is standard normal.
RidgeProblem ridge_build(const RidgeSpec& spec);

/// Wraps existing data (e.g. loaded from a cache) into a problem.
RidgeProblem ridge_from_data(const RidgeSpec& spec, std::uint64_t seed_used,
                             RidgeData data);

// ---------------------------------------------------------------------------
// Anisotropic bowl: sum_i i x_i^4 + 1/2 ||x||^2 on ||x|| <= tau

struct BowlSpec {
  std::size_t n = 500;
  double tau_ball = 4.0;
};

ValueGrad bowl_value_grad(std::size_t n, const DenseVector& x);

/// mu = 1, L = 12 n tau^2 + 1, feasible radius tau.
Objective bowl_objective(const BowlSpec& spec);

/// (tau / sqrt(n)) * 1, a point on the boundary of the feasible ball.
DenseVector bowl_start(const BowlSpec& spec);

struct BowlProblem {
  BowlSpec spec;
  Objective objective;
};

BowlProblem bowl_build(const BowlSpec& spec);

// ---------------------------------------------------------------------------
// Smoothed basis pursuit denoising

/// Huber penalty summed over entries: |t| - tau/2 for |t| >= tau, otherwise
/// t^2 / (2 tau).
ValueGrad huber_value_grad(double tau_huber, const DenseVector& x);

struct BpdnSpec {
  std::size_t m = 800;
  std::size_t n = 2000;
  double lambda = 0.05;
  double tau_huber = 1e-4;
  /// Weight of the added (sigma/2) ||x||^2 term; equals mu.
  double sigma_scvx = 0.05;
  std::size_t nnz = 40;
  double noise_level = 0.01;
  std::uint64_t seed = 0;

  std::string key() const;
};

struct BpdnData {
  Matrix a;
  DenseVector b;
  DenseVector x_true;
  double lambda = 0.0;
  double tau_huber = 0.0;
  double sigma_scvx = 0.0;
};

struct BpdnProblem {
  BpdnSpec spec;
  double gram_norm_estimate = 0.0;
  std::shared_ptr<const BpdnData> data;
  Objective objective;
};

ValueGrad bpdn_value_grad(const Matrix& a, const DenseVector& b, double lambda,
                          double tau_huber, double sigma_scvx, const DenseVector& x);

/// A = randn(m, n) / sqrt(n); x_true has nnz entries of +-1 at random
/// positions; b = A x_true + e with e Gaussian of scale
/// noise_level * ||A x_true|| / sqrt(m).
BpdnProblem bpdn_build(const BpdnSpec& spec);

// ---------------------------------------------------------------------------
// Random SPD quadratic: 1/2 x^T Q x - c^T x

struct QuadraticSpec {
  std::size_t n = 50;
  double kappa = 1e4;
  double mu = 1.0;
  std::uint64_t seed = 0;
};

struct QuadraticData {
  Matrix q;
  DenseVector c;
  /// Eigenvectors of Q, one per row.
  Matrix eigenvectors;
  /// Eigenvalues, geometrically spaced from mu * kappa down to mu.
  DenseVector eigenvalues;
};

struct QuadraticProblem {
  QuadraticSpec spec;
  std::shared_ptr<const QuadraticData> data;
  Objective objective;
};

QuadraticProblem quadratic_build(const QuadraticSpec& spec);

/// Q^{-1} c evaluated through the eigen-decomposition.
DenseVector quadratic_minimizer(const QuadraticData& data);

// ---------------------------------------------------------------------------

using ProblemInstance = std::variant<RidgeProblem, BowlProblem, BpdnProblem, QuadraticProblem>;

const Objective& objective_of(const ProblemInstance& problem);

/// Starting point used by the experiments: the bowl starts on the boundary of
/// its ball, every other problem at the origin.
DenseVector default_start(const ProblemInstance& problem);

/// Short problem name: "ridge", "bowl", "bpdn" or "quadratic".
std::string problem_name(const ProblemInstance& problem);

/// Canonical description of the generating spec; equal keys give identical
/// problems.
std::string problem_key(const ProblemInstance& problem);

/// ridge_build backed by a directory of cached matrices (A, b); the cache is
/// filled on a miss. Without a directory this is ridge_build.
RidgeProblem ridge_load_or_build(const RidgeSpec& spec,
                                 const std::optional<std::filesystem::path>& cache_dir);

// ---------------------------------------------------------------------------
// Shared generators

/// Orthonormalizes the columns of a seeded Gaussian rows x cols matrix with
/// classical Gram-Schmidt plus one reorthogonalization pass. Returns the
/// factor transposed (row j holds column j), or nullopt if a column collapses.
std::optional<Matrix> random_orthonormal_columns(std::size_t rows, std::size_t cols,
                                                 std::uint64_t seed,
                                                 std::uint64_t stream);

// ---------------------------------------------------------------------------
// Class membership certification

struct CertifyOptions {
  /// Half-width of the sampling box for unconstrained problems.
  double box_radius = 10.0;
  double rel_slack = 1e-9;
  /// Every probe_every-th pair uses a direction sharpened by secant power
  /// steps.
  int probe_every = 10;
  int probe_steps = 6;
};

struct CertifyReport {
  int samples = 0;
  int lipschitz_violations = 0;
  int convexity_violations = 0;
  /// max ||f'(x) - f'(y)|| / (L ||x - y||); > 1 means a violation.
  double worst_lipschitz_ratio = 0.0;
  /// min of [f(y) - f(x) - <f'(x), y-x> - mu/2 ||y-x||^2] / scale; < 0 means
  /// the strong-convexity inequality failed.
  double worst_convexity_margin = 0.0;

  bool passed() const { return lipschitz_violations == 0 && convexity_violations == 0; }
};

/// Samples pairs in the feasible region (the ball if constrained, else the
/// box [-box_radius, box_radius]^n) and checks the Lipschitz-gradient and
/// strong-convexity inequalities with the objective's declared constants.
CertifyReport scvx_lipschitz_certify(const Objective& obj, int samples,
                                     std::uint64_t seed,
                                     const CertifyOptions& options = {});

// ---------------------------------------------------------------------------
// Flat binary matrix files: 8-byte magic "ACCLMAT1", uint32 rows, uint32 cols
// (little-endian), then rows * cols float64 values in row-major order.

inline constexpr char kMatrixMagic[8] = {'A', 'C', 'C', 'L', 'M', 'A', 'T', '1'};

/// Writes through a temporary file and renames it into place.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

void write_vector(const std::filesystem::path& path, const DenseVector& v);
DenseVector read_vector(const std::filesystem::path& path);

/// 64-bit FNV-1a, used for cache keys.
std::uint64_t fnv1a(std::string_view text);

}  // namespace accel
