#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string_view>

#include "accel/problems.hpp"
#include "accel/vecops.hpp"

namespace accel {

struct CglsResult {
  DenseVector x;
  long iterations = 0;
  bool converged = false;
  /// ||A^T (A x - b) + lambda x|| at the returned x (recurrence value).
  double residual_norm = 0.0;
};

/// Called with (iteration, x_k) after every iteration; returning true stops
/// the solve early.
using CglsObserver = std::function<bool(long, const DenseVector&)>;

/// Conjugate gradients on (A^T A + lambda I) x = A^T b without forming A^T A.
/// Each iteration costs one product with A and one with A^T. Stops when
/// ||A^T (A x - b) + lambda x|| <= tol ||A^T b||; on exhausting max_iters the
/// iterate with the smallest residual is returned with converged = false.
CglsResult cgls(const Matrix& a, const DenseVector& b, double lambda, double tol,
                long max_iters, const CglsObserver& observer = {});

enum class ReferenceMethod { analytic, cgls, tight_nesterov };

std::string_view to_string(ReferenceMethod m);

struct ReferenceSolution {
  DenseVector x_ref;
  double f_ref = 0.0;
  ReferenceMethod method = ReferenceMethod::analytic;
  /// Relative gradient tolerance the reference was computed to.
  double tol_used = 0.0;
  /// Gradient norm that tol_used is relative to.
  double scale = 1.0;
  bool from_cache = false;
};

inline constexpr double kRidgeReferenceTol = 1e-12;
inline constexpr double kBpdnReferenceTol = 1e-10;

struct ReferenceOptions {
  /// Directory for cached reference points; nullopt disables caching.
  std::optional<std::filesystem::path> cache_dir;
  long max_grad_calls = 1000000;
};

/// Ridge: CGLS to kRidgeReferenceTol. Bowl: x* = 0, f* = 0. Quadratic: the
/// eigen-decomposition solve. BPDN: the constant-step scheme run until
/// ||f'|| <= kBpdnReferenceTol ||f'(x0)||. Cached points are re-certified by a
/// fresh gradient evaluation before use. Throws NumericalError if an
/// iterative reference does not converge.
ReferenceSolution reference_solution(const ProblemInstance& problem,
                                     const ReferenceOptions& options = {});

}  // namespace accel
