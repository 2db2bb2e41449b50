#include "accel/reference.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "accel/errors.hpp"
#include "accel/solvers.hpp"

namespace accel {

CglsResult cgls(const Matrix& a, const DenseVector& b, double lambda, double tol,
                long max_iters, const CglsObserver& observer) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("cgls: lambda must be >= 0");
  if (b.size() != a.rows()) throw DimensionError("cgls: b length does not match A");

  const std::size_t n = a.cols();
  CglsResult out;
  DenseVector x(n);
  DenseVector r = b;                      // b - A x
  DenseVector s = multiply_transpose(a, r);  // A^T r - lambda x
  const double rhs_norm = norm2(s);
  out.x = x;
  out.residual_norm = rhs_norm;
  if (rhs_norm == 0.0) {
    out.converged = true;
    return out;
  }
  const double target = tol * rhs_norm;

  DenseVector p = s;
  double gamma = squared_norm(s);
  for (long it = 1; it <= max_iters; ++it) {
    const DenseVector q = multiply(a, p);
    const double delta = squared_norm(q) + lambda * squared_norm(p);
    if (!(delta > 0.0) || !std::isfinite(delta)) break;
    const double step = gamma / delta;
    axpy(step, p.span(), x.span());
    axpy(-step, q.span(), r.span());
    s = multiply_transpose(a, r);
    if (lambda != 0.0) axpy(-lambda, x.span(), s.span());
    const double gamma_next = squared_norm(s);
    const double res = std::sqrt(gamma_next);
    out.iterations = it;
    if (res < out.residual_norm) {
      out.residual_norm = res;
      out.x = x;
    }
    const bool stop = observer && observer(it, x);
    if (res <= target) {
      out.x = x;
      out.residual_norm = res;
      out.converged = true;
      return out;
    }
    if (stop) return out;
    const double beta = gamma_next / gamma;
    for (std::size_t i = 0; i < n; ++i) p[i] = s[i] + beta * p[i];
    gamma = gamma_next;
  }
  return out;
}

std::string_view to_string(ReferenceMethod m) {
  switch (m) {
    case ReferenceMethod::analytic: return "analytic";
    case ReferenceMethod::cgls: return "cgls";
    case ReferenceMethod::tight_nesterov: return "tight_nesterov";
  }
  return "?";
}

namespace {

std::filesystem::path cache_path(const std::filesystem::path& dir, const std::string& key,
                                 double tol) {
  char name[64];
  std::snprintf(name, sizeof name, "ref_%016llx_%.3g.bin",
                static_cast<unsigned long long>(fnv1a(key)), tol);
  return dir / name;
}

/// Accepts a cached point only if its gradient still meets the tolerance.
std::optional<ReferenceSolution> load_cached(const std::filesystem::path& path,
                                             const Objective& obj, ReferenceMethod method,
                                             double tol, double scale) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    DenseVector x = read_vector(path);
    if (x.size() != obj.dim) return std::nullopt;
    if (norm2(obj.gradient(x)) > tol * scale) return std::nullopt;
    ReferenceSolution ref;
    ref.f_ref = obj.value(x);
    ref.x_ref = std::move(x);
    ref.method = method;
    ref.tol_used = tol;
    ref.scale = scale;
    ref.from_cache = true;
    return ref;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

ReferenceSolution reference_solution(const ProblemInstance& problem,
                                     const ReferenceOptions& options) {
  const Objective& obj = objective_of(problem);

  if (std::holds_alternative<BowlProblem>(problem)) {
    ReferenceSolution ref;
    ref.x_ref = DenseVector(obj.dim);
    ref.f_ref = 0.0;
    ref.method = ReferenceMethod::analytic;
    return ref;
  }
  if (const auto* quad = std::get_if<QuadraticProblem>(&problem)) {
    ReferenceSolution ref;
    ref.x_ref = quadratic_minimizer(*quad->data);
    ref.f_ref = obj.value(ref.x_ref);
    ref.method = ReferenceMethod::analytic;
    return ref;
  }

  const bool is_ridge = std::holds_alternative<RidgeProblem>(problem);
  const ReferenceMethod method =
      is_ridge ? ReferenceMethod::cgls : ReferenceMethod::tight_nesterov;
  const double tol = is_ridge ? kRidgeReferenceTol : kBpdnReferenceTol;
  const DenseVector x0 = default_start(problem);
  const double scale = norm2(obj.gradient(x0));

  std::optional<std::filesystem::path> path;
  if (options.cache_dir) {
    std::filesystem::create_directories(*options.cache_dir);
    path = cache_path(*options.cache_dir, problem_key(problem), tol);
    if (auto cached = load_cached(*path, obj, method, tol, scale)) return *cached;
  }

  ReferenceSolution ref;
  ref.method = method;
  ref.tol_used = tol;
  ref.scale = scale;
  if (const auto* ridge = std::get_if<RidgeProblem>(&problem)) {
    // ||A^T b|| is the gradient norm at the origin, so both tolerances agree.
    CglsResult sol = cgls(ridge->data->a, ridge->data->b, ridge->spec.lambda, tol,
                          options.max_grad_calls);
    if (!sol.converged) {
      throw NumericalError("reference_solution: CGLS did not reach tolerance (residual " +
                           std::to_string(sol.residual_norm / scale) + ")");
    }
    ref.x_ref = std::move(sol.x);
  } else {
    SolverConfig cfg;
    cfg.tol_grad = tol * scale;
    cfg.max_grad_calls = options.max_grad_calls;
    cfg.record_timing = false;
    SolverResult sol = nesterov_const_step(obj, x0, cfg);
    if (!sol.converged) {
      throw NumericalError("reference_solution: tight run did not converge");
    }
    ref.x_ref = std::move(sol.solution);
  }
  ref.f_ref = obj.value(ref.x_ref);
  if (path) write_vector(*path, ref.x_ref);
  return ref;
}

}  // namespace accel
