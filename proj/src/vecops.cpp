#include "accel/vecops.hpp"

#include <cmath>
#include <string>

#include "accel/errors.hpp"
#include "accel/rng.hpp"

namespace accel {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "dot");
  // Four partial sums.
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  require_same_length(x.size(), y.size(), "axpy");
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(const DenseVector& a, const DenseVector& b) {
  return dot(a.span(), b.span());
}

double norm2(const DenseVector& x) { return norm2(x.span()); }

double squared_norm(const DenseVector& x) { return dot(x.span(), x.span()); }

double distance(const DenseVector& a, const DenseVector& b) {
  require_same_length(a.size(), b.size(), "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

bool all_finite(const DenseVector& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

DenseVector axpby(double a, const DenseVector& x, double b, const DenseVector& y) {
  require_same_length(x.size(), y.size(), "axpby");
  DenseVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

DenseVector scaled(double a, const DenseVector& x) {
  DenseVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

DenseVector multiply(const Matrix& a, const DenseVector& x) {
  require_same_length(a.cols(), x.size(), "multiply");
  DenseVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x.span());
  return out;
}

DenseVector multiply_transpose(const Matrix& a, const DenseVector& y) {
  require_same_length(a.rows(), y.size(), "multiply_transpose");
  DenseVector out(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (y[i] != 0.0) axpy(y[i], a.row(i), out.span());
  }
  return out;
}

double power_method_sq_norm(const LinearOperator& apply_gram, std::size_t m,
                            const PowerMethodOptions& options) {
  if (options.max_iters < 1) {
    throw std::invalid_argument("power_method_sq_norm: max_iters must be >= 1");
  }
  if (m == 0) throw DimensionError("power_method_sq_norm: empty operator");

  Rng rng(options.seed, /*stream=*/0x504f574552ULL);
  DenseVector v = rng.normal_vector(m);
  const double start_norm = norm2(v);
  for (double& e : v) e /= start_norm;

  double estimate = 0.0;
  for (int it = 0; it < options.max_iters; ++it) {
    DenseVector w = apply_gram(v);
    if (w.size() != m) throw DimensionError("power_method_sq_norm: operator output length");
    const double w_norm = norm2(w);
    if (!std::isfinite(w_norm) || w_norm == 0.0) {
      throw NumericalError("power_method_sq_norm: zero or non-finite operator output");
    }
    const double rayleigh = dot(v, w);
    for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / w_norm;
    if (it > 0 && std::abs(rayleigh - estimate) <= options.rel_tol * std::abs(rayleigh)) {
      return rayleigh;
    }
    estimate = rayleigh;
  }
  return estimate;
}

DenseVector project_ball(const DenseVector& x, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("project_ball: radius must be positive");
  const double nrm = norm2(x);
  if (nrm <= radius) return x;
  return scaled(radius / nrm, x);
}

}  // namespace accel
