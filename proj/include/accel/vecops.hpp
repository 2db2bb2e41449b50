#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace accel {

/// Dense real vector of fixed length.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  DenseVector(std::initializer_list<double> init) : data_(init) {}
  explicit DenseVector(std::vector<double> data) : data_(std::move(data)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  const std::vector<double>& values() const { return data_; }

  bool operator==(const DenseVector&) const = default;

 private:
  std::vector<double> data_;
};

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> storage() { return data_; }
  std::span<const double> storage() const { return data_; }

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Span-level kernels. Lengths are checked; mismatches throw DimensionError.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

double dot(const DenseVector& a, const DenseVector& b);
double norm2(const DenseVector& x);
double squared_norm(const DenseVector& x);
double distance(const DenseVector& a, const DenseVector& b);
bool all_finite(const DenseVector& x);

/// a*x + b*y
DenseVector axpby(double a, const DenseVector& x, double b, const DenseVector& y);
DenseVector scaled(double a, const DenseVector& x);

/// A x
DenseVector multiply(const Matrix& a, const DenseVector& x);
/// A^T y
DenseVector multiply_transpose(const Matrix& a, const DenseVector& y);

/// Linear map v -> A A^T v on R^m, given as a callable.
using LinearOperator = std::function<DenseVector(const DenseVector&)>;

struct PowerMethodOptions {
  int max_iters = 200;
  double rel_tol = 1e-8;
  std::uint64_t seed = 0x5eed;
};

/// Largest eigenvalue of a symmetric positive semidefinite operator (for a
/// Gram operator A A^T this is ||A||_2^2). Stops once successive Rayleigh
/// quotients agree to `rel_tol` or after `max_iters` applications.
double power_method_sq_norm(const LinearOperator& apply_gram, std::size_t m,
                            const PowerMethodOptions& options = {});

/// Factor applied to a power-method estimate when used as a Lipschitz bound.
inline constexpr double kPowerMethodInflation = 1.02;

/// Euclidean projection onto the ball of the given radius about the origin.
DenseVector project_ball(const DenseVector& x, double radius);

}  // namespace accel
