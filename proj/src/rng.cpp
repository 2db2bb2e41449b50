#include "accel/rng.hpp"

#include <cmath>
#include <numbers>

namespace accel {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

DenseVector Rng::normal_vector(std::size_t n) {
  DenseVector v(n);
  for (double& e : v) e = normal();
  return v;
}

}  // namespace accel
