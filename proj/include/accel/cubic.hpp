#pragma once

#include <optional>
#include <string_view>

namespace accel {

/// Coefficients of the feasibility cubic
///
///   eta(a) = a^3 + (1 + d) a^2 - (rho + d) a - rho,
///
/// where rho = mu / L and d = mu^2 ||x_k - v_k||^2 / ||f'(y_{k-1})||^2.
/// eta(a) <= 0 is the condition under which momentum parameter a keeps the
/// estimate sequence valid when the previous gradient norm bounds the next.
class CubicParams {
 public:
  /// Throws NumericalError on non-finite input and std::invalid_argument when
  /// rho is outside (0, 1] or d is negative.
  CubicParams(double rho, double d);

  double rho() const { return rho_; }
  double d() const { return d_; }

 private:
  double rho_;
  double d_;
};

/// Rules for choosing the trial momentum parameter, most conservative first.
enum class Heuristic {
  H1,  ///< max(sqrt(rho), beta)
  H2,  ///< (sqrt(rho) + gamma) / 2
  H3,  ///< (max(sqrt(rho), beta) + gamma) / 2
  H4,  ///< gamma
};

std::string_view to_string(Heuristic h);
std::optional<Heuristic> heuristic_from_index(int index);

double eta(const CubicParams& p, double alpha);
double eta_prime(const CubicParams& p, double alpha);
double eta_second(const CubicParams& p, double alpha);

/// Positive stationary point of eta (its local minimum on a > 0).
double beta(const CubicParams& p);

/// The unique positive root of eta. Always >= sqrt(rho); equals sqrt(rho)
/// exactly when d == 0.
double gamma(const CubicParams& p);

/// Trial momentum parameter for heuristic h; never below sqrt(rho).
double propose_alpha(const CubicParams& p, Heuristic h);

}  // namespace accel
