#include "accel/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "accel/errors.hpp"

namespace accel {

CubicParams::CubicParams(double rho, double d) : rho_(rho), d_(d) {
  if (!std::isfinite(rho) || !std::isfinite(d)) {
    throw NumericalError("CubicParams: non-finite rho or d");
  }
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("CubicParams: rho must lie in (0, 1]");
  }
  if (d < 0.0) throw std::invalid_argument("CubicParams: d must be non-negative");
}

std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::H1: return "H1";
    case Heuristic::H2: return "H2";
    case Heuristic::H3: return "H3";
    case Heuristic::H4: return "H4";
  }
  return "?";
}

std::optional<Heuristic> heuristic_from_index(int index) {
  switch (index) {
    case 1: return Heuristic::H1;
    case 2: return Heuristic::H2;
    case 3: return Heuristic::H3;
    case 4: return Heuristic::H4;
    default: return std::nullopt;
  }
}

double eta(const CubicParams& p, double alpha) {
  // (a + 1)(a^2 - rho) + d a (a - 1)
  return (alpha + 1.0) * (alpha * alpha - p.rho()) + p.d() * alpha * (alpha - 1.0);
}

double eta_prime(const CubicParams& p, double alpha) {
  return (3.0 * alpha + 2.0) * alpha - p.rho() + p.d() * (2.0 * alpha - 1.0);
}

double eta_second(const CubicParams& p, double alpha) {
  return 6.0 * alpha + 2.0 * (1.0 + p.d());
}

double beta(const CubicParams& p) {
  // Positive root of 3a^2 + 2(1+d)a - (rho+d), rationalized form.
  const double b = 1.0 + p.d();
  const double c = p.rho() + p.d();
  return c / (b + std::sqrt(b * b + 3.0 * c));
}

double gamma(const CubicParams& p) {
  const double sqrt_rho = std::sqrt(p.rho());
  if (p.d() == 0.0) return sqrt_rho;

  // Bracket: eta <= 0 at max(beta, sqrt(rho)), eta(1) = 2(1 - rho).
  double lo = std::max(beta(p), sqrt_rho);
  double hi = 1.0;
  if (eta(p, hi) == 0.0) return hi;
  if (!(eta(p, lo) <= 0.0 && eta(p, hi) > 0.0)) {
    throw NumericalError("gamma: root is not bracketed");
  }

  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (eta(p, mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Newton polish from the better end point.
  double root = std::abs(eta(p, lo)) <= std::abs(eta(p, hi)) ? lo : hi;
  const double slope = eta_prime(p, root);
  if (slope > 0.0) {
    const double polished = root - eta(p, root) / slope;
    if (polished >= lo && polished <= hi &&
        std::abs(eta(p, polished)) < std::abs(eta(p, root))) {
      root = polished;
    }
  }
  return root;
}

double propose_alpha(const CubicParams& p, Heuristic h) {
  const double alpha0 = std::sqrt(p.rho());
  switch (h) {
    case Heuristic::H1: return std::max(alpha0, beta(p));
    case Heuristic::H2: return 0.5 * (alpha0 + gamma(p));
    case Heuristic::H3: return 0.5 * (std::max(alpha0, beta(p)) + gamma(p));
    case Heuristic::H4: return gamma(p);
  }
  throw std::invalid_argument("propose_alpha: unknown heuristic");
}

}  // namespace accel
