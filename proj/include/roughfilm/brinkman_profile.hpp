#pragma once

// Vertical Brinkman profile of a flat channel of height h:
//   -(1/M^2) s'' + s = 1 on (0, h),  s(0) = s(h) = 0,
//   s(z3) = A1 e^{M z3} + A2 e^{-M z3} + 1.
// Every evaluation goes through forms that neither overflow for large M h nor
// cancel catastrophically for small M h.

#include <cmath>
#include <stdexcept>
#include <string>

namespace roughfilm {

struct ProfileCoefficients {
  double A1;
  double A2;
  double h;
  double M;
};

namespace detail {

inline void require_profile_args(double M, double h) {
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("Brinkman parameter M must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("channel height h must be positive");
}

// Above this M h the hyperbolic forms are replaced by decaying exponentials.
inline constexpr double kLargeArgument = 40.0;

}  // namespace detail

inline ProfileCoefficients profile_coeffs(double M, double h) {
  detail::require_profile_args(M, h);
  // A1 = -(1 - e^{-x}) / (e^x - e^{-x}) and A2 = (1 - e^x) / (e^x - e^{-x}), x = M h,
  // divided through by (1 - e^{-x}).
  const double e = std::exp(-M * h);
  return {-e / (1.0 + e), -1.0 / (1.0 + e), h, M};
}

namespace detail {

inline double clamp_height(const ProfileCoefficients& c, double z3) {
  const double slack = 1e-12 * c.h;
  if (!(z3 >= -slack && z3 <= c.h + slack))
    throw std::out_of_range("z3 = " + std::to_string(z3) + " outside [0, h = " + std::to_string(c.h) + "]");
  return std::fmin(std::fmax(z3, 0.0), c.h);
}

}  // namespace detail

/// Dimensionless shape s(z3); the physical velocity is (K/mu)(f' - grad p) s.
inline double profile_velocity(const ProfileCoefficients& c, double z3) {
  z3 = detail::clamp_height(c, z3);
  const double M = c.M, h = c.h;
  if (M * h <= detail::kLargeArgument)
    return 2.0 * std::sinh(0.5 * M * z3) * std::sinh(0.5 * M * (h - z3)) / std::cosh(0.5 * M * h);
  return 1.0 - (std::exp(-M * (h - z3)) + std::exp(-M * z3)) / (1.0 + std::exp(-M * h));
}

/// ds/dz3 = M (A1 e^{M z3} - A2 e^{-M z3}).
inline double profile_dz3(const ProfileCoefficients& c, double z3) {
  z3 = detail::clamp_height(c, z3);
  const double M = c.M, h = c.h;
  if (M * h <= detail::kLargeArgument)
    return M * std::sinh(M * (0.5 * h - z3)) / std::cosh(0.5 * M * h);
  return M * (std::exp(-M * z3) - std::exp(-M * (h - z3))) / (1.0 + std::exp(-M * h));
}

/// Height-integrated shape phi_M(h) = h - (2/M) tanh(M h / 2) > 0.
inline double flow_factor(double M, double h) {
  detail::require_profile_args(M, h);
  const double y = 0.5 * M * h;
  if (y < 0.1) {
    // y - tanh(y) by its Taylor series; the closed form loses digits here.
    const double y2 = y * y;
    const double series =
        y * y2 *
        (1.0 / 3.0 + y2 * (-2.0 / 15.0 + y2 * (17.0 / 315.0 + y2 * (-62.0 / 2835.0 + y2 * (1382.0 / 155925.0)))));
    return 2.0 / M * series;
  }
  return h - 2.0 / M * std::tanh(y);
}

inline double profile_velocity(double M, double h, double z3) {
  return profile_velocity(profile_coeffs(M, h), z3);
}

inline double profile_dz3(double M, double h, double z3) { return profile_dz3(profile_coeffs(M, h), z3); }

}  // namespace roughfilm
