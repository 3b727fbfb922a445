#pragma once

// Alternative closed forms kept only for side-by-side comparison with the
// implemented quantities. None of these are used by the solvers.
//
//  * flow_factor_minus2: the flow factor written with "-2" in the numerator,
//      h - (2/M) (e^{Mh} - e^{-Mh} - 2) / (e^{Mh} - e^{-Mh}).
//  * temperature_unit_limit: the column temperature written with integration
//    limits fixed at 1 and a constant -b/k,
//      T = -b/k - (mu/(kK)) (int_{z3}^1 int_xi^1 |u|^2 - z3 int_0^1 |u|^2)
//               - (mu_eff/k) (same with |du/dz3|^2).
//  * temperature_vstar: the smooth-wall temperature through the polynomial-
//    exponential antiderivatives V1, V2, with the b-term multiplied by |F|^2.
//    `corrected_exponent` replaces the second e^{M z3} of V1 by e^{-M z3}.

#include <cmath>
#include <functional>
#include <vector>

#include "brinkman_profile.hpp"
#include "params.hpp"

namespace roughfilm::variants {

inline double flow_factor_minus2(double M, double h) {
  const double ep = std::exp(M * h), em = std::exp(-M * h);
  return h - 2.0 / M * (ep - em - 2.0) / (ep - em);
}

/// A1*, A2* in the exponential form.
inline std::pair<double, double> exponential_coefficients(double M, double h) {
  const double ep = std::exp(M * h), em = std::exp(-M * h);
  return {-(1.0 - em) / (ep - em), (1.0 - ep) / (ep - em)};
}

/// Column temperature with unit upper limits; u and du are |u'|^2 and
/// |du'/dz3|^2 as functions of z3 (zero above the wall). Composite Simpson with n intervals.
inline double temperature_unit_limit(const PhysicalParams& p, const std::function<double(double)>& u2,
                                     const std::function<double(double)>& du2, double z3, int n = 2048) {
  auto simpson = [n](const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    const double d = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * d);
    return s * d / 3.0;
  };
  // int_{z3}^1 int_xi^1 g dtau dxi = int_{z3}^1 (tau - z3) g(tau) dtau
  auto nested = [&](const std::function<double(double)>& g) {
    return simpson([&](double t) { return (t - z3) * g(t); }, z3, 1.0) - z3 * simpson(g, 0.0, 1.0);
  };
  return -p.b() / p.k() - p.mu() / (p.k() * p.K()) * nested(u2) - p.mu_eff() / p.k() * nested(du2);
}

inline double v1_star(double M, double h, double z3, bool corrected_exponent) {
  const auto [A1, A2] = exponential_coefficients(M, h);
  const double e2p = std::exp(2 * M * z3), e2m = std::exp(-2 * M * z3);
  const double ep = std::exp(M * z3), em = std::exp(-M * z3);
  return 1.0 / (4 * M * M) * (A1 * A1 * (e2p - 1) + A2 * A2 * (e2m - 1)) +
         2.0 / (M * M) * (A1 * (ep - 1) + A2 * ((corrected_exponent ? em : ep) - 1)) +
         (0.5 + A1 * A2) * z3 * z3 - 1.0 / (2 * M) * (A1 * A1 - A2 * A2) * z3 - 2.0 / M * (A1 - A2) * z3;
}

inline double v2_star(double M, double h, double z3) {
  const auto [A1, A2] = exponential_coefficients(M, h);
  return 0.5 * (A1 * A1 * (std::exp(2 * M * h) - std::exp(2 * M * z3)) -
                A2 * A2 * (std::exp(-2 * M * h) - std::exp(-2 * M * z3))) +
         A1 * A2 * (h - z3) * (h - z3);
}

/// Smooth-wall temperature from V1, V2 for drive magnitude squared g2 = |F|^2.
inline double temperature_vstar(const PhysicalParams& p, double h, double g2, double z3, bool corrected_exponent) {
  const double M = p.M();
  const double t1 = -p.K() / (p.k() * p.mu()) * (v1_star(M, h, z3, corrected_exponent) - v1_star(M, h, h, corrected_exponent));
  const double t2 = -p.mu_eff() * p.K() * p.K() * M * M / (p.k() * p.mu() * p.mu()) * (v2_star(M, h, z3) - v2_star(M, h, h));
  const double t3 = -p.b() / p.k() * (z3 - h);
  return (t1 + t2 + t3) * g2;
}

}  // namespace roughfilm::variants
