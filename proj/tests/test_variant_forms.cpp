#include <gtest/gtest.h>

#include <cmath>

#include "roughfilm/brinkman_profile.hpp"
#include "roughfilm/reconstruct.hpp"
#include "roughfilm/variant_forms.hpp"

using namespace roughfilm;

TEST(VariantForms, MinusTwoFlowFactorGapIsExact) {
  // phi - phi_minus2 = -(4/M) e^{-Mh} / (e^{Mh} - e^{-Mh}), by subtracting the numerators.
  for (double M : {0.3, 1.0, 4.0})
    for (double h : {0.5, 1.0, 2.0}) {
      const double x = M * h;
      const double gap = -4.0 / M * std::exp(-x) / (std::exp(x) - std::exp(-x));
      EXPECT_NEAR(flow_factor(M, h) - variants::flow_factor_minus2(M, h), gap, 1e-12 * (1 + std::abs(gap)));
    }
}

TEST(VariantForms, ExponentialCoefficientsReproduceProfile) {
  const double M = 1.7, h = 0.9;
  const auto [A1, A2] = variants::exponential_coefficients(M, h);
  for (double z : {0.0, 0.2, 0.45, 0.9})
    EXPECT_NEAR(A1 * std::exp(M * z) + A2 * std::exp(-M * z) + 1.0, profile_velocity(M, h, z), 1e-13);
}

TEST(VariantForms, CorrectedV1IsDoubleAntiderivativeOfShapeSquared) {
  const double M = 1.3, h = 1.1, d = 1e-4;
  for (double z : {0.2, 0.5, 0.8}) {
    auto v = [&](double t, bool c) { return variants::v1_star(M, h, t, c); };
    const double s = profile_velocity(M, h, z);
    const double second = (v(z + d, true) - 2 * v(z, true) + v(z - d, true)) / (d * d);
    EXPECT_NEAR(second, s * s, 1e-6);
    const double literal = (v(z + d, false) - 2 * v(z, false) + v(z - d, false)) / (d * d);
    EXPECT_GT(std::abs(literal - s * s), 1e-2);
  }
  const double slope0 = (variants::v1_star(M, h, d, true) - variants::v1_star(M, h, -d, true)) / (2 * d);
  EXPECT_NEAR(slope0, 0.0, 1e-7);
}

TEST(VariantForms, LiteralTemperaturesDifferFromColumnSolution) {
  const auto p = make_params(1.0, 1.0, 1.0, 1.0, 1.0);
  const double h = 0.8;
  const auto col = temperature_column(p, h, 1.0, 1024);
  const auto c = profile_coeffs(p.M(), h);
  auto u2 = [&](double z) { return z < h ? std::pow(profile_velocity(c, z), 2) : 0.0; };
  auto du2 = [&](double z) { return z < h ? std::pow(profile_dz3(c, z), 2) : 0.0; };
  double dev_unit = 0.0, dev_v = 0.0, dev_vc = 0.0;
  for (std::size_t m = 0; m < col.z.size(); m += 64) {
    const double z = col.z[m];
    dev_unit = std::max(dev_unit, std::abs(variants::temperature_unit_limit(p, u2, du2, z) - col.T[m]));
    dev_v = std::max(dev_v, std::abs(variants::temperature_vstar(p, h, 1.0, z, false) - col.T[m]));
    dev_vc = std::max(dev_vc, std::abs(variants::temperature_vstar(p, h, 1.0, z, true) - col.T[m]));
  }
  EXPECT_TRUE(std::isfinite(dev_unit) && std::isfinite(dev_v) && std::isfinite(dev_vc));
  EXPECT_GT(dev_unit, 1e-3);
  EXPECT_GT(dev_v, 1e-3);
}
