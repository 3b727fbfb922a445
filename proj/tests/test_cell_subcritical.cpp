#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "roughfilm/cell_subcritical.hpp"
#include "roughfilm/oracle.hpp"

using namespace roughfilm;

namespace {

const PhysicalParams kUnit = make_params(1, 1, 1, 1, 0);

EffectiveTensor tensor_for(const RoughnessProfile& p, int n, const PhysicalParams& params = kUnit) {
  CellGrid g(n, n);
  return assemble_tensor_subcritical(p, params, solve_subcritical_cell(p, params, g, 1e-12));
}

}  // namespace

TEST(SubcriticalCell, ConstantHeightGivesZeroCorrectors) {
  auto p = RoughnessProfile::constant(1.0);
  CellGrid g(16, 16);
  auto sol = solve_subcritical_cell(p, kUnit, g);
  for (int d = 0; d < 2; ++d)
    for (double v : sol.pi[d].values) EXPECT_EQ(v, 0.0);
  auto t = assemble_tensor_subcritical(p, kUnit, sol);
  const double phi = flow_factor(1.0, 1.0);
  EXPECT_NEAR(t(0, 0), phi, 1e-15);
  EXPECT_NEAR(t(1, 1), phi, 1e-15);
  EXPECT_EQ(t(0, 1), 0.0);
}

TEST(SubcriticalCell, SeparableProfileHasTrivialTransverseCorrector) {
  auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3});
  auto pi2 = solve_corrector(p, kUnit, CellGrid(32, 32), 2);
  for (double v : pi2.values) EXPECT_EQ(v, 0.0);
}

TEST(SubcriticalCell, CorrectorMatchesOneDimensionalReduction) {
  // In 1D the flux F = phi (1 + pi') is constant: F = harmonic mean of phi,
  // pi(z1) = integral of (F / phi - 1), normalized to zero mean.
  auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3});
  const double M = kUnit.M();
  const int n = 128;
  auto pi1 = solve_corrector(p, kUnit, CellGrid(n, n), 1, 1e-12);
  const double F = oracle::laminate_tensor_1d(p, M, 100000)[0][0];
  auto integrand = [&](double s) { return F / oracle::flow_factor_reference(M, p.eval({s, 0.0})) - 1.0; };
  std::vector<double> ref(n);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z1 = -0.5 + (i + 0.5) / n;
    ref[i] = oracle::simpson(integrand, -0.5, z1, 400);
    mean += ref[i] / n;
  }
  CellGrid g(n, n);
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    err = std::max(err, std::abs(pi1.values[g.planar_index(i, 5)] - (ref[i] - mean)));
    scale = std::max(scale, std::abs(ref[i] - mean));
  }
  EXPECT_LT(err, 1e-3 * scale);
}

TEST(SubcriticalCell, LaminateMeansWithinHalfPercent) {
  auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3});
  auto t = tensor_for(p, 128);
  auto ref = oracle::laminate_tensor_1d(p, 1.0, 100000);
  EXPECT_NEAR(t(0, 0) / ref[0][0], 1.0, 5e-3);
  EXPECT_NEAR(t(1, 1) / ref[1][1], 1.0, 5e-3);
  EXPECT_NEAR(t(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(t(1, 0), 0.0, 1e-12);
}

TEST(SubcriticalCell, SymmetricPositiveDefiniteWithinBounds) {
  std::vector<RoughnessProfile> profiles{
      RoughnessProfile::sinusoidal({.mean = 1.0, .amp12 = 0.3}),
      RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2, .amp2 = 0.1, .amp12 = 0.15, .k1 = 1, .k2 = 2}),
  };
  // An anisotropic sampled profile with a genuine off-diagonal coupling.
  SampledGrid sg{8, 8, {}};
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i)
      sg.heights.push_back(1.0 + 0.3 * std::cos(2 * M_PI * (i + j) / 8.0) + 0.05 * std::sin(2 * M_PI * i / 8.0));
  profiles.push_back(RoughnessProfile::sampled(sg));
  for (const auto& p : profiles) {
    auto t = tensor_for(p, 64, make_params(2.0, 1.0, 1.0, 1.0, 0.0));
    EXPECT_LE(t.asymmetry, 1e-8);
    EXPECT_TRUE(t.is_spd());
    EXPECT_GT(t(0, 0) * t(1, 1) - t(0, 1) * t(0, 1), 0.0);
    auto b = oracle::flow_factor_means(p, std::sqrt(2.0), 64);
    auto ev = t.eigenvalues();
    EXPECT_GE(ev[0], b.harmonic * (1 - 1e-9));
    EXPECT_LE(ev[1], b.arithmetic * (1 + 1e-9));
  }
}

TEST(SubcriticalCell, FluxConservation) {
  auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2, .amp2 = 0.1, .amp12 = 0.15, .k1 = 1, .k2 = 2});
  const double tol = 1e-10;
  auto sol = solve_subcritical_cell(p, kUnit, CellGrid(48, 48), tol);
  for (int d = 1; d <= 2; ++d) {
    const double rhs = la::max_abs(detail::cell_rhs(sol.coeffs, d == 1 ? std::array<double, 2>{1, 0}
                                                                       : std::array<double, 2>{0, 1}));
    EXPECT_LE(sol.flux_divergence(d), 10 * tol * rhs);
    EXPECT_NEAR(la::mean(sol.pi[d - 1].values), 0.0, 1e-10);
  }
}

TEST(SubcriticalCell, GridConvergenceIsCauchyWithOrderAtLeastOneAndHalf) {
  auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp12 = 0.3});
  auto t32 = tensor_for(p, 32), t64 = tensor_for(p, 64), t128 = tensor_for(p, 128);
  for (int d = 0; d < 2; ++d) {
    const double d1 = std::abs(t64(d, d) - t32(d, d));
    const double d2 = std::abs(t128(d, d) - t64(d, d));
    EXPECT_LT(d2, d1);
    EXPECT_GE(std::log2(d1 / d2), 1.5);
  }
}

TEST(SubcriticalCell, RotationSwapsDiagonal) {
  auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.25, .amp2 = 0.05, .k1 = 1, .k2 = 2});
  auto a = tensor_for(p, 64);
  auto b = tensor_for(p.transposed(), 64);
  EXPECT_NEAR(a(0, 0), b(1, 1), 1e-8 * a.max_entry());
  EXPECT_NEAR(a(1, 1), b(0, 0), 1e-8 * a.max_entry());
}

TEST(SubcriticalCell, RejectsBadInput) {
  auto p = RoughnessProfile::constant(1.0);
  EXPECT_THROW(solve_corrector(p, kUnit, CellGrid(8, 8), 3), std::invalid_argument);
  EXPECT_THROW(solve_corrector(p, kUnit, CellGrid(8, 8), 1, 0.0), std::invalid_argument);
}
