#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "roughfilm/oracle.hpp"

using namespace roughfilm;

TEST(BrinkmanBvp, RejectsCoarseGrid) { EXPECT_THROW(oracle::brinkman_bvp_1d(1, 1, 64), std::invalid_argument); }

TEST(BrinkmanBvp, RichardsonSelfConsistency) {
  // The shape at mid-height is 1 - 1/cosh(Mh/2) for the symmetric channel.
  const double exact = 1.0 - 1.0 / std::cosh(0.5);
  const auto plain = oracle::brinkman_bvp_1d(1.0, 1.0, 4096);
  EXPECT_NEAR(plain.u[2048], exact, 1e-7);
  const auto rich = oracle::brinkman_bvp_1d_richardson(1.0, 1.0, 512);
  EXPECT_NEAR(rich.u[256], exact, 1e-11);
  EXPECT_LT(plain.residual, 1e-8);
}

TEST(BrinkmanBvp, MaximumPrinciple) {
  for (double M : {0.1, 1.0, 10.0, 100.0}) {
    const auto r = oracle::brinkman_bvp_1d(M, 1.0, 256);
    for (double v : r.u) {
      EXPECT_LE(v, 1.0);
      EXPECT_GE(v, 0.0);
    }
  }
}

TEST(BrinkmanBvp, SmallMhSeries) {
  const double M = 0.01, h = 1.0;
  const auto r = oracle::brinkman_bvp_1d(M, h, 1024);
  for (std::size_t k = 1; k < r.z.size() - 1; k += 37) {
    const double z = r.z[k];
    const double series = 0.5 * M * M * z * (h - z);
    EXPECT_NEAR(r.u[k] / series, 1.0, 1e-3);
  }
}

TEST(HeatBvp, LinearProfileWithoutSource) {
  const int n = 256;
  std::vector<double> zero(n + 1, 0.0);
  const auto r = oracle::heat_bvp_1d(std::span<const double>(zero), 2.0, 4.0, 1.5, n);
  for (std::size_t i = 0; i < r.z.size(); ++i) EXPECT_NEAR(r.u[i], 0.5 * (1.5 - r.z[i]), 1e-12);
}

TEST(HeatBvp, QuadraticSourceSecondOrder) {
  // -T'' = 1, T(1) = 0, -T'(0) = 0  =>  T = (1 - z^2) / 2, reproduced exactly.
  auto r = oracle::heat_bvp_1d([](double) { return 1.0; }, 0.0, 1.0, 1.0, 128);
  for (std::size_t i = 0; i < r.z.size(); ++i) EXPECT_NEAR(r.u[i], 0.5 * (1 - r.z[i] * r.z[i]), 1e-12);
  // -T'' = cos(z), T(1) = 0, T'(0) = 0  =>  T = cos z - cos 1.
  std::vector<double> err;
  for (int n : {64, 128, 256}) {
    auto s = oracle::heat_bvp_1d([](double z) { return std::cos(z); }, 0.0, 1.0, 1.0, n);
    double e = 0;
    for (std::size_t i = 0; i < s.z.size(); ++i) e = std::max(e, std::abs(s.u[i] - (std::cos(s.z[i]) - std::cos(1.0))));
    err.push_back(e);
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.1);
  EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.1);
}

TEST(Laminate, ConstantProfileBothMeansEqualPhi) {
  auto a = oracle::laminate_tensor_1d(RoughnessProfile::constant(1.0), 1.0, 100);
  const double phi = oracle::flow_factor_reference(1.0, 1.0);
  EXPECT_NEAR(a[0][0], phi, 1e-15);
  EXPECT_NEAR(a[1][1], phi, 1e-15);
}

TEST(Laminate, SinusoidalOrderingAndAxis) {
  auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3});
  auto a = oracle::laminate_tensor_1d(p, 1.0, 100000);
  EXPECT_GT(a[0][0], 0.0);
  EXPECT_LT(a[0][0], a[1][1]);
  EXPECT_EQ(a[0][1], 0.0);
  auto t = oracle::laminate_tensor_1d(p.transposed(), 1.0, 100000);
  EXPECT_DOUBLE_EQ(t[1][1], a[0][0]);
  EXPECT_DOUBLE_EQ(t[0][0], a[1][1]);
  EXPECT_THROW(oracle::laminate_tensor_1d(RoughnessProfile::sinusoidal({.mean = 1.0, .amp12 = 0.3}), 1.0, 100),
               std::invalid_argument);
}

TEST(Laminate, SmallAmplitudePerturbation) {
  const double phi = oracle::flow_factor_reference(1.0, 1.0);
  double prev = INFINITY;
  for (double amp : {0.08, 0.04, 0.02}) {
    auto a = oracle::laminate_tensor_1d(RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = amp}), 1.0, 2000);
    const double dev = std::max(std::abs(a[0][0] - phi), std::abs(a[1][1] - phi));
    EXPECT_LT(dev / (amp * amp), 2.0 * phi * 10);
    if (std::isfinite(prev)) {
      EXPECT_NEAR(prev / dev, 4.0, 0.3);
    }
    prev = dev;
  }
}

TEST(FlowFactorReference, AgreesWithQuadrature) {
  for (double M : {0.05, 1.0, 30.0}) {
    const double h = 0.8;
    auto shape = [&](double z) { return 1.0 - std::cosh(M * (z - 0.5 * h)) / std::cosh(0.5 * M * h); };
    EXPECT_NEAR(oracle::flow_factor_reference(M, h) / oracle::simpson(shape, 0.0, h, 20000), 1.0, 1e-9);
  }
}

TEST(ConvergenceOrder, LadderBehaviour) {
  std::vector<double> hs{0.1, 0.05, 0.025};
  std::vector<double> e2{1e-2, 2.5e-3, 6.25e-4};
  auto o = oracle::convergence_order(hs, e2);
  EXPECT_TRUE(o.monotone);
  EXPECT_NEAR(o.order, 2.0, 1e-12);
  std::vector<double> flat{1e-3, 1e-3, 1e-3};
  auto z = oracle::convergence_order(hs, flat);
  EXPECT_FALSE(z.monotone);
  EXPECT_EQ(z.order, 0.0);
  std::vector<double> one{0.1};
  EXPECT_THROW(oracle::convergence_order(one, one), std::invalid_argument);
}

TEST(Oracle, Deterministic) {
  auto a = oracle::brinkman_bvp_1d(3.0, 0.7, 300);
  auto b = oracle::brinkman_bvp_1d(3.0, 0.7, 300);
  EXPECT_EQ(a.u, b.u);
}

TEST(GrooveFlow, FlatChannelReducesToFlowFactor) {
  const auto p = RoughnessProfile::constant(0.9);
  std::vector<double> spacing, errors;
  for (int n : {16, 32, 64}) {
    spacing.push_back(1.0 / n);
    errors.push_back(std::abs(oracle::groove_flow_2d(p, 2.0, n) - oracle::flow_factor_reference(2.0, 0.9)));
  }
  EXPECT_LT(errors.back(), 1e-4);
  EXPECT_NEAR(oracle::convergence_order(spacing, errors).order, 2.0, 0.2);
}

TEST(GrooveFlow, StaysBelowArithmeticMeanOfFlowFactor) {
  const auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2});
  const auto means = oracle::flow_factor_means(p, 1.0, 256);
  const double q = oracle::groove_flow_2d(p, 1.0, 64);
  EXPECT_GT(q, 0.0);
  EXPECT_LT(q, means.arithmetic);
}

TEST(GrooveFlow, RejectsTwoDimensionalProfiles) {
  EXPECT_THROW(oracle::groove_flow_2d(RoughnessProfile::sinusoidal({.mean = 1.0, .amp2 = 0.1}), 1.0, 32),
               std::invalid_argument);
}
