#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "roughfilm/brinkman_profile.hpp"
#include "roughfilm/oracle.hpp"

using namespace roughfilm;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

// Literal shape A1 e^{Mz} + A2 e^{-Mz} + 1 with the coefficients as first written.
double literal_shape(double M, double h, double z) {
  const double ep = std::exp(M * h), em = std::exp(-M * h);
  const double A1 = -(1 - em) / (ep - em);
  const double A2 = (1 - ep) / (ep - em);
  return A1 * std::exp(M * z) + A2 * std::exp(-M * z) + 1.0;
}

}  // namespace

TEST(ProfileCoeffs, WallIdentities) {
  const auto c = profile_coeffs(1.0, 1.0);
  EXPECT_NEAR(c.A1 + c.A2 + 1.0, 0.0, 1e-15);
  EXPECT_NEAR(c.A1 * std::exp(1.0) + c.A2 * std::exp(-1.0) + 1.0, 0.0, 1e-15);
}

TEST(ProfileCoeffs, LargeMLimitAgainstBvpOracle) {
  const double M = 50.0;
  const auto c = profile_coeffs(M, 1.0);
  EXPECT_NEAR(c.A1 / -std::exp(-M), 1.0, 1e-15);
  EXPECT_NEAR(c.A2, -1.0, 1e-20);
  const auto ref = oracle::brinkman_bvp_1d_richardson(M, 1.0, 8192);
  double err = 0.0;
  for (std::size_t k = 0; k < ref.z.size(); k += 64) err = std::max(err, std::abs(profile_velocity(c, ref.z[k]) - ref.u[k]));
  EXPECT_LT(err, 1e-7);
}

TEST(ProfileCoeffs, MatchesBvpOracleAtModerateM) {
  const double M = 2.0, h = 0.5;
  const auto c = profile_coeffs(M, h);
  const auto ref = oracle::brinkman_bvp_1d_richardson(M, h, 2048);
  for (std::size_t k = 0; k < ref.z.size(); ++k) EXPECT_NEAR(profile_velocity(c, ref.z[k]), ref.u[k], 1e-8);
  EXPECT_NEAR(literal_shape(M, h, 0.2), profile_velocity(c, 0.2), 1e-14);
}

TEST(ProfileVelocity, NoSlipAndInteriorValue) {
  const auto c = profile_coeffs(1.0, 1.0);
  EXPECT_EQ(profile_velocity(c, 0.0), 0.0);
  EXPECT_EQ(profile_velocity(c, 1.0), 0.0);
  const auto ref = oracle::brinkman_bvp_1d_richardson(1.0, 1.0, 4096);
  const double mid = profile_velocity(c, 0.5);
  EXPECT_GT(mid, 0.0);
  EXPECT_NEAR(mid, ref.u[2048], 1e-8);
  EXPECT_THROW(profile_velocity(c, 1.01), std::out_of_range);
  EXPECT_THROW(profile_velocity(c, -0.01), std::out_of_range);
}

TEST(ProfileDz3, CentralDifferencesAndSign) {
  for (double M : {0.3, 1.0, 7.0}) {
    const double h = 1.2;
    const auto c = profile_coeffs(M, h);
    EXPECT_NEAR(profile_dz3(c, 0.5 * h), 0.0, 1e-15);
    EXPECT_GT(profile_dz3(c, 0.0), 0.0);
    EXPECT_NEAR(profile_dz3(c, 0.0), M * (c.A1 - c.A2), 1e-13);
    const double d = 1e-4;
    for (double z : {0.1, 0.4, 0.77, 1.0}) {
      const double fd = (profile_velocity(c, z + d) - profile_velocity(c, z - d)) / (2 * d);
      // s''' = M^2 s', so the central-difference error is about d^2 M^2 |s'| / 6.
      EXPECT_NEAR(fd, profile_dz3(c, z), d * d * M * M * M + 1e-10) << "M=" << M << " z=" << z;
    }
  }
}

TEST(FlowFactor, TrapezoidQuadratureOfShape) {
  const double phi = flow_factor(1.0, 1.0);
  const double q = oracle::trapezoid([](double z) { return literal_shape(1.0, 1.0, z); }, 0.0, 1.0, 100000);
  EXPECT_NEAR(phi, q, 1e-8 * phi);
}

TEST(FlowFactor, PoiseuilleAndDarcyLimits) {
  // Mh = 1e-2: phi -> M^2 h^3 / 12, relative series error about (Mh)^2 / 10.
  const double M = 0.01, h = 1.0;
  EXPECT_NEAR(flow_factor(M, h) / (M * M * h * h * h / 12.0), 1.0, 1e-4);
  EXPECT_NEAR(flow_factor(100.0, 1.0), 0.98, 1e-6);
  EXPECT_NEAR(flow_factor(100.0, 1.0) / (1.0 - 2.0 / 100.0), 1.0, 1e-4);
}

TEST(FlowFactor, SeriesBranchIsContinuous) {
  // y = Mh/2 switches evaluation at 0.1.
  const double M = 1.0;
  const double below = flow_factor(M, 0.2 - 1e-12), above = flow_factor(M, 0.2 + 1e-12);
  EXPECT_NEAR(below / above, 1.0, 1e-9);
  EXPECT_NEAR(flow_factor(M, 0.19) / oracle::flow_factor_reference(M, 0.19), 1.0, 1e-9);
}

TEST(ProfileInvariants, LogGrid) {
  const auto Ms = log_grid(1e-3, 1e3, 13);
  const auto hs = log_grid(0.1, 10.0, 9);
  for (double M : Ms) {
    double prev = 0.0;
    for (double h : hs) {
      const auto c = profile_coeffs(M, h);
      EXPECT_LE(std::abs(profile_velocity(c, 0.0)), 1e-12);
      EXPECT_LE(std::abs(profile_velocity(c, h)), 1e-12);
      for (double t : {0.01, 0.25, 0.5, 0.9}) EXPECT_GT(profile_velocity(c, t * h), 0.0);
      const double phi = flow_factor(M, h);
      EXPECT_GT(phi, 0.0);
      EXPECT_GT(phi, prev) << "phi not increasing in h at M=" << M;
      prev = phi;
    }
  }
}

TEST(ProfileInvariants, AsymptoticRatios) {
  for (double h : {0.5, 1.0, 3.0}) {
    const double M = 1e-2 / h;
    EXPECT_NEAR(flow_factor(M, h) / (M * M * h * h * h / 12.0), 1.0, 1e-3);
    const double Md = 100.0 / h;
    EXPECT_NEAR(flow_factor(Md, h) / (h - 2.0 / Md), 1.0, 1e-4);
  }
}

TEST(ProfileInvariants, FiniteForHugeArguments) {
  for (double Mh : {50.0, 1e3, 1e4}) {
    const auto c = profile_coeffs(Mh, 1.0);
    for (double z : {0.0, 1e-3, 0.5, 1.0 - 1e-3, 1.0}) {
      EXPECT_TRUE(std::isfinite(profile_velocity(c, z)));
      EXPECT_TRUE(std::isfinite(profile_dz3(c, z)));
    }
    EXPECT_TRUE(std::isfinite(flow_factor(Mh, 1.0)));
    EXPECT_TRUE(std::isfinite(c.A1) && std::isfinite(c.A2));
  }
}
