#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <random>

#include "roughfilm/grid.hpp"
#include "roughfilm/params.hpp"
#include "roughfilm/roughness.hpp"

using namespace roughfilm;

TEST(MakeParams, DerivesBrinkmanParameter) {
  EXPECT_EQ(make_params(1, 1, 1, 1, 0).M(), 1.0);
  EXPECT_EQ(make_params(4, 1, 1, 1, 1).M(), 2.0);
  // sqrt(1e-3 / (0.5 * 2e-3)) = sqrt(1) = 1
  EXPECT_NEAR(make_params(1e-3, 2e-3, 0.5, 0.6, 10).M(), 1.0, 1e-15);
}

TEST(MakeParams, RejectsNonPositiveConstantsByName) {
  auto message_of = [](auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message_of([] { make_params(0, 1, 1, 1, 0); }).find("mu"), std::string::npos);
  EXPECT_NE(message_of([] { make_params(1, -1, 1, 1, 0); }).find("mu_eff"), std::string::npos);
  EXPECT_NE(message_of([] { make_params(1, 1, 0, 1, 0); }).find("K"), std::string::npos);
  EXPECT_NE(message_of([] { make_params(1, 1, 1, 0, 0); }).find("k must"), std::string::npos);
  EXPECT_NO_THROW(make_params(1, 1, 1, 1, -5.0));
}

TEST(MakeParams, StoredMIsReproducibleBitForBit) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-4, 1e3);
  for (int t = 0; t < 200; ++t) {
    auto p = make_params(u(rng), u(rng), u(rng), u(rng), 0.0);
    EXPECT_EQ(p.M(), PhysicalParams::brinkman_parameter(p.mu(), p.mu_eff(), p.K()));
  }
}

TEST(Roughness, ConstantProfile) {
  auto h = RoughnessProfile::constant(1.0);
  EXPECT_EQ(h.eval({0.3, -0.2}), 1.0);
  EXPECT_EQ(h.eval({17.3, -4.2}), 1.0);
  EXPECT_EQ(h.h_min(), 1.0);
  EXPECT_EQ(h.h_max(), 1.0);
}

TEST(Roughness, SinusoidalProductValuesAndPeriodicity) {
  auto h = RoughnessProfile::sinusoidal({.mean = 1.0, .amp12 = 0.3});
  EXPECT_NEAR(h.eval({0, 0}), 1.3, 1e-15);
  EXPECT_NEAR(h.eval({1, 0}), 1.3, 1e-15);
  EXPECT_DOUBLE_EQ(h.h_min(), 0.7);
  EXPECT_DOUBLE_EQ(h.h_max(), 1.3);
}

TEST(Roughness, PeriodicityAndBoundsProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_int_distribution<int> shift(-5, 5);
  auto h = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2, .amp2 = 0.1, .amp12 = 0.15, .k1 = 2, .k2 = 1});
  for (int t = 0; t < 2000; ++t) {
    Point2 z{u(rng), u(rng)};
    Point2 zs{z[0] + shift(rng), z[1] + shift(rng)};
    const double v = h.eval(z);
    EXPECT_LE(std::abs(h.eval(zs) - v), 1e-12);
    EXPECT_GE(v, h.h_min() - 1e-15);
    EXPECT_LE(v, h.h_max() + 1e-15);
  }
  // Corners of the bilinear (cos, cos) square are attained.
  EXPECT_NEAR(h.eval({0, 0}), h.h_max(), 1e-14);
}

TEST(Roughness, SampledGridBoundsAndWrapping) {
  SampledGrid g{4, 4, {}};
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) g.heights.push_back(1.0 + 0.1 * i + 0.05 * j);
  auto h = RoughnessProfile::sampled(g);
  EXPECT_EQ(h.h_min(), 1.0);
  EXPECT_EQ(h.h_max(), *std::max_element(g.heights.begin(), g.heights.end()));
  // Node (0,0) sits at z' = (-1/2, -1/2).
  EXPECT_DOUBLE_EQ(h.eval({-0.5, -0.5}), 1.0);
  EXPECT_DOUBLE_EQ(h.eval({0.5, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(h.eval({-0.25, -0.5}), 1.1);
  // Midway between node 3 and the wrapped node 0 along z1.
  EXPECT_NEAR(h.eval({0.375, -0.5}), 0.5 * (1.3 + 1.0), 1e-14);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 500; ++t) {
    const double v = h.eval({u(rng), u(rng)});
    EXPECT_GE(v, h.h_min());
    EXPECT_LE(v, h.h_max());
  }
}

TEST(Roughness, RejectsEmptyOrNonPositive) {
  EXPECT_THROW(RoughnessProfile::sampled({0, 0, {}}), std::invalid_argument);
  EXPECT_THROW(RoughnessProfile::sampled({2, 2, {1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(RoughnessProfile::constant(0.0), std::invalid_argument);
  EXPECT_THROW(RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 1.0}), std::invalid_argument);
}

TEST(Roughness, GradientMatchesDifferences) {
  auto h = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2, .amp2 = 0.1, .amp12 = 0.15, .k1 = 2, .k2 = 1});
  const double d = 1e-6;
  for (Point2 z : {Point2{0.1, 0.2}, Point2{-0.33, 0.41}}) {
    auto g = h.gradient(z);
    EXPECT_NEAR(g[0], (h.eval({z[0] + d, z[1]}) - h.eval({z[0] - d, z[1]})) / (2 * d), 1e-7);
    EXPECT_NEAR(g[1], (h.eval({z[0], z[1] + d}) - h.eval({z[0], z[1] - d})) / (2 * d), 1e-7);
  }
}

TEST(Roughness, TransposeSwapsAxes) {
  auto h = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2, .amp2 = 0.05, .k1 = 1, .k2 = 2});
  auto t = h.transposed();
  EXPECT_NEAR(h.eval({0.13, -0.27}), t.eval({-0.27, 0.13}), 1e-15);
  EXPECT_TRUE(RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3}).varies_only_along(0));
  EXPECT_FALSE(RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3}).varies_only_along(1));
}

TEST(Grids, Validation) {
  EXPECT_THROW(CellGrid(3, 4), std::invalid_argument);
  EXPECT_THROW(CellGrid(6, 5), std::invalid_argument);
  EXPECT_NO_THROW(CellGrid(4, 4, 8, 1.3));
  EXPECT_THROW(MacroGrid(0, 1, 0, 1, 2, 5), std::invalid_argument);
  EXPECT_THROW(MacroGrid(0, 0, 0, 1, 4, 5), std::invalid_argument);
  MacroGrid m(0, 2, 0, 1, 4, 3);
  EXPECT_DOUBLE_EQ(m.xc(0), 0.25);
  auto mask = m.boundary_mask();
  EXPECT_TRUE(mask[m.index(0, 1)]);
  EXPECT_FALSE(mask[m.index(1, 1)]);
}
