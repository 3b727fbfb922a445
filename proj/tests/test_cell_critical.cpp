#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "roughfilm/brinkman_profile.hpp"
#include "roughfilm/cell_critical.hpp"
#include "roughfilm/oracle.hpp"

using namespace roughfilm;

namespace {

const PhysicalParams kUnit = make_params(1, 1, 1, 1, 0);

const RoughnessProfile& groove() {
  static const auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3});
  return p;
}

const RoughnessProfile& egg_crate() {
  static const auto p = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2, .amp2 = 0.15, .amp12 = 0.1});
  return p;
}

const CriticalCellSolution& groove_solution() {
  static const auto s = solve_critical_cell(groove(), kUnit, critical_grid(groove(), 16, 16, 32));
  return s;
}

const CriticalCellSolution& egg_crate_solution() {
  static const auto s = solve_critical_cell(egg_crate(), kUnit, critical_grid(egg_crate(), 16, 16, 32));
  return s;
}

}  // namespace

TEST(CriticalCell, ConstantHeightReproducesBrinkmanProfile) {
  for (auto [M, h] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.8}}) {
    const auto params = make_params(1, 1.0 / (M * M), 1, 1, 0);
    ASSERT_NEAR(params.M(), M, 1e-14);
    const auto prof = RoughnessProfile::constant(h);
    const auto grid = critical_grid(prof, 32, 32, 64);
    const auto c = solve_cell_brinkman(prof, params, grid, 1);
    const CellMask mask(prof, grid);
    double err = 0.0, umax = 0.0, cross = 0.0;
    for (int k = 0; k < grid.n3(); ++k)
      for (int j = 0; j < grid.n2(); ++j)
        for (int i = 0; i < grid.n1(); ++i) {
          const std::size_t id = mask.idx(i, j, k);
          const double s = profile_velocity(M, h, grid.center3(k));
          err = std::max(err, std::abs(c.w.u[id] - s));
          umax = std::max(umax, s);
          cross = std::max({cross, std::abs(c.w.v[id]), std::abs(c.w.w[id])});
        }
    EXPECT_LE(err, 0.02 * umax);
    EXPECT_LE(cross, 1e-12);
    const auto t = assemble_tensor_critical(solve_critical_cell(prof, params, grid));
    const double phi = flow_factor(M, h);
    EXPECT_NEAR(t(0, 0), phi, 0.03 * phi);
    EXPECT_NEAR(t(1, 1), phi, 0.03 * phi);
    EXPECT_NEAR(t(0, 1), 0.0, 1e-12);
  }
}

TEST(CriticalCell, ConstantHeightProfileErrorIsSecondOrder) {
  const auto prof = RoughnessProfile::constant(1.0);
  std::vector<double> spacing, errors;
  for (int n3 : {16, 32, 64}) {
    const auto grid = critical_grid(prof, 8, 8, n3);
    const auto t = assemble_tensor_critical(solve_critical_cell(prof, kUnit, grid));
    spacing.push_back(grid.dz3());
    errors.push_back(std::abs(t(0, 0) - flow_factor(1.0, 1.0)));
  }
  EXPECT_GE(oracle::convergence_order(spacing, errors).order, 1.8);
}

TEST(CriticalCell, DivergenceFreeOnRoughProfiles) {
  for (const auto* sol : {&groove_solution(), &egg_crate_solution()})
    for (const auto& c : sol->corrector) {
      EXPECT_LE(c.divergence, 1e-7);
      EXPECT_LE(c.momentum_residual, 1e-9);
    }
}

TEST(CriticalCell, NetVerticalFluxVanishes) {
  for (const auto* sol : {&groove_solution(), &egg_crate_solution()})
    for (const auto& c : sol->corrector) EXPECT_LE(std::abs(fluid_integral(sol->mask, c.w, 2)), 1e-10);
}

TEST(CriticalCell, SolidNodesCarryNoVelocity) {
  for (const auto& c : egg_crate_solution().corrector) {
    EXPECT_GT(c.max_velocity, 0.01);
    EXPECT_LE(c.leakage, 1e-6 * c.max_velocity);
  }
}

TEST(CriticalCell, GrooveSolutionIsTranslationInvariantAlongGroove) {
  const auto& sol = groove_solution();
  const auto& m = sol.mask;
  const auto& g = sol.grid();
  for (const auto& c : sol.corrector) {
    double diff = 0.0;
    for (int k = 0; k < g.n3(); ++k)
      for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) {
          const std::size_t a = m.idx(i, j, k), b = m.idx(i, (j + 1) % g.n2(), k);
          diff = std::max({diff, std::abs(c.w.u[a] - c.w.u[b]), std::abs(c.w.v[a] - c.w.v[b]),
                           std::abs(c.w.w[a] - c.w.w[b])});
        }
    EXPECT_LE(diff, 1e-12);
  }
  // Flow along the groove needs no pressure.
  EXPECT_EQ(sol.corrector[1].outer_iterations, 0);
}

TEST(CriticalCell, EnergyIdentityHolds) {
  const auto prof = RoughnessProfile::constant(0.9);
  const auto flat = solve_critical_cell(prof, kUnit, critical_grid(prof, 8, 8, 32));
  for (const auto* sol : {&flat, &groove_solution(), &egg_crate_solution()})
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const auto e = energy_identity(*sol, i, j);
        if (i == j) {
          EXPECT_GT(e.lhs, 0.0);
        }
        EXPECT_LE(std::abs(e.lhs - e.rhs), 1e-4 * std::max(std::abs(e.lhs), 1e-3)) << i << j;
      }
}

TEST(CriticalCell, TensorIsSymmetricPositiveAndBelowArithmeticMean) {
  for (const auto* p : {&groove(), &egg_crate()}) {
    const auto& sol = p == &groove() ? groove_solution() : egg_crate_solution();
    const auto t = assemble_tensor_critical(sol);
    EXPECT_TRUE(t.is_spd());
    EXPECT_LE(t.asymmetry, 1e-6);
    const auto means = oracle::flow_factor_means(*p, 1.0, 512);
    const auto ev = t.eigenvalues();
    EXPECT_LE(ev[1], means.arithmetic);
  }
}

TEST(CriticalCell, FlowAlongGrooveMatchesBoundaryFittedOracle) {
  for (double amp : {0.05, 0.3}) {
    const auto prof = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = amp});
    const double coarse = oracle::groove_flow_2d(prof, 1.0, 64), fine = oracle::groove_flow_2d(prof, 1.0, 128);
    const double reference = (4.0 * fine - coarse) / 3.0;
    const auto grid = critical_grid(prof, 32, 8, 64);
    const auto c = solve_cell_brinkman(prof, kUnit, grid, 2);
    EXPECT_NEAR(fluid_integral(CellMask(prof, grid), c.w, 1), reference, 0.01 * reference) << amp;
  }
}

TEST(CriticalCell, ZeroForcingGivesZeroField) {
  const auto c = solve_cell_brinkman(groove(), kUnit, critical_grid(groove(), 8, 8, 16), {0.0, 0.0});
  EXPECT_EQ(c.max_velocity, 0.0);
  for (double p : c.pressure) EXPECT_EQ(p, 0.0);
}

TEST(CriticalCell, RejectsBadGrids) {
  EXPECT_THROW(CellMask(groove(), CellGrid(16, 16, 32, 1.0)), std::invalid_argument);
  EXPECT_THROW(CellMask(groove(), CellGrid(16, 16, 4, 1.3)), std::invalid_argument);
  EXPECT_THROW(solve_cell_brinkman(groove(), kUnit, critical_grid(groove(), 8, 8, 16), 3), std::invalid_argument);
}

TEST(CellTemperature, HomogeneousProblemIsZero) {
  const auto t = solve_cell_temperature(groove_solution(), kUnit, {0.0, 0.0});
  for (double v : t.T) EXPECT_EQ(v, 0.0);
}

TEST(CellTemperature, BottomFluxOnlyGivesLinearProfile) {
  const auto params = make_params(1, 1, 1, 2.0, 3.0);
  const auto prof = RoughnessProfile::constant(0.8);
  const auto sol = solve_critical_cell(prof, params, critical_grid(prof, 8, 8, 32));
  const auto t = solve_cell_temperature(sol, params, {0.0, 0.0});
  const auto& g = sol.grid();
  for (int k = 0; k < g.n3(); ++k)
    EXPECT_NEAR(t.T[sol.mask.idx(3, 5, k)], 3.0 / 2.0 * (0.8 - g.center3(k)), 1e-10);
  EXPECT_NEAR(t.average, 3.0 / 2.0 * 0.8 * 0.8 / 2.0, 1e-10);
}

TEST(CellTemperature, FlatCellMatchesOneDimensionalOracle) {
  const auto params = make_params(1.5, 0.5, 0.6, 0.7, 0.4);
  const double M = params.M(), h = 1.0;
  const std::array<double, 2> F{0.8, -0.6};  // unit drive
  const auto prof = RoughnessProfile::constant(h);
  const auto sol = solve_critical_cell(prof, params, critical_grid(prof, 8, 8, 128));
  const auto t = solve_cell_temperature(sol, params, F);
  const double s = params.mobility_scale();
  auto source = [&](double z) {
    const double u = s * profile_velocity(M, h, z), du = s * profile_dz3(M, h, z);
    return params.mu() / params.K() * u * u + params.mu_eff() * du * du;
  };
  const auto ref = oracle::heat_bvp_1d(source, params.b(), params.k(), h, 8192);
  double err = 0.0, scale = 0.0;
  const auto& g = sol.grid();
  for (int k = 0; k < g.n3(); ++k) {
    err = std::max(err, std::abs(t.T[sol.mask.idx(2, 2, k)] - ref.at(g.center3(k))));
    scale = std::max(scale, std::abs(ref.at(g.center3(k))));
  }
  EXPECT_LE(err, 1e-3 * scale);
}

TEST(CellTemperature, MaximumPrinciple) {
  const auto params = make_params(1, 1, 1, 1, 0.5);
  const auto t = solve_cell_temperature(egg_crate_solution(), params, {1.0, 0.5});
  EXPECT_GE(*std::min_element(t.T.begin(), t.T.end()), 0.0);
  for (std::size_t c = 0; c < t.T.size(); ++c)
    if (!egg_crate_solution().mask.active(c)) {
      EXPECT_EQ(t.T[c], 0.0);
    }
}

TEST(CellTemperature, BasisReproducesDirectSolve) {
  const auto params = make_params(1, 0.7, 1.3, 0.9, 0.25);
  const auto sol = solve_critical_cell(egg_crate(), params, critical_grid(egg_crate(), 8, 8, 16));
  const auto basis = cell_temperature_basis(sol, params);
  for (auto F : {std::array<double, 2>{0.0, 0.0}, std::array<double, 2>{0.7, -0.4}, std::array<double, 2>{-2.0, 1.0}}) {
    const double direct = solve_cell_temperature(sol, params, F).average;
    EXPECT_NEAR(basis.average(F), direct, 1e-9 * std::abs(direct));
  }
}
