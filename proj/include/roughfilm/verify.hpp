#pragma once

// Oracle comparison suites behind `roughfilm verify`. Each suite returns one
// row per check: measured value, target, tolerance and verdict. Rows of the
// "discrepancy" suite carry no tolerance and the verdict REPORT.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "brinkman_profile.hpp"
#include "cell_critical.hpp"
#include "cell_subcritical.hpp"
#include "config.hpp"
#include "macro_reynolds.hpp"
#include "oracle.hpp"
#include "pipeline.hpp"
#include "reconstruct.hpp"
#include "variant_forms.hpp"

namespace roughfilm::verify {

enum class Verdict { pass, fail, report };

struct CheckRow {
  std::string check;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::report;
};

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::report: return "REPORT";
  }
  return "REPORT";
}

/// |measured - target| <= tolerance.
inline CheckRow near(std::string name, double measured, double target, double tol) {
  const bool ok = std::isfinite(measured) && std::abs(measured - target) <= tol;
  return {std::move(name), measured, target, tol, ok ? Verdict::pass : Verdict::fail};
}

/// measured <= tolerance, for error measures with target 0.
inline CheckRow at_most(std::string name, double measured, double tol) {
  const bool ok = std::isfinite(measured) && measured <= tol;
  return {std::move(name), measured, 0.0, tol, ok ? Verdict::pass : Verdict::fail};
}

/// measured >= target.
inline CheckRow at_least(std::string name, double measured, double target) {
  const bool ok = std::isfinite(measured) && measured >= target;
  return {std::move(name), measured, target, 0.0, ok ? Verdict::pass : Verdict::fail};
}

inline CheckRow reported(std::string name, double measured, double target) {
  return {std::move(name), measured, target, std::numeric_limits<double>::quiet_NaN(), Verdict::report};
}

namespace detail {

/// s(z) = 2 sinh(Mz/2) sinh(M(h-z)/2) / cosh(Mh/2), the profile shape written
/// without cancellation for small Mh.
inline double shape_product_form(double M, double h, double z) {
  return 2.0 * std::sinh(0.5 * M * z) * std::sinh(0.5 * M * (h - z)) / std::cosh(0.5 * M * h);
}

inline double shape_product_form_dz(double M, double h, double z) {
  return M * std::sinh(0.5 * M * (h - 2 * z)) / std::cosh(0.5 * M * h);
}

inline std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

inline double trapezoid_flow_factor(double M, double h) {
  return oracle::trapezoid([&](double z) { return shape_product_form(M, h, z); }, 0.0, h, 100000);
}

/// Column temperature through the finite-difference oracle; unit drive.
inline oracle::BVPResult column_oracle(const PhysicalParams& p, double h, int n) {
  const double s = p.mobility_scale();
  return oracle::heat_bvp_1d(
      [&](double z) {
        const double u = s * shape_product_form(p.M(), h, z), du = s * shape_product_form_dz(p.M(), h, z);
        return p.mu() / p.K() * u * u + p.mu_eff() * du * du;
      },
      p.b(), p.k(), h, n);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline std::vector<CheckRow> flowfactor() {
  std::vector<CheckRow> rows;
  double worst = 0.0;
  for (double M : detail::log_grid(1e-2, 1e2, 7))
    for (double h : detail::log_grid(0.25, 4.0, 7)) {
      const double ref = detail::trapezoid_flow_factor(M, h);
      worst = std::max(worst, std::abs(flow_factor(M, h) - ref) / ref);
    }
  rows.push_back(at_most("flow_factor_vs_trapezoid_7x7_max_rel_error", worst, 1e-8));
  return rows;
}

inline std::vector<CheckRow> limits() {
  std::vector<CheckRow> rows;
  const double mu = 1.0, K = 1.0;
  for (double h : {0.5, 1.0, 2.0}) {
    const double M = 1e-2 / h;
    const double mu_eff = mu / (K * M * M);
    const auto p = make_params(mu, mu_eff, K, 1.0, 0.0);
    const double poiseuille = h * h * h / (12.0 * mu_eff);
    const double rel = std::abs(p.mobility_scale() * flow_factor(p.M(), h) - poiseuille) / poiseuille;
    rows.push_back(at_most("poiseuille_limit_Mh_1e-2_h_" + detail::tag(h), rel, 1e-3));
  }
  for (double h : {0.5, 1.0, 2.0}) {
    const double M = 100.0 / h;
    const double darcy = h - 2.0 / M;
    rows.push_back(at_most("darcy_limit_Mh_100_h_" + detail::tag(h), std::abs(flow_factor(M, h) - darcy) / darcy, 1e-4));
  }
  return rows;
}

inline std::vector<CheckRow> subcritical() {
  std::vector<CheckRow> rows;
  const auto params = make_params(1.0, 1.0, 1.0, 1.0, 0.0);
  const double M = params.M();
  {
    const auto prof = RoughnessProfile::constant(0.7);
    const auto sol = solve_subcritical_cell(prof, params, CellGrid(32, 32), 1e-12);
    double grad = 0.0;
    for (int d = 1; d <= 2; ++d)
      for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i) {
          const auto g = sol.corrector_gradient(d, i, j);
          grad = std::max({grad, std::abs(g[0]), std::abs(g[1])});
        }
    rows.push_back(at_most("constant_h_corrector_gradient_max", grad, 1e-8));
    const auto t = assemble_tensor_subcritical(prof, params, sol);
    const double phi = oracle::flow_factor_reference(M, 0.7);
    const double dev = std::max({std::abs(t(0, 0) - phi), std::abs(t(1, 1) - phi), std::abs(t(0, 1)), std::abs(t(1, 0))});
    rows.push_back(at_most("constant_h_tensor_minus_phi_over_phi", dev / phi, 1e-8));
  }
  for (int axis = 0; axis < 2; ++axis) {
    SinusoidalParams sp{.mean = 1.0};
    (axis == 0 ? sp.amp1 : sp.amp2) = 0.3;
    const auto prof = RoughnessProfile::sinusoidal(sp);
    const auto t = assemble_tensor_subcritical(prof, params, solve_subcritical_cell(prof, params, CellGrid(128, 128), 1e-12));
    const Mat2 lam = oracle::laminate_tensor_1d(prof, M, 100000);
    const std::string tag = axis == 0 ? "z1" : "z2";
    for (int d = 0; d < 2; ++d) {
      const double rel = std::abs(t(d, d) - lam[d][d]) / lam[d][d];
      rows.push_back(at_most("laminate_" + tag + "_A" + std::to_string(d + 1) + std::to_string(d + 1) + "_rel_error_128",
                             rel, 5e-3));
    }
    rows.push_back(at_most("laminate_" + tag + "_offdiagonal_over_max", std::abs(t(0, 1)) / t.max_entry(), 5e-3));
  }
  SampledGrid sg{16, 16, std::vector<double>(256)};
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) sg.heights[i + 16 * j] = 1.0 + 0.2 * std::sin(0.7 * i + 1.3 * j) * std::cos(0.4 * i);
  const std::vector<std::pair<std::string, RoughnessProfile>> profiles{
      {"constant", RoughnessProfile::constant(0.7)},
      {"groove_z1", RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3})},
      {"egg_crate", RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2, .amp2 = 0.15, .amp12 = 0.1})},
      {"oblique", RoughnessProfile::sinusoidal({.mean = 1.2, .amp1 = 0.2, .amp2 = 0.2, .amp12 = 0.3, .k1 = 1, .k2 = 2})},
      {"sampled", RoughnessProfile::sampled(sg)}};
  for (const auto& [name, prof] : profiles) {
    const auto t = assemble_tensor_subcritical(prof, params, solve_subcritical_cell(prof, params, CellGrid(64, 64), 1e-12));
    rows.push_back(at_most(name + "_asymmetry", t.asymmetry, 1e-8));
    rows.push_back(at_least(name + "_min_eigenvalue", t.eigenvalues()[0], 0.0));
  }
  return rows;
}

namespace detail {

inline double cosine_rms_error(const MacroGrid& g, const MacroPressure& pr) {
  double mean = 0.0;
  std::vector<double> exact(g.size());
  for (int j = 0; j < g.m2(); ++j)
    for (int i = 0; i < g.m1(); ++i) mean += exact[g.index(i, j)] = MacroForcing::cosine_potential(g, 1.0, g.node(i, j));
  mean /= static_cast<double>(g.size());
  double e2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) e2 += std::pow(pr.p[k] - (exact[k] - mean), 2);
  return std::sqrt(e2 / static_cast<double>(g.size()));
}

}  // namespace detail

inline std::vector<CheckRow> macro() {
  std::vector<CheckRow> rows;
  const auto params = make_params(2.0, 0.5, 0.25, 1.0, 0.0);
  const auto prof = RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3, .amp2 = 0.2});
  struct Case {
    std::string name;
    double L1, L2;
    std::function<MobilityField(const MacroGrid&)> B;
  };
  const std::vector<Case> cases{
      {"isotropic", 2.0, 1.0, [](const MacroGrid& g) { return MobilityField::uniform(g, {{{1.0, 0.0}, {0.0, 1.0}}}); }},
      {"variable_smooth", 1.0, 1.0, [&](const MacroGrid& g) { return mobility_field(Regime::smooth, nullptr, prof, params, g); }},
      {"full_tensor", 1.0, 1.5, [](const MacroGrid& g) { return MobilityField::uniform(g, {{{1.0, 0.3}, {0.3, 0.7}}}); }}};
  for (const auto& c : cases) {
    std::vector<double> h, e;
    for (int m : {16, 32, 64}) {
      const MacroGrid g(0.0, c.L1, 0.0, c.L2, m, m);
      const auto pr = solve_pressure(g, c.B(g), MacroForcing::gradient_cosine(g, 1.0));
      h.push_back(1.0 / m);
      e.push_back(detail::cosine_rms_error(g, pr));
    }
    rows.push_back(at_least("manufactured_order_" + c.name, oracle::convergence_order(h, e).order, 1.8));
  }
  for (bool full : {false, true}) {
    const MacroGrid g(0.0, 1.0, 0.0, 2.0, 24, 40);
    const Mat2 b = full ? Mat2{{{0.8, 0.25}, {0.25, 0.5}}} : Mat2{{{0.8, 0.0}, {0.0, 0.5}}};
    const auto B = MobilityField::uniform(g, b);
    const Vec2 fc{1.3, -0.7};
    const auto f = MacroForcing::constant(g, fc);
    const auto pr = solve_pressure(g, B, f);
    const auto v = average_velocity(g, pr, B, f);
    double grad_err = 0.0, vmax = 0.0;
    for (std::size_t id = 0; id < g.size(); ++id) {
      grad_err = std::max({grad_err, std::abs(v.drive1[id]), std::abs(v.drive2[id])});
      vmax = std::max({vmax, std::abs(v.v1[id]), std::abs(v.v2[id])});
    }
    const std::string tag = full ? "full" : "diagonal";
    rows.push_back(at_most("constant_forcing_grad_p_minus_f_" + tag, grad_err, 1e-10));
    rows.push_back(at_most("constant_forcing_velocity_" + tag, vmax, 1e-10));
  }
  {
    const MacroGrid g(0.0, 1.0, 0.0, 1.0, 32, 32);
    for (bool full : {false, true}) {
      const auto B = full ? MobilityField::uniform(g, {{{1.0, 0.3}, {0.3, 0.7}}})
                          : mobility_field(Regime::smooth, nullptr, prof, params, g);
      const auto f = MacroForcing::rotational(g, 1.0);
      const auto pr = solve_pressure(g, B, f);
      const auto v = average_velocity(g, pr, B, f);
      rows.push_back(at_most(std::string("conservation_residual_") + (full ? "full_tensor" : "variable_smooth"),
                             v.max_divergence, 1e-8));
    }
  }
  return rows;
}

inline std::vector<CheckRow> temperature() {
  std::vector<CheckRow> rows;
  {
    const auto p = make_params(1, 1, 1, 1, 1);
    const auto col = temperature_column(p, 1.0, 0.0, 1024);
    rows.push_back(at_most("linear_profile_T0_minus_1", std::abs(col.T.front() - 1.0), 0.0));
    double lin = 0.0;
    for (std::size_t m = 0; m < col.z.size(); ++m) lin = std::max(lin, std::abs(col.T[m] - (1.0 - col.z[m])));
    rows.push_back(at_most("linear_profile_max_error", lin, 1e-14));
  }
  for (double b : {0.0, 1.0}) {
    const auto p = make_params(1, 1, 1, 1, b);
    const double h = 1.0;
    const auto col = temperature_column(p, h, 1.0, 1024);
    const auto ref = detail::column_oracle(p, h, 8192);
    double err = 0.0;
    for (std::size_t m = 0; m < col.z.size(); ++m) err = std::max(err, std::abs(col.T[m] - ref.u[8 * m]));
    const std::string tag = "_b" + detail::tag(b);
    rows.push_back(at_most("unit_forcing_vs_heat_bvp_max_error" + tag, err, 1e-6));
    rows.push_back(at_most("top_boundary_value" + tag, std::abs(col.T.back()), 0.0));
    rows.push_back(at_most("bottom_flux_error" + tag, col.bottom_flux_error, 1e-4));
  }
  return rows;
}

/// Sampled groove running along z1 = -z2, which gives a full tensor.
inline RoughnessProfile diagonal_groove() {
  SampledGrid g{32, 32, std::vector<double>(1024)};
  for (int j = 0; j < 32; ++j)
    for (int i = 0; i < 32; ++i) g.heights[i + 32 * j] = 1.0 + 0.2 * std::cos(2.0 * std::numbers::pi * (i + j) / 32.0);
  return RoughnessProfile::sampled(std::move(g));
}

inline std::vector<CheckRow> critical() {
  std::vector<CheckRow> rows;
  const auto unit = make_params(1, 1, 1, 1, 0);
  for (auto [M, h] : {std::pair{1.0, 1.0}, std::pair{3.0, 0.8}}) {
    const auto params = make_params(1, 1.0 / (M * M), 1, 1, 0);
    const auto prof = RoughnessProfile::constant(h);
    const auto sol = solve_critical_cell(prof, params, critical_grid(prof, 32, 32, 64));
    const auto& g = sol.grid();
    double err = 0.0, umax = 0.0;
    for (int k = 0; k < g.n3(); ++k)
      for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) {
          const std::size_t id = sol.mask.idx(i, j, k);
          const double s = detail::shape_product_form(M, h, g.center3(k));
          err = std::max({err, std::abs(sol.corrector[0].w.u[id] - s), std::abs(sol.corrector[1].w.v[id] - s)});
          umax = std::max(umax, s);
        }
    const std::string tag = "_M" + detail::tag(M) + "_h" + detail::tag(h);
    rows.push_back(at_most("constant_h_velocity_rel_error" + tag, err / umax, 0.02));
    const auto t = assemble_tensor_critical(sol);
    const double phi = oracle::flow_factor_reference(M, h);
    const double dev = std::max({std::abs(t(0, 0) - phi), std::abs(t(1, 1) - phi), std::abs(t(0, 1))}) / phi;
    rows.push_back(at_most("constant_h_tensor_vs_phi_rel" + tag, dev, 0.03));
    for (int d = 0; d < 2; ++d)
      rows.push_back(at_most("constant_h_divergence_w" + std::to_string(d + 1) + tag, sol.corrector[d].divergence, 1e-7));
  }
  struct Case {
    std::string name;
    RoughnessProfile profile;
    int n1, n2, n3;
  };
  const std::vector<Case> rough{
      {"constant", RoughnessProfile::constant(0.9), 16, 16, 32},
      {"groove", RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.3}), 32, 32, 64},
      {"egg_crate", RoughnessProfile::sinusoidal({.mean = 1.0, .amp1 = 0.2, .amp2 = 0.15, .amp12 = 0.1}), 16, 16, 32},
      {"diagonal_groove", diagonal_groove(), 16, 16, 32}};
  for (const auto& c : rough) {
    const auto sol = solve_critical_cell(c.profile, unit, critical_grid(c.profile, c.n1, c.n2, c.n3));
    for (int d = 0; d < 2; ++d)
      rows.push_back(at_most(c.name + "_divergence_w" + std::to_string(d + 1), sol.corrector[d].divergence, 1e-7));
    // Each entry of the bilinear identity is measured against the Cauchy-Schwarz
    // scale sqrt(E_ii E_jj), which stays meaningful when an off-diagonal entry vanishes.
    const std::array<double, 2> diag{energy_identity(sol, 0, 0).lhs, energy_identity(sol, 1, 1).lhs};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const auto e = energy_identity(sol, i, j);
        const double scale = std::sqrt(diag[i] * diag[j]);
        rows.push_back(at_most(c.name + "_energy_identity_" + std::to_string(i + 1) + std::to_string(j + 1),
                               scale > 0 ? std::abs(e.lhs - e.rhs) / scale : 0.0, 1e-4));
      }
    if (c.profile.kind() == RoughnessProfile::Kind::constant) continue;
    const auto t = assemble_tensor_critical(sol);
    const auto ev = t.eigenvalues();
    const auto means = oracle::flow_factor_means(c.profile, unit.M(), 1024);
    // Relative distance outside [harmonic, arithmetic]; 0 inside.
    rows.push_back(at_most(c.name + "_min_eigenvalue_below_harmonic_mean",
                           std::max(0.0, (means.harmonic - ev[0]) / means.harmonic), 0.03));
    rows.push_back(at_most(c.name + "_max_eigenvalue_above_arithmetic_mean",
                           std::max(0.0, (ev[1] - means.arithmetic) / means.arithmetic), 0.03));
  }
  return rows;
}

inline std::vector<CheckRow> consistency() {
  std::vector<CheckRow> rows;
  RunConfig base;
  base.params = {1.0, 1.0, 1.0, 1.0, 0.5};
  base.profile.kind = RoughnessProfile::Kind::sinusoidal;
  base.profile.sinusoidal = {.mean = 1.0, .amp1 = 1e-3, .amp2 = 1e-3};
  base.macro_grid = {0.0, 1.0, 0.0, 1.0, 16, 16};
  base.forcing.kind = ForcingConfig::Kind::rotational;
  base.forcing.amplitude = 1.0;
  base.quad_n = 256;
  const std::array<Regime, 3> regimes{Regime::subcritical, Regime::critical, Regime::smooth};
  std::array<std::vector<Vec2>, 3> v;
  const auto scratch = std::filesystem::temp_directory_path() /
                       ("roughfilm_consistency_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  for (int r = 0; r < 3; ++r) {
    RunConfig c = base;
    c.regime = regimes[r];
    c.cell_grid = regimes[r] == Regime::critical ? CellGridConfig{16, 16, 64} : CellGridConfig{32, 32, 0};
    Pipeline p(c);
    const auto rep = p.run(Stage::macro, scratch / std::string(to_string(regimes[r])));
    if (rep.solver_failed) {
      std::filesystem::remove_all(scratch);
      rows.push_back({std::string(to_string(regimes[r])) + "_pipeline", 1.0, 0.0, 0.0, Verdict::fail});
      return rows;
    }
    const auto& av = *p.velocity();
    for (std::size_t id = 0; id < av.v1.size(); ++id) v[r].push_back({av.v1[id], av.v2[id]});
  }
  std::filesystem::remove_all(scratch);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      double diff = 0.0, scale = 0.0;
      for (std::size_t id = 0; id < v[a].size(); ++id)
        for (int d = 0; d < 2; ++d) {
          diff = std::max(diff, std::abs(v[a][id][d] - v[b][id][d]));
          scale = std::max({scale, std::abs(v[a][id][d]), std::abs(v[b][id][d])});
        }
      rows.push_back(at_most(std::string(to_string(regimes[a])) + "_vs_" + std::string(to_string(regimes[b])) +
                                 "_average_velocity_rel",
                             diff / scale, 0.03));
    }
  return rows;
}

inline std::vector<CheckRow> discrepancy() {
  std::vector<CheckRow> rows;
  double implemented = 0.0, minus2 = 0.0;
  for (double M : detail::log_grid(1e-2, 1e2, 7))
    for (double h : detail::log_grid(0.25, 4.0, 7)) {
      const double ref = detail::trapezoid_flow_factor(M, h);
      implemented = std::max(implemented, std::abs(flow_factor(M, h) - ref) / std::abs(ref));
      minus2 = std::max(minus2, std::abs(variants::flow_factor_minus2(M, h) - ref) / std::abs(ref));
    }
  rows.push_back(reported("flow_factor_implemented_max_rel_deviation", implemented, 0.0));
  rows.push_back(reported("flow_factor_minus2_numerator_max_rel_deviation", minus2, 0.0));

  const auto p = make_params(1, 1, 1, 1, 1);
  for (double h : {1.0, 0.8}) {
    const auto ref = detail::column_oracle(p, h, 8192);
    const auto col = temperature_column(p, h, 1.0, 1024);
    const auto c = profile_coeffs(p.M(), h);
    const double s = p.mobility_scale();
    auto u2 = [&](double z) { return z < h ? std::pow(s * profile_velocity(c, z), 2) : 0.0; };
    auto du2 = [&](double z) { return z < h ? std::pow(s * profile_dz3(c, z), 2) : 0.0; };
    double d_col = 0.0, d_unit = 0.0, d_v = 0.0, d_vc = 0.0;
    for (int m = 0; m <= 1024; m += 8) {
      const double z = h * m / 1024.0, t = ref.u[8 * m];
      d_col = std::max(d_col, std::abs(col.T[m] - t));
      d_unit = std::max(d_unit, std::abs(variants::temperature_unit_limit(p, u2, du2, z) - t));
      d_v = std::max(d_v, std::abs(variants::temperature_vstar(p, h, 1.0, z, false) - t));
      d_vc = std::max(d_vc, std::abs(variants::temperature_vstar(p, h, 1.0, z, true) - t));
    }
    const std::string tag = "_h" + detail::tag(h);
    rows.push_back(reported("temperature_implemented_max_abs_deviation" + tag, d_col, 0.0));
    rows.push_back(reported("temperature_unit_upper_limit_max_abs_deviation" + tag, d_unit, 0.0));
    rows.push_back(reported("temperature_v1v2_literal_max_abs_deviation" + tag, d_v, 0.0));
    rows.push_back(reported("temperature_v1v2_corrected_exponent_max_abs_deviation" + tag, d_vc, 0.0));
  }
  return rows;
}

// ---------------------------------------------------------------------------

struct Suite {
  std::string name;
  std::string description;
  std::function<std::vector<CheckRow>()> run;
};

inline const std::vector<Suite>& suites() {
  static const std::vector<Suite> all{
      {"flowfactor", "flow factor against trapezoid quadrature of the profile", flowfactor},
      {"limits", "Poiseuille and Darcy limits of the flow factor", limits},
      {"subcritical", "subcritical cell problem and laminate bounds", subcritical},
      {"macro", "Reynolds solver: manufactured solution, constant forcing, conservation", macro},
      {"temperature", "column temperature against the finite-difference oracle", temperature},
      {"critical", "3D critical cell problem", critical},
      {"consistency", "agreement of the three regimes for vanishing roughness", consistency},
      {"discrepancy", "alternative closed forms against the validated quantities", discrepancy}};
  return all;
}

inline std::string available_suites() {
  std::string s = "all";
  for (const auto& x : suites()) s += ", " + x.name;
  return s;
}

/// Rows of one suite or of every suite ("all" or empty). Throws
/// std::invalid_argument listing the available names for anything else.
inline std::vector<std::pair<std::string, CheckRow>> run_suite(const std::string& name) {
  std::vector<std::pair<std::string, CheckRow>> out;
  bool found = false;
  for (const auto& s : suites()) {
    if (!(name.empty() || name == "all" || name == s.name)) continue;
    found = true;
    for (auto& r : s.run()) out.emplace_back(s.name, std::move(r));
  }
  if (!found) throw std::invalid_argument("unknown suite '" + name + "'; available: " + available_suites());
  return out;
}

inline void write_table(std::ostream& os, const std::vector<std::pair<std::string, CheckRow>>& rows) {
  os << "suite,check,measured,target,tolerance,verdict\n";
  for (const auto& [suite, r] : rows)
    os << suite << ',' << r.check << ',' << fmt17(r.measured) << ',' << fmt17(r.target) << ','
       << (std::isnan(r.tolerance) ? std::string("none") : fmt17(r.tolerance)) << ',' << to_string(r.verdict) << '\n';
}

inline bool all_passed(const std::vector<std::pair<std::string, CheckRow>>& rows) {
  return std::none_of(rows.begin(), rows.end(), [](const auto& r) { return r.second.verdict == Verdict::fail; });
}

}  // namespace roughfilm::verify
