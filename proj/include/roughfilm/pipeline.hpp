#pragma once

// Batch pipeline: cell problem -> effective tensor -> macroscopic pressure ->
// averaged velocity and temperature (and optional column slices).
//
// Stages are cumulative: `cell` writes tensor.json; `macro` adds pressure.csv
// and velocity_avg.csv; `reconstruct` and `run` add temperature_avg.csv and
// slice_<k>.csv. report.json is written by every stage.
//
// CSV layouts (macro fields in row-major order, x1 fastest):
//   pressure.csv         x1,x2,p
//   velocity_avg.csv     x1,x2,v1,v2
//   temperature_avg.csv  x1,x2,T
//   slice_<k>.csv        z1,z2,z3,u1,u2,u3,T

#include <algorithm>
#include <array>
#include <filesystem>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "brinkman_profile.hpp"
#include "cell_critical.hpp"
#include "cell_subcritical.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "macro_reynolds.hpp"
#include "reconstruct.hpp"
#include "tensor.hpp"

namespace roughfilm {

enum class Stage { cell, macro, reconstruct, run };

inline std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "cell") return Stage::cell;
  if (s == "macro") return Stage::macro;
  if (s == "reconstruct") return Stage::reconstruct;
  if (s == "run") return Stage::run;
  return std::nullopt;
}

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::cell: return "cell";
    case Stage::macro: return "macro";
    case Stage::reconstruct: return "reconstruct";
    case Stage::run: return "run";
  }
  return "run";
}

struct RunReport {
  json report;
  bool solver_failed = false;
  std::string message;
  std::vector<std::filesystem::path> files;

  int exit_code() const { return solver_failed ? 2 : 0; }
};

/// Runs body(k) for k in [0, n) on up to `threads` workers. Each k writes only
/// its own outputs, so results do not depend on the thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w; k < n; k += workers) body(k);
    }));
  for (auto& j : jobs) j.get();
}

/// Harmonic and arithmetic means of phi_M(h) over the cell-grid centers.
inline std::array<double, 2> flow_factor_bounds(const RoughnessProfile& profile, double M, const CellGrid& g) {
  double inv = 0.0, sum = 0.0;
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) {
      const double phi = flow_factor(M, profile.eval(g.center(i, j)));
      inv += 1.0 / phi;
      sum += phi;
    }
  const double n = static_cast<double>(g.planar_size());
  return {n / inv, sum / n};
}

namespace detail {

inline json mat_json(const Mat2& a) { return json::array({json::array({a[0][0], a[0][1]}), json::array({a[1][0], a[1][1]})}); }

inline json check(const std::string& name, double value, double limit, bool pass) {
  return {{"name", name}, {"value", value}, {"limit", limit}, {"pass", pass}};
}

inline json stats_json(const SolveStats& s) {
  return {{"iterations", s.iterations}, {"residual", s.residual}, {"converged", s.converged}};
}

}  // namespace detail

class Pipeline {
public:
  Pipeline(RunConfig config, int threads = 1)
      : c_(std::move(config)), threads_(std::max(threads, 1)), params_(c_.params.build()),
        profile_(c_.profile.build()) {}

  RunReport run(Stage stage, const std::filesystem::path& out_dir) {
    RunReport rep;
    rep.report["regime"] = std::string(to_string(c_.regime));
    rep.report["stage"] = std::string(to_string(stage));
    rep.report["M"] = params_.M();
    checks_ = json::array();
    std::filesystem::create_directories(out_dir);
    out_ = out_dir;
    files_.clear();
    try {
      cell_stage(rep.report);
      if (stage != Stage::cell) macro_stage(rep.report);
      if (stage == Stage::reconstruct || stage == Stage::run) reconstruct_stage(rep.report);
      rep.report["status"] = "ok";
    } catch (const ConvergenceError& e) {
      fail(rep, e.what(), e.final_residual(), e.residual_history().size());
    } catch (const std::runtime_error& e) {
      fail(rep, e.what(), 0.0, 0);
    }
    rep.report["checks"] = checks_;
    write_text(out_ / "report.json", dump_json(rep.report));
    files_.push_back(out_ / "report.json");
    rep.files = files_;
    return rep;
  }

  const std::optional<EffectiveTensor>& tensor() const noexcept { return tensor_; }
  const std::optional<MacroPressure>& pressure() const noexcept { return pressure_; }
  const std::optional<AverageVelocity>& velocity() const noexcept { return velocity_; }
  const std::vector<double>& temperature() const noexcept { return temperature_; }
  const std::vector<Vec2>& reconstructed_velocity() const noexcept { return recon_velocity_; }

private:
  static void fail(RunReport& rep, const std::string& what, double residual, std::size_t iterations) {
    rep.solver_failed = true;
    rep.message = what;
    rep.report["status"] = "failed";
    rep.report["error"] = {{"message", what}, {"final_residual", residual}, {"iterations", iterations}};
  }

  void add_check(const std::string& name, double value, double limit, bool pass) {
    checks_.push_back(detail::check(name, value, limit, pass));
  }

  void cell_stage(json& report) {
    json t;
    t["regime"] = std::string(to_string(c_.regime));
    t["M"] = params_.M();
    const auto& cg = c_.cell_grid;
    if (c_.regime == Regime::subcritical) {
      const CellGrid g(cg.n1, cg.n2);
      CellCoefficients coeffs = cell_coefficients(profile_, params_, g);
      std::array<CorrectorField, 2> pi;
      parallel_for(2, threads_, [&](std::size_t d) {
        pi[d] = solve_corrector(coeffs, static_cast<int>(d) + 1, c_.solver.cell_tol, c_.solver.max_iter);
      });
      sub_.emplace(SubcriticalCellSolution{std::move(coeffs), std::move(pi)});
      tensor_ = assemble_tensor_subcritical(profile_, params_, *sub_);
      json res = json::array();
      for (int d = 1; d <= 2; ++d) {
        json r = detail::stats_json(sub_->pi[d - 1].stats);
        r["flux_divergence"] = sub_->flux_divergence(d);
        res.push_back(r);
      }
      t["grid"] = {{"n1", cg.n1}, {"n2", cg.n2}};
      t["correctors"] = res;
      bounds_ = flow_factor_bounds(profile_, params_.M(), g);
    } else if (c_.regime == Regime::critical) {
      const CellGrid g = critical_grid(profile_, cg.n1, cg.n2, cg.n3);
      const CriticalSolverOptions opt{c_.solver.critical_tol, c_.solver.inner_tol, 2000, c_.solver.max_iter};
      std::array<CriticalCorrector, 2> w;
      parallel_for(2, threads_, [&](std::size_t d) {
        w[d] = solve_cell_brinkman(profile_, params_, g, static_cast<int>(d) + 1, opt);
      });
      crit_.emplace(CriticalCellSolution{CellMask(profile_, g), params_.M(), std::move(w)});
      tensor_ = assemble_tensor_critical(*crit_);
      json res = json::array();
      for (const auto& cr : crit_->corrector)
        res.push_back({{"outer_iterations", cr.outer_iterations},
                       {"divergence", cr.divergence},
                       {"momentum_residual", cr.momentum_residual},
                       {"leakage", cr.leakage}});
      t["grid"] = {{"n1", cg.n1}, {"n2", cg.n2}, {"n3", cg.n3}, {"height", g.height()}};
      t["correctors"] = res;
      bounds_ = flow_factor_bounds(profile_, params_.M(), g);
    }
    if (tensor_) {
      const auto ev = tensor_->eigenvalues();
      t["A"] = detail::mat_json(tensor_->a);
      t["eigenvalues"] = {ev[0], ev[1]};
      t["asymmetry"] = tensor_->asymmetry;
      t["bounds"] = {{"harmonic", bounds_[0]}, {"arithmetic", bounds_[1]}};
      add_check("tensor_spd", ev[0], 0.0, tensor_->is_spd());
      const double sym_tol = c_.regime == Regime::subcritical ? 1e-8 : 1e-6;
      add_check("tensor_symmetry", tensor_->asymmetry, sym_tol, tensor_->asymmetry <= sym_tol);
      add_check("eigenvalues_above_harmonic_mean", ev[0] / bounds_[0] - 1.0, 0.0, ev[0] >= bounds_[0] * (1 - 1e-12));
      add_check("eigenvalues_below_arithmetic_mean", ev[1] / bounds_[1] - 1.0, 0.0, ev[1] <= bounds_[1] * (1 + 1e-12));
    } else {
      // Smooth wall: no cell problem, the local mobility is phi_M(h(x')) I.
      const double top = c_.use_h_min ? profile_.h_min() : profile_.h_max();
      t["flow_factor_range"] = {flow_factor(params_.M(), profile_.h_min()), flow_factor(params_.M(), top)};
    }
    write_text(out_ / "tensor.json", dump_json(t));
    files_.push_back(out_ / "tensor.json");
    report["tensor"] = t;
  }

  void macro_stage(json& report) {
    grid_.emplace(c_.macro_grid.build());
    const MacroGrid& g = *grid_;
    forcing_ = c_.forcing.build(g);
    B_ = mobility_field(c_.regime, tensor_ ? &*tensor_ : nullptr, profile_, params_, g, c_.use_h_min);
    pressure_ = solve_pressure(g, B_, forcing_, c_.solver.macro_tol, c_.solver.max_iter);
    velocity_ = average_velocity(g, *pressure_, B_, forcing_);
    {
      CsvWriter w(out_ / "pressure.csv", {"x1", "x2", "p"});
      for (int j = 0; j < g.m2(); ++j)
        for (int i = 0; i < g.m1(); ++i) w.row({g.xc(i), g.yc(j), pressure_->p[g.index(i, j)]});
    }
    {
      CsvWriter w(out_ / "velocity_avg.csv", {"x1", "x2", "v1", "v2"});
      for (int j = 0; j < g.m2(); ++j)
        for (int i = 0; i < g.m1(); ++i) {
          const auto id = g.index(i, j);
          w.row({g.xc(i), g.yc(j), velocity_->v1[id], velocity_->v2[id]});
        }
    }
    files_.push_back(out_ / "pressure.csv");
    files_.push_back(out_ / "velocity_avg.csv");
    json m = detail::stats_json(pressure_->stats);
    m["solver"] = B_.diagonal ? "cg" : "bicgstab";
    m["divergence_residual"] = pressure_->residual;
    m["pressure_mean"] = pressure_->mean;
    m["flux_divergence"] = velocity_->max_divergence;
    m["boundary_flux"] = velocity_->boundary_flux;
    report["macro"] = m;
    add_check("macro_conservation", velocity_->max_divergence, 1e-8, velocity_->max_divergence <= 1e-8);
  }

  void reconstruct_stage(json& report) {
    const MacroGrid& g = *grid_;
    const std::size_t n = g.size();
    temperature_.assign(n, 0.0);
    recon_velocity_.assign(n, Vec2{});
    std::function<Averages(const Vec2&, const Point2&)> at;
    std::optional<SmoothReconstruction> smooth;
    std::optional<SubcriticalReconstruction> sub;
    std::optional<CriticalReconstruction> crit;
    switch (c_.regime) {
      case Regime::smooth:
        smooth.emplace(profile_, params_, c_.use_h_min, c_.quad_n);
        at = [&](const Vec2& F, const Point2& x) { return smooth->averages(F, x); };
        break;
      case Regime::subcritical:
        sub.emplace(*sub_, profile_, params_, c_.quad_n);
        at = [&](const Vec2& F, const Point2&) { return sub->averages(F); };
        break;
      case Regime::critical:
        crit.emplace(*crit_, params_, c_.solver.heat_tol);
        at = [&](const Vec2& F, const Point2&) { return crit->averages(F); };
        break;
    }
    parallel_for(n, threads_, [&](std::size_t id) {
      const int i = static_cast<int>(id % g.m1()), j = static_cast<int>(id / g.m1());
      const Averages a = at({velocity_->drive1[id], velocity_->drive2[id]}, g.node(i, j));
      temperature_[id] = a.temperature;
      recon_velocity_[id] = a.velocity;
    });
    double consistency = 0.0, vmax = 0.0;
    for (std::size_t id = 0; id < n; ++id) {
      consistency = std::max({consistency, std::abs(recon_velocity_[id][0] - velocity_->v1[id]),
                              std::abs(recon_velocity_[id][1] - velocity_->v2[id])});
      vmax = std::max({vmax, std::abs(velocity_->v1[id]), std::abs(velocity_->v2[id])});
    }
    {
      CsvWriter w(out_ / "temperature_avg.csv", {"x1", "x2", "T"});
      for (int j = 0; j < g.m2(); ++j)
        for (int i = 0; i < g.m1(); ++i) w.row({g.xc(i), g.yc(j), temperature_[g.index(i, j)]});
    }
    files_.push_back(out_ / "temperature_avg.csv");
    const double rel = vmax > 0.0 ? consistency / vmax : consistency;
    report["reconstruct"] = {{"quad_n", c_.quad_n}, {"velocity_consistency", consistency},
                             {"velocity_consistency_relative", rel}};
    add_check("reconstructed_average_velocity", rel, 1e-6, rel <= 1e-6);

    for (std::size_t k = 0; k < c_.slices.size(); ++k) write_slice(k, smooth, sub, crit);
  }

  std::size_t macro_cell_of(const Point2& x) const {
    const MacroGrid& g = *grid_;
    const int i = std::clamp(static_cast<int>((x[0] - g.x0()) / g.dx()), 0, g.m1() - 1);
    const int j = std::clamp(static_cast<int>((x[1] - g.y0()) / g.dy()), 0, g.m2() - 1);
    return g.index(i, j);
  }

  void write_slice(std::size_t k, const std::optional<SmoothReconstruction>& smooth,
                   const std::optional<SubcriticalReconstruction>& sub,
                   const std::optional<CriticalReconstruction>& crit) {
    const SliceConfig& s = c_.slices[k];
    const std::size_t id = macro_cell_of(s.x);
    const Vec2 F{velocity_->drive1[id], velocity_->drive2[id]};
    const auto file = out_ / ("slice_" + std::to_string(k) + ".csv");
    CsvWriter w(file, {"z1", "z2", "z3", "u1", "u2", "u3", "T"});
    if (crit) {
      const auto& m = crit_->mask;
      const auto& g = m.grid();
      const int i = std::clamp(static_cast<int>((wrap_unit(s.z[0]) + 0.5) * g.n1()), 0, g.n1() - 1);
      const int j = std::clamp(static_cast<int>((wrap_unit(s.z[1]) + 0.5) * g.n2()), 0, g.n2() - 1);
      const auto u = cell_center_velocity(m, crit->velocity(F));
      const auto T = crit->temperature(F, c_.solver.heat_tol);
      for (int l = 0; l < g.n3(); ++l) {
        const std::size_t c = m.idx(i, j, l);
        if (!m.active(c)) break;
        w.row({g.center1(i), g.center2(j), g.center3(l), u[0][c], u[1][c], u[2][c], T.T[c]});
      }
    } else {
      const Point2 z = c_.regime == Regime::smooth ? s.x : s.z;
      const double h = smooth ? smooth->height(s.x) : profile_.eval(s.z);
      const TemperatureProfile col = smooth ? smooth->temperature(F, s.x) : sub->temperature(F, s.z);
      const int qn = static_cast<int>(col.z.size()) - 1;
      for (int p = 0; p < s.points; ++p) {
        const double z3 = h * p / (s.points - 1);
        const Vec2 u = smooth ? smooth->velocity(F, s.x, z3) : sub->velocity(F, s.z, z3);
        const double pos = z3 / h * qn;
        const int m = std::min(static_cast<int>(pos), qn - 1);
        const double t = pos - m;
        w.row({z[0], z[1], z3, u[0], u[1], 0.0, (1 - t) * col.T[m] + t * col.T[m + 1]});
      }
    }
    files_.push_back(file);
  }

  RunConfig c_;
  int threads_;
  PhysicalParams params_;
  RoughnessProfile profile_;
  std::filesystem::path out_;
  std::vector<std::filesystem::path> files_;
  json checks_;

  std::optional<SubcriticalCellSolution> sub_;
  std::optional<CriticalCellSolution> crit_;
  std::optional<EffectiveTensor> tensor_;
  std::array<double, 2> bounds_{};
  std::optional<MacroGrid> grid_;
  MacroForcing forcing_;
  MobilityField B_;
  std::optional<MacroPressure> pressure_;
  std::optional<AverageVelocity> velocity_;
  std::vector<double> temperature_;
  std::vector<Vec2> recon_velocity_;
};

/// Runs the pipeline up to `stage`, writing into `out_dir` (the config's
/// output_dir when empty).
inline RunReport run_pipeline(const RunConfig& config, Stage stage = Stage::run,
                              const std::filesystem::path& out_dir = {}, int threads = 1) {
  Pipeline p(config, threads);
  return p.run(stage, out_dir.empty() ? std::filesystem::path(config.output_dir) : out_dir);
}

}  // namespace roughfilm
