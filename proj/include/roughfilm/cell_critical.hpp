#pragma once

// Three-dimensional Darcy-Brinkman cell problems for roughness period comparable
// to the film thickness:
//   -(2/M^2) div D(w) + grad pi + w = e   in the fluid part of Z' x (0, h_max),
//   div w = 0,   w = 0 at z3 = 0 and on the rough surface,   Z'-periodic.
// MAC staggering on a regular box grid. A cell is active when its center lies
// below the surface; velocity nodes between two active cells are fluid, every
// other node is a no-slip wall node held at zero. The rough surface is thus a
// staircase following the faces of the active cells. For divergence-free fields
// 2 div D(w) = Laplacian(w), so the velocity block splits into three scalar
// operators solved by Jacobi-PCG inside an Uzawa conjugate-gradient iteration
// on the pressure.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "krylov.hpp"
#include "params.hpp"
#include "roughness.hpp"
#include "tensor.hpp"

namespace roughfilm {

/// Staggered velocity: u on z1-faces, v on z2-faces (n1*n2*n3 each),
/// w on z3-faces (n1*n2*(n3+1), the bottom and top layers are walls).
struct VelocityField {
  Vec u, v, w;
};

/// Activity and fluid flags of the box grid for one roughness profile.
class CellMask {
public:
  CellMask(const RoughnessProfile& profile, const CellGrid& grid) : grid_(grid) {
    if (grid.n3() < 8 || grid.n1() < 8 || grid.n2() < 8)
      throw std::invalid_argument("critical cell grid: need at least 8 cells in each direction");
    if (grid.height() < profile.h_max() * (1.0 - 1e-12))
      throw std::invalid_argument("critical cell grid: box height " + std::to_string(grid.height()) +
                                  " is below h_max " + std::to_string(profile.h_max()));
    const int n1 = grid.n1(), n2 = grid.n2(), n3 = grid.n3();
    top_.assign(grid.planar_size(), 0);
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i) {
        const double h = profile.eval(grid.center(i, j));
        int t = 0;
        while (t < n3 && grid.center3(t) < h) ++t;
        top_[grid.planar_index(i, j)] = t;
      }
    active_.assign(cells(), 0);
    fu_.assign(cells(), 0);
    fv_.assign(cells(), 0);
    fw_.assign(w_size(), 0);
    for (int k = 0; k < n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          const std::size_t c = idx(i, j, k);
          active_[c] = is_active(i, j, k);
          fu_[c] = is_active(i, j, k) && is_active((i + n1 - 1) % n1, j, k);
          fv_[c] = is_active(i, j, k) && is_active(i, (j + n2 - 1) % n2, k);
        }
    for (int k = 1; k < n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) fw_[idx(i, j, k)] = is_active(i, j, k) && is_active(i, j, k - 1);
    n_active_ = static_cast<std::size_t>(std::count(active_.begin(), active_.end(), 1));
    if (n_active_ == 0) throw std::invalid_argument("critical cell grid: no fluid cells");
  }

  const CellGrid& grid() const noexcept { return grid_; }
  std::size_t cells() const noexcept { return grid_.planar_size() * grid_.n3(); }
  std::size_t w_size() const noexcept { return grid_.planar_size() * (grid_.n3() + 1); }
  std::size_t idx(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(grid_.n1()) * (j + static_cast<std::size_t>(grid_.n2()) * k);
  }
  /// Number of active cells in column (i,j); they are the layers 0..top-1.
  int top(int i, int j) const noexcept { return top_[grid_.planar_index(i, j)]; }
  bool is_active(int i, int j, int k) const noexcept { return k < top(i, j); }
  bool active(std::size_t c) const noexcept { return active_[c] != 0; }
  bool fluid_u(std::size_t c) const noexcept { return fu_[c] != 0; }
  bool fluid_v(std::size_t c) const noexcept { return fv_[c] != 0; }
  bool fluid_w(std::size_t c) const noexcept { return fw_[c] != 0; }
  std::size_t active_count() const noexcept { return n_active_; }
  double cell_volume() const noexcept { return grid_.dz1() * grid_.dz2() * grid_.dz3(); }

private:
  CellGrid grid_;
  std::vector<int> top_;
  std::vector<char> active_, fu_, fv_, fw_;
  std::size_t n_active_ = 0;
};

struct CriticalSolverOptions {
  double tol = 1e-8;             // max-norm of the discrete divergence on active cells
  double inner_rel_tol = 1e-12;  // velocity solves, relative max-norm residual
  int max_outer = 2000;
  int max_inner = 20000;
};

/// One corrector w^i, pi^i and its diagnostics.
struct CriticalCorrector {
  std::array<double, 2> direction{};
  VelocityField w;
  Vec pressure;                    // cell centered, zero mean over active cells, 0 elsewhere
  double divergence = 0.0;         // max |div w| over active cells
  double momentum_residual = 0.0;  // max-norm of the momentum equation residual
  double leakage = 0.0;            // max |w| on non-fluid nodes
  double max_velocity = 0.0;
  int outer_iterations = 0;
  std::vector<double> history;
};

namespace detail {

/// Scalar velocity operator nu*(-Laplacian) + 1 on the fluid nodes of one
/// staggered component (kind 0/1/2 = u/v/w), identity on the other nodes.
/// A non-fluid neighbour along the component's own direction is a wall node
/// (value 0); across any other direction the wall sits half way and is
/// imposed by a reflected ghost. The box bottom and top behave the same way.
struct ComponentOperator {
  const CellMask& m;
  int kind;
  double nu;
  Vec diag;

  ComponentOperator(const CellMask& mask, int k, double nu_) : m(mask), kind(k), nu(nu_) {
    const auto& g = m.grid();
    const double a[3] = {nu / (g.dz1() * g.dz1()), nu / (g.dz2() * g.dz2()), nu / (g.dz3() * g.dz3())};
    diag.assign(size(), 1.0);
    for (int k3 = 0; k3 < layers(); ++k3)
      for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) {
          const std::size_t id = m.idx(i, j, k3);
          if (!fluid(id)) continue;
          double d = 1.0;
          for (int dir = 0; dir < 3; ++dir)
            for (int s = -1; s <= 1; s += 2) {
              const auto nb = neighbour(i, j, k3, dir, s);
              d += (nb.fluid || dir == kind) ? a[dir] : 2.0 * a[dir];
            }
          diag[id] = d;
        }
  }

  struct Neighbour {
    std::size_t id;
    bool fluid;
  };

  Neighbour neighbour(int i, int j, int k3, int dir, int s) const {
    const auto& g = m.grid();
    if (dir == 0) {
      const int ii = (i + s + g.n1()) % g.n1();
      const std::size_t id = m.idx(ii, j, k3);
      return {id, fluid(id)};
    }
    if (dir == 1) {
      const int jj = (j + s + g.n2()) % g.n2();
      const std::size_t id = m.idx(i, jj, k3);
      return {id, fluid(id)};
    }
    const int kk = k3 + s;
    if (kk < 0 || kk >= layers()) return {0, false};
    const std::size_t id = m.idx(i, j, kk);
    return {id, fluid(id)};
  }

  int layers() const { return kind == 2 ? m.grid().n3() + 1 : m.grid().n3(); }
  std::size_t size() const { return m.grid().planar_size() * layers(); }
  bool fluid(std::size_t id) const {
    return kind == 0 ? m.fluid_u(id) : kind == 1 ? m.fluid_v(id) : m.fluid_w(id);
  }

  void operator()(std::span<const double> x, std::span<double> y) const {
    const auto& g = m.grid();
    const int n1 = g.n1(), n2 = g.n2(), nz = layers();
    const double a1 = nu / (g.dz1() * g.dz1()), a2 = nu / (g.dz2() * g.dz2()), a3 = nu / (g.dz3() * g.dz3());
    const std::size_t plane = g.planar_size();
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < n2; ++j) {
        const int jm = (j + n2 - 1) % n2, jp = (j + 1) % n2;
        for (int i = 0; i < n1; ++i) {
          const std::size_t id = m.idx(i, j, k);
          if (!fluid(id)) {
            y[id] = x[id];
            continue;
          }
          const int im = (i + n1 - 1) % n1, ip = (i + 1) % n1;
          auto val = [&](std::size_t n) { return fluid(n) ? x[n] : 0.0; };
          double off = a1 * (val(m.idx(im, j, k)) + val(m.idx(ip, j, k))) +
                       a2 * (val(m.idx(i, jm, k)) + val(m.idx(i, jp, k)));
          if (k > 0) off += a3 * val(id - plane);
          if (k + 1 < nz) off += a3 * val(id + plane);
          y[id] = diag[id] * x[id] - off;
        }
      }
  }

  Vec solve(std::span<const double> rhs, double rel_tol, int max_iter) const {
    Vec x(size(), 0.0);
    const double scale = la::max_abs(rhs);
    if (scale == 0.0) return x;
    auto jacobi = [this](std::span<const double> r, std::span<double> z) {
      for (std::size_t k = 0; k < r.size(); ++k) z[k] = r[k] / diag[k];
    };
    const SolveStats st = conjugate_gradient(*this, rhs, x, rel_tol * scale, max_iter, false, jacobi);
    if (!st.converged) throw ConvergenceError("critical cell: velocity solve did not converge", st.history);
    return x;
  }
};

struct StokesBlocks {
  const CellMask& m;

  /// div of the fluid-face velocities on active cells.
  Vec divergence(const VelocityField& f) const {
    const auto& g = m.grid();
    const int n1 = g.n1(), n2 = g.n2(), n3 = g.n3();
    const std::size_t plane = g.planar_size();
    Vec d(m.cells(), 0.0);
    auto fu = [&](std::size_t id) { return m.fluid_u(id) ? f.u[id] : 0.0; };
    auto fv = [&](std::size_t id) { return m.fluid_v(id) ? f.v[id] : 0.0; };
    auto fw = [&](std::size_t id) { return m.fluid_w(id) ? f.w[id] : 0.0; };
    for (int k = 0; k < n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          const std::size_t c = m.idx(i, j, k);
          if (!m.active(c)) continue;
          d[c] = (fu(m.idx((i + 1) % n1, j, k)) - fu(c)) / g.dz1() + (fv(m.idx(i, (j + 1) % n2, k)) - fv(c)) / g.dz2() +
                 (fw(c + plane) - fw(c)) / g.dz3();
        }
    return d;
  }

  /// Pressure gradient on the fluid faces (minus the adjoint of `divergence`).
  VelocityField gradient(std::span<const double> p) const {
    const auto& g = m.grid();
    const int n1 = g.n1(), n2 = g.n2(), n3 = g.n3();
    const std::size_t plane = g.planar_size();
    VelocityField out{Vec(m.cells(), 0.0), Vec(m.cells(), 0.0), Vec(m.w_size(), 0.0)};
    for (int k = 0; k < n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          const std::size_t c = m.idx(i, j, k);
          if (m.fluid_u(c)) out.u[c] = (p[c] - p[m.idx((i + n1 - 1) % n1, j, k)]) / g.dz1();
          if (m.fluid_v(c)) out.v[c] = (p[c] - p[m.idx(i, (j + n2 - 1) % n2, k)]) / g.dz2();
          if (k > 0 && m.fluid_w(c)) out.w[c] = (p[c] - p[c - plane]) / g.dz3();
        }
    return out;
  }

  double active_mean(std::span<const double> p) const {
    double s = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c)
      if (m.active(c)) s += p[c];
    return s / static_cast<double>(m.active_count());
  }
  void remove_active_mean(std::span<double> p) const {
    const double mu = active_mean(p);
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = m.active(c) ? p[c] - mu : 0.0;
  }
};

}  // namespace detail

/// Solve the cell problem for forcing e on the fluid nodes (e = e_1 or e_2 for the correctors).
inline CriticalCorrector solve_cell_brinkman(const RoughnessProfile& profile, const PhysicalParams& params,
                                             const CellGrid& grid, const std::array<double, 2>& e,
                                             const CriticalSolverOptions& opt = {}) {
  if (!(opt.tol > 0.0) || !(opt.inner_rel_tol > 0.0))
    throw std::invalid_argument("critical cell: tolerances must be positive");
  const CellMask mask(profile, grid);
  const double nu = 1.0 / (params.M() * params.M());
  const detail::ComponentOperator Au(mask, 0, nu), Av(mask, 1, nu), Aw(mask, 2, nu);
  const detail::StokesBlocks blocks{mask};

  VelocityField force{Vec(mask.cells(), 0.0), Vec(mask.cells(), 0.0), Vec(mask.w_size(), 0.0)};
  for (std::size_t c = 0; c < mask.cells(); ++c) {
    if (mask.fluid_u(c)) force.u[c] = e[0];
    if (mask.fluid_v(c)) force.v[c] = e[1];
  }
  auto solve_velocity = [&](const VelocityField& rhs) {
    return VelocityField{Au.solve(rhs.u, opt.inner_rel_tol, opt.max_inner),
                         Av.solve(rhs.v, opt.inner_rel_tol, opt.max_inner),
                         Aw.solve(rhs.w, opt.inner_rel_tol, opt.max_inner)};
  };
  auto residual_of = [&](const VelocityField& w) {
    Vec r = blocks.divergence(w);
    for (double& x : r) x = -x;
    return r;
  };

  CriticalCorrector out;
  out.direction = e;
  out.pressure.assign(mask.cells(), 0.0);
  Vec& p = out.pressure;
  int iterations = 0;
  bool converged = false;
  // Restarted cycles: each begins from a freshly solved velocity so that the
  // reported divergence is that of the returned field.
  for (int cycle = 0; cycle < 6 && !converged && iterations < opt.max_outer; ++cycle) {
    VelocityField rhs = force;
    const VelocityField gp = blocks.gradient(p);
    for (std::size_t c = 0; c < rhs.u.size(); ++c) {
      rhs.u[c] -= gp.u[c];
      rhs.v[c] -= gp.v[c];
    }
    for (std::size_t c = 0; c < rhs.w.size(); ++c) rhs.w[c] -= gp.w[c];
    out.w = solve_velocity(rhs);
    Vec r = residual_of(out.w);
    double rmax = la::max_abs(r);
    out.history.push_back(rmax);
    if (rmax <= opt.tol) {
      converged = true;
      break;
    }
    blocks.remove_active_mean(r);
    Vec d = r;
    double rr = la::dot(r, r);
    while (iterations < opt.max_outer) {
      ++iterations;
      const VelocityField z = solve_velocity(blocks.gradient(d));
      Vec q = blocks.divergence(z);  // S d = -div A^{-1} grad d ... with the sign folded below
      for (double& x : q) x = -x;
      const double dq = la::dot(d, q);
      if (!(dq > 0.0)) break;
      const double alpha = rr / dq;
      la::axpy(alpha, d, p);
      la::axpy(-alpha, z.u, out.w.u);
      la::axpy(-alpha, z.v, out.w.v);
      la::axpy(-alpha, z.w, out.w.w);
      r = residual_of(out.w);
      blocks.remove_active_mean(r);
      rmax = la::max_abs(r);
      out.history.push_back(rmax);
      if (rmax <= 0.25 * opt.tol) break;
      const double rr_new = la::dot(r, r);
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t c = 0; c < d.size(); ++c) d[c] = r[c] + beta * d[c];
    }
    blocks.remove_active_mean(p);
  }
  out.outer_iterations = iterations;
  if (!converged) {
    const double last = out.history.empty() ? 0.0 : out.history.back();
    if (!(last <= opt.tol)) throw ConvergenceError("critical cell: pressure iteration did not converge", out.history);
  }
  out.divergence = la::max_abs(blocks.divergence(out.w));

  // Momentum residual A w + grad p - f.
  {
    const VelocityField gp = blocks.gradient(p);
    Vec y;
    double res = 0.0;
    y.assign(out.w.u.size(), 0.0);
    Au(out.w.u, y);
    for (std::size_t c = 0; c < y.size(); ++c) res = std::max(res, std::abs(y[c] + gp.u[c] - force.u[c]));
    Av(out.w.v, y);
    for (std::size_t c = 0; c < y.size(); ++c) res = std::max(res, std::abs(y[c] + gp.v[c] - force.v[c]));
    y.assign(out.w.w.size(), 0.0);
    Aw(out.w.w, y);
    for (std::size_t c = 0; c < y.size(); ++c) res = std::max(res, std::abs(y[c] + gp.w[c] - force.w[c]));
    out.momentum_residual = res;
  }
  for (std::size_t c = 0; c < mask.cells(); ++c) {
    out.max_velocity = std::max({out.max_velocity, std::abs(out.w.u[c]), std::abs(out.w.v[c])});
    if (!mask.fluid_u(c)) out.leakage = std::max(out.leakage, std::abs(out.w.u[c]));
    if (!mask.fluid_v(c)) out.leakage = std::max(out.leakage, std::abs(out.w.v[c]));
  }
  for (std::size_t c = 0; c < mask.w_size(); ++c) {
    out.max_velocity = std::max(out.max_velocity, std::abs(out.w.w[c]));
    if (!mask.fluid_w(c)) out.leakage = std::max(out.leakage, std::abs(out.w.w[c]));
  }
  return out;
}

inline CriticalCorrector solve_cell_brinkman(const RoughnessProfile& profile, const PhysicalParams& params,
                                             const CellGrid& grid, int direction,
                                             const CriticalSolverOptions& opt = {}) {
  if (direction != 1 && direction != 2) throw std::invalid_argument("direction must be 1 or 2");
  return solve_cell_brinkman(profile, params, grid, direction == 1 ? std::array<double, 2>{1, 0}
                                                                   : std::array<double, 2>{0, 1},
                             opt);
}

/// Both correctors on one grid.
struct CriticalCellSolution {
  CellMask mask;
  double M;
  std::array<CriticalCorrector, 2> corrector;

  const CellGrid& grid() const noexcept { return mask.grid(); }
};

inline CriticalCellSolution solve_critical_cell(const RoughnessProfile& profile, const PhysicalParams& params,
                                                const CellGrid& grid, const CriticalSolverOptions& opt = {}) {
  return {CellMask(profile, grid), params.M(),
          {solve_cell_brinkman(profile, params, grid, 1, opt), solve_cell_brinkman(profile, params, grid, 2, opt)}};
}

/// Box grid with the default geometry: height h_max, n3 layers.
inline CellGrid critical_grid(const RoughnessProfile& profile, int n1, int n2, int n3) {
  return CellGrid(n1, n2, n3, profile.h_max());
}

/// Integral over the fluid nodes of component j (0-based) of a velocity field.
inline double fluid_integral(const CellMask& m, const VelocityField& f, int j) {
  double s = 0.0;
  if (j == 0) {
    for (std::size_t c = 0; c < m.cells(); ++c)
      if (m.fluid_u(c)) s += f.u[c];
  } else if (j == 1) {
    for (std::size_t c = 0; c < m.cells(); ++c)
      if (m.fluid_v(c)) s += f.v[c];
  } else {
    for (std::size_t c = 0; c < m.w_size(); ++c)
      if (m.fluid_w(c)) s += f.w[c];
  }
  return s * m.cell_volume();
}

/// (A_M)_ij = integral of w^i_j over the fluid, symmetrized. `asymmetry` holds
/// |a12 - a21| / max|a| before symmetrization.
inline EffectiveTensor assemble_tensor_critical(const CriticalCellSolution& sol) {
  EffectiveTensor t;
  t.regime = Regime::critical;
  t.M = sol.M;
  Mat2 raw{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) raw[i][j] = fluid_integral(sol.mask, sol.corrector[i].w, j);
  const double scale = std::max({std::abs(raw[0][0]), std::abs(raw[1][1]), std::abs(raw[0][1]), std::abs(raw[1][0])});
  t.asymmetry = scale > 0.0 ? std::abs(raw[0][1] - raw[1][0]) / scale : 0.0;
  const double off = 0.5 * (raw[0][1] + raw[1][0]);
  t.a = {{{raw[0][0], off}, {off, raw[1][1]}}};
  if (!t.is_spd()) throw std::runtime_error("critical cell: assembled tensor is not positive definite");
  return t;
}

namespace detail {

/// Difference quotient between two staggered nodes with the wall rules of
/// ComponentOperator for transverse directions: a reflected ghost when only
/// one node is fluid (derivative at the wall, weight 1/2 in the quadrature).
struct EdgeDerivative {
  double value = 0.0;
  double weight = 0.0;
};

inline EdgeDerivative edge_derivative(double xa, bool fa, double xb, bool fb, double dz) {
  if (fa && fb) return {(xb - xa) / dz, 1.0};
  if (fb) return {2.0 * xb / dz, 0.5};
  if (fa) return {-2.0 * xa / dz, 0.5};
  return {};
}

/// Staggered velocity gradient. Diagonal terms live at cell centers; the
/// transverse derivatives on edges: du2, dv1 on z3-parallel edges
/// (face1 i, face2 j, center k); du3, dw1 on (face1 i, center j, face3 k);
/// dv3, dw2 on (center i, face2 j, face3 k), k = 0..n3.
struct Strain {
  Vec d11, d22, d33;
  std::vector<EdgeDerivative> du2, dv1, du3, dw1, dv3, dw2;

  Strain(const CellMask& m, const VelocityField& f) {
    const auto& g = m.grid();
    const int n1 = g.n1(), n2 = g.n2(), n3 = g.n3();
    const std::size_t plane = g.planar_size();
    d11.assign(m.cells(), 0.0);
    d22.assign(m.cells(), 0.0);
    d33.assign(m.cells(), 0.0);
    du2.assign(m.cells(), {});
    dv1.assign(m.cells(), {});
    du3.assign(m.w_size(), {});
    dw1.assign(m.w_size(), {});
    dv3.assign(m.w_size(), {});
    dw2.assign(m.w_size(), {});
    for (int k = 0; k < n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          const std::size_t c = m.idx(i, j, k);
          const int ip = (i + 1) % n1, jp = (j + 1) % n2, im = (i + n1 - 1) % n1, jm = (j + n2 - 1) % n2;
          d11[c] = (f.u[m.idx(ip, j, k)] - f.u[c]) / g.dz1();
          d22[c] = (f.v[m.idx(i, jp, k)] - f.v[c]) / g.dz2();
          d33[c] = (f.w[c + plane] - f.w[c]) / g.dz3();
          const std::size_t cy = m.idx(i, jm, k), cx = m.idx(im, j, k);
          du2[c] = edge_derivative(f.u[cy], m.fluid_u(cy), f.u[c], m.fluid_u(c), g.dz2());
          dv1[c] = edge_derivative(f.v[cx], m.fluid_v(cx), f.v[c], m.fluid_v(c), g.dz1());
        }
    for (int k = 0; k <= n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          const std::size_t e = m.idx(i, j, k);
          const std::size_t ex = m.idx((i + n1 - 1) % n1, j, k), ey = m.idx(i, (j + n2 - 1) % n2, k);
          dw1[e] = edge_derivative(f.w[ex], m.fluid_w(ex), f.w[e], m.fluid_w(e), g.dz1());
          dw2[e] = edge_derivative(f.w[ey], m.fluid_w(ey), f.w[e], m.fluid_w(e), g.dz2());
          const bool below = k > 0, above = k < n3;
          const double ub = below ? f.u[e - plane] : 0.0, ua = above ? f.u[e] : 0.0;
          const double vb = below ? f.v[e - plane] : 0.0, va = above ? f.v[e] : 0.0;
          du3[e] = edge_derivative(ub, below && m.fluid_u(e - plane), ua, above && m.fluid_u(e), g.dz3());
          dv3[e] = edge_derivative(vb, below && m.fluid_v(e - plane), va, above && m.fluid_v(e), g.dz3());
        }
  }
};

inline double edge_product(const std::vector<EdgeDerivative>& a, const std::vector<EdgeDerivative>& b) {
  double s = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) s += a[e].weight * a[e].value * b[e].value;
  return s;
}

}  // namespace detail

/// Integral of grad(a):grad(b) with the quadrature implied by the velocity operator.
inline double gradient_product(const CellMask& m, const VelocityField& a, const VelocityField& b) {
  const detail::Strain sa(m, a), sb(m, b);
  double s = 0.0;
  for (std::size_t c = 0; c < m.cells(); ++c)
    s += sa.d11[c] * sb.d11[c] + sa.d22[c] * sb.d22[c] + sa.d33[c] * sb.d33[c];
  s += detail::edge_product(sa.du2, sb.du2) + detail::edge_product(sa.dv1, sb.dv1) +
       detail::edge_product(sa.du3, sb.du3) + detail::edge_product(sa.dw1, sb.dw1) +
       detail::edge_product(sa.dv3, sb.dv3) + detail::edge_product(sa.dw2, sb.dw2);
  return s * m.cell_volume();
}

/// Integral of D(a):D(b). Uses 2 D(a):D(b) = grad a : grad b + grad a : (grad b)^T
/// and, on the periodic staggered grid with zero wall nodes, summation by parts
/// turns the transposed term into the product of the cell divergences.
inline double strain_product(const CellMask& m, const VelocityField& a, const VelocityField& b) {
  const detail::StokesBlocks blocks{m};
  const double transposed = la::dot(blocks.divergence(a), blocks.divergence(b)) * m.cell_volume();
  return 0.5 * (gradient_product(m, a, b) + transposed);
}

inline double velocity_product(const CellMask& m, const VelocityField& a, const VelocityField& b) {
  return (la::dot(a.u, b.u) + la::dot(a.v, b.v) + la::dot(a.w, b.w)) * m.cell_volume();
}

/// Weak-form identity  int w^j_i = (2/M^2) int D(w^i):D(w^j) + int w^i . w^j.
struct EnergyIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
};

inline EnergyIdentity energy_identity(const CriticalCellSolution& sol, int i, int j) {
  const auto& wi = sol.corrector[i].w;
  const auto& wj = sol.corrector[j].w;
  EnergyIdentity out;
  out.lhs = fluid_integral(sol.mask, wj, i);
  out.rhs = 2.0 / (sol.M * sol.M) * strain_product(sol.mask, wi, wj) + velocity_product(sol.mask, wi, wj);
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.relative_error = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  return out;
}

/// Velocity interpolated to the cell centers, cells ordered (i fastest, then j, then k).
inline std::array<Vec, 3> cell_center_velocity(const CellMask& m, const VelocityField& f) {
  const auto& g = m.grid();
  const int n1 = g.n1(), n2 = g.n2(), n3 = g.n3();
  const std::size_t plane = g.planar_size();
  std::array<Vec, 3> out{Vec(m.cells()), Vec(m.cells()), Vec(m.cells())};
  for (int k = 0; k < n3; ++k)
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i) {
        const std::size_t c = m.idx(i, j, k);
        out[0][c] = 0.5 * (f.u[c] + f.u[m.idx((i + 1) % n1, j, k)]);
        out[1][c] = 0.5 * (f.v[c] + f.v[m.idx(i, (j + 1) % n2, k)]);
        out[2][c] = 0.5 * (f.w[c] + f.w[c + plane]);
      }
  return out;
}

// ---------------------------------------------------------------------------
// Cell temperature
//   -k Laplacian T = (mu/K)|u|^2 + 2 mu_eff |D(u)|^2  on active cells,
//   T = 0 on faces shared with inactive cells and at the box top,
//   -k dT/dz3 = b at z3 = 0, Z'-periodic,
// with u = (K/mu)(F_1 w^1 + F_2 w^2).

struct CellTemperature {
  Vec T;  // cell centered, 0 on inactive cells
  double average = 0.0;     // integral over the cell
  SolveStats stats;
};

namespace detail {

inline VelocityField combine(const CriticalCellSolution& sol, const std::array<double, 2>& coef) {
  VelocityField out = sol.corrector[0].w;
  const auto& w2 = sol.corrector[1].w;
  for (std::size_t c = 0; c < out.u.size(); ++c) {
    out.u[c] = coef[0] * out.u[c] + coef[1] * w2.u[c];
    out.v[c] = coef[0] * out.v[c] + coef[1] * w2.v[c];
  }
  for (std::size_t c = 0; c < out.w.size(); ++c) out.w[c] = coef[0] * out.w[c] + coef[1] * w2.w[c];
  return out;
}

/// |u|^2 and |D(u)|^2 at the cell centers, from face and edge values.
inline std::array<Vec, 2> center_energy_densities(const CellMask& m, const VelocityField& a, const VelocityField& b) {
  const auto& g = m.grid();
  const int n1 = g.n1(), n2 = g.n2(), n3 = g.n3();
  const std::size_t plane = g.planar_size();
  const Strain sa(m, a), sb(m, b);
  std::array<Vec, 2> out{Vec(m.cells(), 0.0), Vec(m.cells(), 0.0)};
  for (int k = 0; k < n3; ++k)
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i) {
        const std::size_t c = m.idx(i, j, k);
        const std::size_t cx = m.idx((i + 1) % n1, j, k), cy = m.idx(i, (j + 1) % n2, k);
        const std::size_t cxy = m.idx((i + 1) % n1, (j + 1) % n2, k);
        out[0][c] = 0.5 * (a.u[c] * b.u[c] + a.u[cx] * b.u[cx]) + 0.5 * (a.v[c] * b.v[c] + a.v[cy] * b.v[cy]) +
                    0.5 * (a.w[c] * b.w[c] + a.w[c + plane] * b.w[c + plane]);
        auto sym = [](const std::vector<detail::EdgeDerivative>& p, const std::vector<detail::EdgeDerivative>& q,
                      std::size_t e) { return 0.5 * (p[e].value + q[e].value); };
        auto pr = [&](const Strain& x, const Strain& y, int which, std::size_t e) {
          if (which == 0) return sym(x.du2, x.dv1, e) * sym(y.du2, y.dv1, e);
          if (which == 1) return sym(x.du3, x.dw1, e) * sym(y.du3, y.dw1, e);
          return sym(x.dv3, x.dw2, e) * sym(y.dv3, y.dw2, e);
        };
        const double e12 = 0.25 * (pr(sa, sb, 0, c) + pr(sa, sb, 0, cx) + pr(sa, sb, 0, cy) + pr(sa, sb, 0, cxy));
        const double e13 =
            0.25 * (pr(sa, sb, 1, c) + pr(sa, sb, 1, cx) + pr(sa, sb, 1, c + plane) + pr(sa, sb, 1, cx + plane));
        const double e23 =
            0.25 * (pr(sa, sb, 2, c) + pr(sa, sb, 2, cy) + pr(sa, sb, 2, c + plane) + pr(sa, sb, 2, cy + plane));
        out[1][c] = sa.d11[c] * sb.d11[c] + sa.d22[c] * sb.d22[c] + sa.d33[c] * sb.d33[c] + 2.0 * (e12 + e13 + e23);
      }
  return out;
}

/// -k Laplacian with the temperature boundary conditions, identity on inactive cells.
struct HeatOperator {
  const CellMask& m;
  double k;
  Vec diag;

  HeatOperator(const CellMask& mask, double conductivity) : m(mask), k(conductivity) {
    const auto& g = m.grid();
    const int n1 = g.n1(), n2 = g.n2(), n3 = g.n3();
    const double a1 = k / (g.dz1() * g.dz1()), a2 = k / (g.dz2() * g.dz2()), a3 = k / (g.dz3() * g.dz3());
    diag.assign(m.cells(), 1.0);
    for (int kk = 0; kk < n3; ++kk)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          const std::size_t c = m.idx(i, j, kk);
          if (!m.active(c)) continue;
          // Inactive lateral neighbours impose T = 0 on the shared face: ghost -T.
          auto lateral = [&](int ii, int jj, double a) { return m.is_active(ii, jj, kk) ? a : 2.0 * a; };
          double d = lateral((i + n1 - 1) % n1, j, a1) + lateral((i + 1) % n1, j, a1) +
                     lateral(i, (j + n2 - 1) % n2, a2) + lateral(i, (j + 1) % n2, a2);
          if (kk > 0) d += a3;  // bottom: flux condition, no diagonal contribution
          d += (kk + 1 < n3 && m.is_active(i, j, kk + 1)) ? a3 : 2.0 * a3;
          diag[c] = d;
        }
  }

  void operator()(std::span<const double> x, std::span<double> y) const {
    const auto& g = m.grid();
    const int n1 = g.n1(), n2 = g.n2(), n3 = g.n3();
    const double a1 = k / (g.dz1() * g.dz1()), a2 = k / (g.dz2() * g.dz2()), a3 = k / (g.dz3() * g.dz3());
    const std::size_t plane = g.planar_size();
    for (int kk = 0; kk < n3; ++kk)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          const std::size_t c = m.idx(i, j, kk);
          if (!m.active(c)) {
            y[c] = x[c];
            continue;
          }
          auto nb = [&](int ii, int jj, int k3, double a) {
            return (k3 >= 0 && k3 < n3 && m.is_active(ii, jj, k3)) ? a * x[m.idx(ii, jj, k3)] : 0.0;
          };
          double off = nb((i + n1 - 1) % n1, j, kk, a1) + nb((i + 1) % n1, j, kk, a1) +
                       nb(i, (j + n2 - 1) % n2, kk, a2) + nb(i, (j + 1) % n2, kk, a2) + nb(i, j, kk + 1, a3);
          if (kk > 0) off += a3 * x[c - plane];
          y[c] = diag[c] * x[c] - off;
        }
  }
};

}  // namespace detail

/// Temperature for a given source density (cell centered) and bottom flux b.
inline CellTemperature solve_heat_with_source(const CellMask& m, double conductivity, double b,
                                              std::span<const double> source, double tol = 1e-12) {
  const auto& g = m.grid();
  Vec rhs(m.cells(), 0.0);
  for (std::size_t c = 0; c < m.cells(); ++c)
    if (m.active(c)) rhs[c] = source[c];
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i)
      if (m.top(i, j) > 0) rhs[m.idx(i, j, 0)] += b / g.dz3();
  const detail::HeatOperator op(m, conductivity);
  CellTemperature out;
  out.T.assign(m.cells(), 0.0);
  const double scale = la::max_abs(rhs);
  if (scale > 0.0) {
    auto jacobi = [&](std::span<const double> r, std::span<double> z) {
      for (std::size_t c = 0; c < r.size(); ++c) z[c] = r[c] / op.diag[c];
    };
    out.stats = conjugate_gradient(op, rhs, out.T, tol * scale, 100000, false, jacobi);
    if (!out.stats.converged) throw ConvergenceError("cell temperature solve did not converge", out.stats.history);
  } else {
    out.stats.converged = true;
  }
  double s = 0.0;
  for (double t : out.T) s += t;
  out.average = s * m.cell_volume();
  return out;
}

/// Dissipation density at the cell centers for macroscopic drive F = f' - grad p.
inline Vec dissipation_source(const CriticalCellSolution& sol, const PhysicalParams& params,
                              const std::array<double, 2>& drive) {
  const double s = params.mobility_scale();
  const VelocityField u = detail::combine(sol, {s * drive[0], s * drive[1]});
  const auto dens = detail::center_energy_densities(sol.mask, u, u);
  Vec out(sol.mask.cells());
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = (params.mu() / params.K()) * dens[0][c] + 2.0 * params.mu_eff() * dens[1][c];
  return out;
}

inline CellTemperature solve_cell_temperature(const CriticalCellSolution& sol, const PhysicalParams& params,
                                              const std::array<double, 2>& drive, double tol = 1e-12) {
  return solve_heat_with_source(sol.mask, params.k(), params.b(), dissipation_source(sol, params, drive), tol);
}

/// Temperature as a quadratic form in the drive: T = T_b + sum F_i F_j T_ij.
/// Averages of the four independent fields let the pipeline evaluate T_av at
/// every macro node without further cell solves.
struct CellTemperatureBasis {
  double b_average = 0.0;
  Mat2 quadratic_average{};

  double average(const std::array<double, 2>& F) const {
    return b_average + F[0] * F[0] * quadratic_average[0][0] + 2.0 * F[0] * F[1] * quadratic_average[0][1] +
           F[1] * F[1] * quadratic_average[1][1];
  }
};

inline CellTemperatureBasis cell_temperature_basis(const CriticalCellSolution& sol, const PhysicalParams& params,
                                                   double tol = 1e-12) {
  CellTemperatureBasis basis;
  const Vec zero(sol.mask.cells(), 0.0);
  basis.b_average = solve_heat_with_source(sol.mask, params.k(), params.b(), zero, tol).average;
  const double s = params.mobility_scale();
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j) {
      const auto dens = detail::center_energy_densities(sol.mask, sol.corrector[i].w, sol.corrector[j].w);
      Vec src(sol.mask.cells());
      for (std::size_t c = 0; c < src.size(); ++c)
        src[c] = s * s * ((params.mu() / params.K()) * dens[0][c] + 2.0 * params.mu_eff() * dens[1][c]);
      const double avg = solve_heat_with_source(sol.mask, params.k(), 0.0, src, tol).average;
      basis.quadratic_average[i][j] = basis.quadratic_average[j][i] = avg;
    }
  return basis;
}

}  // namespace roughfilm
