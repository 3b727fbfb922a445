#pragma once

// Periodic Reynolds-type cell problems on Z' for the regime where the roughness
// period is much larger than the film thickness:
//   -div( phi_M(h) (e_i + grad pi^i) ) = 0,  pi^i periodic with zero mean.
// Cell-centered finite volumes, harmonic face averages of phi.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "brinkman_profile.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "krylov.hpp"
#include "params.hpp"
#include "roughness.hpp"
#include "tensor.hpp"

namespace roughfilm {

/// Flow factor sampled at cell centers plus its harmonic face averages.
/// face1[i,j] sits on the face between cells (i-1,j) and (i,j); face2 likewise in z2.
struct CellCoefficients {
  CellGrid grid;
  Vec center;
  Vec face1;
  Vec face2;
};

inline CellCoefficients cell_coefficients(const RoughnessProfile& profile, const PhysicalParams& params,
                                          const CellGrid& grid) {
  const int n1 = grid.n1(), n2 = grid.n2();
  CellCoefficients c{grid, Vec(grid.planar_size()), Vec(grid.planar_size()), Vec(grid.planar_size())};
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const double phi = flow_factor(params.M(), profile.eval(grid.center(i, j)));
      if (!(phi > 0.0))
        throw std::invalid_argument("non-positive flow factor at cell (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
      c.center[grid.planar_index(i, j)] = phi;
    }
  auto harmonic = [](double a, double b) { return 2.0 * a * b / (a + b); };
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const double here = c.center[grid.planar_index(i, j)];
      c.face1[grid.planar_index(i, j)] = harmonic(c.center[grid.planar_index((i + n1 - 1) % n1, j)], here);
      c.face2[grid.planar_index(i, j)] = harmonic(c.center[grid.planar_index(i, (j + n2 - 1) % n2)], here);
    }
  return c;
}

namespace detail {

/// y = -div(phi grad x) on the periodic cell.
inline void apply_cell_operator(const CellCoefficients& c, std::span<const double> x, std::span<double> y) {
  const auto& g = c.grid;
  const int n1 = g.n1(), n2 = g.n2();
  const double i1 = 1.0 / (g.dz1() * g.dz1()), i2 = 1.0 / (g.dz2() * g.dz2());
  for (int j = 0; j < n2; ++j) {
    const int jm = (j + n2 - 1) % n2, jp = (j + 1) % n2;
    for (int i = 0; i < n1; ++i) {
      const int im = (i + n1 - 1) % n1, ip = (i + 1) % n1;
      const std::size_t id = g.planar_index(i, j);
      const double xc = x[id];
      const double west = c.face1[id] * (xc - x[g.planar_index(im, j)]);
      const double east = c.face1[g.planar_index(ip, j)] * (x[g.planar_index(ip, j)] - xc);
      const double south = c.face2[id] * (xc - x[g.planar_index(i, jm)]);
      const double north = c.face2[g.planar_index(i, jp)] * (x[g.planar_index(i, jp)] - xc);
      y[id] = -(east - west) * i1 - (north - south) * i2;
    }
  }
}

/// Divergence of the constant-direction flux phi e (the corrector right-hand side).
inline Vec cell_rhs(const CellCoefficients& c, const std::array<double, 2>& e) {
  const auto& g = c.grid;
  const int n1 = g.n1(), n2 = g.n2();
  Vec b(g.planar_size());
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const std::size_t id = g.planar_index(i, j);
      b[id] = e[0] * (c.face1[g.planar_index((i + 1) % n1, j)] - c.face1[id]) / g.dz1() +
              e[1] * (c.face2[g.planar_index(i, (j + 1) % n2)] - c.face2[id]) / g.dz2();
    }
  return b;
}

}  // namespace detail

struct CorrectorField {
  Vec values;  // zero-mean pi^i at cell centers
  SolveStats stats;
};

/// Solves the corrector for the unit direction e_i (direction 1 or 2).
/// `tol` bounds the max-norm of the discrete residual relative to that of the right-hand side.
inline CorrectorField solve_corrector(const CellCoefficients& coeffs, int direction, double tol = 1e-10,
                                      int max_iter = 200000) {
  if (direction != 1 && direction != 2) throw std::invalid_argument("corrector direction must be 1 or 2");
  if (!(tol > 0.0)) throw std::invalid_argument("corrector tolerance must be positive");
  const std::array<double, 2> e = direction == 1 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
  Vec b = detail::cell_rhs(coeffs, e);
  CorrectorField out{Vec(b.size(), 0.0), {}};
  const double scale = la::max_abs(b);
  if (scale == 0.0) {
    out.stats.converged = true;
    return out;
  }
  Vec inv_diag(b.size());
  {
    const auto& g = coeffs.grid;
    const double i1 = 1.0 / (g.dz1() * g.dz1()), i2 = 1.0 / (g.dz2() * g.dz2());
    for (int j = 0; j < g.n2(); ++j)
      for (int i = 0; i < g.n1(); ++i) {
        const std::size_t id = g.planar_index(i, j);
        inv_diag[id] = 1.0 / ((coeffs.face1[id] + coeffs.face1[g.planar_index((i + 1) % g.n1(), j)]) * i1 +
                              (coeffs.face2[id] + coeffs.face2[g.planar_index(i, (j + 1) % g.n2())]) * i2);
      }
  }
  auto op = [&](std::span<const double> x, std::span<double> y) { detail::apply_cell_operator(coeffs, x, y); };
  auto jacobi = [&](std::span<const double> r, std::span<double> z) {
    for (std::size_t k = 0; k < r.size(); ++k) z[k] = inv_diag[k] * r[k];
  };
  out.stats = conjugate_gradient(op, b, out.values, tol * scale, max_iter, true, jacobi);
  if (!out.stats.converged)
    throw ConvergenceError("corrector solve (direction " + std::to_string(direction) + ") did not converge",
                           out.stats.history);
  return out;
}

inline CorrectorField solve_corrector(const RoughnessProfile& profile, const PhysicalParams& params,
                                      const CellGrid& grid, int direction, double tol = 1e-10) {
  return solve_corrector(cell_coefficients(profile, params, grid), direction, tol);
}

struct SubcriticalCellSolution {
  CellCoefficients coeffs;
  std::array<CorrectorField, 2> pi;

  const CellGrid& grid() const { return coeffs.grid; }

  /// Max-norm of -div(phi (e_i + grad pi^i)), recomputed from the stored fields.
  double flux_divergence(int direction) const {
    const std::array<double, 2> e = direction == 1 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
    Vec b = detail::cell_rhs(coeffs, e);
    Vec lp(b.size());
    detail::apply_cell_operator(coeffs, pi[direction - 1].values, lp);
    double m = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) m = std::max(m, std::abs(lp[k] - b[k]));
    return m;
  }

  /// Cell-center gradient of pi^i (average of the two adjacent face differences).
  std::array<double, 2> corrector_gradient(int direction, int i, int j) const {
    const auto& g = grid();
    const int n1 = g.n1(), n2 = g.n2();
    const Vec& p = pi[direction - 1].values;
    return {(p[g.planar_index((i + 1) % n1, j)] - p[g.planar_index((i + n1 - 1) % n1, j)]) / (2 * g.dz1()),
            (p[g.planar_index(i, (j + 1) % n2)] - p[g.planar_index(i, (j + n2 - 1) % n2)]) / (2 * g.dz2())};
  }

  /// Bilinear interpolation of the cell-center corrector gradients to any z'.
  std::array<double, 2> corrector_gradient_at(int direction, const Point2& z) const {
    const auto& g = grid();
    const double s = (wrap_unit(z[0]) + 0.5) * g.n1() - 0.5;
    const double t = (wrap_unit(z[1]) + 0.5) * g.n2() - 0.5;
    const int i0 = static_cast<int>(std::floor(s)), j0 = static_cast<int>(std::floor(t));
    const double a = s - i0, c = t - j0;
    auto at = [&](int i, int j) {
      return corrector_gradient(direction, ((i % g.n1()) + g.n1()) % g.n1(), ((j % g.n2()) + g.n2()) % g.n2());
    };
    const auto g00 = at(i0, j0), g10 = at(i0 + 1, j0), g01 = at(i0, j0 + 1), g11 = at(i0 + 1, j0 + 1);
    std::array<double, 2> out{};
    for (int d = 0; d < 2; ++d)
      out[d] = (1 - a) * (1 - c) * g00[d] + a * (1 - c) * g10[d] + (1 - a) * c * g01[d] + a * c * g11[d];
    return out;
  }
};

inline SubcriticalCellSolution solve_subcritical_cell(const RoughnessProfile& profile, const PhysicalParams& params,
                                                      const CellGrid& grid, double tol = 1e-10) {
  SubcriticalCellSolution s{cell_coefficients(profile, params, grid), {}};
  s.pi[0] = solve_corrector(s.coeffs, 1, tol);
  s.pi[1] = solve_corrector(s.coeffs, 2, tol);
  return s;
}

/// (A_M)_ij = integral over Z' of phi (e_i + grad pi^i) . e_j, evaluated on the
/// faces normal to e_j so that it equals the discrete flux of corrector i.
inline EffectiveTensor assemble_tensor_subcritical(const RoughnessProfile& profile, const PhysicalParams& params,
                                                   const SubcriticalCellSolution& sol) {
  const auto& g = sol.grid();
  const auto& c = sol.coeffs;
  const int n1 = g.n1(), n2 = g.n2();
  EffectiveTensor t;
  t.regime = Regime::subcritical;
  t.M = params.M();
  t.profile = profile;
  for (int dir = 0; dir < 2; ++dir) {
    const Vec& p = sol.pi[dir].values;
    double f1 = 0.0, f2 = 0.0;
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i) {
        const std::size_t id = g.planar_index(i, j);
        f1 += c.face1[id] * ((dir == 0 ? 1.0 : 0.0) + (p[id] - p[g.planar_index((i + n1 - 1) % n1, j)]) / g.dz1());
        f2 += c.face2[id] * ((dir == 1 ? 1.0 : 0.0) + (p[id] - p[g.planar_index(i, (j + n2 - 1) % n2)]) / g.dz2());
      }
    const double cells = static_cast<double>(g.planar_size());
    t.a[dir][0] = f1 / cells;
    t.a[dir][1] = f2 / cells;
  }
  t.asymmetry = std::abs(t.a[0][1] - t.a[1][0]) / t.max_entry();
  if (!t.is_symmetric(1e-6))
    throw std::runtime_error("subcritical tensor asymmetry " + std::to_string(t.asymmetry) +
                             " indicates an under-resolved cell solve");
  t.a[0][1] = t.a[1][0] = 0.5 * (t.a[0][1] + t.a[1][0]);
  return t;
}

}  // namespace roughfilm
