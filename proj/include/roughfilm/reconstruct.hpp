#pragma once

// Reconstruction of the limit velocity and temperature from the macroscopic
// drive F = f' - grad p at a point x' of omega and the cell solution.
//
// Subcritical and smooth regimes: in every column of height h the velocity is
//   u'(z3) = (K/mu) s(z3; h) G,   G = sum_i F_i (e_i + grad pi^i)   (grad pi = 0 when smooth),
// and the temperature solves the two-point problem
//   -k T'' = S = (mu/K)|u'|^2 + mu_eff |du'/dz3|^2,   T(h) = 0,   -k T'(0) = b,
// whose solution is T(z3) = (b/k)(h - z3) + (1/k)[(h - z3) C(z3) + D(z3)] with
// C(z) = int_0^z S and D(z) = int_z^h S(t)(h - t) dt, evaluated by cumulative
// Simpson quadrature on quad_n intervals.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "brinkman_profile.hpp"
#include "cell_critical.hpp"
#include "cell_subcritical.hpp"
#include "params.hpp"
#include "roughness.hpp"
#include "tensor.hpp"

namespace roughfilm {

using Vec2 = std::array<double, 2>;

inline void require_quad_n(int quad_n) {
  if (quad_n < 64) throw std::invalid_argument("quad_n must be >= 64, got " + std::to_string(quad_n));
}

/// Normalized dissipation of the profile shape: s^2 + (s')^2 / M^2.
/// The source is S = (K/mu) |G|^2 sigma(z3).
inline double dissipation_shape(const ProfileCoefficients& c, double z3) {
  const double s = profile_velocity(c, z3), ds = profile_dz3(c, z3);
  return s * s + ds * ds / (c.M * c.M);
}

struct TemperatureProfile {
  std::vector<double> z;  // quad_n + 1 nodes on [0, h]
  std::vector<double> T;
  double average = 0.0;            // int_0^h T dz3
  double bottom_flux_error = 0.0;  // | -k T'(0) - b | with a second-order one-sided difference
};

/// Column temperature for |G|^2 = g2 at height h.
inline TemperatureProfile temperature_column(const PhysicalParams& params, double h, double g2, int quad_n) {
  require_quad_n(quad_n);
  const auto c = profile_coeffs(params.M(), h);
  const double amp = params.mobility_scale() * g2;
  const double dz = h / quad_n;
  std::vector<double> S(2 * quad_n + 1);  // nodes and midpoints
  for (int m = 0; m <= 2 * quad_n; ++m) S[m] = amp * dissipation_shape(c, 0.5 * m * dz);
  std::vector<double> C(quad_n + 1, 0.0), D(quad_n + 1, 0.0);
  for (int m = 0; m < quad_n; ++m)
    C[m + 1] = C[m] + dz / 6.0 * (S[2 * m] + 4.0 * S[2 * m + 1] + S[2 * m + 2]);
  auto weighted = [&](int half) { return S[half] * (h - 0.5 * half * dz); };
  for (int m = quad_n - 1; m >= 0; --m)
    D[m] = D[m + 1] + dz / 6.0 * (weighted(2 * m) + 4.0 * weighted(2 * m + 1) + weighted(2 * m + 2));
  TemperatureProfile out;
  out.z.resize(quad_n + 1);
  out.T.resize(quad_n + 1);
  const double b = params.b(), k = params.k();
  for (int m = 0; m <= quad_n; ++m) {
    const double z = m == quad_n ? h : m * dz;
    out.z[m] = z;
    out.T[m] = m == quad_n ? 0.0 : (b / k) * (h - z) + ((h - z) * C[m] + D[m]) / k;
  }
  // int_0^h T = (b/k) h^2/2 + (1/k) int_0^h S(t) (h^2 - t^2)/2 dt
  double q = 0.0;
  for (int m = 0; m < quad_n; ++m) {
    auto f = [&](int half) {
      const double t = 0.5 * half * dz;
      return S[half] * 0.5 * (h * h - t * t);
    };
    q += dz / 6.0 * (f(2 * m) + 4.0 * f(2 * m + 1) + f(2 * m + 2));
  }
  out.average = (b / k) * h * h / 2.0 + q / k;
  const double slope = (-3.0 * out.T[0] + 4.0 * out.T[1] - out.T[2]) / (2.0 * dz);
  out.bottom_flux_error = std::abs(-k * slope - b);
  return out;
}

/// Simpson quadrature of the profile shape over the column, i.e. the flow factor.
inline double column_flux(double M, double h, int quad_n) {
  require_quad_n(quad_n);
  const auto c = profile_coeffs(M, h);
  const double dz = h / quad_n;
  double s = 0.0;
  for (int m = 0; m < quad_n; ++m)
    s += dz / 6.0 *
         (profile_velocity(c, m * dz) + 4.0 * profile_velocity(c, (m + 0.5) * dz) +
          profile_velocity(c, std::min(h, (m + 1) * dz)));
  return s;
}

/// V_av and T_av at one macroscopic point.
struct Averages {
  Vec2 velocity{};
  double temperature = 0.0;
};

namespace detail {

inline void require_height(double z3, double h) {
  if (!(z3 >= 0.0) || z3 > h * (1.0 + 1e-12))
    throw std::out_of_range("z3 = " + std::to_string(z3) + " outside [0, " + std::to_string(h) + "]");
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Smooth-wall closed forms (gradient of the corrector zero), with h = h(x')
/// or h_min throughout when `use_h_min` is set.
class SmoothReconstruction {
public:
  SmoothReconstruction(RoughnessProfile profile, const PhysicalParams& params, bool use_h_min, int quad_n)
      : profile_(std::move(profile)), params_(params), use_h_min_(use_h_min), quad_n_(quad_n) {
    require_quad_n(quad_n);
  }

  double height(const Point2& x) const { return use_h_min_ ? profile_.h_min() : profile_.eval(x); }

  Vec2 velocity(const Vec2& F, const Point2& x, double z3) const {
    const double h = height(x);
    detail::require_height(z3, h);
    const double s = params_.mobility_scale() * profile_velocity(params_.M(), h, z3);
    return {s * F[0], s * F[1]};
  }

  TemperatureProfile temperature(const Vec2& F, const Point2& x) const {
    return temperature_column(params_, height(x), F[0] * F[0] + F[1] * F[1], quad_n_);
  }

  double temperature_at(const Vec2& F, const Point2& x, double z3) const {
    const double h = height(x);
    detail::require_height(z3, h);
    const auto col = temperature(F, x);
    const double pos = z3 / h * quad_n_;
    const int m = std::min(static_cast<int>(pos), quad_n_ - 1);
    const double t = pos - m;
    return (1 - t) * col.T[m] + t * col.T[m + 1];
  }

  Averages averages(const Vec2& F, const Point2& x) const {
    const double h = height(x);
    const double q = params_.mobility_scale() * column_flux(params_.M(), h, quad_n_);
    return {{q * F[0], q * F[1]}, temperature(F, x).average};
  }

private:
  RoughnessProfile profile_;
  PhysicalParams params_;
  bool use_h_min_;
  int quad_n_;
};

// ---------------------------------------------------------------------------

/// Subcritical reconstruction on top of the periodic corrector solution.
/// Corrector gradients at the cell centers are recovered from the face fluxes:
/// phi_c (e_i + grad pi^i)_j is the mean of phi (e_i + grad pi^i)_j over the two
/// j-faces of the cell, so that the cell average of phi (e_i + grad pi^i)
/// reproduces the assembled tensor exactly.
class SubcriticalReconstruction {
public:
  SubcriticalReconstruction(const SubcriticalCellSolution& sol, RoughnessProfile profile,
                            const PhysicalParams& params, int quad_n)
      : grid_(sol.grid()), profile_(std::move(profile)), params_(params), quad_n_(quad_n) {
    require_quad_n(quad_n);
    const auto& g = grid_;
    const auto& c = sol.coeffs;
    const int n1 = g.n1(), n2 = g.n2();
    const std::size_t n = g.planar_size();
    h_.resize(n);
    basis_.resize(n);
    flux_.resize(n);
    heat_.resize(n);
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i) {
        const std::size_t id = g.planar_index(i, j);
        const std::size_t e = g.planar_index((i + 1) % n1, j), nn = g.planar_index(i, (j + 1) % n2);
        const std::size_t w = g.planar_index((i + n1 - 1) % n1, j), s = g.planar_index(i, (j + n2 - 1) % n2);
        for (int d = 0; d < 2; ++d) {
          const Vec& p = sol.pi[d].values;
          const double west = c.face1[id] * ((d == 0) + (p[id] - p[w]) / g.dz1());
          const double east = c.face1[e] * ((d == 0) + (p[e] - p[id]) / g.dz1());
          const double south = c.face2[id] * ((d == 1) + (p[id] - p[s]) / g.dz2());
          const double north = c.face2[nn] * ((d == 1) + (p[nn] - p[id]) / g.dz2());
          basis_[id][d] = {0.5 * (west + east) / c.center[id], 0.5 * (south + north) / c.center[id]};
        }
        h_[id] = profile_.eval(g.center(i, j));
        flux_[id] = column_flux(params_.M(), h_[id], quad_n_);
        heat_[id] = temperature_column(params_without_b(), h_[id], 1.0, quad_n_).average;
      }
  }

  const CellGrid& grid() const noexcept { return grid_; }

  /// e_i + grad pi^i at any z', bilinear between cell centers.
  std::array<Vec2, 2> basis_at(const Point2& z) const {
    const auto& g = grid_;
    const double s = (wrap_unit(z[0]) + 0.5) * g.n1() - 0.5;
    const double t = (wrap_unit(z[1]) + 0.5) * g.n2() - 0.5;
    const int i0 = static_cast<int>(std::floor(s)), j0 = static_cast<int>(std::floor(t));
    const double a = s - i0, c = t - j0;
    auto at = [&](int i, int j) -> const std::array<Vec2, 2>& {
      return basis_[g.planar_index(((i % g.n1()) + g.n1()) % g.n1(), ((j % g.n2()) + g.n2()) % g.n2())];
    };
    const auto &b00 = at(i0, j0), &b10 = at(i0 + 1, j0), &b01 = at(i0, j0 + 1), &b11 = at(i0 + 1, j0 + 1);
    std::array<Vec2, 2> out{};
    for (int d = 0; d < 2; ++d)
      for (int q = 0; q < 2; ++q)
        out[d][q] = (1 - a) * (1 - c) * b00[d][q] + a * (1 - c) * b10[d][q] + (1 - a) * c * b01[d][q] + a * c * b11[d][q];
    return out;
  }

  Vec2 direction(const Vec2& F, const Point2& z) const {
    const auto b = basis_at(z);
    return {F[0] * b[0][0] + F[1] * b[1][0], F[0] * b[0][1] + F[1] * b[1][1]};
  }

  /// u'(x', z', z3); zero above the rough surface.
  Vec2 velocity(const Vec2& F, const Point2& z, double z3) const {
    if (z3 < 0.0) throw std::out_of_range("z3 must be non-negative");
    const double h = profile_.eval(z);
    if (z3 >= h) return {0.0, 0.0};
    const double s = params_.mobility_scale() * profile_velocity(params_.M(), h, z3);
    const Vec2 G = direction(F, z);
    return {s * G[0], s * G[1]};
  }

  TemperatureProfile temperature(const Vec2& F, const Point2& z) const {
    const Vec2 G = direction(F, z);
    return temperature_column(params_, profile_.eval(z), G[0] * G[0] + G[1] * G[1], quad_n_);
  }

  /// Cell averages by the midpoint rule over the corrector grid and Simpson in z3.
  Averages averages(const Vec2& F) const {
    const auto& g = grid_;
    const double dA = g.dz1() * g.dz2();
    const double scale = params_.mobility_scale();
    Averages out;
    for (std::size_t id = 0; id < g.planar_size(); ++id) {
      const auto& b = basis_[id];
      const Vec2 G{F[0] * b[0][0] + F[1] * b[1][0], F[0] * b[0][1] + F[1] * b[1][1]};
      out.velocity[0] += dA * scale * flux_[id] * G[0];
      out.velocity[1] += dA * scale * flux_[id] * G[1];
      const double h = h_[id];
      out.temperature += dA * ((params_.b() / params_.k()) * h * h / 2.0 + (G[0] * G[0] + G[1] * G[1]) * heat_[id]);
    }
    return out;
  }

private:
  PhysicalParams params_without_b() const {
    return make_params(params_.mu(), params_.mu_eff(), params_.K(), params_.k(), 0.0);
  }

  CellGrid grid_;
  RoughnessProfile profile_;
  PhysicalParams params_;
  int quad_n_;
  std::vector<double> h_, flux_, heat_;
  std::vector<std::array<Vec2, 2>> basis_;
};

// ---------------------------------------------------------------------------

/// Critical regime: velocity (K/mu) sum F_i w^i on the cell, averages from the
/// corrector integrals and the temperature basis.
class CriticalReconstruction {
public:
  CriticalReconstruction(const CriticalCellSolution& sol, const PhysicalParams& params, double tol = 1e-12)
      : sol_(&sol), params_(params), basis_(cell_temperature_basis(sol, params, tol)) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) raw_[i][j] = fluid_integral(sol.mask, sol.corrector[i].w, j);
  }

  VelocityField velocity(const Vec2& F) const {
    const double s = params_.mobility_scale();
    return detail::combine(*sol_, {s * F[0], s * F[1]});
  }

  CellTemperature temperature(const Vec2& F, double tol = 1e-12) const {
    return solve_cell_temperature(*sol_, params_, F, tol);
  }

  Averages averages(const Vec2& F) const {
    const double s = params_.mobility_scale();
    return {{s * (F[0] * raw_[0][0] + F[1] * raw_[1][0]), s * (F[0] * raw_[0][1] + F[1] * raw_[1][1])},
            basis_.average(F)};
  }

  /// Net vertical flux of the reconstructed velocity over the cell.
  double vertical_flux(const Vec2& F) const { return fluid_integral(sol_->mask, velocity(F), 2); }

private:
  const CriticalCellSolution* sol_;
  PhysicalParams params_;
  CellTemperatureBasis basis_;
  Mat2 raw_{};
};

}  // namespace roughfilm
