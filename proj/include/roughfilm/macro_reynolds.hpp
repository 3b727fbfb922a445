#pragma once

// Macroscopic Reynolds problem on the rectangle omega:
//   -div( B(x') (grad p - f') ) = 0,   B (grad p - f') . n = 0 on the boundary,
// with p normalized to zero mean. Cell-centered finite volumes; the normal
// flux through a face uses the two-point pressure difference plus, for a full
// tensor, the tangential gradient averaged from the neighbouring cells.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
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

using Vec2 = std::array<double, 2>;

/// Body force f' at the macro cell centers.
struct MacroForcing {
  Vec f1;
  Vec f2;

  static MacroForcing from_function(const MacroGrid& g, const std::function<Vec2(const Point2&)>& f) {
    MacroForcing out{Vec(g.size()), Vec(g.size())};
    for (int j = 0; j < g.m2(); ++j)
      for (int i = 0; i < g.m1(); ++i) {
        const Vec2 v = f(g.node(i, j));
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
          throw std::invalid_argument("forcing is not finite at node (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
        out.f1[g.index(i, j)] = v[0];
        out.f2[g.index(i, j)] = v[1];
      }
    return out;
  }

  static MacroForcing constant(const MacroGrid& g, const Vec2& f) {
    return from_function(g, [f](const Point2&) { return f; });
  }

  /// f' = grad of amplitude * cos(pi xi1) cos(pi xi2), xi the unit-square coordinates of omega.
  /// Its potential has zero normal derivative on the boundary.
  static MacroForcing gradient_cosine(const MacroGrid& g, double amplitude) {
    return from_function(g, [&](const Point2& x) { return gradient_cosine_value(g, amplitude, x); });
  }

  static Vec2 gradient_cosine_value(const MacroGrid& g, double amplitude, const Point2& x) {
    constexpr double pi = std::numbers::pi;
    const double L1 = g.x1() - g.x0(), L2 = g.y1() - g.y0();
    const double a = pi * (x[0] - g.x0()) / L1, b = pi * (x[1] - g.y0()) / L2;
    return {-amplitude * pi / L1 * std::sin(a) * std::cos(b), -amplitude * pi / L2 * std::cos(a) * std::sin(b)};
  }

  static double cosine_potential(const MacroGrid& g, double amplitude, const Point2& x) {
    constexpr double pi = std::numbers::pi;
    return amplitude * std::cos(pi * (x[0] - g.x0()) / (g.x1() - g.x0())) *
           std::cos(pi * (x[1] - g.y0()) / (g.y1() - g.y0()));
  }

  /// f' = (-d psi/dx2, d psi/dx1) with psi = amplitude * sin(pi xi1) sin(pi xi2):
  /// divergence free and tangential to the boundary.
  static MacroForcing rotational(const MacroGrid& g, double amplitude) {
    return from_function(g, [&](const Point2& x) {
      constexpr double pi = std::numbers::pi;
      const double L1 = g.x1() - g.x0(), L2 = g.y1() - g.y0();
      const double a = pi * (x[0] - g.x0()) / L1, b = pi * (x[1] - g.y0()) / L2;
      return Vec2{-amplitude * pi / L2 * std::sin(a) * std::cos(b), amplitude * pi / L1 * std::cos(a) * std::sin(b)};
    });
  }

  Vec2 at(std::size_t id) const { return {f1[id], f2[id]}; }
};

/// Mobility tensor B at every macro cell center.
struct MobilityField {
  std::vector<Mat2> values;
  bool diagonal = true;

  static MobilityField uniform(const MacroGrid& g, const Mat2& b) {
    return {std::vector<Mat2>(g.size(), b), b[0][1] == 0.0 && b[1][0] == 0.0};
  }
};

namespace detail {

inline void require_spd(const Mat2& b) {
  const auto ev = eigenvalues_sym(b);
  if (!(ev[0] > 0.0) || std::abs(b[0][1] - b[1][0]) > 1e-8 * std::max(std::abs(b[0][0]), std::abs(b[1][1])))
    throw std::invalid_argument("mobility tensor is not symmetric positive definite");
}

}  // namespace detail

/// Mobility at x'. Rough regimes: the constant (K/mu) A_M. Smooth regime:
/// (K/mu) phi_M(h(x')) I, or with h_min in place of h(x') when `use_h_min`.
inline Mat2 mobility(Regime regime, const EffectiveTensor* tensor, const RoughnessProfile& profile,
                     const PhysicalParams& params, const Point2& x, bool use_h_min = false) {
  const double scale = params.mobility_scale();
  Mat2 b{};
  if (regime == Regime::smooth) {
    const double h = use_h_min ? profile.h_min() : profile.eval(x);
    b[0][0] = b[1][1] = scale * flow_factor(params.M(), h);
  } else {
    if (tensor == nullptr) throw std::invalid_argument("rough regimes need an effective tensor");
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) b[i][j] = scale * tensor->a[i][j];
  }
  detail::require_spd(b);
  return b;
}

inline MobilityField mobility_field(Regime regime, const EffectiveTensor* tensor, const RoughnessProfile& profile,
                                    const PhysicalParams& params, const MacroGrid& g, bool use_h_min = false) {
  MobilityField m{std::vector<Mat2>(g.size()), true};
  for (int j = 0; j < g.m2(); ++j)
    for (int i = 0; i < g.m1(); ++i) {
      const Mat2 b = mobility(regime, tensor, profile, params, g.node(i, j), use_h_min);
      m.values[g.index(i, j)] = b;
      if (b[0][1] != 0.0 || b[1][0] != 0.0) m.diagonal = false;
    }
  return m;
}

/// Face velocities B (f' - grad p): u on the (m1+1) x m2 faces normal to x1,
/// w on the m1 x (m2+1) faces normal to x2. Boundary faces carry zero flux.
struct FaceFlux {
  Vec u;
  Vec w;
};

namespace detail {

struct MacroStencil {
  const MacroGrid& g;
  const MobilityField& B;

  std::size_t u_index(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * (g.m1() + 1); }
  std::size_t w_index(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * g.m1(); }

  static double harmonic(double a, double b) { return (a + b) == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

  Mat2 face_tensor(std::size_t a, std::size_t b) const {
    const Mat2& A = B.values[a];
    const Mat2& C = B.values[b];
    Mat2 out;
    out[0][0] = harmonic(A[0][0], C[0][0]);
    out[1][1] = harmonic(A[1][1], C[1][1]);
    out[0][1] = 0.5 * (A[0][1] + C[0][1]);
    out[1][0] = 0.5 * (A[1][0] + C[1][0]);
    return out;
  }

  // One-sided at the boundary rows, central inside.
  double center_d1(std::span<const double> p, int i, int j) const {
    const int m1 = g.m1();
    if (i == 0) return (p[g.index(1, j)] - p[g.index(0, j)]) / g.dx();
    if (i == m1 - 1) return (p[g.index(m1 - 1, j)] - p[g.index(m1 - 2, j)]) / g.dx();
    return (p[g.index(i + 1, j)] - p[g.index(i - 1, j)]) / (2 * g.dx());
  }
  double center_d2(std::span<const double> p, int i, int j) const {
    const int m2 = g.m2();
    if (j == 0) return (p[g.index(i, 1)] - p[g.index(i, 0)]) / g.dy();
    if (j == m2 - 1) return (p[g.index(i, m2 - 1)] - p[g.index(i, m2 - 2)]) / g.dy();
    return (p[g.index(i, j + 1)] - p[g.index(i, j - 1)]) / (2 * g.dy());
  }

  /// Normal and tangential drive f' - grad p on an interior x1-face (left cell i-1).
  Vec2 drive_u(std::span<const double> p, const MacroForcing* f, int i, int j) const {
    const std::size_t l = g.index(i - 1, j), r = g.index(i, j);
    double dn = -(p[r] - p[l]) / g.dx();
    double dt = 0.0;
    if (!B.diagonal) dt = -0.5 * (center_d2(p, i - 1, j) + center_d2(p, i, j));
    if (f) {
      dn += 0.5 * (f->f1[l] + f->f1[r]);
      dt += 0.5 * (f->f2[l] + f->f2[r]);
    }
    return {dn, dt};
  }
  Vec2 drive_w(std::span<const double> p, const MacroForcing* f, int i, int j) const {
    const std::size_t l = g.index(i, j - 1), r = g.index(i, j);
    double dn = -(p[r] - p[l]) / g.dy();
    double dt = 0.0;
    if (!B.diagonal) dt = -0.5 * (center_d1(p, i, j - 1) + center_d1(p, i, j));
    if (f) {
      dn += 0.5 * (f->f2[l] + f->f2[r]);
      dt += 0.5 * (f->f1[l] + f->f1[r]);
    }
    return {dn, dt};
  }

  FaceFlux fluxes(std::span<const double> p, const MacroForcing* f) const {
    const int m1 = g.m1(), m2 = g.m2();
    FaceFlux q{Vec(static_cast<std::size_t>(m1 + 1) * m2, 0.0), Vec(static_cast<std::size_t>(m1) * (m2 + 1), 0.0)};
    for (int j = 0; j < m2; ++j)
      for (int i = 1; i < m1; ++i) {
        const Mat2 b = face_tensor(g.index(i - 1, j), g.index(i, j));
        const Vec2 d = drive_u(p, f, i, j);
        q.u[u_index(i, j)] = b[0][0] * d[0] + b[0][1] * d[1];
      }
    for (int j = 1; j < m2; ++j)
      for (int i = 0; i < m1; ++i) {
        const Mat2 b = face_tensor(g.index(i, j - 1), g.index(i, j));
        const Vec2 d = drive_w(p, f, i, j);
        q.w[w_index(i, j)] = b[1][1] * d[0] + b[1][0] * d[1];
      }
    return q;
  }

  void divergence(const FaceFlux& q, std::span<double> out) const {
    for (int j = 0; j < g.m2(); ++j)
      for (int i = 0; i < g.m1(); ++i)
        out[g.index(i, j)] = (q.u[u_index(i + 1, j)] - q.u[u_index(i, j)]) / g.dx() +
                             (q.w[w_index(i, j + 1)] - q.w[w_index(i, j)]) / g.dy();
  }
};

}  // namespace detail

struct MacroPressure {
  Vec p;                  // zero-mean pressure at the cell centers
  double mean = 0.0;      // mean after normalization
  double residual = 0.0;  // max-norm of the discrete divergence of B (f' - grad p)
  SolveStats stats;
};

inline FaceFlux face_fluxes(const MacroGrid& g, std::span<const double> p, const MobilityField& B,
                            const MacroForcing& f) {
  return detail::MacroStencil{g, B}.fluxes(p, &f);
}

inline Vec flux_divergence(const MacroGrid& g, const FaceFlux& q) {
  MobilityField dummy;
  Vec out(g.size());
  detail::MacroStencil{g, dummy}.divergence(q, out);
  return out;
}

inline MacroPressure solve_pressure(const MacroGrid& g, const MobilityField& B, const MacroForcing& f,
                                    double tol = 1e-12, int max_iter = 100000) {
  if (B.values.size() != g.size() || f.f1.size() != g.size() || f.f2.size() != g.size())
    throw std::invalid_argument("solve_pressure: field shapes do not match the macro grid");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_pressure: tolerance must be positive");
  const detail::MacroStencil st{g, B};
  Vec rhs(g.size());
  {
    const Vec zero(g.size(), 0.0);
    st.divergence(st.fluxes(zero, &f), rhs);
    for (double& v : rhs) v = -v;
  }
  // A p = div( -B grad p ), positive semidefinite with the constants as null space.
  auto op = [&](std::span<const double> x, std::span<double> y) { st.divergence(st.fluxes(x, nullptr), y); };
  MacroPressure out{Vec(g.size(), 0.0), 0.0, 0.0, {}};
  const double scale = la::max_abs(rhs);
  if (scale > 0.0) {
    if (B.diagonal) {
      Vec inv_diag(g.size());
      // Diagonal of the two-point operator from the face coefficients.
      for (int j = 0; j < g.m2(); ++j)
        for (int i = 0; i < g.m1(); ++i) {
          double d = 0.0;
          const std::size_t id = g.index(i, j);
          if (i > 0) d += st.face_tensor(g.index(i - 1, j), id)[0][0] / (g.dx() * g.dx());
          if (i < g.m1() - 1) d += st.face_tensor(id, g.index(i + 1, j))[0][0] / (g.dx() * g.dx());
          if (j > 0) d += st.face_tensor(g.index(i, j - 1), id)[1][1] / (g.dy() * g.dy());
          if (j < g.m2() - 1) d += st.face_tensor(id, g.index(i, j + 1))[1][1] / (g.dy() * g.dy());
          inv_diag[id] = 1.0 / d;
        }
      auto jacobi = [&](std::span<const double> r, std::span<double> z) {
        for (std::size_t k = 0; k < r.size(); ++k) z[k] = inv_diag[k] * r[k];
      };
      out.stats = conjugate_gradient(op, rhs, out.p, tol * scale, max_iter, true, jacobi);
    } else {
      out.stats = bicgstab(op, rhs, out.p, tol * scale, max_iter, true);
    }
    if (!out.stats.converged) throw ConvergenceError("macro pressure solve did not converge", out.stats.history);
  } else {
    out.stats.converged = true;
  }
  la::remove_mean(out.p);
  out.mean = la::mean(out.p);
  Vec div(g.size());
  st.divergence(st.fluxes(out.p, &f), div);
  out.residual = la::max_abs(div);
  return out;
}

/// Height-averaged velocity V' = B (f' - grad p) at the cell centers, with the
/// driving force f' - grad p reconstructed from the face drives, and the
/// conservative face fluxes it came from. V_3 vanishes identically.
struct AverageVelocity {
  Vec v1, v2;
  Vec drive1, drive2;  // f' - grad p at the centers
  FaceFlux flux;
  double max_divergence = 0.0;  // of the face fluxes
  double boundary_flux = 0.0;   // net outflow through the boundary of omega
};

inline AverageVelocity average_velocity(const MacroGrid& g, const MacroPressure& pressure, const MobilityField& B,
                                        const MacroForcing& f) {
  const detail::MacroStencil st{g, B};
  const int m1 = g.m1(), m2 = g.m2();
  std::span<const double> p(pressure.p);
  AverageVelocity out;
  out.flux = st.fluxes(p, &f);
  out.v1.assign(g.size(), 0.0);
  out.v2.assign(g.size(), 0.0);
  out.drive1.assign(g.size(), 0.0);
  out.drive2.assign(g.size(), 0.0);

  // Normal drive on every face; on boundary faces the value that makes the flux vanish.
  auto boundary_tangential_u = [&](int i, int j) {
    // Face i in {0, m1}; adjacent cell c.
    const int c = i == 0 ? 0 : m1 - 1;
    return f.f2[g.index(c, j)] - st.center_d2(p, c, j);
  };
  auto boundary_tangential_w = [&](int i, int j) {
    const int c = j == 0 ? 0 : m2 - 1;
    return f.f1[g.index(i, c)] - st.center_d1(p, i, c);
  };
  auto normal_u = [&](int i, int j) {
    if (i > 0 && i < m1) return st.drive_u(p, &f, i, j)[0];
    const Mat2& b = B.values[g.index(i == 0 ? 0 : m1 - 1, j)];
    return b[0][1] == 0.0 ? 0.0 : -b[0][1] * boundary_tangential_u(i, j) / b[0][0];
  };
  auto normal_w = [&](int i, int j) {
    if (j > 0 && j < m2) return st.drive_w(p, &f, i, j)[0];
    const Mat2& b = B.values[g.index(i, j == 0 ? 0 : m2 - 1)];
    return b[1][0] == 0.0 ? 0.0 : -b[1][0] * boundary_tangential_w(i, j) / b[1][1];
  };
  for (int j = 0; j < m2; ++j)
    for (int i = 0; i < m1; ++i) {
      const std::size_t id = g.index(i, j);
      const double d1 = 0.5 * (normal_u(i, j) + normal_u(i + 1, j));
      const double d2 = 0.5 * (normal_w(i, j) + normal_w(i, j + 1));
      out.drive1[id] = d1;
      out.drive2[id] = d2;
      const Vec2 v = roughfilm::apply(B.values[id], {d1, d2});
      out.v1[id] = v[0];
      out.v2[id] = v[1];
    }
  Vec div(g.size());
  st.divergence(out.flux, div);
  out.max_divergence = la::max_abs(div);
  double bf = 0.0;
  for (int j = 0; j < m2; ++j) bf += (out.flux.u[st.u_index(m1, j)] - out.flux.u[st.u_index(0, j)]) * g.dy();
  for (int i = 0; i < m1; ++i) bf += (out.flux.w[st.w_index(i, m2)] - out.flux.w[st.w_index(i, 0)]) * g.dx();
  out.boundary_flux = bf;
  return out;
}

}  // namespace roughfilm
