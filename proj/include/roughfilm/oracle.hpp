#pragma once

// Brute-force reference computations. Nothing here includes or calls the
// production solvers: the point of these routines is to be an independent
// second route to every closed form and discrete solve they are compared with.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughness.hpp"
#include "tensor.hpp"

namespace roughfilm::oracle {

/// Nodal solution of a two-point boundary value problem on z_k = k h / n.
struct BVPResult {
  std::vector<double> z;
  std::vector<double> u;
  double residual = 0.0;  // max-norm of the discrete ODE residual

  /// Piecewise-linear interpolation between nodes.
  double at(double zq) const {
    if (zq <= z.front()) return u.front();
    if (zq >= z.back()) return u.back();
    const double dz = z[1] - z[0];
    const auto k = std::min(static_cast<std::size_t>(zq / dz), z.size() - 2);
    const double t = (zq - z[k]) / dz;
    return (1 - t) * u[k] + t * u[k + 1];
  }
};

namespace detail {

// Thomas algorithm for sub/diag/super diagonals; overwrites rhs with the solution.
inline void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                              std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

}  // namespace detail

/// Second-order finite differences for -(1/M^2) u'' + u = 1, u(0) = u(h) = 0.
inline BVPResult brinkman_bvp_1d(double M, double h, int n) {
  if (n < 128) throw std::invalid_argument("brinkman_bvp_1d: need n >= 128 intervals");
  if (!(M > 0.0) || !(h > 0.0)) throw std::invalid_argument("brinkman_bvp_1d: M and h must be positive");
  const double dz = h / n;
  const double c = 1.0 / (M * M * dz * dz);
  const std::size_t m = static_cast<std::size_t>(n) - 1;  // interior unknowns
  std::vector<double> sub(m, -c), diag(m, 2 * c + 1.0), sup(m, -c), rhs(m, 1.0);
  detail::solve_tridiagonal(sub, diag, sup, rhs);
  BVPResult r;
  r.z.resize(n + 1);
  r.u.assign(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) r.z[k] = k * dz;
  for (std::size_t k = 0; k < m; ++k) r.u[k + 1] = rhs[k];
  for (int k = 1; k < n; ++k) {
    const double res = -c * (r.u[k - 1] - 2 * r.u[k] + r.u[k + 1]) + r.u[k] - 1.0;
    r.residual = std::max(r.residual, std::abs(res));
  }
  return r;
}

/// Richardson extrapolation (4 u_{2n} - u_n) / 3 on the coarse nodes.
inline BVPResult brinkman_bvp_1d_richardson(double M, double h, int n) {
  BVPResult coarse = brinkman_bvp_1d(M, h, n);
  const BVPResult fine = brinkman_bvp_1d(M, h, 2 * n);
  for (int k = 0; k <= n; ++k) coarse.u[k] = (4.0 * fine.u[2 * k] - coarse.u[k]) / 3.0;
  return coarse;
}

/// Second-order finite differences for -k T'' = S on (0,h), T(h) = 0, -k T'(0) = b.
/// `source` holds S at the n+1 nodes z_k = k h / n.
inline BVPResult heat_bvp_1d(std::span<const double> source, double b, double k, double h, int n) {
  if (n < 64) throw std::invalid_argument("heat_bvp_1d: need n >= 64 intervals");
  if (source.size() != static_cast<std::size_t>(n) + 1)
    throw std::invalid_argument("heat_bvp_1d: expected n+1 source samples");
  if (!(k > 0.0) || !(h > 0.0)) throw std::invalid_argument("heat_bvp_1d: k and h must be positive");
  const double dz = h / n;
  const double c = k / (dz * dz);
  const std::size_t m = static_cast<std::size_t>(n);  // unknowns T_0 .. T_{n-1}
  std::vector<double> sub(m, -c), diag(m, 2 * c), sup(m, -c), rhs(source.begin(), source.end() - 1);
  // Ghost node from the flux condition: T_{-1} = T_1 + 2 dz b / k.
  sup[0] = -2 * c;
  rhs[0] += 2.0 * b / dz;
  detail::solve_tridiagonal(sub, diag, sup, rhs);
  BVPResult r;
  r.z.resize(n + 1);
  r.u.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) r.z[i] = i * dz;
  for (std::size_t i = 0; i < m; ++i) r.u[i] = rhs[i];
  for (int i = 1; i < n; ++i) {
    const double res = -c * (r.u[i - 1] - 2 * r.u[i] + r.u[i + 1]) - source[i];
    r.residual = std::max(r.residual, std::abs(res));
  }
  return r;
}

inline BVPResult heat_bvp_1d(const std::function<double(double)>& source, double b, double k, double h, int n) {
  std::vector<double> s(n + 1);
  for (int i = 0; i <= n; ++i) s[i] = source(i * h / n);
  return heat_bvp_1d(std::span<const double>(s), b, k, h, n);
}

/// Composite Simpson rule; n is rounded up to the next even number.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 2) n = 2;
  if (n % 2) ++n;
  const double dz = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * dz);
  return s * dz / 3.0;
}

inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double dz = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * dz);
  return s * dz;
}

/// Flat-channel flow factor through h - (2/M)(cosh(Mh) - 1)/sinh(Mh), an algebraic
/// route independent of the production tanh(Mh/2) evaluation.
inline double flow_factor_reference(double M, double h) {
  const double x = M * h;
  double ratio;
  if (x > 20.0) {
    const double e = std::exp(-x);
    ratio = (1.0 - 2.0 * e + e * e) / (1.0 - e * e);
  } else {
    const double s = std::sinh(0.5 * x);
    ratio = 2.0 * s * s / std::sinh(x);
  }
  return h - 2.0 / M * ratio;
}

struct Means {
  double harmonic = 0.0;
  double arithmetic = 0.0;
};

/// Harmonic and arithmetic means of phi_M(h(z')) over Z' by the n x n midpoint rule.
inline Means flow_factor_means(const RoughnessProfile& profile, double M, int n) {
  double inv = 0.0, sum = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double phi = flow_factor_reference(M, profile.eval({-0.5 + (i + 0.5) / n, -0.5 + (j + 0.5) / n}));
      inv += 1.0 / phi;
      sum += phi;
    }
  const double cells = static_cast<double>(n) * n;
  return {cells / inv, sum / cells};
}

/// Closed-form effective tensor of a laminate profile h(z1) (or h(z2)): the
/// harmonic mean of phi across the layers and the arithmetic mean along them,
/// by composite Simpson quadrature with n intervals.
inline Mat2 laminate_tensor_1d(const RoughnessProfile& profile, double M, int n) {
  int axis;
  if (profile.varies_only_along(0))
    axis = 0;
  else if (profile.varies_only_along(1))
    axis = 1;
  else
    throw std::invalid_argument("laminate_tensor_1d: profile is not a one-directional laminate");
  auto phi_at = [&](double s) {
    const Point2 z = axis == 0 ? Point2{s, 0.0} : Point2{0.0, s};
    return flow_factor_reference(M, profile.eval(z));
  };
  const double inv_mean = simpson([&](double s) { return 1.0 / phi_at(s); }, -0.5, 0.5, n);
  const double mean = simpson(phi_at, -0.5, 0.5, n);
  const double harmonic = 1.0 / inv_mean;
  if (harmonic > mean * (1 + 1e-14)) throw std::logic_error("laminate_tensor_1d: harmonic mean above arithmetic");
  Mat2 a{};
  a[axis][axis] = harmonic;
  a[1 - axis][1 - axis] = mean;
  return a;
}

/// Flux of the cross-section problem for flow along a laminate h(z1):
///   -(1/M^2)(v_11 + v_33) + v = 1 on 0 < z3 < h(z1), v = 0 on both walls, periodic in z1,
/// solved on the mapped coordinate eta = z3/h(z1) with second-order central
/// differences (n x n interior grid) and successive over-relaxation.
/// Returns the integral of v over the cross-section.
inline double groove_flow_2d(const RoughnessProfile& profile, double M, int n) {
  if (!profile.varies_only_along(0)) throw std::invalid_argument("groove_flow_2d: profile must depend on z1 only");
  if (n < 16) throw std::invalid_argument("groove_flow_2d: n must be >= 16");
  const double nu = 1.0 / (M * M), d1 = 1.0 / n, de = 1.0 / n;
  const int ne = n - 1;  // interior eta nodes
  std::vector<double> h(n), hp(n), hpp(n);
  const double eps = 1e-4;
  for (int i = 0; i < n; ++i) {
    const double z = -0.5 + (i + 0.5) * d1;
    h[i] = profile.eval({z, 0.0});
    hp[i] = (profile.eval({z + eps, 0.0}) - profile.eval({z - eps, 0.0})) / (2 * eps);
    hpp[i] = (profile.eval({z + eps, 0.0}) - 2 * h[i] + profile.eval({z - eps, 0.0})) / (eps * eps);
  }
  // V(z1, eta): v_11 = V_11 - 2 eta h'/h V_1e + (eta h'/h)^2 V_ee + eta (2h'^2/h^2 - h''/h) V_e, v_33 = V_ee / h^2.
  struct Row {
    double c, w, e, s, nn, cross;
  };
  std::vector<Row> rows(static_cast<std::size_t>(n) * ne);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < ne; ++k) {
      const double eta = (k + 1) * de, r = hp[i] / h[i];
      const double A = eta * eta * r * r + 1.0 / (h[i] * h[i]);
      const double B = -2.0 * eta * r;
      const double C = eta * (2.0 * r * r - hpp[i] / h[i]);
      rows[i * ne + k] = {nu * (2 / (d1 * d1) + 2 * A / (de * de)) + 1.0, nu / (d1 * d1), nu / (d1 * d1),
                          nu * (A / (de * de) - C / (2 * de)), nu * (A / (de * de) + C / (2 * de)),
                          nu * B / (4 * d1 * de)};
    }
  std::vector<double> v(rows.size(), 0.0);
  auto at = [&](int i, int k) { return (k < 0 || k >= ne) ? 0.0 : v[((i + n) % n) * ne + k]; };
  const double omega = 2.0 / (1.0 + std::sin(3.14159265358979 / n));
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double change = 0.0, vmax = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < ne; ++k) {
        const Row& r = rows[i * ne + k];
        const double off = r.w * at(i - 1, k) + r.e * at(i + 1, k) + r.s * at(i, k - 1) + r.nn * at(i, k + 1) +
                           r.cross * (at(i + 1, k + 1) - at(i + 1, k - 1) - at(i - 1, k + 1) + at(i - 1, k - 1));
        const double gs = (1.0 + off) / r.c;
        double& x = v[i * ne + k];
        const double next = x + omega * (gs - x);
        change = std::max(change, std::abs(next - x));
        x = next;
        vmax = std::max(vmax, std::abs(x));
      }
    if (change <= 1e-14 * vmax) break;
  }
  double flux = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < ne; ++k) flux += v[i * ne + k] * h[i] * de * d1;
  return flux;
}

struct OrderEstimate {
  double order = 0.0;
  bool monotone = false;
};

/// Least-squares slope of log(error) against log(spacing). Errors that do not
/// strictly decrease with the spacing give order 0 and monotone = false.
inline OrderEstimate convergence_order(std::span<const double> spacing, std::span<const double> errors) {
  if (spacing.size() != errors.size()) throw std::invalid_argument("convergence_order: size mismatch");
  if (errors.size() < 3) throw std::invalid_argument("convergence_order: need at least three ladder points");
  std::vector<std::size_t> idx(errors.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return spacing[a] > spacing[b]; });
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (!(errors[idx[i]] < errors[idx[i - 1]]) || !(errors[idx[i]] > 0.0)) return {0.0, false};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double x = std::log(spacing[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return {(n * sxy - sx * sy) / (n * sxx - sx * sx), true};
}

}  // namespace roughfilm::oracle
