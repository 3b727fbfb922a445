#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace roughfilm {

using Vec = std::vector<double>;

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // max-norm of the final residual
  bool converged = false;
  std::vector<double> history;
};

namespace la {

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double mean(std::span<const double> a) {
  return a.empty() ? 0.0 : std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
}

inline void remove_mean(std::span<double> a) {
  const double m = mean(a);
  for (double& v : a) v -= m;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

struct Identity {
  void operator()(std::span<const double> r, std::span<double> z) const { std::copy(r.begin(), r.end(), z.begin()); }
};

}  // namespace la

/// Preconditioned conjugate gradients for a symmetric positive (semi)definite
/// operator. With `project_mean` the constant null vector is removed from the
/// residual and the iterate every step, so singular periodic/Neumann systems
/// with a compatible right-hand side converge to the zero-mean solution.
/// Stops when the max-norm of the residual drops to `abs_tol`.
template <class Op, class Pre = la::Identity>
SolveStats conjugate_gradient(const Op& apply, std::span<const double> b, std::span<double> x, double abs_tol,
                              int max_iter, bool project_mean = false, const Pre& precondition = Pre{}) {
  const std::size_t n = b.size();
  SolveStats st;
  Vec r(n), z(n), p(n), q(n);
  if (project_mean) la::remove_mean(x);
  apply(std::span<const double>(x), std::span<double>(q));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  if (project_mean) la::remove_mean(r);
  st.residual = la::max_abs(r);
  st.history.push_back(st.residual);
  if (st.residual <= abs_tol) {
    st.converged = true;
    return st;
  }
  precondition(std::span<const double>(r), std::span<double>(z));
  if (project_mean) la::remove_mean(z);
  p = z;
  double rz = la::dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    apply(std::span<const double>(p), std::span<double>(q));
    const double pq = la::dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    la::axpy(alpha, p, x);
    la::axpy(-alpha, q, r);
    if (project_mean) la::remove_mean(r);
    st.iterations = it;
    st.residual = la::max_abs(r);
    st.history.push_back(st.residual);
    if (st.residual <= abs_tol) {
      st.converged = true;
      break;
    }
    precondition(std::span<const double>(r), std::span<double>(z));
    if (project_mean) la::remove_mean(z);
    const double rz_new = la::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (project_mean) la::remove_mean(x);
  return st;
}

/// BiCGSTAB for the non-symmetric operators that arise from full-tensor fluxes.
/// Same stopping rule and null-space handling as conjugate_gradient.
template <class Op>
SolveStats bicgstab(const Op& apply, std::span<const double> b, std::span<double> x, double abs_tol, int max_iter,
                    bool project_mean = false) {
  const std::size_t n = b.size();
  SolveStats st;
  Vec r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n);
  if (project_mean) la::remove_mean(x);
  apply(std::span<const double>(x), std::span<double>(t));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
  if (project_mean) la::remove_mean(r);
  r0 = r;
  st.residual = la::max_abs(r);
  st.history.push_back(st.residual);
  if (st.residual <= abs_tol) {
    st.converged = true;
    return st;
  }
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = la::dot(r0, r);
    if (rho_new == 0.0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    apply(std::span<const double>(p), std::span<double>(v));
    if (project_mean) la::remove_mean(v);
    alpha = rho / la::dot(r0, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    st.iterations = it;
    if (la::max_abs(s) <= abs_tol) {
      la::axpy(alpha, p, x);
      st.residual = la::max_abs(s);
      st.history.push_back(st.residual);
      st.converged = true;
      break;
    }
    apply(std::span<const double>(s), std::span<double>(t));
    if (project_mean) la::remove_mean(t);
    const double tt = la::dot(t, t);
    omega = tt > 0.0 ? la::dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    st.residual = la::max_abs(r);
    st.history.push_back(st.residual);
    if (st.residual <= abs_tol) {
      st.converged = true;
      break;
    }
    if (omega == 0.0) break;
  }
  if (project_mean) la::remove_mean(x);
  return st;
}

}  // namespace roughfilm
