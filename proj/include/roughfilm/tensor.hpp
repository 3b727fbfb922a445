#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "roughness.hpp"

namespace roughfilm {

enum class Regime { subcritical, critical, smooth };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::smooth: return "smooth";
  }
  return "unknown";
}

inline std::optional<Regime> parse_regime(std::string_view s) {
  if (s == "subcritical") return Regime::subcritical;
  if (s == "critical") return Regime::critical;
  if (s == "smooth") return Regime::smooth;
  return std::nullopt;
}

using Mat2 = std::array<std::array<double, 2>, 2>;

inline std::array<double, 2> eigenvalues_sym(const Mat2& a) {
  const double m = 0.5 * (a[0][0] + a[1][1]);
  const double off = 0.5 * (a[0][1] + a[1][0]);
  const double d = std::hypot(0.5 * (a[0][0] - a[1][1]), off);
  return {m - d, m + d};
}

inline std::array<double, 2> apply(const Mat2& a, const std::array<double, 2>& v) {
  return {a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]};
}

/// Homogenized 2x2 mobility A_M together with where it came from.
/// Average velocity convention: V' = (K/mu) A_M (f' - grad p).
struct EffectiveTensor {
  Mat2 a{};
  Regime regime = Regime::subcritical;
  double M = 1.0;
  std::optional<RoughnessProfile> profile;
  double asymmetry = 0.0;  // |a12 - a21| / max entry, before symmetrization

  double operator()(int i, int j) const { return a[i][j]; }

  double max_entry() const {
    double m = 0.0;
    for (const auto& row : a)
      for (double v : row) m = std::max(m, std::abs(v));
    return m;
  }

  std::array<double, 2> eigenvalues() const { return eigenvalues_sym(a); }

  bool is_symmetric(double rel_tol) const { return std::abs(a[0][1] - a[1][0]) <= rel_tol * max_entry(); }

  bool is_spd() const {
    auto ev = eigenvalues();
    return ev[0] > 0.0 && a[0][0] * a[1][1] - a[0][1] * a[1][0] > 0.0;
  }
};

}  // namespace roughfilm
