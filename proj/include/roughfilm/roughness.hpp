#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughfilm {

using Point2 = std::array<double, 2>;

/// Maps a coordinate into the periodic cell [-1/2, 1/2).
inline double wrap_unit(double z) noexcept { return z - std::floor(z + 0.5); }

/// Parameters of the separable trigonometric family
///   h = mean + amp1 cos(2 pi k1 z1) + amp2 cos(2 pi k2 z2) + amp12 cos(2 pi k1 z1) cos(2 pi k2 z2).
/// Integer wavenumbers keep the profile Z'-periodic.
struct SinusoidalParams {
  double mean = 1.0;
  double amp1 = 0.0;
  double amp2 = 0.0;
  double amp12 = 0.0;
  int k1 = 1;
  int k2 = 1;
};

/// Heights on the nodes z = -1/2 + (i/nx, j/ny); stored row-major with i fastest.
struct SampledGrid {
  int nx = 0;
  int ny = 0;
  std::vector<double> heights;
};

/// Z'-periodic height of the rough upper wall over the cell Z' = (-1/2, 1/2)^2.
class RoughnessProfile {
public:
  enum class Kind { constant, sinusoidal, sampled };

  static RoughnessProfile constant(double height) {
    RoughnessProfile p(Kind::constant);
    p.constant_ = height;
    p.h_min_ = p.h_max_ = height;
    p.check_positive();
    return p;
  }

  static RoughnessProfile sinusoidal(const SinusoidalParams& s) {
    RoughnessProfile p(Kind::sinusoidal);
    p.sin_ = s;
    // h is bilinear in (cos(2 pi k1 z1), cos(2 pi k2 z2)), both ranging over [-1, 1],
    // so the extremes sit on the four corners of that square.
    double lo = INFINITY, hi = -INFINITY;
    for (double c1 : {-1.0, 1.0})
      for (double c2 : {-1.0, 1.0}) {
        double v = s.mean + s.amp1 * c1 + s.amp2 * c2 + s.amp12 * c1 * c2;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    p.h_min_ = lo;
    p.h_max_ = hi;
    p.check_positive();
    return p;
  }

  static RoughnessProfile sampled(SampledGrid g) {
    if (g.nx <= 0 || g.ny <= 0 || g.heights.empty())
      throw std::invalid_argument("sampled roughness profile: empty grid");
    if (g.heights.size() != static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny))
      throw std::invalid_argument("sampled roughness profile: expected nx*ny heights");
    RoughnessProfile p(Kind::sampled);
    auto [lo, hi] = std::minmax_element(g.heights.begin(), g.heights.end());
    p.h_min_ = *lo;
    p.h_max_ = *hi;
    p.grid_ = std::move(g);
    p.check_positive();
    return p;
  }

  Kind kind() const noexcept { return kind_; }
  double h_min() const noexcept { return h_min_; }
  double h_max() const noexcept { return h_max_; }
  double constant_height() const noexcept { return constant_; }
  const SinusoidalParams& sinusoidal_params() const noexcept { return sin_; }
  const SampledGrid& sampled_grid() const noexcept { return grid_; }

  double operator()(const Point2& z) const { return eval(z); }

  double eval(const Point2& z) const {
    const double z1 = wrap_unit(z[0]);
    const double z2 = wrap_unit(z[1]);
    switch (kind_) {
      case Kind::constant:
        return constant_;
      case Kind::sinusoidal: {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        const double c1 = std::cos(two_pi * sin_.k1 * z1);
        const double c2 = std::cos(two_pi * sin_.k2 * z2);
        return sin_.mean + sin_.amp1 * c1 + sin_.amp2 * c2 + sin_.amp12 * c1 * c2;
      }
      case Kind::sampled:
        return bilinear(z1, z2);
    }
    return constant_;
  }

  /// Gradient of h: analytic for the closed families, centered differences of the
  /// bilinear interpolant (half a grid spacing each way) for sampled grids.
  Point2 gradient(const Point2& z) const {
    switch (kind_) {
      case Kind::constant:
        return {0.0, 0.0};
      case Kind::sinusoidal: {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        const double a1 = two_pi * sin_.k1 * wrap_unit(z[0]);
        const double a2 = two_pi * sin_.k2 * wrap_unit(z[1]);
        const double c1 = std::cos(a1), s1 = std::sin(a1);
        const double c2 = std::cos(a2), s2 = std::sin(a2);
        return {-two_pi * sin_.k1 * s1 * (sin_.amp1 + sin_.amp12 * c2),
                -two_pi * sin_.k2 * s2 * (sin_.amp2 + sin_.amp12 * c1)};
      }
      case Kind::sampled: {
        const double d1 = 0.5 / grid_.nx, d2 = 0.5 / grid_.ny;
        return {(eval({z[0] + d1, z[1]}) - eval({z[0] - d1, z[1]})) / (2 * d1),
                (eval({z[0], z[1] + d2}) - eval({z[0], z[1] - d2})) / (2 * d2)};
      }
    }
    return {0.0, 0.0};
  }

  /// True when h does not depend on z2 (axis 0) or on z1 (axis 1).
  bool varies_only_along(int axis) const {
    switch (kind_) {
      case Kind::constant:
        return true;
      case Kind::sinusoidal:
        return axis == 0 ? (sin_.amp2 == 0.0 && sin_.amp12 == 0.0)
                         : (sin_.amp1 == 0.0 && sin_.amp12 == 0.0);
      case Kind::sampled: {
        for (int j = 0; j < grid_.ny; ++j)
          for (int i = 0; i < grid_.nx; ++i) {
            const double ref = axis == 0 ? node(i, 0) : node(0, j);
            if (node(i, j) != ref) return false;
          }
        return true;
      }
    }
    return false;
  }

  /// The same profile with the roles of z1 and z2 exchanged.
  RoughnessProfile transposed() const {
    switch (kind_) {
      case Kind::constant:
        return *this;
      case Kind::sinusoidal: {
        SinusoidalParams s = sin_;
        std::swap(s.amp1, s.amp2);
        std::swap(s.k1, s.k2);
        return sinusoidal(s);
      }
      case Kind::sampled: {
        SampledGrid g{grid_.ny, grid_.nx, std::vector<double>(grid_.heights.size())};
        for (int j = 0; j < grid_.ny; ++j)
          for (int i = 0; i < grid_.nx; ++i) g.heights[j + i * grid_.ny] = node(i, j);
        return sampled(std::move(g));
      }
    }
    return *this;
  }

private:
  explicit RoughnessProfile(Kind k) : kind_(k) {}

  void check_positive() const {
    if (!(h_min_ > 0.0) || !std::isfinite(h_max_))
      throw std::invalid_argument("roughness profile must be strictly positive and bounded (h_min = " +
                                  std::to_string(h_min_) + ")");
  }

  double node(int i, int j) const {
    i = ((i % grid_.nx) + grid_.nx) % grid_.nx;
    j = ((j % grid_.ny) + grid_.ny) % grid_.ny;
    return grid_.heights[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * grid_.nx];
  }

  double bilinear(double z1, double z2) const {
    const double s = (z1 + 0.5) * grid_.nx;
    const double t = (z2 + 0.5) * grid_.ny;
    const int i = static_cast<int>(std::floor(s));
    const int j = static_cast<int>(std::floor(t));
    const double a = s - i, c = t - j;
    return (1 - a) * (1 - c) * node(i, j) + a * (1 - c) * node(i + 1, j) +
           (1 - a) * c * node(i, j + 1) + a * c * node(i + 1, j + 1);
  }

  Kind kind_;
  double constant_ = 1.0;
  SinusoidalParams sin_{};
  SampledGrid grid_{};
  double h_min_ = 1.0;
  double h_max_ = 1.0;
};

}  // namespace roughfilm
