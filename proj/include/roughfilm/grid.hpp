#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughness.hpp"

namespace roughfilm {

/// Uniform cell-centered discretization of the periodic cell Z' = (-1/2,1/2)^2,
/// extended vertically over (0, height) for the three-dimensional cell problems.
class CellGrid {
public:
  CellGrid(int n1, int n2, int n3 = 0, double height = 1.0)
      : n1_(n1), n2_(n2), n3_(n3), height_(height) {
    if (n1 < 4 || n2 < 4 || n1 % 2 != 0 || n2 % 2 != 0)
      throw std::invalid_argument("cell grid: n1 and n2 must be even and >= 4");
    if (n3 < 0) throw std::invalid_argument("cell grid: n3 must be non-negative");
    if (!(height > 0.0)) throw std::invalid_argument("cell grid: height must be positive");
  }

  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  int n3() const noexcept { return n3_; }
  double height() const noexcept { return height_; }
  double dz1() const noexcept { return 1.0 / n1_; }
  double dz2() const noexcept { return 1.0 / n2_; }
  double dz3() const noexcept { return n3_ > 0 ? height_ / n3_ : 0.0; }

  std::size_t planar_size() const noexcept { return static_cast<std::size_t>(n1_) * n2_; }
  std::size_t planar_index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n1_;
  }

  double center1(int i) const noexcept { return -0.5 + (i + 0.5) / n1_; }
  double center2(int j) const noexcept { return -0.5 + (j + 0.5) / n2_; }
  double center3(int k) const noexcept { return (k + 0.5) * dz3(); }
  double face1(int i) const noexcept { return -0.5 + static_cast<double>(i) / n1_; }
  double face2(int j) const noexcept { return -0.5 + static_cast<double>(j) / n2_; }
  double face3(int k) const noexcept { return k * dz3(); }

  Point2 center(int i, int j) const noexcept { return {center1(i), center2(j)}; }

private:
  int n1_, n2_, n3_;
  double height_;
};

/// Cell-centered grid over the axis-aligned macroscopic rectangle omega.
/// "Nodes" are the cell centers; boundary nodes are the cells touching the boundary.
class MacroGrid {
public:
  MacroGrid(double x0, double x1, double y0, double y1, int m1, int m2)
      : x0_(x0), x1_(x1), y0_(y0), y1_(y1), m1_(m1), m2_(m2) {
    if (m1 < 3 || m2 < 3) throw std::invalid_argument("macro grid: m1 and m2 must be >= 3");
    if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("macro grid: omega must have positive area");
  }

  int m1() const noexcept { return m1_; }
  int m2() const noexcept { return m2_; }
  double x0() const noexcept { return x0_; }
  double x1() const noexcept { return x1_; }
  double y0() const noexcept { return y0_; }
  double y1() const noexcept { return y1_; }
  double dx() const noexcept { return (x1_ - x0_) / m1_; }
  double dy() const noexcept { return (y1_ - y0_) / m2_; }
  double area() const noexcept { return (x1_ - x0_) * (y1_ - y0_); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(m1_) * m2_; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * m1_;
  }
  double xc(int i) const noexcept { return x0_ + (i + 0.5) * dx(); }
  double yc(int j) const noexcept { return y0_ + (j + 0.5) * dy(); }
  Point2 node(int i, int j) const noexcept { return {xc(i), yc(j)}; }

  bool is_boundary(int i, int j) const noexcept {
    return i == 0 || j == 0 || i == m1_ - 1 || j == m2_ - 1;
  }

  std::vector<bool> boundary_mask() const {
    std::vector<bool> mask(size());
    for (int j = 0; j < m2_; ++j)
      for (int i = 0; i < m1_; ++i) mask[index(i, j)] = is_boundary(i, j);
    return mask;
  }

private:
  double x0_, x1_, y0_, y1_;
  int m1_, m2_;
};

}  // namespace roughfilm
