#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "berglab/common.hpp"

namespace berglab {

// Square box [x0, x1] x [y0, y1] sampled on an n x n grid, node (i, j) at
// (x0 + i h, y0 + j h) with h = (x1 - x0) / (n - 1).
struct Box {
  double x0 = -2.5, x1 = 2.5, y0 = -2.5, y1 = 2.5;
  int n = 401;

  double h() const { return (x1 - x0) / (n - 1); }
  cplx point(int i, int j) const { return {x0 + i * h(), y0 + j * h()}; }
  bool interior(int i, int j) const { return i > 0 && j > 0 && i < n - 1 && j < n - 1; }
};

// Scalar field on a Box. kind records which potential the values represent.
struct PotentialGrid {
  Box box;
  std::string kind;  // "weight", "envelope", "log_bergman", "u_N", "density", ...
  std::vector<double> values;  // row-major, index i * n + j

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * box.n + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * box.n + j]; }
};

inline PotentialGrid make_grid(const Box& box, const std::string& kind) {
  PotentialGrid g;
  g.box = box;
  g.kind = kind;
  g.values.assign(static_cast<std::size_t>(box.n) * box.n, 0.0);
  return g;
}

// Five-point discrete Laplacian at an interior node.
inline double laplacian5(const PotentialGrid& g, int i, int j) {
  double h = g.box.h();
  return (g.at(i + 1, j) + g.at(i - 1, j) + g.at(i, j + 1) + g.at(i, j - 1) - 4.0 * g.at(i, j)) / (h * h);
}

// sup |f - g| over nodes with |z| <= r (sub-box comparison used by the
// two-route agreement checks).
inline double sup_error_on_disk(const PotentialGrid& a, const PotentialGrid& b, double r) {
  double best = 0.0;
  for (int i = 0; i < a.box.n; ++i)
    for (int j = 0; j < a.box.n; ++j) {
      if (std::abs(a.box.point(i, j)) > r) continue;
      best = std::max(best, std::abs(a.at(i, j) - b.at(i, j)));
    }
  return best;
}

}  // namespace berglab
