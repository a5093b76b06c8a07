#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "berglab/common.hpp"

namespace berglab {

// Metric potential phi. laplacian is the flat Laplacian d2/dx2 + d2/dy2.
struct Weight {
  std::function<double(cplx)> eval;
  std::function<double(cplx)> laplacian;
  std::string label;
  enum class Smoothness { smooth, c2 } smoothness_class = Smoothness::smooth;
  bool closed_form_laplacian = true;
};

inline Weight weight_zero() {
  Weight w;
  w.eval = [](cplx) { return 0.0; };
  w.laplacian = [](cplx) { return 0.0; };
  w.label = "zero";
  return w;
}

inline Weight weight_abs_squared(double c = 1.0) {
  if (!(c > 0.0)) throw ConfigError("abs_squared weight needs c > 0");
  Weight w;
  w.eval = [c](cplx z) { return c * std::norm(z); };
  w.laplacian = [c](cplx) { return 4.0 * c; };
  w.label = "abs_squared(" + std::to_string(c) + ")";
  return w;
}

inline Weight weight_radial_power(double p) {
  if (!(p > 0.0)) throw ConfigError("radial_power weight needs p > 0");
  Weight w;
  w.eval = [p](cplx z) { return std::pow(std::abs(z), p); };
  // radial: phi'' + phi'/r = p^2 r^(p-2)
  w.laplacian = [p](cplx z) {
    double r = std::abs(z);
    if (r == 0.0) return p > 2.0 ? 0.0 : (p == 2.0 ? 4.0 : 0.0);
    return p * p * std::pow(r, p - 2.0);
  };
  w.label = "radial_power(" + std::to_string(p) + ")";
  w.smoothness_class = p >= 2.0 ? Weight::Smoothness::smooth : Weight::Smoothness::c2;
  return w;
}

// Radial table (r_k, phi_k), piecewise-linear in r; Laplacian from centered
// second differences of the table, so no closed form is claimed for it.
inline Weight weight_custom_table(std::vector<std::pair<double, double>> table) {
  if (table.size() < 3) throw ConfigError("custom_table weight needs at least 3 samples");
  std::sort(table.begin(), table.end());
  if (table.front().first < 0.0) throw ConfigError("custom_table radii must be nonnegative");
  Weight w;
  auto value_at = [table](double r) {
    if (r <= table.front().first) return table.front().second;
    if (r >= table.back().first) return table.back().second;
    std::size_t hi = 1;
    while (table[hi].first < r) ++hi;
    const auto& a = table[hi - 1];
    const auto& b = table[hi];
    double t = (r - a.first) / (b.first - a.first);
    return (1.0 - t) * a.second + t * b.second;
  };
  w.eval = [value_at](cplx z) { return value_at(std::abs(z)); };
  w.laplacian = [value_at](cplx z) {
    double r = std::abs(z);
    double h = 1e-3;
    double rp = r + h, rm = r > h ? r - h : 0.0;
    double d2 = (value_at(rp) - 2.0 * value_at(r) + value_at(rm)) / (h * h);
    double d1 = (value_at(rp) - value_at(rm)) / (rp - rm);
    return r > h ? d2 + d1 / r : 4.0 * (value_at(h) - value_at(0.0)) / (h * h);
  };
  w.label = "custom_table";
  w.smoothness_class = Weight::Smoothness::c2;
  w.closed_form_laplacian = false;
  return w;
}

inline Weight build_weight(const std::string& kind, const std::vector<double>& params = {}) {
  if (kind == "zero") return weight_zero();
  if (kind == "abs_squared") return weight_abs_squared(params.empty() ? 1.0 : params[0]);
  if (kind == "radial_power") {
    if (params.empty()) throw ConfigError("radial_power weight needs the exponent parameter");
    return weight_radial_power(params[0]);
  }
  throw ConfigError("unknown weight kind: " + kind);
}

}  // namespace berglab
