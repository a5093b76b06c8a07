#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "berglab/common.hpp"

namespace berglab {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

enum class SupportKind { disk, circle, annulus, truncated_plane };

inline std::string support_kind_name(SupportKind k) {
  switch (k) {
    case SupportKind::disk: return "disk";
    case SupportKind::circle: return "circle";
    case SupportKind::annulus: return "annulus";
    case SupportKind::truncated_plane: return "truncated_plane";
  }
  return "?";
}

// Quadrature discretization of a probability measure nu with compact support K.
struct SupportMeasure {
  std::vector<cplx> nodes;
  std::vector<double> weights;
  SupportKind support_kind = SupportKind::circle;
  double r_inner = 0.0;  // annulus only
  double r_outer = 1.0;
  double total_mass = 1.0;
  int angular_exactness = 0;  // exact for z^j conj(z)^k with |j-k| < this
  std::string label;

  bool contains(cplx z, double tol = 1e-12) const {
    double r = std::abs(z);
    switch (support_kind) {
      case SupportKind::circle: return std::abs(r - r_outer) <= tol;
      case SupportKind::disk:
      case SupportKind::truncated_plane: return r <= r_outer + tol;
      case SupportKind::annulus: return r >= r_inner - tol && r <= r_outer + tol;
    }
    return false;
  }

  // Grid-cell membership: true when z sits within half a cell diagonal of K.
  bool near(cplx z, double h) const { return contains(z, 0.5 * h * std::sqrt(2.0)); }
};

inline SupportMeasure measure_circle(double R, int n) {
  if (!(R > 0.0)) throw ConfigError("circle measure needs R > 0");
  if (n < 4) throw ConfigError("measure resolution must be >= 4");
  SupportMeasure m;
  m.support_kind = SupportKind::circle;
  m.r_outer = R;
  m.nodes.reserve(n);
  m.weights.assign(n, 1.0 / n);
  for (int k = 0; k < n; ++k) {
    double t = 2.0 * kPi * k / n;
    m.nodes.push_back(cplx(R * std::cos(t), R * std::sin(t)));
  }
  m.total_mass = 1.0;
  m.angular_exactness = n;
  m.label = "circle(" + std::to_string(R) + ")x" + std::to_string(n);
  return m;
}

// Normalized area measure on an annulus r_in <= |z| <= R: radial Gauss rule
// tensored with equispaced angles.
inline SupportMeasure measure_annulus(double r_in, double R, int n_r, int n_theta) {
  if (!(R > 0.0) || r_in < 0.0) throw ConfigError("annulus measure needs 0 <= r < R");
  if (r_in >= R) throw ConfigError("annulus measure needs r < R");
  if (n_r < 4 || n_theta < 4) throw ConfigError("measure resolution must be >= 4");
  SupportMeasure m;
  m.support_kind = r_in == 0.0 ? SupportKind::disk : SupportKind::annulus;
  m.r_inner = r_in;
  m.r_outer = R;
  std::vector<double> gx, gw;
  gauss_legendre(n_r, gx, gw);
  double area = kPi * (R * R - r_in * r_in);
  m.nodes.reserve(static_cast<std::size_t>(n_r) * n_theta);
  m.weights.reserve(m.nodes.capacity());
  for (int i = 0; i < n_r; ++i) {
    double r = 0.5 * (R + r_in) + 0.5 * (R - r_in) * gx[i];
    double wr = 0.5 * (R - r_in) * gw[i] * r * 2.0 * kPi / (n_theta * area);
    for (int k = 0; k < n_theta; ++k) {
      double t = 2.0 * kPi * k / n_theta;
      m.nodes.push_back(cplx(r * std::cos(t), r * std::sin(t)));
      m.weights.push_back(wr);
    }
  }
  double s = 0.0;
  for (double w : m.weights) s += w;
  for (double& w : m.weights) w /= s;
  m.total_mass = 1.0;
  m.angular_exactness = n_theta;
  m.label = (m.support_kind == SupportKind::disk ? "disk(" : "annulus(" + std::to_string(r_in) + ",") +
            std::to_string(R) + ")x" + std::to_string(n_r) + "x" + std::to_string(n_theta);
  return m;
}

inline SupportMeasure measure_disk(double R, int n_r, int n_theta) { return measure_annulus(0.0, R, n_r, n_theta); }

inline SupportMeasure build_measure(const std::string& kind, int resolution, const std::vector<double>& params = {}) {
  if (resolution < 4) throw ConfigError("measure resolution must be >= 4");
  if (kind == "circle") return measure_circle(params.empty() ? 1.0 : params[0], resolution);
  if (kind == "disk") return measure_disk(params.empty() ? 1.0 : params[0], resolution, 4 * resolution);
  if (kind == "annulus") {
    if (params.size() < 2) throw ConfigError("annulus measure needs radii r, R");
    return measure_annulus(params[0], params[1], resolution, 4 * resolution);
  }
  if (kind == "truncated_plane") {
    SupportMeasure m = measure_disk(params.empty() ? 3.0 : params[0], resolution, 4 * resolution);
    m.support_kind = SupportKind::truncated_plane;
    m.label = "truncated_plane(" + std::to_string(m.r_outer) + ")x" + std::to_string(resolution);
    return m;
  }
  throw ConfigError("unknown measure kind: " + kind);
}

}  // namespace berglab
