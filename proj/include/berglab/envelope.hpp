#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "berglab/grid.hpp"
#include "berglab/measure.hpp"
#include "berglab/weight.hpp"

namespace berglab {

struct EnvelopeOptions {
  double sor_tol = 1e-12;     // max nodal update per sweep, in potential units
  int max_sweeps = 30000;     // per grid level
  int max_outer = 16;         // far-field constant refinements per level
  double far_field_tol = 1e-10;
};

// Largest grid function that is discretely subharmonic, bounded by the weight
// on the support nodes, and grows like 2 log|z| + F at the box boundary. F is
// the additive constant that makes the growth condition self-consistent.
struct Envelope {
  PotentialGrid grid;
  std::vector<std::uint8_t> on_k;  // nodes lying on the support of the measure
  double robin_f = 0.0;
  bool obstacle_boundary = false;  // every boundary node sat on the support
  long total_sweeps = 0;
  double final_update = 0.0;
};

namespace detail {

struct ObstacleProblem {
  Box box;
  std::vector<std::uint8_t> on_k;
  std::vector<double> psi;  // obstacle: weight values, meaningful on K nodes
};

inline ObstacleProblem obstacle_on(const Box& box, const Weight& w, const SupportMeasure& m) {
  ObstacleProblem p;
  p.box = box;
  std::size_t total = static_cast<std::size_t>(box.n) * box.n;
  p.on_k.assign(total, 0);
  p.psi.assign(total, 0.0);
  double h = box.h();
  for (int i = 0; i < box.n; ++i)
    for (int j = 0; j < box.n; ++j) {
      cplx z = box.point(i, j);
      std::size_t idx = static_cast<std::size_t>(i) * box.n + j;
      if (m.near(z, h)) {
        p.on_k[idx] = 1;
        p.psi[idx] = w.eval(z);
      }
    }
  return p;
}

inline void apply_boundary(PotentialGrid& u, const ObstacleProblem& p, double f, bool obstacle_boundary) {
  int n = u.box.n;
  auto set = [&](int i, int j) {
    std::size_t idx = static_cast<std::size_t>(i) * n + j;
    if (obstacle_boundary) {
      u.at(i, j) = p.psi[idx];
      return;
    }
    double far = 2.0 * std::log(std::max(std::abs(u.box.point(i, j)), 1e-12)) + f;
    u.at(i, j) = p.on_k[idx] ? std::min(far, p.psi[idx]) : far;
  };
  for (int i = 0; i < n; ++i) {
    set(i, 0);
    set(i, n - 1);
    set(0, i);
    set(n - 1, i);
  }
}

// Projected SOR, red-black ordering. Returns the last sweep's max update.
inline double psor(PotentialGrid& u, const ObstacleProblem& p, const EnvelopeOptions& opt, long& sweeps) {
  int n = u.box.n;
  double omega = 2.0 / (1.0 + std::sin(kPi / (n - 1)));
  double last = 0.0;
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    double upd = 0.0;
    for (int color = 0; color < 2; ++color)
      for (int i = 1; i + 1 < n; ++i) {
        int j0 = 1 + ((i + 1 + color) & 1);
        for (int j = j0; j + 1 < n; j += 2) {
          std::size_t idx = static_cast<std::size_t>(i) * n + j;
          double avg = 0.25 * (u.values[idx - n] + u.values[idx + n] + u.values[idx - 1] + u.values[idx + 1]);
          double v = u.values[idx] + omega * (avg - u.values[idx]);
          if (p.on_k[idx] && v > p.psi[idx]) v = p.psi[idx];
          upd = std::max(upd, std::abs(v - u.values[idx]));
          u.values[idx] = v;
        }
      }
    ++sweeps;
    last = upd;
    if (upd < opt.sor_tol) return upd;
  }
  return last;
}

inline double ring_average(const PotentialGrid& u, const ObstacleProblem& p) {
  // Average u - 2 log|z| over an annulus well inside the box but outside the
  // contact region; contact nodes (u pinned at the obstacle) are skipped so
  // the average samples only the harmonic far field.
  double rb = std::min(std::min(-u.box.x0, u.box.x1), std::min(-u.box.y0, u.box.y1));
  double r_lo = 0.8 * rb, r_hi = 0.92 * rb;
  double acc = 0.0;
  long cnt = 0;
  for (int i = 1; i + 1 < u.box.n; ++i)
    for (int j = 1; j + 1 < u.box.n; ++j) {
      double r = std::abs(u.box.point(i, j));
      if (r < r_lo || r > r_hi) continue;
      std::size_t idx = static_cast<std::size_t>(i) * u.box.n + j;
      if (p.on_k[idx] && u.values[idx] > p.psi[idx] - 1e-9) continue;
      acc += u.values[idx] - 2.0 * std::log(r);
      ++cnt;
    }
  if (cnt == 0) return 0.0;
  return acc / cnt;
}

inline PotentialGrid prolong(const PotentialGrid& coarse) {
  Box fb = coarse.box;
  fb.n = 2 * coarse.box.n - 1;
  PotentialGrid fine = make_grid(fb, coarse.kind);
  int nc = coarse.box.n;
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) {
      fine.at(2 * i, 2 * j) = coarse.at(i, j);
      if (i + 1 < nc) fine.at(2 * i + 1, 2 * j) = 0.5 * (coarse.at(i, j) + coarse.at(i + 1, j));
      if (j + 1 < nc) fine.at(2 * i, 2 * j + 1) = 0.5 * (coarse.at(i, j) + coarse.at(i, j + 1));
      if (i + 1 < nc && j + 1 < nc)
        fine.at(2 * i + 1, 2 * j + 1) =
            0.25 * (coarse.at(i, j) + coarse.at(i + 1, j) + coarse.at(i, j + 1) + coarse.at(i + 1, j + 1));
    }
  return fine;
}

}  // namespace detail

inline Envelope envelope_oracle(const Weight& w, const SupportMeasure& m, const Box& box,
                                const EnvelopeOptions& opt = {}) {
  if ((box.n - 1) % 2 != 0 && box.n < 51) throw ConfigError("envelope grid too coarse");

  // Coarse-to-fine ladder: halve the resolution while the node count stays odd
  // and usefully large, solve upward with prolongated warm starts.
  std::vector<int> sizes{box.n};
  while ((sizes.back() - 1) % 2 == 0 && (sizes.back() - 1) / 2 + 1 >= 51) sizes.push_back((sizes.back() - 1) / 2 + 1);
  std::reverse(sizes.begin(), sizes.end());

  Envelope result;
  PotentialGrid u;
  double f = 0.0;
  bool f_init = false;
  for (std::size_t level = 0; level < sizes.size(); ++level) {
    Box b = box;
    b.n = sizes[level];
    detail::ObstacleProblem prob = detail::obstacle_on(b, w, m);

    long k_count = 0, k_boundary = 0, boundary = 0;
    for (int i = 0; i < b.n; ++i)
      for (int j = 0; j < b.n; ++j) {
        std::size_t idx = static_cast<std::size_t>(i) * b.n + j;
        k_count += prob.on_k[idx];
        if (i == 0 || j == 0 || i == b.n - 1 || j == b.n - 1) {
          ++boundary;
          k_boundary += prob.on_k[idx];
        }
      }
    if (k_count == 0) throw ConfigError("support of the measure misses the grid entirely");
    bool obstacle_boundary = (k_boundary == boundary);

    if (!f_init) {
      // Starting guess for the growth constant: the radial models attain it at
      // the contact circle, so min over support nodes of psi - 2 log|z|.
      double best = 0.0;
      bool found = false;
      for (int i = 0; i < b.n; ++i)
        for (int j = 0; j < b.n; ++j) {
          std::size_t idx = static_cast<std::size_t>(i) * b.n + j;
          double r = std::abs(b.point(i, j));
          if (!prob.on_k[idx] || r < 0.5) continue;
          double cand = prob.psi[idx] - 2.0 * std::log(r);
          if (!found || cand < best) best = cand, found = true;
        }
      f = found ? best : 0.0;
      f_init = true;
    }

    if (level == 0) {
      u = make_grid(b, "envelope");
      for (int i = 0; i < b.n; ++i)
        for (int j = 0; j < b.n; ++j) {
          std::size_t idx = static_cast<std::size_t>(i) * b.n + j;
          double v = 2.0 * std::log(std::max(std::abs(b.point(i, j)), 1e-3)) + f;
          u.at(i, j) = prob.on_k[idx] ? std::min(v, prob.psi[idx]) : v;
        }
    } else {
      u = detail::prolong(u);
      for (std::size_t idx = 0; idx < u.values.size(); ++idx)
        if (prob.on_k[idx] && u.values[idx] > prob.psi[idx]) u.values[idx] = prob.psi[idx];
    }

    // The growth constant is a fixed point of f -> ring_average(solve(f)); the
    // map is affine away from contact-set changes, so secant acceleration
    // reaches the fixed point in a handful of solves where plain iteration
    // contracts too slowly on a box this tight.
    bool have_prev = false;
    double f_prev = 0.0, m_prev = 0.0;
    for (int outer = 0; outer < opt.max_outer; ++outer) {
      detail::apply_boundary(u, prob, f, obstacle_boundary);
      result.final_update = detail::psor(u, prob, opt, result.total_sweeps);
      if (obstacle_boundary) break;
      double m_f = detail::ring_average(u, prob);
      double resid = std::abs(m_f - f);
      if (resid < opt.far_field_tol) break;
      if (outer + 1 == opt.max_outer)
        throw SolverError("far-field constant did not settle (residual " + std::to_string(resid) + ")", resid);
      double f_next = m_f;
      if (have_prev && std::abs(f - f_prev) > 1e-15) {
        double rho = (m_f - m_prev) / (f - f_prev);
        if (std::abs(1.0 - rho) > 1e-6) f_next = (m_f - rho * f) / (1.0 - rho);
      }
      f_prev = f;
      m_prev = m_f;
      have_prev = true;
      f = f_next;
    }
    if (!(result.final_update < opt.sor_tol))
      throw SolverError("obstacle solver stalled, last update " + std::to_string(result.final_update),
                        result.final_update);

    if (level + 1 == sizes.size()) {
      result.grid = std::move(u);
      result.on_k = std::move(prob.on_k);
      result.robin_f = f;
      result.obstacle_boundary = obstacle_boundary;
    }
  }
  return result;
}

// Equilibrium measure extracted from the envelope: density kappa * Laplacian
// on the contact set, plus the rim of cells where the distributional part of
// the Laplacian lands when the contact set has empty interior.
struct EquilibriumMeasure {
  PotentialGrid density;  // renormalized to total mass 1
  std::vector<std::uint8_t> mask;
  double total_mass_raw = 0.0;
  double total_mass = 0.0;
  double coincidence_tol = 0.0;
};

inline EquilibriumMeasure equilibrium_measure(const Envelope& env, const Weight& w, double coincidence_tol = -1.0) {
  const PotentialGrid& u = env.grid;
  int n = u.box.n;
  double h = u.box.h();

  if (coincidence_tol <= 0.0) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t idx = 0; idx < env.on_k.size(); ++idx) {
      if (!env.on_k[idx]) continue;
      double v = w.eval(u.box.point(static_cast<int>(idx) / n, static_cast<int>(idx) % n));
      if (first) lo = hi = v, first = false;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    coincidence_tol = std::max(1e-3 * (hi - lo), 1e-7);
  }

  PotentialGrid raw = make_grid(u.box, "density");
  double raw_max = 0.0;
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) {
      raw.at(i, j) = kLaplacianMassConstant * laplacian5(u, i, j);
      raw_max = std::max(raw_max, raw.at(i, j));
    }
  double neg_floor = -1e-3 * raw_max;
  for (double v : raw.values)
    if (v < neg_floor)
      throw SolverError("equilibrium density significantly negative (" + std::to_string(v) + ")", -v);

  std::vector<std::uint8_t> coincide(raw.values.size(), 0), mask(raw.values.size(), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * n + j;
      if (!env.on_k[idx]) continue;
      cplx z = u.box.point(i, j);
      if (std::abs(w.eval(z) - u.at(i, j)) < coincidence_tol) coincide[idx] = 1;
    }
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * n + j;
      if (coincide[idx] && w.laplacian(u.box.point(i, j)) > 0.0) mask[idx] = 1;
      if (!mask[idx] && raw.values[idx] > 1e-3 * raw_max) {
        // Rim rule: keep cells carrying real Laplacian mass next to the
        // contact set (singular part supported on a curve).
        if (coincide[idx] || coincide[idx - 1] || coincide[idx + 1] || coincide[idx - n] || coincide[idx + n])
          mask[idx] = 1;
      }
    }

  EquilibriumMeasure em;
  em.density = make_grid(u.box, "density");
  em.coincidence_tol = coincidence_tol;
  for (std::size_t idx = 0; idx < raw.values.size(); ++idx)
    if (mask[idx]) em.density.values[idx] = std::max(0.0, raw.values[idx]);
  em.mask = std::move(mask);
  double mass = 0.0;
  for (double v : em.density.values) mass += v;
  mass *= h * h;
  em.total_mass_raw = mass;
  if (!(mass > 0.0)) throw SolverError("equilibrium measure has no mass", 1.0);
  for (double& v : em.density.values) v /= mass;
  em.total_mass = 1.0;
  return em;
}

inline double integrate(const EquilibriumMeasure& em, const std::function<double(cplx)>& a) {
  double h = em.density.box.h(), acc = 0.0;
  int n = em.density.box.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = em.density.at(i, j);
      if (d != 0.0) acc += d * a(em.density.box.point(i, j));
    }
  return acc * h * h;
}

}  // namespace berglab
