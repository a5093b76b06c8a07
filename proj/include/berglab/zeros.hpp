#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "berglab/bergman.hpp"
#include "berglab/dictionary.hpp"
#include "berglab/envelope.hpp"
#include "berglab/ensembles.hpp"
#include "berglab/space.hpp"

namespace berglab {

namespace detail {

// Radix-2 balancing (row/column 1-norm equalization by exact powers of two,
// so eigenvalues move only through improved conditioning).
inline void balance(Eigen::MatrixXcd& A) {
  int n = static_cast<int>(A.rows());
  bool again = true;
  while (again) {
    again = false;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0, s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s && f != 1.0) {
        again = true;
        A.col(i) *= f;
        A.row(i) /= f;
      }
    }
  }
}

inline cplx horner(const std::vector<cplx>& b, cplx z, cplx& deriv) {
  cplx p = b.back(), d = 0.0;
  for (int k = static_cast<int>(b.size()) - 2; k >= 0; --k) {
    d = d * z + p;
    p = p * z + b[static_cast<std::size_t>(k)];
  }
  deriv = d;
  return p;
}

}  // namespace detail

// All finite roots of sum a_k z^k, with multiplicity. Near-zero leading
// coefficients are trimmed (those roots escaped to infinity and are reported
// via the caller's deficit count); near-zero low-order coefficients become
// exact roots at the origin.
inline std::vector<cplx> poly_roots(const std::vector<cplx>& a) {
  double amax = 0.0;
  for (cplx v : a) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) throw ConfigError("cannot take roots of the zero polynomial");
  double cut = 1e-13 * amax;

  int hi = static_cast<int>(a.size()) - 1;
  while (hi > 0 && std::abs(a[static_cast<std::size_t>(hi)]) <= cut) --hi;
  int lo = 0;
  while (lo < hi && std::abs(a[static_cast<std::size_t>(lo)]) <= cut) ++lo;

  std::vector<cplx> roots(static_cast<std::size_t>(lo), cplx{0.0, 0.0});
  int m = hi - lo;
  if (m == 0) return roots;

  std::vector<cplx> b(a.begin() + lo, a.begin() + hi + 1);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) C(i + 1, i) = 1.0;
  for (int i = 0; i < m; ++i) C(i, m - 1) = -b[static_cast<std::size_t>(i)] / b[static_cast<std::size_t>(m)];
  detail::balance(C);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  if (es.info() != Eigen::Success) throw SolverError("companion eigensolver failed", 1.0);

  for (int i = 0; i < m; ++i) {
    cplx z = es.eigenvalues()[i];
    for (int step = 0; step < 3; ++step) {
      cplx d, p = detail::horner(b, z, d);
      if (std::abs(d) > 0.0) {
        cplx nz = z - p / d;
        if (std::isfinite(nz.real()) && std::isfinite(nz.imag())) z = nz;
      }
    }
    cplx d, p = detail::horner(b, z, d);
    double scale = 0.0, zp = 1.0, az = std::abs(z);
    for (std::size_t k = 0; k < b.size(); ++k) {
      scale += std::abs(b[k]) * zp;
      zp *= az;
    }
    if (!(std::abs(p) <= 1e-6 * scale))
      throw SolverError("root residual " + std::to_string(std::abs(p) / scale) + " too large", std::abs(p) / scale);
    roots.push_back(z);
  }
  return roots;
}

// Normalized zero counting measure of one section: atoms of mass 1/N, with the
// roots that left for infinity recorded as a mass deficit.
struct EmpiricalMeasure {
  std::vector<cplx> atoms;
  int N = 1;
  int deficit = 0;

  double atom_mass() const { return 1.0 / N; }
  double total_mass() const { return static_cast<double>(atoms.size()) / N; }
};

inline EmpiricalMeasure zeros_of_section(const WeightedSpace& s, const Eigen::VectorXcd& c) {
  Eigen::VectorXcd mono = s.onb * c;
  std::vector<cplx> a(mono.data(), mono.data() + mono.size());
  EmpiricalMeasure em;
  em.N = s.N;
  em.atoms = poly_roots(a);
  em.deficit = s.N - static_cast<int>(em.atoms.size());
  return em;
}

struct PairingReport {
  double max_defect = 0.0;
  std::vector<double> per_element;
};

// Weak-star distance of the zero measure (or an average of them) from the
// equilibrium measure, tested against the dictionary.
inline PairingReport pair_zero_measure(const std::vector<EmpiricalMeasure>& samples, const TestDictionary& dict,
                                       const EquilibriumMeasure& eq) {
  PairingReport rep;
  for (const DictionaryElement& el : dict) {
    double emp = 0.0;
    for (const EmpiricalMeasure& em : samples) {
      double acc = 0.0;
      for (cplx zeta : em.atoms) acc += el.fn(zeta);
      emp += acc / em.N;
    }
    emp /= static_cast<double>(samples.size());
    double defect = std::abs(emp - integrate(eq, el.fn));
    rep.per_element.push_back(defect);
    rep.max_defect = std::max(rep.max_defect, defect);
  }
  return rep;
}

// Density of the expected zero current: (1/4pi) discrete Laplacian of
// (1/N) log B_N, with a two-cell border band excluded where the stencil is
// polluted by the box cutoff.
inline PotentialGrid expected_zero_current(const WeightedSpace& s, const Box& box, int workers = 1) {
  PotentialGrid u = log_bergman_grid(s, box, workers);
  PotentialGrid out = make_grid(box, "density");
  for (int i = 2; i + 2 < box.n; ++i)
    for (int j = 2; j + 2 < box.n; ++j) out.at(i, j) = kLaplacianMassConstant * laplacian5(u, i, j);
  return out;
}

inline double grid_mass(const PotentialGrid& g) {
  double h = g.box.h(), acc = 0.0;
  for (double v : g.values) acc += v;
  return acc * h * h;
}

inline double grid_pair(const PotentialGrid& g, const std::function<double(cplx)>& a) {
  double h = g.box.h(), acc = 0.0;
  for (int i = 0; i < g.box.n; ++i)
    for (int j = 0; j < g.box.n; ++j)
      if (g.at(i, j) != 0.0) acc += g.at(i, j) * a(g.box.point(i, j));
  return acc * h * h;
}

struct ConvergencePoint {
  int N = 0;
  double mean_defect = 0.0;
  double stderr_defect = 0.0;
};

// Mean dictionary defect of single-sample zero measures across degrees.
inline std::vector<ConvergencePoint> zero_convergence_experiment(
    const Weight& w, const std::string& measure_kind, int resolution, const std::vector<double>& measure_params,
    const std::vector<int>& degrees, int samples, const TestDictionary& dict, const EquilibriumMeasure& eq,
    std::uint64_t master_seed) {
  std::vector<ConvergencePoint> out;
  std::uint64_t task = 0;
  for (int N : degrees) {
    WeightedSpace s = make_space(N, w, measure_for_degree(measure_kind, resolution, N, measure_params));
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < samples; ++k) {
      Pcg64 rng = rng_for_task(master_seed, task);
      SeedProvenance prov{Pcg64::name(), master_seed, task};
      ++task;
      RandomSection sec = sample_gaussian(s.dim, rng, prov);
      PairingReport rep = pair_zero_measure({zeros_of_section(s, sec.coeffs)}, dict, eq);
      sum += rep.max_defect;
      sum2 += rep.max_defect * rep.max_defect;
    }
    double mean = sum / samples;
    double var = std::max(0.0, sum2 / samples - mean * mean);
    out.push_back({N, mean, std::sqrt(var / samples)});
  }
  return out;
}

// Discrete residue identity defect for one section and one compactly
// supported observable: atoms paired directly vs the discrete Laplacian of
// (1/N) log |s|^2 paired through the grid.
inline double pl_defect(const WeightedSpace& s, const Eigen::VectorXcd& c, const DictionaryElement& el,
                        const Box& box) {
  EmpiricalMeasure em = zeros_of_section(s, c);
  double lhs = 0.0;
  for (cplx zeta : em.atoms) lhs += el.fn(zeta);
  lhs /= s.N;

  PotentialGrid u = section_potential_grid(s, c, box);
  double h = box.h(), rhs = 0.0;
  for (int i = 1; i + 1 < box.n; ++i)
    for (int j = 1; j + 1 < box.n; ++j) {
      double a = el.fn(box.point(i, j));
      if (a != 0.0) rhs += kLaplacianMassConstant * laplacian5(u, i, j) * a;
    }
  rhs *= h * h;
  return std::abs(lhs - rhs);
}

inline std::vector<double> radial_histogram(const std::vector<cplx>& atoms, double r_max, int bins) {
  std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
  for (cplx z : atoms) {
    double r = std::abs(z);
    if (r >= r_max) continue;
    h[static_cast<std::size_t>(r / r_max * bins)] += 1.0;
  }
  return h;
}

}  // namespace berglab
