#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "berglab/bergman.hpp"
#include "berglab/dictionary.hpp"
#include "berglab/envelope.hpp"
#include "berglab/ensembles.hpp"
#include "berglab/toeplitz.hpp"

namespace berglab {

struct QEReport {
  int N = 0;
  std::string section_id;
  double qe_defect = 0.0;
  double l1_error = 0.0;
  long l1_excluded = 0;              // grid nodes skipped for exact zeros of the section
  std::vector<double> mass_stats;    // X_N^a per dictionary element
};

// Precomputed pairing data: node values of every dictionary element (with the
// quadrature weights folded in) and the equilibrium-side integrals.
struct QEContext {
  const WeightedSpace* space = nullptr;
  Eigen::MatrixXd dict_nodes;  // dict.size() x node count, entry = a_k(z_i) w_i
  std::vector<double> tau;     // integral of a_k against the equilibrium measure
  std::vector<std::string> names;
};

inline QEContext make_qe_context(const WeightedSpace& s, const TestDictionary& dict, const EquilibriumMeasure& eq) {
  QEContext ctx;
  ctx.space = &s;
  std::size_t n = s.measure.nodes.size();
  ctx.dict_nodes.resize(static_cast<Eigen::Index>(dict.size()), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < dict.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i)
      ctx.dict_nodes(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          dict[k].fn(s.measure.nodes[i]) * s.measure.weights[i];
    ctx.tau.push_back(integrate(eq, dict[k].fn));
    ctx.names.push_back(dict[k].name);
  }
  return ctx;
}

// Normalized node masses |s(z_i)|^2 e^{-N phi(z_i)} / ||s||^2 of one section.
inline Eigen::VectorXd node_masses(const WeightedSpace& s, const Eigen::VectorXcd& c) {
  Eigen::VectorXcd at_nodes = s.node_onb * c;
  double norm2 = c.squaredNorm();
  Eigen::VectorXd mass(at_nodes.size());
  for (Eigen::Index i = 0; i < at_nodes.size(); ++i) mass[i] = std::norm(at_nodes[i]) * s.expw[i] / norm2;
  return mass;
}

// Max over the dictionary of |integral of a against |s|^2 dnu - integral of a
// against the equilibrium measure|; fills the X_N^a column as a side effect.
inline double qe_defect(const QEContext& ctx, const Eigen::VectorXcd& c, std::vector<double>* mass_stats = nullptr) {
  Eigen::VectorXd mass = node_masses(*ctx.space, c);
  Eigen::VectorXd x = ctx.dict_nodes * mass;
  double worst = 0.0;
  if (mass_stats) mass_stats->assign(x.data(), x.data() + x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(x[k] - ctx.tau[static_cast<std::size_t>(k)]));
  return worst;
}

struct L1Error {
  double value = 0.0;
  long excluded = 0;
};

// || u_N - phi_eq ||_{L^1} with the box area normalized to 1. Nodes where the
// section vanishes exactly (potential is -infinity) are excluded and counted.
inline L1Error l1_potential_error(const WeightedSpace& s, const Eigen::VectorXcd& c, const Envelope& env,
                                  int workers = 1) {
  Eigen::VectorXcd cn = c / c.norm();
  PotentialGrid u = section_potential_grid(s, cn, env.grid.box, workers);
  L1Error out;
  double acc = 0.0;
  long used = 0;
  for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
    if (!std::isfinite(u.values[idx])) {
      ++out.excluded;
      continue;
    }
    acc += std::abs(u.values[idx] - env.grid.values[idx]);
    ++used;
  }
  out.value = used > 0 ? acc / used : 0.0;
  return out;
}

struct GMomentResult {
  double mc = 0.0;
  double mc_stderr = 0.0;
  double target = 0.0;  // 1 + cos^2 theta
};

// Pair-moment law for jointly Gaussian complex scalars with correlation
// cos theta: E |Y1|^2 |Y2|^2 = 1 + cos^2 theta.
inline GMomentResult g_moment_mc(double cos_theta, long n_samples, Pcg64& rng) {
  if (cos_theta < 0.0 || cos_theta > 1.0) throw ConfigError("cos theta must lie in [0, 1]");
  double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  double sum = 0.0, sum2 = 0.0;
  for (long k = 0; k < n_samples; ++k) {
    cplx x1 = rng.gaussian();
    cplx x2 = cos_theta * x1 + sin_theta * rng.gaussian();
    double v = std::norm(x1) * std::norm(x2);
    sum += v;
    sum2 += v * v;
  }
  GMomentResult out;
  out.mc = sum / n_samples;
  double var = std::max(0.0, sum2 / n_samples - out.mc * out.mc);
  out.mc_stderr = std::sqrt(var / n_samples);
  out.target = 1.0 + cos_theta * cos_theta;
  return out;
}

struct VarianceXnReport {
  std::string ensemble;
  double mc_mean = 0.0, mc_mean_stderr = 0.0;
  double mc_second = 0.0, mc_second_stderr = 0.0;
  double target_mean = 0.0;    // trace formula for the ensemble
  double target_second = 0.0;  // trace formula for the ensemble
  double tau_limit = 0.0;      // integral of a against the equilibrium measure
};

// Moments of X_N^a = <s, T^a s> (/ ||s||^2 for the spherical ensemble) against
// the exact finite-N formulas: spherical E X = trM/d, E X^2 = ((trM)^2 +
// tr M^2)/(d(d+1)); Gaussian E X = trM, E X^2 = (trM)^2 + tr M^2.
inline VarianceXnReport variance_xn_experiment(const WeightedSpace& s, const DictionaryElement& el,
                                               const EquilibriumMeasure& eq, const std::string& ensemble,
                                               int n_samples, std::uint64_t master_seed, std::uint64_t task_base) {
  bool spherical = ensemble == "spherical";
  if (!spherical && ensemble != "gaussian") throw ConfigError("unknown ensemble: " + ensemble);
  Eigen::MatrixXcd M = toeplitz_matrix(s, el.fn);
  double tr1 = M.trace().real();
  double tr2 = (M * M).trace().real();
  double d = static_cast<double>(s.dim);

  VarianceXnReport rep;
  rep.ensemble = ensemble;
  rep.tau_limit = integrate(eq, el.fn);
  rep.target_mean = spherical ? tr1 / d : tr1;
  rep.target_second = spherical ? (tr1 * tr1 + tr2) / (d * (d + 1.0)) : tr1 * tr1 + tr2;

  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    Pcg64 rng = rng_for_task(master_seed, task_base + static_cast<std::uint64_t>(k));
    SeedProvenance prov{Pcg64::name(), master_seed, task_base + static_cast<std::uint64_t>(k)};
    RandomSection sec = spherical ? sample_spherical(s.dim, rng, prov) : sample_gaussian(s.dim, rng, prov);
    double x = (sec.coeffs.adjoint() * M * sec.coeffs)(0).real();
    s1 += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  rep.mc_mean = s1 / n_samples;
  rep.mc_second = s2 / n_samples;
  double var1 = std::max(0.0, s2 / n_samples - rep.mc_mean * rep.mc_mean);
  double var2 = std::max(0.0, s4 / n_samples - rep.mc_second * rep.mc_second);
  rep.mc_mean_stderr = std::sqrt(var1 / n_samples);
  rep.mc_second_stderr = std::sqrt(var2 / n_samples);
  return rep;
}

struct DoubleQuadrature {
  double value = 0.0;
  bool subsampled = false;
  double subsample_error = 0.0;  // spread between strides, crude error gauge
};

// Literal double quadrature sum_{i,l} w_i w_l a(z_i) a(z_l) |B_N(z_i,z_l)|^2
// e^{-N(phi_i+phi_l)}, capped at ~4e8 kernel evaluations; beyond the cap the
// node set is strided and reweighted.
inline DoubleQuadrature kernel_double_quadrature(const WeightedSpace& s, const std::function<double(cplx)>& a,
                                                 double max_pairs = 4e8) {
  std::size_t n = s.measure.nodes.size();
  long stride = 1;
  while (static_cast<double>(n / static_cast<std::size_t>(stride)) * static_cast<double>(n / static_cast<std::size_t>(stride)) >
         max_pairs)
    ++stride;

  auto run = [&](long str, long offset) {
    std::vector<std::size_t> pick;
    for (std::size_t i = static_cast<std::size_t>(offset); i < n; i += static_cast<std::size_t>(str)) pick.push_back(i);
    double wsum_all = 0.0, wsum_pick = 0.0;
    for (std::size_t i = 0; i < n; ++i) wsum_all += s.measure.weights[i];
    for (std::size_t i : pick) wsum_pick += s.measure.weights[i];
    double scale = wsum_all / wsum_pick;
    double acc = 0.0;
    for (std::size_t ii = 0; ii < pick.size(); ++ii) {
      std::size_t i = pick[ii];
      double wi = s.measure.weights[i] * a(s.measure.nodes[i]) * s.expw[i] * scale;
      if (wi == 0.0) continue;
      for (std::size_t ll = 0; ll < pick.size(); ++ll) {
        std::size_t l = pick[ll];
        double wl = s.measure.weights[l] * a(s.measure.nodes[l]) * s.expw[l] * scale;
        if (wl == 0.0) continue;
        cplx b = s.node_onb.row(i).conjugate().dot(s.node_onb.row(l).conjugate());  // B(z_i, z_l)
        acc += wi * wl * std::norm(b);
      }
    }
    return acc;
  };

  DoubleQuadrature out;
  out.value = run(stride, 0);
  if (stride > 1) {
    out.subsampled = true;
    double alt = run(stride, stride / 2);
    out.subsample_error = std::abs(alt - out.value);
  }
  return out;
}

// N^{-1} tr((T^a)^2); by the reproducing identity this equals the literal
// off-diagonal double quadrature of |B_N|^2 against a tensor a.
inline double offdiag_second_moment(const WeightedSpace& s, const std::function<double(cplx)>& a) {
  Eigen::MatrixXcd M = toeplitz_matrix(s, a);
  return (M * M).trace().real() / s.N;
}

struct QEConvergencePoint {
  int N = 0;
  double mean_defect = 0.0;
  double stderr_defect = 0.0;
  double mean_l1 = 0.0;
  long l1_excluded = 0;
  double control_defect = 0.0;  // qe defect of the concentrated top-monomial section
};

// Max dictionary defect of the density-of-states pairing:
// | sum_i w_i a(z_i) Pi_N(z_i) / d_N  -  integral of a d mu_eq |.
inline double dos_pairing_defect(const WeightedSpace& s, const TestDictionary& dict, const EquilibriumMeasure& eq) {
  std::size_t n = s.measure.nodes.size();
  std::vector<double> dos(n);
  for (std::size_t i = 0; i < n; ++i) dos[i] = s.measure.weights[i] * node_density(s, i) / s.dim;
  double worst = 0.0;
  for (const DictionaryElement& el : dict) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += dos[i] * el.fn(s.measure.nodes[i]);
    worst = std::max(worst, std::abs(acc - integrate(eq, el.fn)));
  }
  return worst;
}

// Sweep of the QE diagnostics over degrees: spherical samples for the mean
// defect and L1 potential error, plus the concentrated negative control.
inline std::vector<QEConvergencePoint> qe_convergence_experiment(
    const Weight& w, const std::string& measure_kind, int resolution, const std::vector<double>& measure_params,
    const std::vector<int>& degrees, int samples, const TestDictionary& dict, const EquilibriumMeasure& eq,
    const Envelope& env, bool with_l1, std::uint64_t master_seed) {
  std::vector<QEConvergencePoint> out;
  std::uint64_t task = 0;
  for (int N : degrees) {
    WeightedSpace s = make_space(N, w, measure_for_degree(measure_kind, resolution, N, measure_params));
    QEContext ctx = make_qe_context(s, dict, eq);
    QEConvergencePoint pt;
    pt.N = N;
    double sum = 0.0, sum2 = 0.0, l1sum = 0.0;
    for (int k = 0; k < samples; ++k) {
      Pcg64 rng = rng_for_task(master_seed, task);
      SeedProvenance prov{Pcg64::name(), master_seed, task};
      ++task;
      RandomSection sec = sample_spherical(s.dim, rng, prov);
      double defect = qe_defect(ctx, sec.coeffs);
      sum += defect;
      sum2 += defect * defect;
      if (with_l1) {
        L1Error e = l1_potential_error(s, sec.coeffs, env);
        l1sum += e.value;
        pt.l1_excluded += e.excluded;
      }
    }
    pt.mean_defect = sum / samples;
    double var = std::max(0.0, sum2 / samples - pt.mean_defect * pt.mean_defect);
    pt.stderr_defect = std::sqrt(var / samples);
    pt.mean_l1 = with_l1 ? l1sum / samples : 0.0;

    Eigen::VectorXcd top = Eigen::VectorXcd::Zero(s.dim);
    top[s.dim - 1] = 1.0;
    pt.control_defect = qe_defect(ctx, top);
    out.push_back(pt);
  }
  return out;
}

}  // namespace berglab
