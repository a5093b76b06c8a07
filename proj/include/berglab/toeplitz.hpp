#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "berglab/envelope.hpp"
#include "berglab/ensembles.hpp"
#include "berglab/rng.hpp"
#include "berglab/space.hpp"

namespace berglab {

// Toeplitz (compression) operator of a real bounded symbol in the ONB:
// T_jk = sum_i w_i g(z_i) f_j(z_i) conj(f_k(z_i)) e^{-N phi(z_i)}.
inline Eigen::MatrixXcd toeplitz_matrix(const WeightedSpace& s, const std::function<double(cplx)>& g) {
  std::size_t n = s.measure.nodes.size();
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(s.dim, s.dim);
  const std::size_t chunk = 4096;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    Eigen::MatrixXcd F = s.node_onb.middleRows(lo, hi - lo);
    for (std::size_t i = lo; i < hi; ++i)
      F.row(i - lo) *= std::sqrt(s.measure.weights[i] * s.expw[i] * std::max(0.0, g(s.measure.nodes[i])));
    T.noalias() += F.adjoint() * F;
  }
  // Signed symbols cannot go through the square-root factorization; redo the
  // negative part and subtract.
  bool has_negative = false;
  for (std::size_t i = 0; i < n && !has_negative; ++i) has_negative = g(s.measure.nodes[i]) < 0.0;
  if (has_negative) {
    Eigen::MatrixXcd Tneg = Eigen::MatrixXcd::Zero(s.dim, s.dim);
    for (std::size_t lo = 0; lo < n; lo += chunk) {
      std::size_t hi = lo + chunk < n ? lo + chunk : n;
      Eigen::MatrixXcd F = s.node_onb.middleRows(lo, hi - lo);
      for (std::size_t i = lo; i < hi; ++i)
        F.row(i - lo) *= std::sqrt(s.measure.weights[i] * s.expw[i] * std::max(0.0, -g(s.measure.nodes[i])));
      Tneg.noalias() += F.adjoint() * F;
    }
    T -= Tneg;
  }
  return (T + T.adjoint().eval()) * 0.5;
}

struct SzegoTraces {
  double trace1 = 0.0;  // (1/d) tr T
  double trace2 = 0.0;  // (1/d) tr T^2
  double tau1 = 0.0;    // integral of g against the equilibrium measure
  double tau2 = 0.0;    // integral of g^2
};

inline SzegoTraces szego_traces(const WeightedSpace& s, const std::function<double(cplx)>& g,
                                const EquilibriumMeasure& eq) {
  Eigen::MatrixXcd T = toeplitz_matrix(s, g);
  SzegoTraces out;
  out.trace1 = T.trace().real() / s.dim;
  out.trace2 = (T * T).trace().real() / s.dim;
  out.tau1 = integrate(eq, g);
  out.tau2 = integrate(eq, [&](cplx z) { return sqr(g(z)); });
  return out;
}

// Diagonal fluctuation statistic of T in a rotated basis:
// Y = sum_j |(U^H T U)_jj - (tr T)/d|^2.
inline double y_statistic(const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& U) {
  int d = static_cast<int>(T.rows());
  cplx mean = T.trace() / static_cast<double>(d);
  Eigen::MatrixXcd TU = T * U;
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    cplx diag = U.col(j).dot(TU.col(j));  // (U^H T U)_jj
    acc += std::norm(diag - mean);
  }
  return acc;
}

// Haar average of Y in closed form: with S1 = sum of eigenvalues and
// S2 = sum of squares, E Y = S2/(d+1) - S1^2/(d(d+1)).
inline double orbit_expected_y(const std::vector<double>& eigenvalues) {
  double s1 = 0.0, s2 = 0.0;
  for (double l : eigenvalues) {
    s1 += l;
    s2 += l * l;
  }
  double d = static_cast<double>(eigenvalues.size());
  return s2 / (d + 1.0) - s1 * s1 / (d * (d + 1.0));
}

struct OrbitCheck {
  double closed_form = 0.0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
};

inline OrbitCheck orbit_integral_check(const std::vector<double>& eigenvalues, int draws, Pcg64& rng,
                                       const SeedProvenance& prov) {
  int d = static_cast<int>(eigenvalues.size());
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(d, d);
  for (int j = 0; j < d; ++j) T(j, j) = eigenvalues[static_cast<std::size_t>(j)];
  OrbitCheck out;
  out.closed_form = orbit_expected_y(eigenvalues);
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < draws; ++k) {
    HaarFrame f = sample_haar(d, rng, prov);
    double y = y_statistic(T, f.U);
    sum += y;
    sum2 += y * y;
  }
  out.mc_mean = sum / draws;
  double var = std::max(0.0, sum2 / draws - out.mc_mean * out.mc_mean);
  out.mc_stderr = std::sqrt(var / draws);
  return out;
}

struct ErgodicReport {
  int N = 0;
  double trace1 = 0.0, trace2 = 0.0, tau1 = 0.0, tau2 = 0.0;
  double y_mean = 0.0;          // MC mean of Y over Haar frames
  double y_stderr = 0.0;
  double y_over_d = 0.0;
  double y_target = 0.0;        // tau(g^2) - tau(g)^2
  double density_one_fraction = 0.0;  // fraction of rotated diagonal entries within band of tau(g)
};

// Haar-frame diagonal statistics of one Toeplitz operator.
inline ErgodicReport ergodic_property_experiment(const WeightedSpace& s, const std::function<double(cplx)>& g,
                                                 const EquilibriumMeasure& eq, int draws, double band,
                                                 std::uint64_t master_seed, std::uint64_t task_base) {
  Eigen::MatrixXcd T = toeplitz_matrix(s, g);
  SzegoTraces tr = szego_traces(s, g, eq);
  double mean_diag = T.trace().real() / s.dim;

  double sum = 0.0, sum2 = 0.0;
  long within = 0, total = 0;
  for (int k = 0; k < draws; ++k) {
    Pcg64 rng = rng_for_task(master_seed, task_base + static_cast<std::uint64_t>(k));
    SeedProvenance prov{Pcg64::name(), master_seed, task_base + static_cast<std::uint64_t>(k)};
    HaarFrame f = sample_haar(s.dim, rng, prov);
    Eigen::MatrixXcd TU = T * f.U;
    double y = 0.0;
    for (int j = 0; j < s.dim; ++j) {
      cplx diag = f.U.col(j).dot(TU.col(j));
      y += std::norm(diag - mean_diag);
      if (std::abs(diag - tr.tau1) <= band) ++within;
      ++total;
    }
    sum += y;
    sum2 += y * y;
  }
  ErgodicReport rep;
  rep.N = s.N;
  rep.trace1 = tr.trace1;
  rep.trace2 = tr.trace2;
  rep.tau1 = tr.tau1;
  rep.tau2 = tr.tau2;
  rep.y_mean = sum / draws;
  double var = std::max(0.0, sum2 / draws - rep.y_mean * rep.y_mean);
  rep.y_stderr = std::sqrt(var / draws);
  rep.y_over_d = rep.y_mean / s.dim;
  rep.y_target = tr.tau2 - tr.tau1 * tr.tau1;
  rep.density_one_fraction = static_cast<double>(within) / static_cast<double>(total);
  return rep;
}

}  // namespace berglab
