#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "berglab/bergman.hpp"
#include "berglab/envelope.hpp"
#include "berglab/space.hpp"

namespace berglab {

struct ExtremalResult {
  double value = 0.0;       // Phi_N(z), geometric midpoint of the certified bracket
  double value_low = 0.0;   // certified lower end (from the best primal iterate)
  double value_high = 0.0;  // certified upper end (from the best dual design)
  int iterations = 0;
  double gap = 0.0;         // relative bracket width at termination
};

// Sup-node extremal density: Phi_N(z) = sup { |s(z)|^2 e^{-N phi(z)} } over
// sections with max_i |s(z_i)|^2 e^{-N phi(z_i)} <= 1. Computed as a Chebyshev
// problem (minimize the max weighted node modulus subject to s(z) = 1) by
// Lawson iteratively reweighted least squares; every primal iterate bounds the
// optimum from above and every dual design value from below, so the returned
// bracket is certified even when the iteration itself keeps wandering. Points
// in the bulk are degenerate (a continuum of active nodes) and typically stop
// on the loose bracket rather than the tight one.
inline ExtremalResult phi_extremal_sup(const WeightedSpace& s, cplx z, double tol = 1e-6, int max_iters = 2000,
                                       double loose_tol = 0.08) {
  std::size_t n = s.measure.nodes.size();
  int d = s.dim;

  // Rows a_i = sqrt(e^{-N phi(z_i)}) * (ONB values at node i), so |a_i . c| is
  // the weighted modulus of the section at node i.
  Eigen::MatrixXcd A(n, d);
  for (std::size_t i = 0; i < n; ++i) A.row(i) = std::sqrt(s.expw[i]) * s.node_onb.row(i);

  // The interpolation constraint s(z) = sum_j c_j f_j(z) = 1 reads
  // conj(ell)^H c = 1 with ell_j = f_j(z).
  std::vector<XCplx> fz = onb_values_at(s, z);
  Eigen::VectorXcd ell(d);
  for (int j = 0; j < d; ++j) ell[j] = {static_cast<double>(fz[j].re), -static_cast<double>(fz[j].im)};

  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::MatrixXcd B(n, d);
  double primal_best = std::numeric_limits<double>::infinity();
  double dual_best = 0.0;
  double bracket = 1.0;
  int it = 0;
  for (; it < max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) B.row(i) = std::sqrt(lambda[i]) * A.row(i);
    Eigen::MatrixXcd M = B.adjoint() * B;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(M);
    Eigen::VectorXcd Minv_ell = ldlt.solve(ell);
    cplx denom = ell.dot(Minv_ell);  // ell^H M^{-1} ell, real positive
    Eigen::VectorXcd c = Minv_ell / denom;

    Eigen::VectorXd r = (A * c).cwiseAbs();
    double max_r = r.maxCoeff();
    double mean_r = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_r += lambda[i] * r[i] * r[i];
    mean_r = std::sqrt(mean_r);
    primal_best = std::min(primal_best, max_r);
    dual_best = std::max(dual_best, mean_r);
    bracket = (primal_best - dual_best) / std::max(primal_best, 1e-300);
    if (bracket < tol) break;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lambda[i] *= r[i];
      total += lambda[i];
    }
    lambda /= total;
  }
  if (!(bracket < tol) && !(bracket <= loose_tol))
    throw SolverError("extremal bracket stalled at width " + std::to_string(bracket), bracket);

  ExtremalResult out;
  double front = std::exp(-s.N * s.weight.eval(z));
  out.value_low = front / (primal_best * primal_best);
  out.value_high = front / (dual_best * dual_best);
  out.value = front / (primal_best * dual_best);
  out.iterations = it + 1;
  out.gap = bracket;
  return out;
}

struct RoutePoint {
  int N = 0;
  double sup_error = 0.0;
};

// Agreement between the obstacle-problem route and the kernel route:
// sup over grid nodes with |z| <= r_sub of |envelope - (1/N) log B_N|.
inline std::vector<RoutePoint> compare_routes(const Weight& w, const std::string& measure_kind, int resolution,
                                              const std::vector<double>& measure_params, const Box& box,
                                              const std::vector<int>& degrees, double r_sub, int workers = 1) {
  SupportMeasure base = measure_for_degree(measure_kind, resolution, 0, measure_params);
  Envelope env = envelope_oracle(w, base, box);
  std::vector<RoutePoint> out;
  for (int N : degrees) {
    WeightedSpace s = make_space(N, w, measure_for_degree(measure_kind, resolution, N, measure_params));
    PotentialGrid lb = log_bergman_grid(s, box, workers);
    out.push_back({N, sup_error_on_disk(env.grid, lb, r_sub)});
  }
  return out;
}

}  // namespace berglab
