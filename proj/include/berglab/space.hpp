#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "berglab/common.hpp"
#include "berglab/measure.hpp"
#include "berglab/weight.hpp"

namespace berglab {

// Monomial power matrix for a block of points: P(i, j) = z_i^j, j = 0..d-1.
inline Eigen::MatrixXcd power_matrix(const std::vector<cplx>& pts, std::size_t lo, std::size_t hi, int dim) {
  Eigen::MatrixXcd P(hi - lo, dim);
  for (std::size_t i = lo; i < hi; ++i) {
    cplx z = pts[i], p = 1.0;
    for (int j = 0; j < dim; ++j) {
      P(i - lo, j) = p;
      p *= z;
    }
  }
  return P;
}

// Weighted L2 space of degree-N polynomials: ||p||^2 = sum_i w_i |p(z_i)|^2 e^{-N phi(z_i)}.
struct WeightedSpace {
  int N = 0;
  int dim = 1;  // N + 1
  Weight weight;
  SupportMeasure measure;
  Eigen::VectorXd expw;    // e^{-N phi(z_i)} at nodes
  Eigen::MatrixXcd gram;   // G_jk = sum_i w_i z_i^j conj(z_i)^k e^{-N phi}
  Eigen::VectorXd scale;   // node norms of the monomials, sqrt(G_jj)
  Eigen::MatrixXcd onb;    // upper-triangular C with C^H G C = I; empty until orthonormalize
  Eigen::MatrixXcd node_onb;  // ONB polynomial values at nodes (nodes x dim); filled by orthonormalize
  double conditioning = 1.0;  // condition number of the norm-scaled Gram

  bool orthonormalized() const { return onb.size() > 0; }
};

inline WeightedSpace gram(int N, const Weight& weight, const SupportMeasure& measure) {
  if (N < 0) throw ConfigError("degree must be >= 0");
  int dim = N + 1;
  std::size_t n = measure.nodes.size();
  if (n < static_cast<std::size_t>(dim))
    throw ConfigError("measure has fewer nodes than the space dimension " + std::to_string(dim));
  if (measure.support_kind == SupportKind::circle && measure.angular_exactness < 2 * N + 1)
    throw ConfigError("circle rule exactness " + std::to_string(measure.angular_exactness) +
                      " below the 2N+1 = " + std::to_string(2 * N + 1) + " required for degree " + std::to_string(N));

  WeightedSpace s;
  s.N = N;
  s.dim = dim;
  s.weight = weight;
  s.measure = measure;
  s.expw.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double phi = weight.eval(measure.nodes[i]);
    if (!std::isfinite(phi)) throw ConfigError("weight not finite at a quadrature node");
    s.expw[i] = std::exp(-static_cast<double>(N) * phi);
  }

  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(dim, dim);
  const std::size_t chunk = 4096;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    Eigen::MatrixXcd V = power_matrix(measure.nodes, lo, hi, dim);
    for (std::size_t i = lo; i < hi; ++i)
      V.row(i - lo) *= std::sqrt(measure.weights[i] * s.expw[i]);
    G.noalias() += V.adjoint() * V;
  }
  G = (G + G.adjoint().eval()) * 0.5;

  // Scaling each monomial by its node norm removes the huge dynamic range a
  // strong weight induces across degrees; positivity is decided on the scaled
  // Gram, whose conditioning reflects the actual basis geometry.
  s.scale.resize(dim);
  for (int j = 0; j < dim; ++j) {
    double d = G(j, j).real();
    if (!(d > 0.0))
      throw ConditioningError("monomial of degree " + std::to_string(j) + " has zero node norm at degree " +
                                  std::to_string(N),
                              N, std::numeric_limits<double>::infinity());
    s.scale[j] = std::sqrt(d);
  }
  Eigen::MatrixXcd Gs = G;
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) Gs(j, k) /= s.scale[j] * s.scale[k];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gs, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 1e3 * std::numeric_limits<double>::epsilon() * lmax))
    throw ConditioningError("Gram matrix numerically singular at degree " + std::to_string(N) +
                                " (condition ~" + std::to_string(lmax / std::max(lmin, 1e-300)) + ")",
                            N, lmax / std::max(lmin, 1e-300));
  s.conditioning = lmax / lmin;
  s.gram = std::move(G);
  return s;
}

inline void orthonormalize(WeightedSpace& s) {
  Eigen::MatrixXcd Gs = s.gram;
  for (int j = 0; j < s.dim; ++j)
    for (int k = 0; k < s.dim; ++k) Gs(j, k) /= s.scale[j] * s.scale[k];
  Eigen::LLT<Eigen::MatrixXcd> llt(Gs);
  if (llt.info() != Eigen::Success)
    throw ConditioningError("Cholesky breakdown at degree " + std::to_string(s.N), s.N, s.conditioning);
  // C = D^{-1} L^{-H} with D the norm scaling, upper-triangular;
  // columns of (monomials) * C are orthonormal.
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(s.dim, s.dim);
  llt.matrixL().adjoint().solveInPlace<Eigen::OnTheLeft>(C);
  for (int j = 0; j < s.dim; ++j) C.row(j) /= s.scale[j];
  double defect = (C.adjoint() * s.gram * C - Eigen::MatrixXcd::Identity(s.dim, s.dim)).cwiseAbs().maxCoeff();
  if (!(defect <= 1e-8))
    throw ConditioningError("orthonormalization defect " + std::to_string(defect) + " at degree " + std::to_string(s.N),
                            s.N, s.conditioning);
  s.onb = std::move(C);

  std::size_t n = s.measure.nodes.size();
  s.node_onb.resize(n, s.dim);
  const std::size_t chunk = 4096;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    s.node_onb.middleRows(lo, hi - lo).noalias() = power_matrix(s.measure.nodes, lo, hi, s.dim) * s.onb;
  }
}

inline WeightedSpace make_space(int N, const Weight& weight, const SupportMeasure& measure) {
  WeightedSpace s = gram(N, weight, measure);
  orthonormalize(s);
  return s;
}

// Density of states at node i from cached ONB values.
inline double node_density(const WeightedSpace& s, std::size_t i) {
  return s.node_onb.row(i).squaredNorm() * s.expw[i];
}

// max over nodes of Pi_N(z)^{1/2}; by the extremal property this is the exact
// sup-node norm of the worst unit-norm section.
inline double bernstein_markov_ratio(const WeightedSpace& s) {
  double best = 0.0;
  for (std::size_t i = 0; i < s.measure.nodes.size(); ++i) best = std::max(best, node_density(s, i));
  return std::sqrt(best);
}

// Quadrature rules sized for a given degree: the circle rule must integrate
// z^j conj(z)^k exactly for |j-k| <= 2N; disk rules need angular exactness
// past 2N and enough radial nodes to resolve e^{-N phi}.
inline SupportMeasure measure_for_degree(const std::string& kind, int resolution, int N,
                                         const std::vector<double>& params = {}) {
  if (kind == "circle") {
    int n = std::max(resolution, 2 * N + 2);
    return measure_circle(params.empty() ? 1.0 : params[0], n);
  }
  int n_r = std::max(resolution, 3 * N + 8);
  int n_t = std::max(4 * resolution, 2 * N + 8);
  if (kind == "disk") return measure_disk(params.empty() ? 1.0 : params[0], n_r, n_t);
  if (kind == "annulus") {
    if (params.size() < 2) throw ConfigError("annulus measure needs radii r, R");
    return measure_annulus(params[0], params[1], n_r, n_t);
  }
  if (kind == "truncated_plane") {
    SupportMeasure m = measure_disk(params.empty() ? 3.0 : params[0], n_r, n_t);
    m.support_kind = SupportKind::truncated_plane;
    return m;
  }
  throw ConfigError("unknown measure kind: " + kind);
}

}  // namespace berglab
