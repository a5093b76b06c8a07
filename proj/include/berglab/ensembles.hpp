#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "berglab/bergman.hpp"
#include "berglab/rng.hpp"
#include "berglab/space.hpp"

namespace berglab {

struct RandomSection {
  Eigen::VectorXcd coeffs;  // in the ONB of the space
  std::string ensemble_tag;
  SeedProvenance seed;
};

// iid standard complex Gaussian coefficients: E c_j conj(c_k) = delta_jk.
inline RandomSection sample_gaussian(int dim, Pcg64& rng, const SeedProvenance& prov) {
  RandomSection s;
  s.coeffs.resize(dim);
  for (int j = 0; j < dim; ++j) s.coeffs[j] = rng.gaussian();
  s.ensemble_tag = "gaussian";
  s.seed = prov;
  return s;
}

// Uniform on the unit sphere of coefficient space: E c_j conj(c_k) = delta_jk / dim.
inline RandomSection sample_spherical(int dim, Pcg64& rng, const SeedProvenance& prov) {
  RandomSection s = sample_gaussian(dim, rng, prov);
  double nrm = s.coeffs.norm();
  while (nrm == 0.0) {  // probability zero, but keep the sphere exact
    s = sample_gaussian(dim, rng, prov);
    nrm = s.coeffs.norm();
  }
  s.coeffs /= nrm;
  s.ensemble_tag = "spherical";
  return s;
}

struct HaarFrame {
  Eigen::MatrixXcd U;
  SeedProvenance seed;
};

// Haar unitary via QR of a Ginibre matrix with the phase convention that makes
// the factorization unique (diagonal of R rotated positive).
inline HaarFrame sample_haar(int dim, Pcg64& rng, const SeedProvenance& prov) {
  Eigen::MatrixXcd G(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) G(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    cplx r = R(j, j);
    double a = std::abs(r);
    Q.col(j) *= a > 0.0 ? r / a : cplx(1.0, 0.0);
  }
  return {std::move(Q), prov};
}

struct MassCheckPoint {
  cplx z;
  double target = 0.0;    // Pi_N(z) for gaussian, Pi_N(z)/dim for spherical
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  bool flagged = false;   // |mc_mean - target| beyond 4 standard errors
};

// Monte Carlo check of the expected pointwise mass E |s(z)|^2 e^{-N phi(z)}.
inline std::vector<MassCheckPoint> expected_mass_check(const WeightedSpace& s, const std::string& ensemble,
                                                       const std::vector<cplx>& points, int n_samples, Pcg64& rng,
                                                       const SeedProvenance& prov) {
  bool spherical = ensemble == "spherical";
  if (!spherical && ensemble != "gaussian") throw ConfigError("unknown ensemble: " + ensemble);

  std::vector<MassCheckPoint> out(points.size());
  std::vector<std::vector<XCplx>> fvals(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    out[p].z = points[p];
    fvals[p] = onb_values_at(s, points[p]);
    out[p].target = bergman_density(s, points[p]) / (spherical ? s.dim : 1);
  }

  std::vector<double> sum(points.size(), 0.0), sum2(points.size(), 0.0);
  for (int k = 0; k < n_samples; ++k) {
    RandomSection sec = spherical ? sample_spherical(s.dim, rng, prov) : sample_gaussian(s.dim, rng, prov);
    for (std::size_t p = 0; p < points.size(); ++p) {
      XCplx acc{0.0L, 0.0L};
      for (int j = 0; j < s.dim; ++j) acc = xmadd(acc, fvals[p][j], xc(sec.coeffs[j]));
      double mass = static_cast<double>(xabs2(acc)) * std::exp(-s.N * s.weight.eval(points[p]));
      sum[p] += mass;
      sum2[p] += mass * mass;
    }
  }
  for (std::size_t p = 0; p < points.size(); ++p) {
    double mean = sum[p] / n_samples;
    double var = std::max(0.0, sum2[p] / n_samples - mean * mean);
    double se = std::sqrt(var / n_samples);
    out[p].mc_mean = mean;
    out[p].mc_stderr = se;
    out[p].flagged = std::abs(mean - out[p].target) > 4.0 * se;
  }
  return out;
}

}  // namespace berglab
