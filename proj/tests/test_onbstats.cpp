#include <catch2/catch_amalgamated.hpp>

#include "berglab/models.hpp"
#include "berglab/toeplitz.hpp"

using namespace berglab;

TEST_CASE("unit symbol gives the identity operator") {
  for (ModelContext m : {flat_circle_model(), gaussian_disk_model()}) {
    WeightedSpace s = m.space_for(12);
    Eigen::MatrixXcd T = toeplitz_matrix(s, [](cplx) { return 1.0; });
    CHECK((T - Eigen::MatrixXcd::Identity(s.dim, s.dim)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("circle cosine symbol compresses to the tridiagonal half-shift") {
  WeightedSpace s = flat_circle_model().space_for(10);
  Eigen::MatrixXcd T = toeplitz_matrix(s, [](cplx z) { return z.real(); });
  for (int j = 0; j < s.dim; ++j)
    for (int k = 0; k < s.dim; ++k) {
      double expect = std::abs(j - k) == 1 ? 0.5 : 0.0;
      CHECK(std::abs(T(j, k) - expect) < 1e-13);
    }
}

TEST_CASE("signed symbols stay hermitian through the split factorization") {
  WeightedSpace s = gaussian_disk_model().space_for(9);
  Eigen::MatrixXcd T = toeplitz_matrix(s, [](cplx z) { return z.real(); });  // changes sign on the disk
  CHECK((T - T.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T);
  CHECK(es.eigenvalues().minCoeff() >= -3.0 - 1e-10);  // spectrum inside the symbol range
  CHECK(es.eigenvalues().maxCoeff() <= 3.0 + 1e-10);
}

TEST_CASE("szego traces converge to the equilibrium averages on the circle") {
  ModelContext m = flat_circle_model();
  Envelope env = model_envelope(m);
  EquilibriumMeasure eq = equilibrium_measure(env, m.weight);
  auto g = [](cplx z) { return 0.5 * (1.0 + z.real()); };
  WeightedSpace s = m.space_for(32);
  SzegoTraces tr = szego_traces(s, g, eq);
  // Against the exact circle averages: tau = 1/2, tau(g^2) = 3/8.
  CHECK(tr.trace1 == Catch::Approx(0.5).margin(0.02));
  CHECK(tr.trace2 == Catch::Approx(0.375).margin(0.03));
  CHECK(tr.tau1 == Catch::Approx(0.5).margin(0.02));
  CHECK(tr.tau2 == Catch::Approx(0.375).margin(0.03));
}

TEST_CASE("orbit expectation closes over frozen spectra") {
  CHECK(orbit_expected_y({2.0, 0.0, -1.0}) == Catch::Approx(7.0 / 6.0).epsilon(1e-14));
  CHECK(orbit_expected_y({1.0, -1.0}) == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(orbit_expected_y({5.0}) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("haar monte carlo matches the closed-form orbit integral") {
  Pcg64 rng = rng_for_task(123, 0);
  SeedProvenance prov{Pcg64::name(), 123, 0};
  OrbitCheck oc = orbit_integral_check({2.0, 0.0, -1.0}, 30000, rng, prov);
  CHECK(oc.closed_form == Catch::Approx(7.0 / 6.0).epsilon(1e-14));
  CHECK(std::abs(oc.mc_mean - oc.closed_form) <= 4.0 * oc.mc_stderr);
  CHECK(oc.mc_stderr < 0.02);

  Pcg64 rng1 = rng_for_task(123, 1);
  OrbitCheck trivial = orbit_integral_check({3.0}, 100, rng1, prov);
  CHECK(std::abs(trivial.closed_form) < 1e-14);
  CHECK(std::abs(trivial.mc_mean) < 1e-12);
}

TEST_CASE("y statistic counts diagonal spread around the normalized trace") {
  Eigen::MatrixXcd T = Eigen::Vector3cd(1.0, 2.0, 3.0).asDiagonal();
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(3, 3);
  CHECK(y_statistic(T, U) == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("haar-rotated diagonals concentrate like the orbit formula predicts") {
  ModelContext m = flat_circle_model();
  Envelope env = model_envelope(m);
  EquilibriumMeasure eq = equilibrium_measure(env, m.weight);
  WeightedSpace s = m.space_for(16);
  auto g = [](cplx z) { return 0.5 * (1.0 + z.real()); };
  ErgodicReport rep = ergodic_property_experiment(s, g, eq, 400, 0.2, 2024, 0);

  Eigen::MatrixXcd T = toeplitz_matrix(s, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T);
  std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + s.dim);
  double closed = orbit_expected_y(lam);
  CHECK(std::abs(rep.y_mean - closed) <= 5.0 * rep.y_stderr);
  CHECK(rep.y_over_d == Catch::Approx(rep.y_mean / s.dim));
  SzegoTraces tr = szego_traces(s, g, eq);
  CHECK(rep.y_target == Catch::Approx(tr.tau2 - tr.tau1 * tr.tau1).epsilon(1e-12));
  CHECK(rep.density_one_fraction >= 0.0);
  CHECK(rep.density_one_fraction <= 1.0);
  CHECK(rep.N == 16);
}
