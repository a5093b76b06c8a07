#include <catch2/catch_amalgamated.hpp>

#include "berglab/models.hpp"
#include "berglab/qe.hpp"

using namespace berglab;

namespace {

struct Fixture {
  ModelContext model;
  Envelope env;
  EquilibriumMeasure eq;
  Fixture(ModelContext m) : model(std::move(m)), env(model_envelope(model)), eq(equilibrium_measure(env, model.weight)) {}
};

Fixture& circle_fixture() {
  static Fixture f(flat_circle_model());
  return f;
}

Fixture& disk_fixture() {
  static Fixture f(gaussian_disk_model());
  return f;
}

}  // namespace

TEST_CASE("node masses are a probability vector") {
  WeightedSpace s = disk_fixture().model.space_for(14);
  Pcg64 rng = rng_for_task(2, 0);
  SeedProvenance prov{Pcg64::name(), 2, 0};
  RandomSection sec = sample_gaussian(s.dim, rng, prov);
  Eigen::VectorXd mass = node_masses(s, sec.coeffs);
  double total = 0.0;
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    CHECK(mass[i] >= 0.0);
    total += mass[i] * s.measure.weights[static_cast<std::size_t>(i)];
  }
  CHECK(total == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("qe defect vanishes for sections whose mass is the node measure") {
  Fixture& f = circle_fixture();
  WeightedSpace s = f.model.space_for(16);
  TestDictionary dict = make_test_dictionary();
  QEContext ctx = make_qe_context(s, dict, f.eq);
  Eigen::VectorXcd top = Eigen::VectorXcd::Zero(s.dim);
  top[s.dim - 1] = 1.0;
  // |z^N| is constant on the circle, so its node mass is uniform: the defect
  // reduces to the grid-discretization gap between node and equilibrium measure.
  CHECK(qe_defect(ctx, top) < 0.05);

  std::vector<double> stats;
  qe_defect(ctx, top, &stats);
  CHECK(stats.size() == dict.size());
}

TEST_CASE("concentrated sections on the disk model are detected") {
  Fixture& f = disk_fixture();
  WeightedSpace s = f.model.space_for(16);
  TestDictionary dict = make_test_dictionary();
  QEContext ctx = make_qe_context(s, dict, f.eq);
  Eigen::VectorXcd top = Eigen::VectorXcd::Zero(s.dim);
  top[s.dim - 1] = 1.0;
  CHECK(qe_defect(ctx, top) > 0.2);  // the mass rings at |z| = 1 instead of filling the disk
}

TEST_CASE("l1 potential error excludes exact zeros and stays small for the kernel frame") {
  Fixture& f = circle_fixture();
  WeightedSpace s = f.model.space_for(40);
  Eigen::VectorXcd top = Eigen::VectorXcd::Zero(s.dim);
  top[s.dim - 1] = 1.0;
  L1Error e = l1_potential_error(s, top, f.env);
  CHECK(e.excluded <= 1);  // the production box does not hold the origin exactly
  // (1/N) log |z^N|^2 = 2 log |z| differs from 2 log+ |z| inside the disk; the
  // normalized-box mean of |2 log r| over the unit disk is pi/25.
  CHECK(e.value == Catch::Approx(kPi / 25.0).margin(0.02));

  // Exclusion of exact zeros, on a box whose spacing is a binary fraction so
  // the origin is a grid node, with the circle basis snapped to the monomials.
  WeightedSpace snap = f.model.space_for(6);
  snap.onb = Eigen::MatrixXcd::Identity(snap.dim, snap.dim);
  Eigen::VectorXcd top6 = Eigen::VectorXcd::Zero(snap.dim);
  top6[snap.dim - 1] = 1.0;
  Envelope closed;
  closed.grid = make_grid(Box{-2.0, 2.0, -2.0, 2.0, 257}, "envelope");
  for (int i = 0; i < 257; ++i)
    for (int j = 0; j < 257; ++j)
      closed.grid.at(i, j) = 2.0 * std::log(std::max(1.0, std::abs(closed.grid.box.point(i, j))));
  L1Error x = l1_potential_error(snap, top6, closed);
  CHECK(x.excluded == 1);
  // Normalized-box mean of |2 log r| over the unit disk inside [-2,2]^2 is pi/16.
  CHECK(x.value == Catch::Approx(kPi / 16.0).margin(0.02));

  Pcg64 rng = rng_for_task(44, 0);
  SeedProvenance prov{Pcg64::name(), 44, 0};
  RandomSection sec = sample_spherical(s.dim, rng, prov);
  L1Error r = l1_potential_error(s, sec.coeffs, f.env);
  CHECK(r.value < e.value);  // a typical section hugs the envelope tighter than the concentrated one
  CHECK(r.excluded <= 2);
}

TEST_CASE("pair-moment monte carlo reproduces one plus cosine squared") {
  for (double ct : {0.0, 0.5, 1.0}) {
    Pcg64 rng = rng_for_task(99, static_cast<std::uint64_t>(ct * 10));
    GMomentResult g = g_moment_mc(ct, 200000, rng);
    CHECK(g.target == Catch::Approx(1.0 + ct * ct));
    CHECK(std::abs(g.mc - g.target) <= 4.0 * g.mc_stderr);
    CHECK(g.mc_stderr < 0.02);
  }
  Pcg64 rng(1, 1);
  CHECK_THROWS_AS(g_moment_mc(1.5, 10, rng), ConfigError);
}

TEST_CASE("trace formulas predict the random-section observable moments") {
  Fixture& f = circle_fixture();
  WeightedSpace s = f.model.space_for(12);
  TestDictionary sym = szego_symbols("circle");
  const DictionaryElement& el = sym.front();
  for (const char* kind : {"spherical", "gaussian"}) {
    VarianceXnReport rep = variance_xn_experiment(s, el, f.eq, kind, 3000, 77, 0);
    CHECK(std::abs(rep.mc_mean - rep.target_mean) <= 4.0 * rep.mc_mean_stderr);
    CHECK(std::abs(rep.mc_second - rep.target_second) <= 4.0 * rep.mc_second_stderr);
    CHECK(rep.ensemble == kind);
  }
  // Spherical first moment tends to tau(g) as N grows.
  VarianceXnReport rep = variance_xn_experiment(f.model.space_for(48), el, f.eq, "spherical", 200, 78, 0);
  CHECK(std::abs(rep.target_mean - rep.tau_limit) < 0.02);
}

TEST_CASE("double quadrature agrees with the squared-operator trace") {
  Fixture& f = circle_fixture();
  WeightedSpace s = f.model.space_for(8);
  TestDictionary sym = szego_symbols("circle");
  const DictionaryElement& el = sym.front();
  DoubleQuadrature dq = kernel_double_quadrature(s, el.fn);
  CHECK_FALSE(dq.subsampled);
  double trace_route = offdiag_second_moment(s, el.fn) * s.N;
  CHECK(dq.value == Catch::Approx(trace_route).epsilon(1e-10));

  WeightedSpace sd = disk_fixture().model.space_for(6);
  TestDictionary dsym = szego_symbols("disk");
  DoubleQuadrature dqd = kernel_double_quadrature(sd, dsym.front().fn);
  CHECK(dqd.value == Catch::Approx(offdiag_second_moment(sd, dsym.front().fn) * sd.N).epsilon(1e-8));
}

TEST_CASE("cost guard strides the quadrature and reports its spread") {
  WeightedSpace s = disk_fixture().model.space_for(6);
  TestDictionary dsym = szego_symbols("disk");
  DoubleQuadrature exact = kernel_double_quadrature(s, dsym.front().fn);
  DoubleQuadrature strided = kernel_double_quadrature(s, dsym.front().fn, 1e5);
  CHECK(strided.subsampled);
  CHECK(strided.subsample_error >= 0.0);
  CHECK(std::abs(strided.value - exact.value) <= 0.25 * std::max(std::abs(exact.value), 1e-12));
}

TEST_CASE("unit symbol reduces the off-diagonal moment to dim over N") {
  WeightedSpace s = circle_fixture().model.space_for(16);
  double v = offdiag_second_moment(s, [](cplx) { return 1.0; });
  CHECK(v == Catch::Approx(17.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("density-of-states pairing tracks the equilibrium measure") {
  Fixture& fc = circle_fixture();
  TestDictionary dict = make_test_dictionary();
  CHECK(dos_pairing_defect(fc.model.space_for(48), dict, fc.eq) < 0.08);
  Fixture& fd = disk_fixture();
  CHECK(dos_pairing_defect(fd.model.space_for(48), dict, fd.eq) < 0.10);
}

TEST_CASE("qe convergence experiment fills every column") {
  Fixture& f = circle_fixture();
  TestDictionary dict = make_test_dictionary();
  std::vector<QEConvergencePoint> pts =
      qe_convergence_experiment(f.model.weight, f.model.measure_kind, f.model.resolution, f.model.measure_params,
                                {10, 20}, 8, dict, f.eq, f.env, false, 13);
  REQUIRE(pts.size() == 2);
  for (const QEConvergencePoint& p : pts) {
    CHECK(p.mean_defect > 0.0);
    CHECK(p.stderr_defect >= 0.0);
    CHECK(p.control_defect < 0.1);  // circle control stays flat (tested via l1 elsewhere)
    CHECK(p.mean_l1 == 0.0);
  }
  CHECK(pts[1].mean_defect < pts[0].mean_defect + 0.02);
}
