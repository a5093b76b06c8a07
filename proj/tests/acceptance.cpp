// Acceptance gate: one pass/fail line per criterion, tolerances pinned below,
// nonzero exit when anything fails. Runs on a single core.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "berglab/berglab.hpp"

using namespace berglab;

namespace {

struct Gate {
  int failures = 0;

  void criterion(int id, const std::string& label, double limit_s, const std::function<bool(std::ostream&)>& body) {
    std::ostringstream detail;
    bool ok = false;
    auto t0 = std::chrono::steady_clock::now();
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail << " threw: " << e.what();
      ok = false;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit_s) {
      ok = false;
      detail << " [over runtime limit " << limit_s << "s]";
    }
    std::printf("[%s] criterion %2d: %s (%.1fs/%.0fs)%s\n", ok ? "PASS" : "FAIL", id, label.c_str(), secs, limit_s,
                detail.str().c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

constexpr std::uint64_t kSeed = 20260821;

std::vector<double> ramp_spectrum(int d) {
  std::vector<double> s(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) s[static_cast<std::size_t>(j)] = static_cast<double>(j + 1) / d;
  return s;
}

std::vector<double> alternating_spectrum(int d) {
  std::vector<double> s(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) s[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
  return s;
}

bool crit1_orbit(std::ostream& os) {
  bool ok = true;
  std::uint64_t task = 0;
  for (int d : {2, 3, 5}) {
    for (const auto& spec : {ramp_spectrum(d), alternating_spectrum(d)}) {
      Pcg64 rng = rng_for_task(kSeed, task);
      SeedProvenance prov{Pcg64::name(), kSeed, task};
      ++task;
      OrbitCheck oc = orbit_integral_check(spec, 100000, rng, prov);
      double rel = std::abs(oc.mc_mean - oc.closed_form) / std::max(std::abs(oc.closed_form), 1e-12);
      bool here = rel <= 0.01 && std::abs(oc.mc_mean - oc.closed_form) <= 3.0 * oc.mc_stderr;
      if (!here) {
        os << " d=" << d << " cf=" << oc.closed_form << " mc=" << oc.mc_mean << " rel=" << rel
           << " se=" << oc.mc_stderr;
        ok = false;
      }
    }
  }
  return ok;
}

bool crit2_gmoment(std::ostream& os) {
  bool ok = true;
  std::uint64_t task = 10;
  for (double ct : {0.0, 0.5, 1.0}) {
    Pcg64 rng = rng_for_task(kSeed, task++);
    GMomentResult g = g_moment_mc(ct, 1000000, rng);
    if (std::abs(g.mc - g.target) > 3.0 * g.mc_stderr) {
      os << " cos=" << ct << " mc=" << g.mc << " target=" << g.target << " se=" << g.mc_stderr;
      ok = false;
    }
  }
  return ok;
}

bool crit3_circle_routes(std::ostream& os) {
  ModelContext m = flat_circle_model();
  WeightedSpace s = m.space_for(100);
  double gram_defect = (s.gram - Eigen::MatrixXcd::Identity(s.dim, s.dim)).cwiseAbs().maxCoeff();
  bool ok = gram_defect <= 1e-10;
  if (!ok) os << " gram defect " << gram_defect;

  PotentialGrid lb = log_bergman_grid(s, m.box);
  double worst = 0.0;
  for (int i = 0; i < m.box.n; ++i)
    for (int j = 0; j < m.box.n; ++j) {
      double r = std::abs(m.box.point(i, j));
      if (r < 0.5 || r > 2.0 || std::abs(r - 1.0) < 0.2) continue;
      worst = std::max(worst, std::abs(lb.at(i, j) - 2.0 * std::log(std::max(r, 1.0))));
    }
  if (worst > 0.05) {
    os << " kernel potential off by " << worst;
    ok = false;
  }

  Envelope env = model_envelope(m);
  double eworst = 0.0;
  for (int i = 0; i < m.box.n; ++i)
    for (int j = 0; j < m.box.n; ++j) {
      double r = std::abs(m.box.point(i, j));
      eworst = std::max(eworst, std::abs(env.grid.at(i, j) - 2.0 * std::log(std::max(r, 1.0))));
    }
  if (eworst > 5.0 * m.box.h()) {
    os << " envelope off by " << eworst;
    ok = false;
  }
  return ok;
}

bool crit4_disk_routes(std::ostream& os) {
  std::vector<RoutePoint> pts =
      compare_routes(weight_abs_squared(1.0), "disk", 32, {3.0}, Box{}, {8, 16, 32, 64}, 2.0);
  bool ok = true;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    if (pts[k + 1].sup_error >= pts[k].sup_error) {
      os << " not decreasing at N=" << pts[k + 1].N;
      ok = false;
    }
  if (pts.back().sup_error > 0.15) {
    os << " final gap " << pts.back().sup_error;
    ok = false;
  }
  os << " [gaps:";
  for (const RoutePoint& p : pts) os << " " << p.sup_error;
  os << "]";
  return ok;
}

bool crit5_dos(std::ostream& os) {
  TestDictionary dict = make_test_dictionary();
  bool ok = true;
  for (ModelContext m : {flat_circle_model(), gaussian_disk_model()}) {
    Envelope env = model_envelope(m);
    EquilibriumMeasure eq = equilibrium_measure(env, m.weight);
    double defect = dos_pairing_defect(m.space_for(64), dict, eq);
    os << " " << m.name << "=" << defect;
    if (defect > 0.08) ok = false;
  }
  return ok;
}

bool crit6_mass(std::ostream& os) {
  bool ok = true;
  for (ModelContext m : {flat_circle_model(), gaussian_disk_model()}) {
    WeightedSpace s = m.space_for(20);
    Pcg64 scatter_rng = rng_for_task(kSeed, 20);
    std::vector<cplx> pts;
    for (int k = 0; k < 10; ++k) {
      double r = 1.6 * std::sqrt(scatter_rng.uniform());
      double t = 2.0 * kPi * scatter_rng.uniform();
      pts.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    Pcg64 rng = rng_for_task(kSeed, 21);
    SeedProvenance prov{Pcg64::name(), kSeed, 21};
    std::vector<MassCheckPoint> res = expected_mass_check(s, "spherical", pts, 10000, rng, prov);
    for (const MassCheckPoint& p : res)
      if (p.flagged) {
        os << " " << m.name << " flagged at z=(" << p.z.real() << "," << p.z.imag() << ") mc=" << p.mc_mean
           << " target=" << p.target << " se=" << p.mc_stderr;
        ok = false;
      }
  }
  return ok;
}

bool crit7_zeros(std::ostream& os) {
  ModelContext m = gaussian_disk_model();
  Envelope env = model_envelope(m);
  EquilibriumMeasure eq = equilibrium_measure(env, m.weight);
  TestDictionary dict = make_test_dictionary();

  WeightedSpace s50 = m.space_for(50);
  std::vector<EmpiricalMeasure> samples;
  for (int k = 0; k < 200; ++k) {
    Pcg64 rng = rng_for_task(kSeed, 100 + static_cast<std::uint64_t>(k));
    SeedProvenance prov{Pcg64::name(), kSeed, 100 + static_cast<std::uint64_t>(k)};
    samples.push_back(zeros_of_section(s50, sample_gaussian(s50.dim, rng, prov).coeffs));
  }
  PairingReport pooled = pair_zero_measure(samples, dict, eq);
  bool ok = pooled.max_defect <= 0.05;
  os << " pooled=" << pooled.max_defect;

  WeightedSpace s100 = m.space_for(100);
  Pcg64 rng = rng_for_task(kSeed, 400);
  SeedProvenance prov{Pcg64::name(), kSeed, 400};
  PairingReport single = pair_zero_measure({zeros_of_section(s100, sample_gaussian(s100.dim, rng, prov).coeffs)},
                                           dict, eq);
  os << " single=" << single.max_defect;
  if (single.max_defect > 3.0 * 0.05) ok = false;
  return ok;
}

bool crit8_qe(std::ostream& os) {
  ModelContext m = gaussian_disk_model();
  Envelope env = model_envelope(m);
  EquilibriumMeasure eq = equilibrium_measure(env, m.weight);
  TestDictionary dict = make_test_dictionary();
  std::vector<QEConvergencePoint> pts = qe_convergence_experiment(
      m.weight, m.measure_kind, m.resolution, m.measure_params, {10, 20, 40, 80}, 100, dict, eq, env, true, kSeed);
  bool ok = true;
  os << " [defects:";
  for (const QEConvergencePoint& p : pts) os << " " << p.mean_defect;
  os << "] [l1:";
  for (const QEConvergencePoint& p : pts) os << " " << p.mean_l1;
  os << "]";
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    if (pts[k + 1].mean_defect >= pts[k].mean_defect) {
      os << " defect not decreasing at N=" << pts[k + 1].N;
      ok = false;
    }
  if (pts.back().mean_defect > 0.08) {
    os << " final defect " << pts.back().mean_defect;
    ok = false;
  }
  if (pts.back().mean_l1 > 0.1) {
    os << " final l1 " << pts.back().mean_l1;
    ok = false;
  }
  for (const QEConvergencePoint& p : pts)
    if (p.control_defect < 0.2) {
      os << " control too small at N=" << p.N << " (" << p.control_defect << ")";
      ok = false;
    }
  return ok;
}

bool crit9_szego(std::ostream& os) {
  bool ok = true;
  for (ModelContext m : {flat_circle_model(), gaussian_disk_model()}) {
    Envelope env = model_envelope(m);
    EquilibriumMeasure eq = equilibrium_measure(env, m.weight);
    TestDictionary symbols = szego_symbols(m.measure_kind == "circle" ? "circle" : "disk");
    for (const DictionaryElement& g : symbols) {
      std::vector<double> e1, e2;
      double tau1 = 0.0, tau2 = 0.0;
      for (int N : {8, 16, 32, 64}) {
        SzegoTraces tr = szego_traces(m.space_for(N), g.fn, eq);
        e1.push_back(std::abs(tr.trace1 - tr.tau1));
        e2.push_back(std::abs(tr.trace2 - tr.tau2));
        tau1 = tr.tau1;
        tau2 = tr.tau2;
      }
      // Exact ties (circle first trace is constant in N) get a small cushion.
      for (std::size_t k = 0; k + 1 < e1.size(); ++k) {
        if (e1[k + 1] > e1[k] + 1e-6) {
          os << " " << m.name << "/" << g.name << " first-trace error grows at step " << k;
          ok = false;
        }
        if (e2[k + 1] > e2[k] + 1e-6) {
          os << " " << m.name << "/" << g.name << " second-trace error grows at step " << k;
          ok = false;
        }
      }
      if (e1.back() > 0.1 * std::max(std::abs(tau1), 1e-6) || e2.back() > 0.1 * std::max(std::abs(tau2), 1e-6)) {
        os << " " << m.name << "/" << g.name << " final errors " << e1.back() << "," << e2.back() << " vs tau "
           << tau1 << "," << tau2;
        ok = false;
      }
    }
  }
  return ok;
}

bool crit10_y(std::ostream& os) {
  ModelContext m = flat_circle_model();
  Envelope env = model_envelope(m);
  EquilibriumMeasure eq = equilibrium_measure(env, m.weight);
  TestDictionary symbols = szego_symbols("circle");
  const DictionaryElement& g = symbols.front();
  bool ok = true;
  std::vector<double> yod;
  double cesaro = 0.0;
  std::uint64_t task = 500;
  for (int N : {8, 16, 32}) {
    ErgodicReport rep = ergodic_property_experiment(m.space_for(N), g.fn, eq, 500, 0.1, kSeed, task);
    task += 500;
    yod.push_back(rep.y_over_d);
    cesaro += rep.y_over_d;
    if (N == 32) {
      double tol = 0.1 * std::max(rep.y_target, 1e-6);
      if (std::abs(rep.y_mean - rep.y_target) > tol) {
        os << " y_mean=" << rep.y_mean << " target=" << rep.y_target;
        ok = false;
      }
    }
  }
  for (std::size_t k = 0; k + 1 < yod.size(); ++k)
    if (yod[k + 1] >= yod[k]) {
      os << " y/d not decreasing at step " << k;
      ok = false;
    }
  cesaro /= static_cast<double>(yod.size());
  os << " [y/d:";
  for (double v : yod) os << " " << v;
  os << "] cesaro=" << cesaro;
  if (cesaro > 0.05) ok = false;
  return ok;
}

bool crit11_invariants(std::ostream& os) {
  bool ok = true;
  for (ModelContext m : {flat_circle_model(), gaussian_disk_model()}) {
    for (const CheckResult& r : run_invariant_checks(m, kSeed)) {
      if (!r.pass) {
        os << " " << m.name << "/" << r.name << ": " << r.detail;
        ok = false;
      }
    }
  }
  return ok;
}

}  // namespace

int main() {
  Gate gate;
  gate.criterion(1, "closed-form orbit integrals vs haar monte carlo", 60, crit1_orbit);
  gate.criterion(2, "gaussian pair-moment law", 60, crit2_gmoment);
  gate.criterion(3, "flat-circle kernel and envelope vs the logarithmic cap", 120, crit3_circle_routes);
  gate.criterion(4, "gaussian-disk kernel route converges to the obstacle route", 300, crit4_disk_routes);
  gate.criterion(5, "density-of-states pairing at degree 64", 180, crit5_dos);
  gate.criterion(6, "expected pointwise mass for spherical sections", 60, crit6_mass);
  gate.criterion(7, "zero distributions pair with the equilibrium measure", 300, crit7_zeros);
  gate.criterion(8, "quantum ergodicity sweep with concentrated control", 600, crit8_qe);
  gate.criterion(9, "szego trace asymptotics for both models", 180, crit9_szego);
  gate.criterion(10, "haar-diagonal variance decay and cesaro bound", 300, crit10_y);
  gate.criterion(11, "property suites on both models", 300, crit11_invariants);
  if (gate.failures) {
    std::printf("%d criterion(s) failed\n", gate.failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
