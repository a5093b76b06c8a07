#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "berglab/berglab.hpp"

namespace fs = std::filesystem;
using namespace berglab;
using nlohmann::json;

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  std::vector<std::string> tol_overrides;
};

ExperimentConfig load_config(const CliArgs& args) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    try {
      cfg = parse_config_file(args.config_path);
    } catch (const ConfigError& e) {
      throw SchemaError(e.what());
    }
  } else {
    cfg.model = flat_circle_model();
  }
  if (args.seed_set) cfg.master_seed = args.seed;
  if (args.workers > 0) cfg.workers = args.workers;
  if (!args.out_dir.empty())
    cfg.out_dir = args.out_dir;
  else if (cfg.out_dir.empty()) {
    const char* env = std::getenv("BERGLAB_OUT");
    cfg.out_dir = env && *env ? env : ".";
  }
  for (const std::string& kv : args.tol_overrides) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw SchemaError("tol-override must be KEY=VAL: " + kv);
    try {
      cfg.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw SchemaError("tol-override value is not a number: " + kv);
    }
  }
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

double tol_of(const ExperimentConfig& cfg, const std::string& key, double fallback) {
  auto it = cfg.tolerances.find(key);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int run_gram(const ExperimentConfig& cfg) {
  Timer timer;
  int N = cfg.n_list.front();
  WeightedSpace s = cfg.model.space_for(N);
  write_matrix_csv(path_in(cfg, "gram_N" + std::to_string(N) + ".csv"), s.gram, "gram");
  write_matrix_csv(path_in(cfg, "onb_N" + std::to_string(N) + ".csv"), s.onb, "onb");
  write_nodes_csv(path_in(cfg, "nodes_N" + std::to_string(N) + ".csv"), s.measure);
  json extra = {{"N", N},
                {"dim", s.dim},
                {"conditioning", s.conditioning},
                {"bernstein_markov_ratio", bernstein_markov_ratio(s)}};
  write_metadata(path_in(cfg, "gram_metadata.json"), cfg, "gram", timer.seconds(), extra);
  return 0;
}

int run_bergman(const ExperimentConfig& cfg) {
  Timer timer;
  json extra = json::array();
  for (int N : cfg.n_list) {
    WeightedSpace s = cfg.model.space_for(N);
    PotentialGrid g = log_bergman_grid(s, cfg.model.box, cfg.workers);
    write_grid_csv(path_in(cfg, "log_bergman_N" + std::to_string(N) + ".csv"), g);
    double mass = 0.0;
    for (std::size_t i = 0; i < s.measure.nodes.size(); ++i)
      mass += s.measure.weights[i] * node_density(s, i);
    extra.push_back({{"N", N}, {"density_integral", mass}, {"dim", s.dim}});
  }
  write_metadata(path_in(cfg, "bergman_metadata.json"), cfg, "bergman", timer.seconds(), extra);
  return 0;
}

int run_envelope(const ExperimentConfig& cfg) {
  Timer timer;
  Envelope env = model_envelope(cfg.model);
  write_grid_csv(path_in(cfg, "envelope.csv"), env.grid);
  json extra = {{"robin_constant", env.robin_f},
                {"sweeps", env.total_sweeps},
                {"final_update", env.final_update},
                {"obstacle_boundary", env.obstacle_boundary}};
  write_metadata(path_in(cfg, "envelope_metadata.json"), cfg, "envelope", timer.seconds(), extra);
  return 0;
}

int run_measure(const ExperimentConfig& cfg) {
  Timer timer;
  Envelope env = model_envelope(cfg.model);
  EquilibriumMeasure em = equilibrium_measure(env, cfg.model.weight, tol_of(cfg, "coincidence", -1.0));
  write_grid_csv(path_in(cfg, "equilibrium_density.csv"), em.density);
  write_mask_csv(path_in(cfg, "coincidence_mask.csv"), em.mask, em.density.box);
  json extra = {{"total_mass_raw", em.total_mass_raw},
                {"total_mass", em.total_mass},
                {"coincidence_tol", em.coincidence_tol}};
  write_metadata(path_in(cfg, "measure_metadata.json"), cfg, "measure", timer.seconds(), extra);
  return 0;
}

int run_sample(const ExperimentConfig& cfg) {
  Timer timer;
  int N = cfg.n_list.front();
  WeightedSpace s = cfg.model.space_for(N);
  std::vector<json> rows;
  for (int k = 0; k < cfg.n_samples; ++k) {
    Pcg64 rng = rng_for_task(cfg.master_seed, static_cast<std::uint64_t>(k));
    SeedProvenance prov{Pcg64::name(), cfg.master_seed, static_cast<std::uint64_t>(k)};
    RandomSection sec = cfg.ensemble_kind == "gaussian" ? sample_gaussian(s.dim, rng, prov)
                                                        : sample_spherical(s.dim, rng, prov);
    json coeffs = json::array();
    for (int j = 0; j < s.dim; ++j) coeffs.push_back({sec.coeffs[j].real(), sec.coeffs[j].imag()});
    rows.push_back({{"id", k},
                    {"N", N},
                    {"ensemble", sec.ensemble_tag},
                    {"seed", {{"generator", sec.seed.generator}, {"master_seed", sec.seed.master_seed}, {"stream", sec.seed.stream}}},
                    {"norm2", sec.coeffs.squaredNorm()},
                    {"coeffs", coeffs}});
  }
  write_jsonl(path_in(cfg, "sections.jsonl"), rows);
  write_metadata(path_in(cfg, "sample_metadata.json"), cfg, "sample", timer.seconds(),
                 json{{"N", N}, {"count", cfg.n_samples}});
  return 0;
}

int run_zeros(const ExperimentConfig& cfg) {
  Timer timer;
  Envelope env = model_envelope(cfg.model);
  EquilibriumMeasure em = equilibrium_measure(env, cfg.model.weight, tol_of(cfg, "coincidence", -1.0));
  TestDictionary dict = make_test_dictionary();
  std::vector<ConvergencePoint> table = zero_convergence_experiment(
      cfg.model.weight, cfg.model.measure_kind, cfg.model.resolution, cfg.model.measure_params, cfg.n_list,
      cfg.n_samples, dict, em, cfg.master_seed);
  std::vector<std::vector<std::string>> rows;
  for (const ConvergencePoint& pt : table)
    rows.push_back({std::to_string(pt.N), fmt(pt.mean_defect), fmt(pt.stderr_defect)});
  write_table_csv(path_in(cfg, "zeros_summary.csv"), {"N", "mean_defect", "stderr"}, rows);

  int N = cfg.n_list.back();
  WeightedSpace s = cfg.model.space_for(N);
  std::vector<json> atom_rows;
  int keep = std::min(cfg.n_samples, 10);
  for (int k = 0; k < keep; ++k) {
    Pcg64 rng = rng_for_task(cfg.master_seed, static_cast<std::uint64_t>(k));
    SeedProvenance prov{Pcg64::name(), cfg.master_seed, static_cast<std::uint64_t>(k)};
    RandomSection sec = sample_gaussian(s.dim, rng, prov);
    EmpiricalMeasure zm = zeros_of_section(s, sec.coeffs);
    json atoms = json::array();
    for (cplx z : zm.atoms) atoms.push_back({z.real(), z.imag()});
    atom_rows.push_back({{"id", k}, {"N", N}, {"deficit", zm.deficit}, {"atoms", atoms}});
  }
  write_jsonl(path_in(cfg, "zero_atoms.jsonl"), atom_rows);
  write_metadata(path_in(cfg, "zeros_metadata.json"), cfg, "zeros", timer.seconds(),
                 json{{"final_mean_defect", table.back().mean_defect}});
  return 0;
}

int run_qe(const ExperimentConfig& cfg) {
  Timer timer;
  Envelope env = model_envelope(cfg.model);
  EquilibriumMeasure em = equilibrium_measure(env, cfg.model.weight, tol_of(cfg, "coincidence", -1.0));
  TestDictionary dict = make_test_dictionary();
  std::vector<QEConvergencePoint> table =
      qe_convergence_experiment(cfg.model.weight, cfg.model.measure_kind, cfg.model.resolution,
                                cfg.model.measure_params, cfg.n_list, cfg.n_samples, dict, em, env, true,
                                cfg.master_seed);
  std::vector<std::vector<std::string>> rows;
  std::vector<json> jl;
  for (const QEConvergencePoint& pt : table) {
    rows.push_back({std::to_string(pt.N), fmt(pt.mean_defect), fmt(pt.stderr_defect), fmt(pt.mean_l1),
                    std::to_string(pt.l1_excluded), fmt(pt.control_defect)});
    jl.push_back({{"N", pt.N},
                  {"mean_defect", pt.mean_defect},
                  {"stderr", pt.stderr_defect},
                  {"mean_l1", pt.mean_l1},
                  {"l1_excluded", pt.l1_excluded},
                  {"control_defect", pt.control_defect},
                  {"normalization", "spherical samples; L1 over box with area normalized to 1"}});
  }
  write_table_csv(path_in(cfg, "qe_summary.csv"),
                  {"N", "mean_defect", "stderr", "mean_l1", "l1_excluded", "control_defect"}, rows);
  write_jsonl(path_in(cfg, "qe_reports.jsonl"), jl);
  write_metadata(path_in(cfg, "qe_metadata.json"), cfg, "qe", timer.seconds(),
                 json{{"final_mean_defect", table.back().mean_defect}});
  return 0;
}

int run_onb(const ExperimentConfig& cfg) {
  Timer timer;
  Envelope env = model_envelope(cfg.model);
  EquilibriumMeasure em = equilibrium_measure(env, cfg.model.weight, tol_of(cfg, "coincidence", -1.0));
  TestDictionary symbols = szego_symbols(cfg.model.measure_kind == "circle" ? "circle" : "disk");
  const DictionaryElement& g = symbols.front();
  double band = tol_of(cfg, "a_band", 0.1);
  std::vector<std::vector<std::string>> rows;
  double cesaro = 0.0;
  std::uint64_t task = 0;
  int count = 0;
  for (int N : cfg.n_list) {
    WeightedSpace s = cfg.model.space_for(N);
    ErgodicReport rep = ergodic_property_experiment(s, g.fn, em, cfg.draws, band, cfg.master_seed, task);
    task += static_cast<std::uint64_t>(cfg.draws);
    cesaro += rep.y_over_d;
    ++count;
    rows.push_back({std::to_string(N), g.name, fmt(rep.y_mean), fmt(rep.y_stderr), fmt(rep.y_over_d),
                    fmt(rep.y_target), fmt(rep.density_one_fraction), fmt(cesaro / count)});
  }
  write_table_csv(path_in(cfg, "onb_summary.csv"),
                  {"N", "symbol", "y_mean", "y_stderr", "y_over_d", "y_target", "density_one_fraction", "cesaro"},
                  rows);
  write_metadata(path_in(cfg, "onb_metadata.json"), cfg, "onb", timer.seconds(),
                 json{{"cesaro_final", cesaro / cfg.n_list.size()}});
  return 0;
}

int run_szego(const ExperimentConfig& cfg) {
  Timer timer;
  Envelope env = model_envelope(cfg.model);
  EquilibriumMeasure em = equilibrium_measure(env, cfg.model.weight, tol_of(cfg, "coincidence", -1.0));
  TestDictionary symbols = szego_symbols(cfg.model.measure_kind == "circle" ? "circle" : "disk");
  std::vector<std::vector<std::string>> rows;
  for (int N : cfg.n_list) {
    WeightedSpace s = cfg.model.space_for(N);
    for (const DictionaryElement& g : symbols) {
      SzegoTraces tr = szego_traces(s, g.fn, em);
      rows.push_back({cfg.model.name, std::to_string(N), g.name, fmt(tr.trace1), fmt(tr.tau1),
                      fmt(std::abs(tr.trace1 - tr.tau1)), fmt(tr.trace2), fmt(tr.tau2),
                      fmt(std::abs(tr.trace2 - tr.tau2))});
    }
  }
  write_table_csv(path_in(cfg, "szego.csv"),
                  {"model", "N", "symbol", "trace1", "tau1", "err1", "trace2", "tau2", "err2"}, rows);
  write_metadata(path_in(cfg, "szego_metadata.json"), cfg, "szego", timer.seconds());
  return 0;
}

int run_orbit(const ExperimentConfig& cfg) {
  Timer timer;
  std::vector<std::vector<std::string>> rows;
  std::uint64_t task = 0;
  for (int d : cfg.orbit_dims) {
    if (d < 1) throw SchemaError("orbit dimensions must be >= 1");
    std::vector<std::vector<double>> spectra;
    std::vector<double> ramp(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) ramp[static_cast<std::size_t>(j)] = static_cast<double>(j + 1) / d;
    std::vector<double> alt(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) alt[static_cast<std::size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
    spectra.push_back(ramp);
    spectra.push_back(alt);
    int si = 0;
    for (const auto& spec : spectra) {
      Pcg64 rng = rng_for_task(cfg.master_seed, task);
      SeedProvenance prov{Pcg64::name(), cfg.master_seed, task};
      ++task;
      OrbitCheck oc = orbit_integral_check(spec, cfg.draws, rng, prov);
      double denom = std::max(std::abs(oc.closed_form), 1e-12);
      rows.push_back({std::to_string(d), "s" + std::to_string(si++), fmt(oc.closed_form), fmt(oc.mc_mean),
                      fmt(oc.mc_stderr), fmt(std::abs(oc.mc_mean - oc.closed_form) / denom)});
    }
  }
  write_table_csv(path_in(cfg, "orbit.csv"), {"d", "spectrum", "closed_form", "mc_mean", "mc_stderr", "rel_err"},
                  rows);
  write_metadata(path_in(cfg, "orbit_metadata.json"), cfg, "orbit", timer.seconds());
  return 0;
}

int run_report(const ExperimentConfig& cfg) {
  Timer timer;
  std::vector<std::vector<std::string>> rows;
  for (const std::string& name : {"qe_summary.csv", "zeros_summary.csv", "szego.csv", "onb_summary.csv", "orbit.csv"}) {
    std::ifstream in(path_in(cfg, name));
    if (!in) continue;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (header) {
        header = false;
        continue;
      }
      if (line.empty()) continue;
      // The payload keeps its own commas, so it travels as one quoted CSV field.
      std::string quoted = "\"";
      for (char c : line) {
        quoted += c;
        if (c == '"') quoted += c;
      }
      quoted += '"';
      rows.push_back({name, quoted});
    }
  }
  write_table_csv(path_in(cfg, "report.csv"), {"source", "row"}, rows);
  write_metadata(path_in(cfg, "report_metadata.json"), cfg, "report", timer.seconds(),
                 json{{"rows", rows.size()}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for weighted polynomial spaces on the plane"};
  app.require_subcommand(1);
  CliArgs args;
  app.add_option("--config", args.config_path, "JSON experiment config");
  app.add_option("--out", args.out_dir, "output directory (overrides config and BERGLAB_OUT)");
  auto* seed_opt = app.add_option("--seed", args.seed, "master seed override");
  app.add_option("--workers", args.workers, "worker count");
  app.add_option("--tol-override", args.tol_overrides, "tolerance override KEY=VAL (repeatable)");
  app.fallthrough();

  const std::vector<std::pair<std::string, int (*)(const ExperimentConfig&)>> subs = {
      {"gram", run_gram},     {"bergman", run_bergman}, {"envelope", run_envelope}, {"measure", run_measure},
      {"sample", run_sample}, {"zeros", run_zeros},     {"qe", run_qe},             {"onb", run_onb},
      {"szego", run_szego},   {"orbit", run_orbit},     {"report", run_report}};
  for (const auto& [name, fn] : subs) app.add_subcommand(name, "run the " + name + " stage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;  // unknown subcommand or malformed invocation
  }
  args.seed_set = seed_opt->count() > 0;

  try {
    ExperimentConfig cfg = load_config(args);
    for (const auto& [name, fn] : subs)
      if (app.get_subcommand(name)->parsed()) return fn(cfg);
    return 2;
  } catch (const FileError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
