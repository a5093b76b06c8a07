#pragma once

#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "berglab/grid.hpp"
#include "berglab/measure.hpp"
#include "berglab/models.hpp"
#include "berglab/rng.hpp"

namespace berglab {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kKappaConvention = "kappa = 1/(4*pi), calibrated so the flat-circle equilibrium measure has mass 1";
inline constexpr const char* kEnsembleConvention =
    "gaussian: E c_j conj(c_k) = delta_jk; spherical: |c| = 1, E c_j conj(c_k) = delta_jk / dim";

struct FileError : std::runtime_error {
  explicit FileError(const std::string& what) : std::runtime_error(what) {}
};
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  int schema_version = 1;
  ModelContext model;
  std::vector<int> n_list{8, 16, 32, 64};
  std::string ensemble_kind = "spherical";
  int n_samples = 100;
  int draws = 1000;
  std::uint64_t master_seed = 1;
  std::string dictionary = "default";
  std::string out_dir;
  std::vector<int> orbit_dims{1, 2, 3};
  std::map<std::string, double> tolerances;
  int workers = 1;
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::vector<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const std::string& k : known) ok = ok || it.key() == k;
    if (!ok) throw SchemaError("unknown key '" + it.key() + "' in " + where);
  }
}

inline ModelContext parse_model(const nlohmann::json& j) {
  if (j.is_string()) return model_by_name(j.get<std::string>());
  if (!j.is_object()) throw SchemaError("model must be a name or an object");
  require_keys(j, {"weight", "measure", "name"}, "model");
  if (!j.contains("weight") || !j.contains("measure")) throw SchemaError("model object needs weight and measure");

  ModelContext m;
  m.name = j.value("name", "custom");
  const nlohmann::json& w = j.at("weight");
  require_keys(w, {"kind", "params"}, "model.weight");
  if (!w.contains("kind") || !w.at("kind").is_string()) throw SchemaError("weight.kind must be a string");
  std::vector<double> wp = w.value("params", std::vector<double>{});
  m.weight = build_weight(w.at("kind").get<std::string>(), wp);

  const nlohmann::json& mu = j.at("measure");
  require_keys(mu, {"kind", "resolution", "params"}, "model.measure");
  if (!mu.contains("kind") || !mu.at("kind").is_string()) throw SchemaError("measure.kind must be a string");
  m.measure_kind = mu.at("kind").get<std::string>();
  m.resolution = mu.value("resolution", 32);
  m.measure_params = mu.value("params", std::vector<double>{});
  if (m.resolution < 4) throw SchemaError("measure.resolution must be >= 4");
  return m;
}

}  // namespace detail

inline ExperimentConfig parse_config_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("config root must be an object");
  detail::require_keys(j,
                       {"schema_version", "model", "N_list", "grid", "ensemble", "dictionary", "out_dir", "orbit_dims",
                        "tolerances", "workers"},
                       "config");
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer())
    throw SchemaError("schema_version (integer) is required");
  ExperimentConfig cfg;
  cfg.schema_version = j.at("schema_version").get<int>();
  if (cfg.schema_version != 1) throw SchemaError("unsupported schema_version");
  if (!j.contains("model")) throw SchemaError("model is required");
  cfg.model = detail::parse_model(j.at("model"));

  if (j.contains("N_list")) {
    if (!j.at("N_list").is_array() || j.at("N_list").empty()) throw SchemaError("N_list must be a nonempty array");
    cfg.n_list = j.at("N_list").get<std::vector<int>>();
    for (int n : cfg.n_list)
      if (n < 0) throw SchemaError("N_list entries must be >= 0");
  }
  if (j.contains("grid")) {
    const nlohmann::json& g = j.at("grid");
    detail::require_keys(g, {"box", "n"}, "grid");
    if (g.contains("box")) {
      std::vector<double> b = g.at("box").get<std::vector<double>>();
      if (b.size() != 4 || b[0] >= b[1] || b[2] >= b[3]) throw SchemaError("grid.box must be [x0,x1,y0,y1]");
      cfg.model.box.x0 = b[0];
      cfg.model.box.x1 = b[1];
      cfg.model.box.y0 = b[2];
      cfg.model.box.y1 = b[3];
    }
    if (g.contains("n")) {
      cfg.model.box.n = g.at("n").get<int>();
      if (cfg.model.box.n < 11) throw SchemaError("grid.n must be >= 11");
    }
  }
  if (j.contains("ensemble")) {
    const nlohmann::json& e = j.at("ensemble");
    detail::require_keys(e, {"kind", "n_samples", "draws", "master_seed"}, "ensemble");
    cfg.ensemble_kind = e.value("kind", cfg.ensemble_kind);
    if (cfg.ensemble_kind != "gaussian" && cfg.ensemble_kind != "spherical" && cfg.ensemble_kind != "haar")
      throw SchemaError("ensemble.kind must be gaussian, spherical or haar");
    cfg.n_samples = e.value("n_samples", cfg.n_samples);
    cfg.draws = e.value("draws", cfg.draws);
    if (cfg.n_samples < 1 || cfg.draws < 1) throw SchemaError("sample counts must be positive");
    if (e.contains("master_seed")) cfg.master_seed = e.at("master_seed").get<std::uint64_t>();
  }
  cfg.dictionary = j.value("dictionary", cfg.dictionary);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  if (j.contains("orbit_dims")) cfg.orbit_dims = j.at("orbit_dims").get<std::vector<int>>();
  if (j.contains("tolerances")) {
    if (!j.at("tolerances").is_object()) throw SchemaError("tolerances must be an object");
    for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it)
      cfg.tolerances[it.key()] = it.value().get<double>();
  }
  cfg.workers = j.value("workers", 1);
  if (cfg.workers < 1) throw SchemaError("workers must be >= 1");
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

inline nlohmann::json resolved_config(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = cfg.schema_version;
  j["model"] = {{"name", cfg.model.name},
                {"weight", {{"kind", cfg.model.weight.label}, {"params", nlohmann::json::array()}}},
                {"measure",
                 {{"kind", cfg.model.measure_kind},
                  {"resolution", cfg.model.resolution},
                  {"params", cfg.model.measure_params}}}};
  j["N_list"] = cfg.n_list;
  j["grid"] = {{"box", {cfg.model.box.x0, cfg.model.box.x1, cfg.model.box.y0, cfg.model.box.y1}},
               {"n", cfg.model.box.n}};
  j["ensemble"] = {{"kind", cfg.ensemble_kind},
                   {"n_samples", cfg.n_samples},
                   {"draws", cfg.draws},
                   {"master_seed", cfg.master_seed}};
  j["dictionary"] = cfg.dictionary;
  j["out_dir"] = cfg.out_dir;
  j["orbit_dims"] = cfg.orbit_dims;
  j["tolerances"] = cfg.tolerances;
  j["workers"] = cfg.workers;
  return j;
}

// All numeric output goes through one formatter: shortest round-trip digits,
// '.' decimal separator, no locale effects, reruns byte-identical.
inline std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write: " + path);
  out.imbue(std::locale::classic());
  return out;
}

inline void write_grid_csv(const std::string& path, const PotentialGrid& g) {
  std::ofstream out = open_out(path);
  out << "# kind=" << g.kind << "\n";
  out << "# box=" << fmt(g.box.x0) << "," << fmt(g.box.x1) << "," << fmt(g.box.y0) << "," << fmt(g.box.y1) << "\n";
  out << "# n=" << g.box.n << "\n";
  out << "# layout=row i is x-index, column j is y-index\n";
  for (int i = 0; i < g.box.n; ++i) {
    for (int j = 0; j < g.box.n; ++j) out << (j ? "," : "") << fmt(g.at(i, j));
    out << "\n";
  }
}

inline void write_mask_csv(const std::string& path, const std::vector<std::uint8_t>& mask, const Box& box) {
  std::ofstream out = open_out(path);
  out << "# kind=mask\n# n=" << box.n << "\n";
  for (int i = 0; i < box.n; ++i) {
    for (int j = 0; j < box.n; ++j) out << (j ? "," : "") << int(mask[static_cast<std::size_t>(i) * box.n + j]);
    out << "\n";
  }
}

inline void write_nodes_csv(const std::string& path, const SupportMeasure& m) {
  std::ofstream out = open_out(path);
  out << "re,im,weight\n";
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    out << fmt(m.nodes[i].real()) << "," << fmt(m.nodes[i].imag()) << "," << fmt(m.weights[i]) << "\n";
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXcd& a, const std::string& label) {
  std::ofstream out = open_out(path);
  out << "# kind=" << label << "\n# rows=" << a.rows() << "\n# entries=re,im interleaved\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out << (j ? "," : "") << fmt(a(i, j).real()) << "," << fmt(a(i, j).imag());
    out << "\n";
  }
}

inline void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << "\n";
  }
}

inline void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& rows) {
  std::ofstream out = open_out(path);
  for (const nlohmann::json& row : rows) out << row.dump() << "\n";
}

inline void write_metadata(const std::string& path, const ExperimentConfig& cfg, const std::string& subcommand,
                           double wall_seconds, const nlohmann::json& extra = {}) {
  nlohmann::json j;
  j["artifact_version"] = kArtifactVersion;
  j["subcommand"] = subcommand;
  j["wall_seconds"] = wall_seconds;
  j["conventions"] = {{"laplacian_mass", kKappaConvention}, {"ensembles", kEnsembleConvention}};
  j["seed"] = {{"generator", Pcg64::name()}, {"master_seed", cfg.master_seed}};
  j["resolved_config"] = resolved_config(cfg);
  if (!extra.is_null()) j["results"] = extra;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace berglab
