#pragma once

#include <string>
#include <vector>

#include "berglab/envelope.hpp"
#include "berglab/grid.hpp"
#include "berglab/measure.hpp"
#include "berglab/space.hpp"
#include "berglab/weight.hpp"

namespace berglab {

// A weight/measure pair with the bookkeeping needed to size quadratures and
// grids per degree.
struct ModelContext {
  std::string name;
  Weight weight;
  std::string measure_kind;
  std::vector<double> measure_params;
  int resolution = 64;
  Box box;

  SupportMeasure measure_for(int N) const { return measure_for_degree(measure_kind, resolution, N, measure_params); }
  WeightedSpace space_for(int N) const { return make_space(N, weight, measure_for(N)); }
};

// phi = 0 on the unit circle: Gram is the identity, the envelope is
// 2 log+ |z|, the equilibrium measure is uniform arclength.
inline ModelContext flat_circle_model() {
  ModelContext m;
  m.name = "flat-circle";
  m.weight = weight_zero();
  m.measure_kind = "circle";
  m.measure_params = {1.0};
  m.resolution = 64;
  return m;
}

// phi = |z|^2 sampled on the disk of radius 3: the envelope is |z|^2 inside
// the unit disk and 2 log|z| + 1 outside, the equilibrium measure is uniform
// area on the unit disk.
inline ModelContext gaussian_disk_model() {
  ModelContext m;
  m.name = "gaussian-disk";
  m.weight = weight_abs_squared(1.0);
  m.measure_kind = "disk";
  m.measure_params = {3.0};
  m.resolution = 32;
  return m;
}

inline ModelContext model_by_name(const std::string& name) {
  if (name == "flat-circle") return flat_circle_model();
  if (name == "gaussian-disk") return gaussian_disk_model();
  throw ConfigError("unknown model: " + name);
}

inline Envelope model_envelope(const ModelContext& m) {
  return envelope_oracle(m.weight, m.measure_for(0), m.box);
}

}  // namespace berglab
