#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "berglab/common.hpp"

namespace berglab {

struct DictionaryElement {
  std::string name;
  std::function<double(cplx)> fn;
  double sup_bound = 1.0;
  double lipschitz = 1.0;
};

using TestDictionary = std::vector<DictionaryElement>;

namespace detail {

// cos^2 taper: 1 on [0, r0], rolls off to 0 at r1, smooth enough for the
// recorded Lipschitz constants.
inline double taper(double r, double r0, double r1) {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  double t = std::cos(0.5 * kPi * (r - r0) / (r1 - r0));
  return t * t;
}

}  // namespace detail

// Fixed family of bounded Lipschitz observables used to measure weak-star
// distances. All elements have sup <= 1; the moment elements are tapered so
// they are globally bounded and normalized by the box circumradius so their
// fluctuation scale stays uniform across the family.
inline TestDictionary make_test_dictionary() {
  TestDictionary dict;
  dict.push_back({"one", [](cplx) { return 1.0; }, 1.0, 0.0});

  const double centers[3] = {-1.0, 0.0, 1.0};
  int bump_id = 0;
  for (double cx : centers)
    for (double cy : centers) {
      cplx c{cx, cy};
      double w_narrow = 0.25;
      double w_wide = 0.35 + 0.0125 * bump_id;  // spread widths to decorrelate the wide family
      for (double w : {w_narrow, w_wide}) {
        std::string name = "bump_" + std::to_string(bump_id) + (w == w_narrow ? "_narrow" : "_wide");
        dict.push_back({name, [c, w](cplx z) { return std::exp(-std::norm(z - c) / (2.0 * w * w)); }, 1.0,
                        std::exp(-0.5) / w});
      }
      ++bump_id;
    }

  const double r_box = 2.5 * std::sqrt(2.0);
  const double r0 = 1.5, r1 = 2.2;
  for (int k = 1; k <= 4; ++k) {
    double scale = std::pow(r_box, k);
    double lip = (k * std::pow(r1, k - 1) + std::pow(r1, k) * kPi / (r1 - r0)) / scale;
    dict.push_back({"re_z" + std::to_string(k),
                    [k, scale, r0, r1](cplx z) {
                      return std::real(std::pow(z, k)) / scale * detail::taper(std::abs(z), r0, r1);
                    },
                    1.0, lip});
    dict.push_back({"im_z" + std::to_string(k),
                    [k, scale, r0, r1](cplx z) {
                      return std::imag(std::pow(z, k)) / scale * detail::taper(std::abs(z), r0, r1);
                    },
                    1.0, lip});
  }

  const double hats[3][2] = {{1.0, 0.3}, {0.5, 0.3}, {1.5, 0.3}};
  for (auto& hw : hats) {
    double rc = hw[0], w = hw[1];
    dict.push_back({"radial_hat_" + std::to_string(rc).substr(0, 3),
                    [rc, w](cplx z) { return std::max(0.0, 1.0 - std::abs(std::abs(z) - rc) / w); }, 1.0, 1.0 / w});
  }
  return dict;
}

// Real bounded symbols for the trace asymptotics, chosen per model so the
// limits tau(g), tau(g^2) are nonzero and the symbol is not constant on the
// support of the equilibrium measure. The circle symbols are trigonometric
// polynomials: every node rule with the recorded angular exactness averages
// them without quadrature error, so trace deviations reflect the operator
// truncation alone rather than node-count artifacts.
inline TestDictionary szego_symbols(const std::string& model) {
  TestDictionary out;
  if (model == "circle") {
    out.push_back({"half_one_plus_re", [](cplx z) { return 0.5 * (1.0 + std::real(z)); }, 1.0, 0.5});
    out.push_back({"half_one_plus_re2", [](cplx z) { return 0.5 * (1.0 + std::real(z * z)); }, 1.0, 1.0});
  } else if (model == "disk") {
    out.push_back({"radial_hat_1", [](cplx z) { return std::max(0.0, 1.0 - std::abs(std::abs(z) - 1.0) / 0.5); }, 1.0,
                   2.0});
    out.push_back({"abs2_taper",
                   [](cplx z) {
                     double r = std::abs(z);
                     return r * r / 4.0 * detail::taper(r, 1.6, 2.2);
                   },
                   1.21, 2.0});
  } else {
    throw ConfigError("no symbol set for model: " + model);
  }
  return out;
}

}  // namespace berglab
