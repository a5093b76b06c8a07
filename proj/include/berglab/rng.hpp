#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "berglab/common.hpp"

namespace berglab {

// PCG64 (XSL-RR 128/64). Stream selection through the increment gives
// independent per-task sequences from one master seed.
class Pcg64 {
 public:
  Pcg64(std::uint64_t seed, std::uint64_t stream) {
    inc_ = (static_cast<u128>(stream) << 1u) | 1u;
    state_ = 0;
    next();
    state_ += (static_cast<u128>(seed) << 64u) | seed;
    next();
  }

  std::uint64_t next() {
    state_ = state_ * kMult + inc_;
    std::uint64_t xored = static_cast<std::uint64_t>(state_ >> 64u) ^ static_cast<std::uint64_t>(state_);
    unsigned rot = static_cast<unsigned>(state_ >> 122u);
    return (xored >> rot) | (xored << ((64u - rot) & 63u));
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform() { return static_cast<double>(next() >> 11u) * 0x1.0p-53; }

  // Standard complex Gaussian: E z = 0, E|z|^2 = 1 (re/im variance 1/2).
  cplx gaussian() {
    double u = 1.0 - uniform();  // (0, 1]
    double r = std::sqrt(-std::log(u));
    double t = 2.0 * kPi * uniform();
    return cplx(r * std::cos(t), r * std::sin(t));
  }

  double gaussian_real() {
    double u = 1.0 - uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    return r * std::cos(2.0 * kPi * uniform());
  }

  static constexpr const char* name() { return "pcg64-xsl-rr"; }

 private:
  using u128 = unsigned __int128;
  static constexpr u128 kMult = (static_cast<u128>(2549297995355413924ULL) << 64u) | 4865540595714422341ULL;
  u128 state_;
  u128 inc_;
};

struct SeedProvenance {
  std::string generator = Pcg64::name();
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;
};

inline Pcg64 rng_for_task(std::uint64_t master_seed, std::uint64_t task_index) {
  return Pcg64(master_seed, task_index);
}

}  // namespace berglab
