#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace berglab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
// Global Monge-Ampere calibration: total discrete Laplacian mass of the
// flat-circle envelope 2 log+|z| is 4*pi, so kappa * 4*pi = 1.
inline constexpr double kLaplacianMassConstant = 1.0 / (4.0 * kPi);

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

struct ConditioningError : std::runtime_error {
  int degree;
  double condition;
  ConditioningError(const std::string& m, int n, double c)
      : std::runtime_error(m), degree(n), condition(c) {}
};

struct SolverError : std::runtime_error {
  double residual;
  SolverError(const std::string& m, double r) : std::runtime_error(m), residual(r) {}
};

// Deterministic row partition: each worker owns a contiguous index range and
// writes disjoint outputs, so results do not depend on worker count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t)>& body) {
  if (workers < 1) workers = 1;
  if (workers == 1 || n < 2) {
    body(0, n);
    return;
  }
  std::size_t w = static_cast<std::size_t>(workers);
  if (w > n) w = n;
  std::vector<std::thread> pool;
  pool.reserve(w);
  std::size_t chunk = (n + w - 1) / w;
  for (std::size_t k = 0; k < w; ++k) {
    std::size_t lo = k * chunk;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

inline double sqr(double x) { return x * x; }

}  // namespace berglab
