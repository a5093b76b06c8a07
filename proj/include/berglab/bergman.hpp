#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "berglab/grid.hpp"
#include "berglab/space.hpp"

namespace berglab {

// Extended-range complex scalar. Off-node evaluation of degree-N polynomials
// with N up to ~200 on a 5x5 box produces magnitudes past double range before
// the weight factor is applied; 80-bit exponents absorb that.
struct XCplx {
  long double re = 0.0L, im = 0.0L;
};
inline XCplx xc(cplx z) { return {static_cast<long double>(z.real()), static_cast<long double>(z.imag())}; }
inline XCplx xmul(XCplx a, XCplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline XCplx xmadd(XCplx acc, XCplx a, XCplx b) {
  return {acc.re + a.re * b.re - a.im * b.im, acc.im + a.re * b.im + a.im * b.re};
}
inline long double xabs2(XCplx a) { return a.re * a.re + a.im * a.im; }

// Values of the ONB polynomials f_0..f_N at an arbitrary point.
inline std::vector<XCplx> onb_values_at(const WeightedSpace& s, cplx z) {
  std::vector<XCplx> pw(s.dim);
  XCplx zz = xc(z), p{1.0L, 0.0L};
  for (int k = 0; k < s.dim; ++k) {
    pw[k] = p;
    p = xmul(p, zz);
  }
  std::vector<XCplx> f(s.dim);
  for (int j = 0; j < s.dim; ++j) {
    XCplx acc{0.0L, 0.0L};
    for (int k = 0; k <= j; ++k) acc = xmadd(acc, pw[k], xc(s.onb(k, j)));  // onb is upper-triangular
    f[j] = acc;
  }
  return f;
}

// Unweighted kernel on the diagonal: B_N(z, z) = sum_j |f_j(z)|^2.
inline long double kernel_diag(const WeightedSpace& s, cplx z) {
  long double acc = 0.0L;
  for (const XCplx& v : onb_values_at(s, z)) acc += xabs2(v);
  return acc;
}

// Density of states Pi_N(z) = B_N(z, z) e^{-N phi(z)}; integrates to dim against the node measure.
inline double bergman_density(const WeightedSpace& s, cplx z) {
  long double b = kernel_diag(s, z);
  long double w = std::exp(-static_cast<long double>(s.N) * static_cast<long double>(s.weight.eval(z)));
  return static_cast<double>(b * w);
}

// (1/N) log B_N(z, z). Returns -infinity where every basis function vanishes.
inline double log_bergman_potential(const WeightedSpace& s, cplx z) {
  long double b = kernel_diag(s, z);
  if (b <= 0.0L) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(std::log(b) / s.N);
}

inline cplx bergman_kernel(const WeightedSpace& s, cplx z, cplx w) {
  std::vector<XCplx> fz = onb_values_at(s, z), fw = onb_values_at(s, w);
  XCplx acc{0.0L, 0.0L};
  for (int j = 0; j < s.dim; ++j) acc = xmadd(acc, fz[j], {fw[j].re, -fw[j].im});
  return {static_cast<double>(acc.re), static_cast<double>(acc.im)};
}

// Monomial coefficients of the section with ONB coefficients c.
inline std::vector<XCplx> monomial_coeffs(const WeightedSpace& s, const Eigen::VectorXcd& c) {
  Eigen::VectorXcd a = s.onb * c;
  std::vector<XCplx> out(static_cast<std::size_t>(s.dim));
  for (int k = 0; k < s.dim; ++k) out[static_cast<std::size_t>(k)] = xc(a[k]);
  return out;
}

inline XCplx horner_x(const std::vector<XCplx>& a, cplx z) {
  XCplx zz = xc(z), acc = a.back();
  for (int k = static_cast<int>(a.size()) - 2; k >= 0; --k) acc = xmadd(a[static_cast<std::size_t>(k)], acc, zz);
  return acc;
}

// Value of the section with ONB coefficients c.
inline cplx section_value(const WeightedSpace& s, const Eigen::VectorXcd& c, cplx z) {
  XCplx acc = horner_x(monomial_coeffs(s, c), z);
  return {static_cast<double>(acc.re), static_cast<double>(acc.im)};
}

inline PotentialGrid log_bergman_grid(const WeightedSpace& s, const Box& box, int workers = 1) {
  PotentialGrid g = make_grid(box, "log_bergman");
  parallel_for(box.n, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (int j = 0; j < box.n; ++j) g.at(static_cast<int>(i), j) = log_bergman_potential(s, box.point(static_cast<int>(i), j));
  });
  return g;
}

// Frame-scale potential (1/N) log |s(z)|^2 of one section.
inline PotentialGrid section_potential_grid(const WeightedSpace& s, const Eigen::VectorXcd& c, const Box& box,
                                            int workers = 1) {
  PotentialGrid g = make_grid(box, "u_N");
  std::vector<XCplx> a = monomial_coeffs(s, c);
  parallel_for(box.n, workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (int j = 0; j < box.n; ++j) {
        long double a2 = xabs2(horner_x(a, box.point(static_cast<int>(i), j)));
        g.at(static_cast<int>(i), j) =
            a2 > 0.0L ? static_cast<double>(std::log(a2) / s.N) : -std::numeric_limits<double>::infinity();
      }
  });
  return g;
}

inline PotentialGrid weight_grid(const Weight& w, const Box& box) {
  PotentialGrid g = make_grid(box, "weight");
  for (int i = 0; i < box.n; ++i)
    for (int j = 0; j < box.n; ++j) g.at(i, j) = w.eval(box.point(i, j));
  return g;
}

}  // namespace berglab
