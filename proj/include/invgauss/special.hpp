#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace invgauss {

using cplx = std::complex<double>;

// Lanczos approximation (g = 7, 9 terms) with reflection; about 15 digits.
inline cplx gamma_c(cplx z) {
  static constexpr double g = 7.0;
  static constexpr double p[9] = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double pi = std::numbers::pi;
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_c(1.0 - z));
  z -= 1.0;
  cplx x = p[0];
  for (int i = 1; i < 9; ++i) x += p[i] / (z + double(i));
  cplx t = z + g + 0.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// 1/Gamma(z); exactly zero at the poles 0, -1, -2, ...
inline cplx rgamma_c(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) return 0.0;
  return 1.0 / gamma_c(z);
}

// Normalizing constant of the imaginary power kernel, 1/Gamma(-iu).
inline cplx impow_constant(double u) { return rgamma_c(cplx(0.0, -u)); }

}  // namespace invgauss
