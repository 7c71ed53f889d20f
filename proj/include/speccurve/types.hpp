// Basic scalar aliases and numeric helpers used across the library.

#ifndef SPECCURVE_TYPES_HPP
#define SPECCURVE_TYPES_HPP

#include <cmath>
#include <complex>

namespace speccurve {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// 2*i*pi, the ubiquitous period of contour integration.
inline const cplx kTwoPiI = cplx(0.0, 2.0 * kPi);

inline bool is_finite(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Relative difference |a-b| / max(|a|,|b|,floor). Symmetric, safe near zero.
inline double rel_diff(cplx a, cplx b, double floor_scale = 1e-300) {
  double denom = std::max({std::abs(a), std::abs(b), floor_scale});
  return std::abs(a - b) / denom;
}

}  // namespace speccurve

#endif
