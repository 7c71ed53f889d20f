// Complex univariate polynomials: evaluation, differentiation, root finding.
// Substrate for the potentials V1, V2; coefficients are stored raw
// (index k holds the coefficient of x^k), any 1/k weighting conventions
// live at the model boundary, not here.

#ifndef SPECCURVE_CPOLY_HPP
#define SPECCURVE_CPOLY_HPP

#include <vector>

#include "speccurve/types.hpp"

namespace speccurve {

struct Poly {
  // coeffs[k] multiplies x^k. Empty means the zero polynomial.
  std::vector<cplx> coeffs;

  Poly() = default;
  explicit Poly(std::vector<cplx> c) : coeffs(std::move(c)) { normalize(); }
  Poly(std::initializer_list<cplx> c) : coeffs(c) { normalize(); }

  // Strips exactly-zero leading entries so degree() is meaningful.
  void normalize();

  bool is_zero() const { return coeffs.empty(); }
  int degree() const { return coeffs.empty() ? 0 : int(coeffs.size()) - 1; }
};

cplx poly_eval(const Poly& p, cplx z);

// Returns (p(z), p'(z)) in one Horner pass.
std::pair<cplx, cplx> poly_eval_d(const Poly& p, cplx z);

Poly poly_derivative(const Poly& p);

// All degree-many roots. Aberth simultaneous iteration from a deterministic
// initial circle, with a companion-matrix eigenvalue fallback if it stalls.
// Throws ZeroLeadingCoefficient for degree < 1, NonConvergence if both
// strategies fail the residual gate.
std::vector<cplx> poly_roots(const Poly& p, double tol = 1e-12);

}  // namespace speccurve

#endif
