// Contour quadrature utilities: trapezoid rule on circles and period paths
// (exponentially convergent for analytic/periodic integrands), node-doubling
// convergence gates, argument-principle winding numbers, and raw Laurent
// ring transforms.

#ifndef SPECCURVE_QUADRATURE_HPP
#define SPECCURVE_QUADRATURE_HPP

#include <functional>
#include <map>
#include <vector>

#include "speccurve/types.hpp"

namespace speccurve {

struct QuadratureSpec {
  int circle_nodes = 256;
  int cycle_nodes = 512;
  int refinement_factor = 2;
  double tol = 1e-10;   // node-doubling relative gate
  int max_nodes = 1 << 16;
};

// Node counts must be powers of two >= 64, the refinement factor 2, the
// tolerance positive. Throws BadConfig.
void validate(const QuadratureSpec& q);

using CFun = std::function<cplx(cplx)>;

// (1/2 i pi) * contour integral of f over the counterclockwise circle
// |u - center| = radius. Doubles nodes until the result moves by < tol
// relative; throws QuadratureNotConverged at the node cap.
cplx circle_integral(const CFun& f, cplx center, double radius,
                     const QuadratureSpec& q);

// Integral of f along the straight path s0 -> s0 + period, assuming f is
// periodic with that period along the path (trapezoid = spectral accuracy).
cplx path_integral(const CFun& f, cplx s0, cplx period,
                   const QuadratureSpec& q);

// Winding number of f along the closed polygon (vertices in order, last edge
// closes back to the first vertex). Adaptive phase tracking; throws
// ContourTooTight if the phase cannot be resolved (zero or pole on/near the
// contour).
long winding_number(const CFun& f, const std::vector<cplx>& polygon);

// Laurent coefficients c_k of f around center for k in [lo, hi], computed by
// a plain DFT on one ring of the given radius (no cross-radius check; the
// checked version lives in oracle).
std::map<int, cplx> laurent_ring(const CFun& f, cplx center, double radius,
                                 int lo, int hi, int nodes);

}  // namespace speccurve

#endif
