// Genus-1 uniformization of the spectral curve: the elliptic functions
// x(u), y(u) built from Z and wp stacks around the puncture pair +-u_inf,
// their derivatives, branch-point (endpoint) location with an
// argument-principle completeness proof, and the local sheet-pair solver.
//
//   x(u) = A (Z(u-u_inf) - Z(u+u_inf)) + A0
//          + sum_{k=2}^{d2} A_k/(k-1)! wp^{(k-2)}(u+u_inf),   A = gamma theta(2u_inf)/theta'(0)
//   y(u) = -At (Z(u-u_inf) - Z(u+u_inf)) + At0
//          + sum_{k=2}^{d1} At_k/(k-1)! wp^{(k-2)}(u-u_inf),  At = -gammat theta(2u_inf)/theta'(0)
//
// x has a simple pole at u_inf (residue scale A) and a pole of order d2 at
// -u_inf; y mirrors with d1 and the punctures swapped.

#ifndef SPECCURVE_TORUSMAP_HPP
#define SPECCURVE_TORUSMAP_HPP

#include <vector>

#include "speccurve/elliptic.hpp"
#include "speccurve/types.hpp"

namespace speccurve {

struct UniformParams {
  int d1 = 1, d2 = 1;
  Modulus modulus;
  cplx u_inf;
  cplx gamma, gammat;
  std::vector<cplx> xA;  // [A0, A2, ..., A_{d2}], size d2
  std::vector<cplx> yA;  // [At0, At2, ..., At_{d1}], size d1

  UniformParams(int d1_, int d2_, Modulus mod, cplx u_inf_, cplx gamma_,
                cplx gammat_, std::vector<cplx> xA_, std::vector<cplx> yA_);

  // Residue scale of x at u_inf.
  cplx scale_x() const { return gamma * theta_ratio_; }
  // Residue scale of y at -u_inf (note the sign in the display above).
  cplx scale_y() const { return -gammat * theta_ratio_; }

 private:
  // theta(2 u_inf)/theta'(0), fixed at construction; treat the fields as
  // immutable and build a fresh value for any parameter change.
  cplx theta_ratio_;
};

// Structural invariants: degree range, coefficient list sizes, nonzero
// leading data, punctures clear of the lattice and of theta zeros.
void validate(const UniformParams& p);

cplx x_of_u(const UniformParams& p, cplx u);
cplx y_of_u(const UniformParams& p, cplx u);

// [f, f', ..., f^{(max_order)}], max_order <= 5.
std::vector<cplx> x_derivs(const UniformParams& p, cplx u, int max_order);
std::vector<cplx> y_derivs(const UniformParams& p, cplx u, int max_order);

// x, x', y, y' at one point from two theta evaluations; the workhorse of
// every contour loop.
struct XYPair {
  cplx x, xp, y, yp;
};
XYPair xy_pair(const UniformParams& p, cplx u);

// The half-lattice translation u -> u + (m0 + n0 tau)/2 applied to the
// parameter set: the same curve reparametrized, with gamma, gammat, A0, At0
// compensated so x_new(u) = x_old(u - c), y likewise. All model observables
// are invariant under it.
UniformParams half_lattice_translate(const UniformParams& p, int m0, int n0);

// The translate with both lattice coordinates of u_inf in [0, 1/2): the
// canonical representative of the discrete translation gauge.
UniformParams canonical_gauge(const UniformParams& p);

struct EndpointSet {
  std::vector<cplx> e;   // zeros of x' in the fundamental cell, d2+3 of them
  std::vector<cplx> et;  // zeros of y', d1+3 of them
  // Cached derivative stacks at each endpoint: e_x[i][k] = x^{(k)}(e[i]),
  // orders 0..5; e_y orders 0..4; mirrored stacks at the et family.
  std::vector<std::vector<cplx>> e_x, e_y;
  std::vector<std::vector<cplx>> et_y, et_x;
  // Recorded constraint residuals (see find_endpoints).
  double e_sum_dist = 0.0;    // dist of sum(e) + (d2-1) u_inf to the lattice
  double et_sum_dist = 0.0;   // dist of sum(et) - (d1-1) u_inf to the lattice
  double e_zsum_dist = 0.0;   // dist of sum_i Z(u_inf - e_i) - (d2+1) Z(2 u_inf) to 2 i pi Z
  double et_zsum_dist = 0.0;  // dist of sum_i Z(u_inf + et_i) - (d1+1) Z(2 u_inf) to 2 i pi Z
};

// Locates all endpoints: coarse grid minima of |x'|, Newton polish, lattice
// reduction and dedup, then an argument-principle count over a 3x3 subcell
// partition (winding of x' plus known pole multiplicities) proving that no
// zero was missed. Throws EndpointCountMismatch or CollisionDetected.
EndpointSet find_endpoints(const UniformParams& p);

// Fast re-polish for a nearby parameter set (Newton from previous endpoint
// locations, count assumed unchanged; falls back to the full search if a
// polish diverges). Used inside solver loops and FD probes.
EndpointSet refine_endpoints(const UniformParams& p, const EndpointSet& seed);

// The second preimage s~ != s of x(s) near the endpoint e, by Newton from the
// reflected seed 2e - s. Throws SeedEscaped / NonConvergence.
cplx sheet_pair(const UniformParams& p, cplx s, cplx e);

}  // namespace speccurve

#endif
