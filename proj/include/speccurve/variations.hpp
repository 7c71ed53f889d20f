// Analytic variations of the uniformization data along the first-potential
// direction. All returned quantities are "dotted": Qdot := x'(s) dQ/dV1(x(s))
// with s the insertion point on the curve, so each one is a function of s
// built from
//   alpha_i = wp(s - e_i) / (x''(e_i) y'(e_i))
// over the branch points e_i of x, and the constant
//   C = -(1/2) sum_i alpha_i [Z(u_inf - e_i) + Z(-u_inf - e_i)]
// fixed by the behavior at the punctures. The defining property is the
// Wronskian identity
//   xdot(u) y'(u) - ydot(u) x'(u) = wp(s - u),
// whose double pole at u = s is the insertion and whose vanishing 1-cycle
// average means the variation holds the conjugate (1-direction) period of
// y dx fixed, not the filling fraction; finite-difference comparisons at
// fixed filling fraction therefore add an explicit restoring multiple of the
// quantity's filling-fraction derivative (see the pairing helpers in the
// oracle module).
//
// The closed forms, with Z the log-derivative kernel and wp = -Z':
//   xdot(u)  = (1/2) x'(u) sum_i alpha_i [2 Z(u-e_i) + Z(u_inf+e_i)
//              - Z(u_inf-e_i)]
//   ydot(u)  = same with y'(u), minus wp(s-u)/x'(u)
//   taudot   = 2 i pi sum_i alpha_i
//   uinfdot  = -(1/2) sum_i alpha_i [Z(u_inf-e_i) + Z(u_inf+e_i)]
//   edot_i   = -C - sum_{j != i} alpha_j Z(e_i-e_j)
//              - (1/2) alpha_i x'''(e_i)/x''(e_i)
//   Adot/A   = sum_i alpha_i wp(e_i - u_inf),  A = scale_x
//   Atdot/At = sum_i alpha_i wp(e_i + u_inf),  At = scale_y
//   dlog_theta_prime0 = (3/2) zeta1 sum_i alpha_i
//   dlog_prod_yprime  = sum over the e_i of the per-endpoint log-slope
//     -sum_{j != i} alpha_j wp(e_i-e_j) + zeta1 alpha_i
//     + (alpha_i/2)[y'''/y' + (1/3) x''''/x'' - (1/2) x'''^2/x''^2
//                   - (y''/y')(x'''/x'')]
//     + (1/2) wp'(e_i-s) x'''/(x''^2 y') - (1/2) wp''(e_i-s)/(x'' y'),
// all endpoint stacks evaluated at e_i.

#ifndef SPECCURVE_VARIATIONS_HPP
#define SPECCURVE_VARIATIONS_HPP

#include <vector>

#include "speccurve/correction.hpp"
#include "speccurve/torusmap.hpp"
#include "speccurve/types.hpp"

namespace speccurve {

// The per-insertion data shared by every variation formula.
struct VariationPoint {
  cplx s;
  std::vector<cplx> alphas;
  cplx C = 0.0;
};

// Builds alpha_i and C at insertion point s. Throws PoleProximity when s
// comes within 100 * kPoleGuard of an endpoint of ep.e (mod lattice), where
// the alphas blow up, and DegenerateEndpoint through the local stacks.
VariationPoint variation_point(const UniformParams& p, const EndpointSet& ep,
                               cplx s);

// The variation data of the filling-fraction flow at fixed couplings: the
// insertion smeared uniformly along the tau-direction cycle with density
// -1/tau, the unique combination that raises eps by one while holding every
// coupling and the normalization. Under that average each alpha_i collapses
// to (-2 i pi / tau) / (x''(e_i) y'(e_i)), the wp(s - u) insertion kernel
// collapses to the constant -2 i pi / tau, and the wp', wp'' kernel terms
// vanish by periodicity. Formulas evaluated on the returned point therefore
// give dQ/deps directly. The stored insertion point is NaN; ydot and
// dlog_prod_yprime detect it and switch to the averaged kernel terms.
VariationPoint filling_direction(const UniformParams& p,
                                 const EndpointSet& ep);

// xdot(u) and ydot(u) by the displays above. Throw PoleProximity when u
// comes within 100 * kPoleGuard of a puncture or an endpoint (x' vanishes or
// blows up there), or, for ydot, when u collides with the insertion point s.
cplx xdot(const UniformParams& p, const EndpointSet& ep,
          const VariationPoint& v, cplx u);
cplx ydot(const UniformParams& p, const EndpointSet& ep,
          const VariationPoint& v, cplx u);

// The parameter slopes at insertion point s.
cplx taudot(const VariationPoint& v);
cplx uinfdot(const UniformParams& p, const EndpointSet& ep,
             const VariationPoint& v);
cplx edot(const UniformParams& p, const EndpointSet& ep,
          const VariationPoint& v, int i);
cplx Adot_over_A(const UniformParams& p, const EndpointSet& ep,
                 const VariationPoint& v);
cplx Atdot_over_At(const UniformParams& p, const EndpointSet& ep,
                   const VariationPoint& v);
cplx dlog_theta_prime0(const UniformParams& p, const VariationPoint& v);
cplx dlog_prod_yprime(const UniformParams& p, const EndpointSet& ep,
                      const VariationPoint& v);

}  // namespace speccurve

#endif  // SPECCURVE_VARIATIONS_HPP
