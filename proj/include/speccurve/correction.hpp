// Genus-1 corrections on the spectral curve: endpoint local expansion data,
// the 1/N^2 resolvent correction Y1 assembled from the wp stack at the
// branch points, the Bargmann kernel, the endpoint sum Gamma1, and the
// free-energy correction F1 assembled in log space.
//
// With stacks x'', ..., x''''' and y', y'', y''' taken at a branch point e_k
// of x (simple zero of x'), and C_k the pole-matching combination
//   C_k = x'''^2/x''^2 - x''''/x'' + (x'''/x'')(y''/y') - y'''/y',
// the computed quantities are
//   Y1(x(s)) = (1/x'(s)) sum_k [ wp''(s-e_k)/(48 x'' y')
//              + x''' wp'(s-e_k)/(48 x''^2 y')
//              + (C_k - 24 zeta1) wp(s-e_k)/(48 x'' y') ],
//   Gamma1   = sum_k (C_k - 24 zeta1)/(48 x'' y'),
//   F1       = -(1/24) ln[ gamma^4 gammat^4 theta'(0)^8
//                prod_{i,j} theta(e_i - et_j) theta(2 u_inf)
//                          / (theta(e_i - u_inf) theta(et_j + u_inf)) ].
// F1 is assembled as a sum of principal logs of the factors, so its value is
// pinned only up to 2 i pi/24; the net winding of the assembled sum is
// reported alongside. All theta arguments are lattice-reduced first, which
// fixes the reported value against representative choices (exp(-24 F1) is
// then exactly invariant under the m-type half-lattice gauge, and the n-type
// gauge is pinned by the solver's canonical representative).

#ifndef SPECCURVE_CORRECTION_HPP
#define SPECCURVE_CORRECTION_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "speccurve/torusmap.hpp"
#include "speccurve/types.hpp"

namespace speccurve {

// Derivative stack at one branch point e of x, plus the local sheet-collision
// coefficients: r = x'''/(3 x''), s = x''''/(6 x''), t = x'''''/(60 x'') - r s.
// The second preimage of x near e satisfies (e - s~)/(s - e) =
// 1 + r (s-e) + r^2 (s-e)^2 + (2 r^3 + t)(s-e)^3 + O((s-e)^4).
struct EndpointLocalData {
  cplx e;
  cplx x2, x3, x4, x5;  // x'', x''', x'''', x''''' at e
  cplx y1, y2, y3;      // y', y'', y''' at e
  cplx r, s, t;
};

// Stack and coefficients at a polished endpoint (|x'(e)| at roundoff).
// Throws DegenerateEndpoint when |x''(e)| or |y'(e)| falls below 1e-8 of the
// curve's residue scales, InternalCheck when e is not a zero of x'.
EndpointLocalData local_data(const UniformParams& p, cplx e);

// local_data at every member of ep.e, in the set's order.
std::vector<EndpointLocalData> local_data_all(const UniformParams& p,
                                              const EndpointSet& ep);

// The combination C_k above; enters both Y1 and Gamma1.
cplx pole_matching_coeff(const EndpointLocalData& d);

// Y1(x(s)) by the display above. Throws PoleProximity when s comes within
// 100 * kPoleGuard of an endpoint or a puncture (mod lattice).
cplx y1_of_s(const UniformParams& p,
             const std::vector<EndpointLocalData>& locals, cplx s);

// The sheet-collision term wp(s~ - s)/(x'(s~) x'(s) (y(s~) - y(s))) with
// s~ the second preimage of x(s) near the endpoint of ep.e closest to s.
// The denominator orientation is fixed by matching the leading z^-5
// coefficient 1/(8 x''^2 y') of Y1: since x'(s~) ~ -x'' eps at collision,
// the (y(s~) - y(s)) order makes the term's singular part agree with Y1
// instead of its negative. Used as the independent cross-check of the
// pole-matching construction.
cplx sheet_sum_y1(const UniformParams& p, const EndpointSet& ep, cplx s);

// The Bargmann kernel wp(s - u): x'(s) x'(u) dY(x(u))/dV1(x(s)) with the
// A-cycle constant fixed to zero. Throws PoleProximity at s = u mod lattice.
cplx bargmann(const UniformParams& p, cplx s, cplx u);

// Gamma1 = sum_k (C_k - 24 zeta1)/(48 x''(e_k) y'(e_k)).
cplx gamma1(const UniformParams& p,
            const std::vector<EndpointLocalData>& locals);

// F1 with the net log-space winding: value = -L/24 where L is the sum of
// principal logs of all factors, and branch is the integer with
// Im L - 2 pi branch in (-pi, pi].
struct F1Value {
  cplx value;
  long branch = 0;
};

// Assembles F1 from both endpoint families. Every theta argument is
// lattice-reduced before evaluation; throws ThetaZeroHit when a reduced
// argument lands within kPoleGuard of the lattice.
F1Value f1(const UniformParams& p, const EndpointSet& ep);

// Representative-free evaluation of the same correction from the pole scales
// and the endpoint slopes: -(1/24) ln[theta'(0)^8 A^2 At^(d2+1) prod_i y'(e_i)]
// with A = scale_x, At = scale_y and principal logs. exp(-24 .) agrees with
// the theta-product form up to quasi-periodicity gauge factors; every factor
// here is a function of the curve alone, so parameter derivatives of this
// form are free of the representative drift the reduced theta product
// carries. Derivative cross-checks against gamma1 use this form.
cplx f1_from_scales(const UniformParams& p, const EndpointSet& ep);

struct CorrectionReport {
  std::vector<std::pair<cplx, cplx>> y1_samples;  // (s, Y1(x(s)))
  cplx gamma1;
  F1Value f1;
  // Named self-check residuals: ellipticity of Y1 x', growth exponents at
  // the punctures, and endpoint Laurent-template mismatches.
  std::map<std::string, double> validation;
};

// Full evaluation bundle: endpoint set, local data, Gamma1, F1, samples of
// Y1 on a centered circle plus rays into each endpoint, and the validation
// residuals.
CorrectionReport correction_report(const UniformParams& p);

}  // namespace speccurve

#endif
