// The independent verification harness: central finite differences through
// the inverse solver along the coupling and filling-fraction coordinates,
// the residue pairing that realizes the first-potential derivative on the
// polynomial directions, and the cross-radius Laurent fit gate.
//
// The pairing and the finite differences are tied together by one global
// constant kPairingKappa and one structural correction. A coupling step at
// fixed filling fraction is not the bare insertion: the insertion holds the
// conjugate (1-direction) period of y dx fixed and moves eps by -1 per unit
// weight, so the finite difference equals
//
//   fd_gk(Q) = contour_pair(Qdot, k) + pairing_eps_weight(k) * dQ/deps
//
// with dQ/deps supplied by the variations filling_direction. The constant
// and the 1/k normalization below were measured by tools/derive_pairing and
// are frozen here; see that tool for the fit across observables and k.

#ifndef SPECCURVE_ORACLE_HPP
#define SPECCURVE_ORACLE_HPP

#include <functional>
#include <map>
#include <vector>

#include "speccurve/modelmap.hpp"
#include "speccurve/quadrature.hpp"
#include "speccurve/torusmap.hpp"
#include "speccurve/types.hpp"

namespace speccurve {

// Global normalization between coupling finite differences and the residue
// pairing, measured by tools/derive_pairing on the shipped example models:
// one value for every observable and every k, including the free-energy
// correction when its field enters as +Y1(x(s)) x'(s).
inline constexpr double kPairingKappa = 1.0;

struct FDPlan {
  // Central differences throughout. The default step suits derivatives that
  // go through a re-solve; direct parameter probes can afford smaller.
  double step = 1e-4;
  // One extra central difference at step/2 combined by Richardson
  // extrapolation; doubles the solve count.
  bool richardson = true;
};

// Step within [1e-9, 1e-2]. Throws BadConfig.
void validate(const FDPlan& plan);

using Observable = std::function<cplx(const UniformParams&)>;

// The solved parameter sets flanking one model coordinate: displaced holds
// the +step and -step solutions, then +step/2 and -step/2 when the plan asks
// for Richardson. k is the coupling index, or 0 for the filling-fraction
// direction.
struct GkProbe {
  int k;
  double step;
  bool richardson;
  UniformParams base;
  std::vector<UniformParams> displaced;
};

// Re-solves the model with the coupling g_k of V1 (k in [1, deg V1])
// displaced; every solve is seeded from the baseline solution so Newton
// stays in basin, and a failed displaced solve propagates. The seed must be
// the solved baseline parameters for m.
GkProbe make_gk_probe(const ModelSpec& m, int k, const FDPlan& plan,
                      const UniformParams& seed);

// Same along the filling fraction.
GkProbe make_eps_probe(const ModelSpec& m, const FDPlan& plan,
                       const UniformParams& seed);

// Central difference of f across the probe. Throws StepTooLarge when the
// two one-sided differences at the full step disagree by more than 10%
// (above the solver noise floor), the signature of a step outside the
// linear regime or a basin hop.
cplx fd_from_probe(const GkProbe& probe, const Observable& f);

// make_gk_probe + fd_from_probe in one call; prefer the split form when
// evaluating many observables on the same displaced solves.
cplx fd_gk(const Observable& f, const ModelSpec& m, int k, const FDPlan& plan,
           const UniformParams& seed);

// Counterpart along eps, for d/deps cross-checks.
cplx fd_eps(const Observable& f, const ModelSpec& m, const FDPlan& plan,
            const UniformParams& seed);

// kPairingKappa/k times the residue (1/2 i pi) oint x(s)^k field(s) ds on a
// counterclockwise circle around u_inf (radius just under half the distance
// to the nearest branch point or the mirror puncture). With field the
// dotted variation Qdot(s) = x'(s) dQ/dV1(x(s)) this realizes dQ/dg_k up to
// the filling-fraction restoration below; the 1/k matches the k/x^{k+1}
// weight with which the coupling enters the potential derivative. Throws
// BadConfig for k < 1 and propagates QuadratureNotConverged.
cplx contour_pair(const CFun& field, const UniformParams& p, int k,
                  const QuadratureSpec& q);
cplx contour_pair(const CFun& field, const UniformParams& p, int k,
                  const QuadratureSpec& q, const EndpointSet& ep);

// The weight of the filling-fraction restoration in the pairing identity:
// kPairingKappa/k times the residue of x^k alone. The pairing moves eps by
// minus this weight, so adding weight times dQ/deps restores the fixed-eps
// constraint of the finite difference.
cplx pairing_eps_weight(const UniformParams& p, int k,
                        const QuadratureSpec& q);
cplx pairing_eps_weight(const UniformParams& p, int k, const QuadratureSpec& q,
                        const EndpointSet& ep);

// Laurent coefficients of f around center for orders lo..hi, by ring DFT at
// the given radius and at radius/2; the two rings must agree to 1e-6
// relative to the largest reported coefficient, which catches both an
// unresolved ring and a stray singularity inside the annulus. Returns the
// outer-ring values. Throws RadiusInvalid, InconsistentRadii.
std::map<int, cplx> laurent_fit(const CFun& f, cplx center, int lo, int hi,
                                double radius, int nodes = 1024);

}  // namespace speccurve

#endif  // SPECCURVE_ORACLE_HPP
