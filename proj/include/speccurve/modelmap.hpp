// The two-way dictionary between uniformization parameters and model data:
// potential couplings as contour moments at the punctures,
//
//   g_k  = (1/2 i pi) oint_{u_inf}  y x' / x^k ds      k = 1 .. d1+1
//   gt_k = (1/2 i pi) oint_{-u_inf} x y' / y^k ds      k = 1 .. d2+1
//   1    = (1/2 i pi) oint_{u_inf}  y x' ds            (normalization)
//   2 i pi eps = integral_0^tau y x' ds                (filling fraction)
//   Gamma      = integral_0^1   y x' ds                (conjugate cycle)
//
// Contour orientations: the coupling integrals circulate positively in the
// x (resp. y) plane, which is clockwise around the puncture in s; the
// normalization residue circulates counterclockwise in s. This is the one
// assignment under which y ~ V1'(x) - 1/x on the physical sheet with
// positive couplings, and both cannot share an orientation.
//
// plus the holomorphic-differential consistency report and the Newton
// inverse solver that reconstructs UniformParams from a ModelSpec.

#ifndef SPECCURVE_MODELMAP_HPP
#define SPECCURVE_MODELMAP_HPP

#include <vector>

#include "speccurve/cpoly.hpp"
#include "speccurve/quadrature.hpp"
#include "speccurve/torusmap.hpp"

namespace speccurve {

struct ModelSpec {
  Poly V1;       // potential of the x matrix, degree d1+1
  Poly V2;       // potential of the y matrix, degree d2+1
  cplx epsilon;  // filling fraction (complex allowed)
};

// Degrees in [2, 5], nonzero leading coefficients.
void validate(const ModelSpec& m);

// Couplings of V = g0 + sum_{k>=1} g_k x^k / k: returns [g_1, ..., g_deg].
std::vector<cplx> couplings(const Poly& v);
// Inverse of couplings with g0 = 0.
Poly potential_from_couplings(const std::vector<cplx>& g);

struct ForwardMap {
  std::vector<cplx> g;    // g_1 .. g_{d1+1}
  std::vector<cplx> gt;   // gt_1 .. gt_{d2+1}
  cplx norm_residual;         // u_inf-side normalization minus 1
  cplx norm_residual_mirror;  // (-u_inf)-side normalization minus 1
};

// All puncture moments on shared node-doubled circles. The circle radius is
// half the distance from the puncture to the nearest endpoint or the other
// puncture; a winding check proves no zero of x (resp. y) sits inside.
// The overload without an EndpointSet locates the endpoints itself.
ForwardMap potentials_from_params(const UniformParams& p,
                                  const QuadratureSpec& q);
ForwardMap potentials_from_params(const UniformParams& p,
                                  const QuadratureSpec& q,
                                  const EndpointSet& ep);

// eps = (1/2 i pi) * integral of y x' along the straight tau-direction path,
// base point chosen to maximize clearance from punctures and endpoints;
// recomputed from a second base point in the same gap as a homology check.
cplx filling_fraction(const UniformParams& p, const QuadratureSpec& q);
cplx filling_fraction(const UniformParams& p, const QuadratureSpec& q,
                      const EndpointSet& ep);

// Gamma = integral of y x' along the 1-direction path (no 1/2 i pi).
cplx gamma_B(const UniformParams& p, const QuadratureSpec& q);
cplx gamma_B(const UniformParams& p, const QuadratureSpec& q,
             const EndpointSet& ep);

struct SolveOptions {
  double tol = 1e-11;     // residual vector norm
  int max_iter = 60;
  double fd_step = 1e-7;  // relative Jacobian probe
  QuadratureSpec quad{64, 128, 2, 1e-12, 1 << 16};
};

struct SolveStats {
  int iterations = 0;
  double residual_norm = 0.0;
};

// Newton inverse of the forward map: finds UniformParams reproducing the
// couplings of m.V1, m.V2, the filling fraction, and the normalization.
// Endpoints are tracked across iterates; the returned parameters are in the
// canonical translation gauge. Throws JacobianSingular, MaxIterations,
// LeftDomain (with the last iterate described in the message).
UniformParams solve_inverse(const ModelSpec& m, const UniformParams& guess,
                            const SolveOptions& opts = {},
                            SolveStats* stats = nullptr);

// Walks from the model realized by base_params to the target model along a
// straight segment in coupling space, re-solving at each step with adaptive
// stride; the cure for targets outside the direct Newton basin.
UniformParams solve_continuation(const ModelSpec& target,
                                 const UniformParams& base_params,
                                 const SolveOptions& opts = {});

struct DuReport {
  double growth_exponent_plus;   // du near u_inf: log10 growth, want ~ 0
  double growth_exponent_minus;  // du near -u_inf
  cplx a_cycle;                  // oint_A du, want 1
  cplx b_cycle;                  // oint_B du
  cplx b_cycle_fd;               // (1/2 i pi) dGamma/deps, central difference
};

// The eps-derivative of y dx at fixed x, realized by re-solving the model at
// eps +- h and inverting the perturbed curves at the baseline x values.
DuReport du_check(const UniformParams& p, const QuadratureSpec& q,
                  double h = 1e-5);

// One-sided FD Jacobian of the stacked forward map
// [g_1.., gt_1.., norm_residual, eps] with respect to
// [gamma, gammat, u_inf, tau, A0, A2.., At0, At2..]; row-major.
std::vector<std::vector<cplx>> forward_jacobian(const UniformParams& p,
                                                const SolveOptions& opts = {});

}  // namespace speccurve

#endif
