// Genus-1 special-function kernel: the odd theta function, its logarithmic
// derivative Z = theta'/theta, the Weierstrass-type function wp = -Z'
// (which differs from the classical Weierstrass P by the additive constant
// zeta1), and derivatives of wp up to order 7.
//
// Conventions, fixed once here and consumed everywhere downstream:
//   theta(u) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi u),  q = e^{i pi tau}
//   theta(-u) = -theta(u),   theta(u+1) = -theta(u),
//   theta(u+tau) = -theta(u) exp(-i pi (2u + tau))
//   Z(u) = theta'(u)/theta(u):  Z(u+1) = Z(u),  Z(u+tau) = Z(u) - 2 i pi,
//   Z(u) ~ 1/u + zeta1 * u near 0,  zeta1 = theta'''(0) / (3 theta'(0))
//   wp(u) = -Z'(u) ~ 1/u^2 - zeta1,  doubly periodic.
// All evaluation reduces u to a centered fundamental-cell representative and
// reconstructs via the exact quasi-periodicity factors; series are summed to
// series_tol with a hard term cap.

#ifndef SPECCURVE_ELLIPTIC_HPP
#define SPECCURVE_ELLIPTIC_HPP

#include <array>
#include <utility>
#include <vector>

#include "speccurve/types.hpp"

namespace speccurve {

// Evaluation closer than this to a lattice point is refused (PoleProximity)
// for functions with lattice poles.
inline constexpr double kPoleGuard = 1e-8;

// Below this Im(tau) the series tail bound is not honored (ModulusDegenerate).
inline constexpr double kImTauFloor = 0.02;

class Modulus {
 public:
  explicit Modulus(cplx tau, double series_tol = 1e-16, int max_terms = 64);

  cplx tau() const { return tau_; }
  cplx q() const { return q_; }
  double series_tol() const { return series_tol_; }
  int max_terms() const { return max_terms_; }

  // theta^{(k)}(0), k = 0..4 (even orders vanish identically).
  const std::array<cplx, 5>& theta0_derivs() const { return dth0_; }
  cplx theta_prime0() const { return dth0_[1]; }
  cplx zeta1() const { return zeta1_; }

  // The quartic invariant of wp' ^2 = 4 p^3 - g2 p - g3 written for
  // p = wp + zeta1; computed once from the derivative recursion closure and
  // cross-checked at an independent point.
  cplx g2() const { return g2_; }

 private:
  cplx tau_, q_;
  double series_tol_;
  int max_terms_;
  std::array<cplx, 5> dth0_;
  cplx zeta1_, g2_;
};

struct TorusPoint {
  cplx u;        // the original point
  cplx reduced;  // representative with lattice coordinates in [0,1)^2
  long m = 0;    // u = reduced + m + n*tau
  long n = 0;
};

TorusPoint reduce(cplx u, const Modulus& mod);

// Distance from u to the nearest lattice point m + n*tau.
double lattice_distance(cplx u, const Modulus& mod);

// Real lattice coordinates (a, b) with u = a + b*tau.
std::pair<double, double> lattice_coords(cplx u, const Modulus& mod);

cplx theta(cplx u, const Modulus& mod);

// theta^{(j)}(u) for j = 0..max_order (max_order <= 4), term-wise analytic
// differentiation of the series plus exact quasi-periodic reconstruction.
std::vector<cplx> theta_derivs(cplx u, const Modulus& mod, int max_order);

// Z(u) = theta'(u)/theta(u). Throws PoleProximity within kPoleGuard of the
// lattice.
cplx zfun(cplx u, const Modulus& mod);

// wp derivatives [wp, wp', ..., wp^{(max_order)}], max_order <= 7.
// Orders 0..2 come from theta log-derivatives; higher orders from the
// polynomial recursion in p = wp + zeta1, q = wp' closed by g2.
std::vector<cplx> wp_derivs(cplx u, const Modulus& mod, int max_order);

// Z(u) and [wp, ..., wp^{(wp_max_order)}](u) from a single theta evaluation;
// wp_max_order = -1 yields Z alone. This is the hot path for contour
// quadrature, where zfun and wp_derivs at the same point would otherwise
// each rerun the series.
struct ZWp {
  cplx z;
  std::vector<cplx> wp;
};
ZWp zwp_bundle(cplx u, const Modulus& mod, int wp_max_order);

// Single wp value of the given order (0..3 supported for external callers).
cplx wp(cplx u, const Modulus& mod, int order = 0);

}  // namespace speccurve

#endif
