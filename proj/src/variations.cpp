#include "speccurve/variations.hpp"

#include <cmath>
#include <limits>

#include "speccurve/elliptic.hpp"
#include "speccurve/errors.hpp"

namespace speccurve {

namespace {

constexpr double kVarGuard = kPoleGuard * 1e2;

// True for the filling-direction point, whose insertion location is the NaN
// marker set by filling_direction.
bool is_smeared(const VariationPoint& v) { return std::isnan(v.s.real()); }

// Z at the actual representative of v: the kernel is 1-periodic and drops
// 2 i pi per tau step, so the reduced evaluation is corrected by the lattice
// integer. Keeping the honest value makes every formula covariant under
// representative shifts of the endpoints (a tau shift of e_i feeds taudot
// into edot_i exactly as the moving lattice demands).
cplx zq(cplx v, const Modulus& mod) {
  const TorusPoint tp = reduce(v, mod);
  return zfun(tp.reduced, mod) - kTwoPiI * double(tp.n);
}

void guard_insertion(const UniformParams& p, const EndpointSet& ep, cplx s) {
  const Modulus& mod = p.modulus;
  for (cplx e : ep.e)
    if (lattice_distance(s - e, mod) < kVarGuard)
      fail(errc::pole_proximity,
           "variation insertion point on a branch point of x");
  if (lattice_distance(s - p.u_inf, mod) < kVarGuard ||
      lattice_distance(s + p.u_inf, mod) < kVarGuard)
    fail(errc::pole_proximity, "variation insertion point on a puncture");
}

cplx bracket_sum(const UniformParams& p, const EndpointSet& ep,
                 const VariationPoint& v, cplx u) {
  const Modulus& mod = p.modulus;
  cplx acc = 0.0;
  for (size_t i = 0; i < ep.e.size(); ++i)
    acc += v.alphas[i] * (2.0 * zq(u - ep.e[i], mod) +
                          zq(p.u_inf + ep.e[i], mod) -
                          zq(p.u_inf - ep.e[i], mod));
  return acc;
}

void guard_field_point(const UniformParams& p, const EndpointSet& ep, cplx u) {
  const Modulus& mod = p.modulus;
  if (lattice_distance(u - p.u_inf, mod) < kVarGuard ||
      lattice_distance(u + p.u_inf, mod) < kVarGuard)
    fail(errc::pole_proximity, "variation field evaluated on a puncture");
  for (cplx e : ep.e)
    if (lattice_distance(u - e, mod) < kVarGuard)
      fail(errc::pole_proximity,
           "variation field evaluated on a branch point of x");
}

}  // namespace

VariationPoint variation_point(const UniformParams& p, const EndpointSet& ep,
                               cplx s) {
  guard_insertion(p, ep, s);
  const Modulus& mod = p.modulus;
  VariationPoint v;
  v.s = s;
  v.alphas.reserve(ep.e.size());
  cplx C = 0.0;
  for (cplx e : ep.e) {
    const auto d = local_data(p, e);
    const cplx alpha = wp(s - e, mod) / (d.x2 * d.y1);
    v.alphas.push_back(alpha);
    C += alpha * (zq(p.u_inf - e, mod) + zq(-p.u_inf - e, mod));
  }
  v.C = -0.5 * C;
  return v;
}

VariationPoint filling_direction(const UniformParams& p,
                                 const EndpointSet& ep) {
  const Modulus& mod = p.modulus;
  const cplx rate = -kTwoPiI / mod.tau();
  VariationPoint v;
  v.s = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  v.alphas.reserve(ep.e.size());
  cplx C = 0.0;
  for (cplx e : ep.e) {
    const auto d = local_data(p, e);
    const cplx alpha = rate / (d.x2 * d.y1);
    v.alphas.push_back(alpha);
    C += alpha * (zq(p.u_inf - e, mod) + zq(-p.u_inf - e, mod));
  }
  v.C = -0.5 * C;
  return v;
}

cplx xdot(const UniformParams& p, const EndpointSet& ep,
          const VariationPoint& v, cplx u) {
  guard_field_point(p, ep, u);
  return 0.5 * xy_pair(p, u).xp * bracket_sum(p, ep, v, u);
}

cplx ydot(const UniformParams& p, const EndpointSet& ep,
          const VariationPoint& v, cplx u) {
  guard_field_point(p, ep, u);
  const Modulus& mod = p.modulus;
  const auto at_u = xy_pair(p, u);
  // For the filling direction the wp(s - u) kernel averages to the constant
  // cycle integral 2 i pi times the density -1/tau.
  if (is_smeared(v))
    return 0.5 * at_u.yp * bracket_sum(p, ep, v, u) +
           kTwoPiI / mod.tau() / at_u.xp;
  if (lattice_distance(v.s - u, mod) < kVarGuard)
    fail(errc::pole_proximity,
         "variation field evaluated on the insertion point");
  return 0.5 * at_u.yp * bracket_sum(p, ep, v, u) - wp(v.s - u, mod) / at_u.xp;
}

cplx taudot(const VariationPoint& v) {
  cplx acc = 0.0;
  for (cplx a : v.alphas) acc += a;
  return kTwoPiI * acc;
}

cplx uinfdot(const UniformParams& p, const EndpointSet& ep,
             const VariationPoint& v) {
  const Modulus& mod = p.modulus;
  cplx acc = 0.0;
  for (size_t i = 0; i < ep.e.size(); ++i)
    acc += v.alphas[i] *
           (zq(p.u_inf - ep.e[i], mod) + zq(p.u_inf + ep.e[i], mod));
  return -0.5 * acc;
}

cplx edot(const UniformParams& p, const EndpointSet& ep,
          const VariationPoint& v, int i) {
  const Modulus& mod = p.modulus;
  const size_t n = ep.e.size();
  if (i < 0 || size_t(i) >= n)
    fail(errc::bad_config, "edot endpoint index out of range");
  cplx acc = -v.C;
  for (size_t j = 0; j < n; ++j)
    if (j != size_t(i)) acc -= v.alphas[j] * zq(ep.e[i] - ep.e[j], mod);
  const auto d = local_data(p, ep.e[i]);
  return acc - 0.5 * v.alphas[i] * d.x3 / d.x2;
}

cplx Adot_over_A(const UniformParams& p, const EndpointSet& ep,
                 const VariationPoint& v) {
  const Modulus& mod = p.modulus;
  cplx acc = 0.0;
  for (size_t i = 0; i < ep.e.size(); ++i)
    acc += v.alphas[i] * wp(ep.e[i] - p.u_inf, mod);
  return acc;
}

cplx Atdot_over_At(const UniformParams& p, const EndpointSet& ep,
                   const VariationPoint& v) {
  const Modulus& mod = p.modulus;
  cplx acc = 0.0;
  for (size_t i = 0; i < ep.e.size(); ++i)
    acc += v.alphas[i] * wp(ep.e[i] + p.u_inf, mod);
  return acc;
}

cplx dlog_theta_prime0(const UniformParams& p, const VariationPoint& v) {
  cplx acc = 0.0;
  for (cplx a : v.alphas) acc += a;
  return 1.5 * p.modulus.zeta1() * acc;
}

cplx dlog_prod_yprime(const UniformParams& p, const EndpointSet& ep,
                      const VariationPoint& v) {
  const Modulus& mod = p.modulus;
  const cplx zeta1 = mod.zeta1();
  const size_t n = ep.e.size();
  cplx acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto d = local_data(p, ep.e[i]);
    cplx pair_sum = 0.0;
    for (size_t j = 0; j < n; ++j)
      if (j != i) pair_sum += v.alphas[j] * wp(ep.e[i] - ep.e[j], mod);
    const cplx ratios = d.y3 / d.y1 + d.x4 / (3.0 * d.x2) -
                        0.5 * (d.x3 / d.x2) * (d.x3 / d.x2) -
                        (d.y2 / d.y1) * (d.x3 / d.x2);
    acc += -pair_sum + zeta1 * v.alphas[i] + 0.5 * v.alphas[i] * ratios;
    // The wp', wp'' kernel terms average to zero along the cycle for the
    // filling direction.
    if (!is_smeared(v)) {
      const auto wd = wp_derivs(ep.e[i] - v.s, mod, 2);
      acc += 0.5 * wd[1] * d.x3 / (d.x2 * d.x2 * d.y1) -
             0.5 * wd[2] / (d.x2 * d.y1);
    }
  }
  return acc;
}

}  // namespace speccurve
