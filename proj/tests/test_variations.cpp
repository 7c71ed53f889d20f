#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "speccurve/correction.hpp"
#include "speccurve/elliptic.hpp"
#include "speccurve/errors.hpp"
#include "speccurve/quadrature.hpp"
#include "speccurve/torusmap.hpp"
#include "speccurve/variations.hpp"

using namespace speccurve;

namespace {

UniformParams generic_params() {
  const cplx tau(0.15, 1.05);
  Modulus mod(tau);
  const cplx u_inf = 0.21 + 0.13 * tau;
  return UniformParams(2, 2, mod, u_inf, cplx(0.8, -0.2), cplx(1.1, 0.4),
                       {cplx(0.3, 0.1), cplx(0.7, -0.25)},
                       {cplx(-0.2, 0.05), cplx(0.9, 0.3)});
}

double rel(cplx a, cplx b) { return rel_diff(a, b, 1e-12); }

// Insertion point with comfortable clearance from all endpoints and the
// punctures of the generic fixture.
cplx insertion(const UniformParams& p) { return 0.62 + 0.68 * p.modulus.tau(); }

}  // namespace

TEST_CASE("the wronskian of the dotted pair is the double-pole kernel") {
  const auto p = generic_params();
  const Modulus& mod = p.modulus;
  const auto ep = find_endpoints(p);
  const cplx s = insertion(p);
  const auto v = variation_point(p, ep, s);
  // 16 x 16 grid over the fundamental cell with generic offsets. Near the
  // punctures both products blow up and the identity is certified relative
  // to their size (the floor keeps the scale at least the kernel's).
  int checked = 0;
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      const cplx u = (a + 0.137) / 16.0 + (b + 0.261) / 16.0 * mod.tau();
      const auto at_u = xy_pair(p, u);
      const cplx lhs = xdot(p, ep, v, u) * at_u.yp - ydot(p, ep, v, u) * at_u.xp;
      const cplx rhs = wp(s - u, mod);
      CHECK(rel_diff(lhs, rhs, 1.0) < 1e-9);
      ++checked;
    }
  }
  CHECK(checked == 256);
}

TEST_CASE("xdot at a branch point reduces to the single alpha term") {
  const auto p = generic_params();
  const auto ep = find_endpoints(p);
  const cplx s = insertion(p);
  const auto v = variation_point(p, ep, s);
  for (size_t i = 0; i < ep.e.size(); ++i) {
    const auto d = local_data(p, ep.e[i]);
    const cplx expected = wp(s - ep.e[i], p.modulus) / d.y1;
    // The approach is linear in the offset, so one Richardson step removes
    // the leading correction.
    const double delta = 1e-5;
    const cplx probe = 2.0 * xdot(p, ep, v, ep.e[i] + delta) -
                       xdot(p, ep, v, ep.e[i] + 2.0 * delta);
    CHECK(rel(probe, expected) < 1e-5);
  }
}

TEST_CASE("the dotted pair is 1-periodic and drops taudot times the slope") {
  const auto p = generic_params();
  const Modulus& mod = p.modulus;
  const auto ep = find_endpoints(p);
  const cplx s = insertion(p);
  const auto v = variation_point(p, ep, s);
  const cplx td = taudot(v);
  for (const cplx u : {cplx(0.41, 0.0) + 0.18 * mod.tau(),
                       cplx(0.09, 0.0) + 0.51 * mod.tau()}) {
    const auto at_u = xy_pair(p, u);
    const cplx xd = xdot(p, ep, v, u), yd = ydot(p, ep, v, u);
    CHECK(rel(xdot(p, ep, v, u + 1.0), xd) < 1e-9);
    CHECK(rel(ydot(p, ep, v, u + 1.0), yd) < 1e-9);
    // Along tau the representative's velocity picks up the moving lattice:
    // Qdot(u + tau) = Qdot(u) - taudot Q'(u).
    CHECK(rel(xdot(p, ep, v, u + mod.tau()), xd - td * at_u.xp) < 1e-9);
    CHECK(rel(ydot(p, ep, v, u + mod.tau()), yd - td * at_u.yp) < 1e-9);
  }
}

TEST_CASE("taudot diverges at an endpoint with the alpha residue") {
  const auto p = generic_params();
  const auto ep = find_endpoints(p);
  for (size_t j = 0; j < ep.e.size(); ++j) {
    const auto d = local_data(p, ep.e[j]);
    const cplx delta(3e-5, 1e-5);
    const auto v = variation_point(p, ep, ep.e[j] + delta);
    CHECK(rel(delta * delta * taudot(v), kTwoPiI / (d.x2 * d.y1)) < 5e-6);
  }
  // The insertion sum is endpoint-order free.
  const cplx s = insertion(p);
  EndpointSet flipped = ep;
  std::reverse(flipped.e.begin(), flipped.e.end());
  CHECK(rel(taudot(variation_point(p, ep, s)),
            taudot(variation_point(p, flipped, s))) < 1e-14);
  CHECK_THROWS_AS(variation_point(p, ep, ep.e[0] + 1e-7), Error);
}

TEST_CASE("endpoint velocities sum to the abel constraint slope") {
  const auto p = generic_params();
  const auto ep = find_endpoints(p);
  const cplx s = insertion(p);
  const auto v = variation_point(p, ep, s);
  // The zeros of x' sit at (1 - d2) u_inf mod lattice. The chosen
  // representatives carry a fixed lattice offset m + n tau, and the tau part
  // of that offset moves with the modulus, so the velocity sum picks up an
  // extra n taudot.
  cplx esum_val = 0.0;
  cplx esum_dot = 0.0;
  for (size_t i = 0; i < ep.e.size(); ++i) {
    esum_val += ep.e[i];
    esum_dot += edot(p, ep, v, int(i));
  }
  const cplx tau = p.modulus.tau();
  const cplx offset = esum_val - (1.0 - double(p.d2)) * p.u_inf;
  const double b = offset.imag() / tau.imag();
  const double a = offset.real() - b * tau.real();
  const long m = std::lround(a);
  const long n = std::lround(b);
  REQUIRE(std::abs(offset - (double(m) + double(n) * tau)) < 1e-10);
  const cplx target =
      -double(p.d2 - 1) * uinfdot(p, ep, v) + double(n) * taudot(v);
  CHECK(rel_diff(esum_dot, target, 1.0) < 1e-8);
  CHECK_THROWS_AS(edot(p, ep, v, int(ep.e.size())), Error);
}

TEST_CASE("scale slopes follow the puncture kernels near an endpoint") {
  const auto p = generic_params();
  const Modulus& mod = p.modulus;
  const auto ep = find_endpoints(p);
  const size_t j = 2;
  const auto d = local_data(p, ep.e[j]);
  const cplx delta(1e-4, -0.2e-4);
  const auto v = variation_point(p, ep, ep.e[j] + delta);
  const cplx res = 1.0 / (d.x2 * d.y1);
  CHECK(rel(delta * delta * Adot_over_A(p, ep, v),
            res * wp(ep.e[j] - p.u_inf, mod)) < 1e-6);
  CHECK(rel(delta * delta * Atdot_over_At(p, ep, v),
            res * wp(ep.e[j] + p.u_inf, mod)) < 1e-6);
  CHECK(rel(delta * delta * dlog_theta_prime0(p, v), 1.5 * mod.zeta1() * res) <
        1e-6);
}

TEST_CASE("the pairwise kernel sum collapses to local data at each endpoint") {
  const auto p = generic_params();
  const Modulus& mod = p.modulus;
  const auto ep = find_endpoints(p);
  const cplx zeta1 = mod.zeta1();
  for (size_t j = 0; j < ep.e.size(); ++j) {
    const auto d = local_data(p, ep.e[j]);
    cplx pair_sum = 0.0;
    for (size_t i = 0; i < ep.e.size(); ++i)
      if (i != j) pair_sum += wp(ep.e[i] - ep.e[j], mod);
    const cplx rhs = zeta1 - d.x4 / (3.0 * d.x2) +
                     0.25 * (d.x3 / d.x2) * (d.x3 / d.x2) +
                     2.0 * wp(ep.e[j] - p.u_inf, mod) +
                     double(p.d2 + 1) * wp(ep.e[j] + p.u_inf, mod);
    CHECK(rel_diff(pair_sum, rhs, 1.0) < 1e-8);
  }
}

TEST_CASE("the log-product slope matches its puncture-kernel rewriting") {
  const auto p = generic_params();
  const Modulus& mod = p.modulus;
  const auto ep = find_endpoints(p);
  const cplx s = insertion(p);
  const auto v = variation_point(p, ep, s);
  const cplx direct = dlog_prod_yprime(p, ep, v);
  // Rewriting through the pairwise kernel sum: the zeta1 terms cancel and
  // the pair sum becomes the two puncture kernels plus stack ratios.
  cplx rewritten = -2.0 * Adot_over_A(p, ep, v) -
                   double(p.d2 + 1) * Atdot_over_At(p, ep, v);
  for (size_t i = 0; i < ep.e.size(); ++i) {
    const auto d = local_data(p, ep.e[i]);
    const cplx ratios = d.y3 / d.y1 + d.x4 / d.x2 -
                        (d.x3 / d.x2) * (d.x3 / d.x2) -
                        (d.y2 / d.y1) * (d.x3 / d.x2);
    const auto wd = wp_derivs(ep.e[i] - s, mod, 2);
    rewritten += 0.5 * v.alphas[i] * ratios +
                 0.5 * wd[1] * d.x3 / (d.x2 * d.x2 * d.y1) -
                 0.5 * wd[2] / (d.x2 * d.y1);
  }
  CHECK(rel(direct, rewritten) < 1e-12);
  // Elliptic in the insertion point.
  const auto v1 = variation_point(p, ep, s + 1.0);
  const auto vt = variation_point(p, ep, s + mod.tau());
  CHECK(rel(dlog_prod_yprime(p, ep, v1), direct) < 1e-10);
  CHECK(rel(dlog_prod_yprime(p, ep, vt), direct) < 1e-10);
}

TEST_CASE("the insertion shifts the conjugate period uniformly") {
  const auto p = generic_params();
  const Modulus& mod = p.modulus;
  const auto ep = find_endpoints(p);
  // Assembled B-cycle response integral(ydot x' - xdot y') du along the tau
  // direction: constant in the insertion point and equal to -2 i pi, the
  // differential-of-the-period identity.
  const QuadratureSpec q{64, 256, 2, 1e-10, 1 << 14};
  const cplx base = 0.86 + 0.04 * mod.tau();
  std::vector<cplx> values;
  for (int k = 0; k < 10; ++k) {
    const cplx s = (0.15 + 0.07 * k) + (0.75 - 0.05 * k) * mod.tau();
    const auto v = variation_point(p, ep, s);
    auto g = [&](cplx u) {
      const auto at_u = xy_pair(p, u);
      return ydot(p, ep, v, u) * at_u.xp - xdot(p, ep, v, u) * at_u.yp;
    };
    values.push_back(path_integral(g, base, mod.tau(), q));
  }
  for (const cplx val : values) {
    CHECK(rel(val, values.front()) < 1e-6);
    CHECK(rel(val, -kTwoPiI) < 1e-8);
  }
}
