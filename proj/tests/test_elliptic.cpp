#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "speccurve/elliptic.hpp"
#include "speccurve/errors.hpp"

using namespace speccurve;

namespace {

// Independent reference: naive 200-term summation at extended precision,
// no argument reduction, no shared code with the library implementation.
std::complex<long double> theta_reference(std::complex<long double> u,
                                          std::complex<long double> tau,
                                          int deriv = 0) {
  const long double pi = 3.14159265358979323846264338327950288L;
  std::complex<long double> i(0.0L, 1.0L);
  std::complex<long double> sum(0.0L, 0.0L);
  for (int n = 0; n < 200; ++n) {
    long double a = 2.0L * n + 1.0L;
    std::complex<long double> qp = std::exp(i * pi * tau * (n + 0.5L) * (n + 0.5L));
    std::complex<long double> w = a * pi * u;
    std::complex<long double> trig;
    switch (deriv % 4) {
      case 0: trig = std::sin(w); break;
      case 1: trig = std::cos(w); break;
      case 2: trig = -std::sin(w); break;
      default: trig = -std::cos(w); break;
    }
    long double sgn = (n % 2 == 0) ? 2.0L : -2.0L;
    sum += sgn * qp * std::pow(a * pi, (long double)deriv) * trig;
  }
  return sum;
}

cplx to_cplx(std::complex<long double> z) {
  return cplx(double(z.real()), double(z.imag()));
}

const std::vector<cplx> kTauGrid = {
    {0.0, 0.8}, {0.0, 1.0}, {0.0, 1.5}, {0.0, 3.0},
    {0.3, 0.8}, {0.3, 1.0}, {0.3, 1.5}, {0.3, 3.0}};

std::vector<cplx> sample_points(const Modulus& mod, int count, unsigned seed,
                                double clearance = 0.05) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<cplx> pts;
  while (int(pts.size()) < count) {
    cplx u = cplx(2.0 * unit(rng), 0.0) + cplx(2.0 * unit(rng), 0.0) * mod.tau();
    if (lattice_distance(u, mod) > clearance) pts.push_back(u);
  }
  return pts;
}

}  // namespace

TEST_CASE("frozen oracle values (independent high-precision reference)") {
  // Square lattice, real values.
  Modulus mi(cplx(0, 1));
  cplx theta_03_taui = cplx(0.73719716371868159764, 0.0);
  cplx thetap0_taui = cplx(2.8486946039877873161, 0.0);
  cplx zeta1_taui = cplx(-3.1415926535897932385, 0.0);  // equals -pi
  CHECK(std::abs(theta(0.3, mi) - theta_03_taui) < 1e-13);
  CHECK(std::abs(mi.theta_prime0() - thetap0_taui) < 1e-13);
  CHECK(std::abs(mi.zeta1() - zeta1_taui) < 1e-13);

  // Generic modulus.
  Modulus mg(cplx(0.3, 1.1));
  cplx u(0.23, 0.41);
  cplx theta_u_taug = cplx(0.80928474814663559091, 1.263761472025532065);
  cplx Z_u_taug = cplx(0.44454316014136416471, -3.0898967589190747985);
  cplx wp_u_taug = cplx(-0.3927894301649258775, -3.2731208439945401277);
  cplx wp1_u_taug = cplx(17.659081670436678999, 6.4989438233623077654);
  cplx wp2_u_taug = cplx(-38.951369969570458986, 127.60060445650324481);
  cplx zeta1_taug = cplx(-3.3143657958308202087, 0.074673079105922237413);
  cplx g2_taug = cplx(120.05792111801982677, 29.370207407343587159);
  CHECK(std::abs(theta(u, mg) - theta_u_taug) < 1e-13);
  CHECK(std::abs(zfun(u, mg) - Z_u_taug) < 1e-12);
  CHECK(std::abs(wp(u, mg, 0) - wp_u_taug) < 1e-11);
  CHECK(std::abs(wp(u, mg, 1) - wp1_u_taug) < 1e-10);
  CHECK(std::abs(wp(u, mg, 2) - wp2_u_taug) < 1e-9);
  CHECK(std::abs(mg.zeta1() - zeta1_taug) < 1e-13);
  CHECK(rel_diff(mg.g2(), g2_taug) < 1e-12);
}

TEST_CASE("theta agrees with the reference series across the tau grid") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (cplx tau : kTauGrid) {
    Modulus mod(tau);
    std::complex<long double> tauL(tau.real(), tau.imag());
    for (int i = 0; i < 10; ++i) {
      // Points inside the cell, |Im coordinate| small enough for the naive
      // reference series to converge.
      cplx u = cplx(unit(rng), 0.0) + (0.4 * unit(rng)) * tau;
      std::complex<long double> uL(u.real(), u.imag());
      for (int d = 0; d <= 4; ++d) {
        cplx ref = to_cplx(theta_reference(uL, tauL, d));
        cplx got = theta_derivs(u, mod, 4)[d];
        CHECK(rel_diff(got, ref, 1.0) < 1e-13);
      }
    }
  }
}

TEST_CASE("theta oddness and the origin") {
  Modulus mod(cplx(0.3, 1.1));
  CHECK(std::abs(theta(0.0, mod)) < 1e-15);
  auto d0 = theta_derivs(cplx(0, 0), mod, 2);
  CHECK(std::abs(d0[1]) > 0.1);
  CHECK(std::abs(d0[2]) < 1e-13);
  auto pts = sample_points(mod, 50, 777);
  for (cplx u : pts)
    CHECK(std::abs(theta(-u, mod) + theta(u, mod)) <
          1e-13 * (1.0 + std::abs(theta(u, mod))));
}

TEST_CASE("quasi-periodicity of theta, Z, wp on the tau grid") {
  for (cplx tau : kTauGrid) {
    Modulus mod(tau);
    auto pts = sample_points(mod, 100, 4242);
    for (cplx u : pts) {
      cplx th = theta(u, mod);
      double ths = 1.0 + std::abs(th);
      CHECK(std::abs(theta(u + 1.0, mod) + th) < 1e-12 * ths);
      cplx factor = -std::exp(-cplx(0, kPi) * (2.0 * u + tau));
      CHECK(std::abs(theta(u + tau, mod) - factor * th) <
            1e-12 * (1.0 + std::abs(factor * th)));

      cplx z = zfun(u, mod);
      double zs = 1.0 + std::abs(z);
      CHECK(std::abs(zfun(u + 1.0, mod) - z) < 1e-12 * zs);
      CHECK(std::abs(zfun(u + tau, mod) - z + kTwoPiI) < 1e-12 * zs);
      CHECK(std::abs(zfun(-u, mod) + z) < 1e-12 * zs);

      cplx p = wp(u, mod, 0);
      double ps = 1.0 + std::abs(p);
      CHECK(std::abs(wp(u + 1.0, mod, 0) - p) < 1e-12 * ps);
      CHECK(std::abs(wp(u + tau, mod, 0) - p) < 1e-12 * ps);
      CHECK(std::abs(wp(-u, mod, 0) - p) < 1e-12 * ps);
    }
  }
}

TEST_CASE("general lattice shift reconstruction") {
  Modulus mod(cplx(0.3, 1.1));
  cplx tau = mod.tau();
  cplx u(0.37, 0.29);
  for (auto [m, n] : std::vector<std::pair<int, int>>{
           {1, 0}, {0, 1}, {2, -1}, {-1, 2}, {-3, -2}}) {
    double sgn = ((m + n) % 2 == 0) ? 1.0 : -1.0;
    cplx factor =
        sgn * std::exp(-cplx(0, kPi) *
                       (double(n) * double(n) * tau + 2.0 * double(n) * u));
    cplx lhs = theta(u + double(m) + double(n) * tau, mod);
    cplx rhs = factor * theta(u, mod);
    CHECK(rel_diff(lhs, rhs, 1.0) < 1e-12);
  }
}

TEST_CASE("Z has residue 1 and Laurent coefficient zeta1 at the origin") {
  for (cplx tau : {cplx(0, 1), cplx(0.3, 1.1)}) {
    Modulus mod(tau);
    for (double h : {1e-2, 1e-3})
      CHECK(std::abs(h * zfun(h, mod) - 1.0) < 10.0 * h * h);

    // Richardson on f(h) = (Z(h) - 1/h)/h = zeta1 + c h^2 + O(h^4).
    auto f = [&](double h) { return (zfun(h, mod) - 1.0 / h) / h; };
    cplx f1 = f(1e-2), f2 = f(1e-3);
    cplx extrap = (100.0 * f2 - f1) / 99.0;
    CHECK(rel_diff(extrap, mod.zeta1()) < 1e-8);
  }
}

TEST_CASE("zeta1 is real on the square lattice and 2-periodic in tau") {
  Modulus mi(cplx(0, 1));
  CHECK(std::abs(mi.zeta1().imag()) < 1e-13);
  Modulus ma(cplx(0.3, 1.1)), mb(cplx(2.3, 1.1));
  CHECK(std::abs(ma.zeta1() - mb.zeta1()) < 1e-12);
}

TEST_CASE("wp expansion near the origin") {
  Modulus mod(cplx(0.3, 1.1));
  double h = 1e-3;
  CHECK(std::abs(h * h * wp(h, mod, 0) - 1.0) < 1e-5);
  CHECK(std::abs((wp(h, mod, 0) - 1.0 / (h * h)) + mod.zeta1()) < 1e-4);
}

TEST_CASE("wp equals -dZ/du and the derivative ladder is consistent") {
  Modulus mod(cplx(0.3, 1.1));
  auto pts = sample_points(mod, 20, 999, 0.12);
  double h = 1e-5;
  for (cplx u : pts) {
    double hz = 1e-6;
    cplx fd = -(zfun(u + hz, mod) - zfun(u - hz, mod)) / (2.0 * hz);
    CHECK(rel_diff(fd, wp(u, mod, 0), 1.0) < 1e-8);

    auto w = wp_derivs(u, mod, 7);
    for (int k = 1; k <= 7; ++k) {
      auto hi = wp_derivs(u + h, mod, k - 1);
      auto lo = wp_derivs(u - h, mod, k - 1);
      cplx fdk = (hi[k - 1] - lo[k - 1]) / (2.0 * h);
      double tol = (k <= 3) ? 1e-7 : 1e-6;
      CHECK(rel_diff(fdk, w[k], 1.0) < tol);
    }
  }
}

TEST_CASE("Cauchy-Riemann: orthogonal directional derivatives agree") {
  Modulus mod(cplx(0.3, 1.1));
  auto pts = sample_points(mod, 20, 555);
  double h = 1e-6;
  for (cplx u : pts) {
    cplx dx = (zfun(u + h, mod) - zfun(u - h, mod)) / (2.0 * h);
    cplx dy = (zfun(u + cplx(0, h), mod) - zfun(u - cplx(0, h), mod)) /
              (2.0 * cplx(0, h));
    CHECK(rel_diff(dx, dy, 1.0) < 1e-8);
    cplx px = (theta(u + h, mod) - theta(u - h, mod)) / (2.0 * h);
    cplx py = (theta(u + cplx(0, h), mod) - theta(u - cplx(0, h), mod)) /
              (2.0 * cplx(0, h));
    CHECK(rel_diff(px, py, 1.0) < 1e-8);
  }
}

TEST_CASE("reduce basics") {
  Modulus mod(cplx(0.3, 1.1));
  cplx tau = mod.tau();

  auto a = reduce(0.5 + 0.5 * tau, mod);
  CHECK(a.m == 0);
  CHECK(a.n == 0);
  CHECK(std::abs(a.reduced - (0.5 + 0.5 * tau)) < 1e-15);

  auto b = reduce(cplx(1.5, 0.0), mod);
  CHECK(b.m == 1);
  CHECK(b.n == 0);
  CHECK(std::abs(b.reduced - cplx(0.5, 0.0)) < 1e-15);

  auto c = reduce(-tau, mod);
  CHECK(c.n == -1);
  CHECK(std::abs(c.reduced - cplx(double(-c.m), 0.0)) < 1e-12);

  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    cplx u(unit(rng), unit(rng));
    auto tp = reduce(u, mod);
    CHECK(std::abs(tp.reduced + double(tp.m) + double(tp.n) * tau - u) < 1e-12);
    double bcoord = tp.reduced.imag() / tau.imag();
    double acoord = (tp.reduced - bcoord * tau).real();
    CHECK(acoord > -1e-12);
    CHECK(acoord < 1.0 + 1e-12);
    CHECK(bcoord > -1e-12);
    CHECK(bcoord < 1.0 + 1e-12);
  }
}

TEST_CASE("guards and degenerate moduli") {
  CHECK_THROWS_AS(Modulus(cplx(0.0, 0.01)), Error);
  CHECK_THROWS_AS(Modulus(cplx(0.0, -1.0)), Error);
  Modulus mod(cplx(0.3, 1.1));
  CHECK_THROWS_AS(zfun(cplx(1e-9, 0), mod), Error);
  CHECK_THROWS_AS(wp(mod.tau() + cplx(0, 1e-9), mod, 0), Error);
  // theta itself is fine at the lattice (simple zero, no pole).
  CHECK(std::abs(theta(cplx(1.0, 0.0), mod)) < 1e-13);
}

TEST_CASE("series respects the term cap and precision guards") {
  // A thin but workable modulus converges, just with more terms.
  Modulus slow(cplx(0.0, 0.06));
  CHECK(std::abs(theta(0.25, slow)) > 0.0);
  // An absurdly small cap trips the series guard.
  CHECK_THROWS_AS(Modulus(cplx(0.3, 1.1), 1e-16, 3), Error);
  // Past the cancellation wall double precision has no digits left; the
  // constructor must refuse rather than return noise.
  CHECK_THROWS_AS(Modulus(cplx(0.0, 0.021)), Error);
}
