#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "speccurve/cpoly.hpp"
#include "speccurve/errors.hpp"

using namespace speccurve;

namespace {

Poly random_poly(std::mt19937& rng, int degree) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<cplx> c(degree + 1);
  for (auto& ck : c) ck = cplx(unit(rng), unit(rng));
  if (std::abs(c.back()) < 0.1) c.back() += cplx(0.5, 0.5);
  return Poly(c);
}

}  // namespace

TEST_CASE("eval basics") {
  CHECK(std::abs(poly_eval(Poly({{1, 0}, {0, 0}, {1, 0}}), cplx(0, 1))) < 1e-15);
  CHECK(std::abs(poly_eval(Poly({{0, 0}}), cplx(2, 3))) == 0.0);
  CHECK(std::abs(poly_eval(Poly({{2, 0}, {3, 0}}), cplx(5, 0)) - cplx(17, 0)) < 1e-15);
}

TEST_CASE("derivative basics") {
  Poly p({{1.5, 0}, {2.0, 0}, {0.5, 0}});
  Poly d = poly_derivative(p);
  REQUIRE(d.degree() == 1);
  CHECK(std::abs(d.coeffs[0] - cplx(2.0, 0)) < 1e-15);
  CHECK(std::abs(d.coeffs[1] - cplx(1.0, 0)) < 1e-15);

  CHECK(poly_derivative(Poly({{7, 0}})).is_zero());

  Poly cubic({{0, 0}, {0, 0}, {0, 0}, {1, 0}});
  Poly dc = poly_derivative(cubic);
  REQUIRE(dc.degree() == 2);
  CHECK(std::abs(dc.coeffs[2] - cplx(3, 0)) < 1e-15);
}

TEST_CASE("derivative matches finite differences at random points") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Poly p = random_poly(rng, 7);
  Poly d = poly_derivative(p);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    cplx z(unit(rng), unit(rng));
    cplx fd = (poly_eval(p, z + h) - poly_eval(p, z - h)) / (2.0 * h);
    cplx an = poly_eval(d, z);
    CHECK(std::abs(fd - an) < 1e-6 * (1.0 + std::abs(an)));
  }
}

TEST_CASE("roots of simple polynomials") {
  auto r = poly_roots(Poly({{1, 0}, {0, 0}, {1, 0}}));
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  CHECK(std::abs(r[0] - cplx(0, -1)) < 1e-10);
  CHECK(std::abs(r[1] - cplx(0, 1)) < 1e-10);

  auto rr = poly_roots(Poly({{1, 0}, {-2, 0}, {1, 0}}));
  REQUIRE(rr.size() == 2);
  CHECK(std::abs(rr[0] - cplx(1, 0)) < 1e-6);  // double root: half precision is expected
  CHECK(std::abs(rr[1] - cplx(1, 0)) < 1e-6);
}

TEST_CASE("root residuals for random polynomials up to degree 12") {
  std::mt19937 rng(987654321);
  for (int deg : {2, 3, 4, 6, 9, 12}) {
    Poly p = random_poly(rng, deg);
    auto roots = poly_roots(p);
    REQUIRE(int(roots.size()) == deg);
    double norm = 0.0;
    for (auto& c : p.coeffs) norm = std::max(norm, std::abs(c));
    for (cplx r : roots) {
      double denom = 1.0 + std::pow(std::abs(r), double(deg));
      CHECK(std::abs(poly_eval(p, r)) / denom < 1e-10 * std::max(1.0, norm));
    }
    // Vieta check on the root sum.
    cplx sum(0, 0);
    for (cplx r : roots) sum += r;
    cplx expect = -p.coeffs[deg - 1] / p.coeffs[deg];
    CHECK(std::abs(sum - expect) < 1e-8 * (1.0 + std::abs(expect)));
  }
}

TEST_CASE("roots error cases") {
  CHECK_THROWS_AS(poly_roots(Poly({{3, 0}})), Error);
  CHECK_THROWS_AS(poly_roots(Poly{}), Error);
}
