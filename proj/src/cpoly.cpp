#include "speccurve/cpoly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "speccurve/errors.hpp"

namespace speccurve {

void Poly::normalize() {
  while (!coeffs.empty() && coeffs.back() == cplx(0.0, 0.0)) coeffs.pop_back();
}

cplx poly_eval(const Poly& p, cplx z) {
  cplx acc(0.0, 0.0);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::pair<cplx, cplx> poly_eval_d(const Poly& p, cplx z) {
  cplx v(0.0, 0.0), d(0.0, 0.0);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    d = d * z + v;
    v = v * z + *it;
  }
  return {v, d};
}

Poly poly_derivative(const Poly& p) {
  Poly out;
  if (p.coeffs.size() <= 1) return out;
  out.coeffs.resize(p.coeffs.size() - 1);
  for (std::size_t k = 1; k < p.coeffs.size(); ++k)
    out.coeffs[k - 1] = double(k) * p.coeffs[k];
  out.normalize();
  return out;
}

namespace {

double coeff_scale(const Poly& p) {
  double m = 0.0;
  for (const auto& c : p.coeffs) m = std::max(m, std::abs(c));
  return m;
}

double max_residual(const Poly& p, const std::vector<cplx>& roots) {
  double worst = 0.0;
  int n = p.degree();
  for (cplx r : roots) {
    double denom = 1.0 + std::pow(std::abs(r), double(n));
    worst = std::max(worst, std::abs(poly_eval(p, r)) / denom);
  }
  return worst;
}

std::vector<cplx> companion_roots(const Poly& p) {
  int n = p.degree();
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  cplx lead = p.coeffs.back();
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p.coeffs[i] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cplx> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

}  // namespace

std::vector<cplx> poly_roots(const Poly& p, double tol) {
  if (p.degree() < 1 || p.is_zero())
    fail(errc::zero_leading_coefficient, "poly_roots needs degree >= 1");
  int n = p.degree();
  cplx lead = p.coeffs.back();

  // Deterministic initial circle: radius bounds all roots (Cauchy-style).
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(p.coeffs[k] / lead));
  radius = 1.0 + radius;

  std::vector<cplx> z(n);
  for (int i = 0; i < n; ++i) {
    double ang = 2.0 * kPi * (double(i) + 0.25) / double(n) + 0.42;
    z[i] = radius * cplx(std::cos(ang), std::sin(ang));
  }

  double scale = coeff_scale(p);
  const int max_iter = 300;
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < n; ++i) {
      auto [v, d] = poly_eval_d(p, z[i]);
      if (v == cplx(0.0, 0.0)) continue;
      cplx ratio = (d == cplx(0.0, 0.0)) ? cplx(0.0, 0.0) : v / d;
      cplx sum(0.0, 0.0);
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      cplx denom = 1.0 - ratio * sum;
      cplx step = (std::abs(denom) > 1e-280) ? ratio / denom : ratio;
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < 1e-15 * (1.0 + radius)) break;
  }

  if (max_residual(p, z) <= 1e-10 * std::max(scale, 1.0)) {
    // Polish with plain Newton to push residuals toward tol.
    for (auto& r : z) {
      for (int it = 0; it < 8; ++it) {
        auto [v, d] = poly_eval_d(p, r);
        if (std::abs(d) < 1e-280) break;
        cplx step = v / d;
        r -= step;
        if (std::abs(step) < tol * (1.0 + std::abs(r))) break;
      }
    }
    return z;
  }

  // Aberth stalled (clustered or ill-scaled roots): companion fallback.
  std::vector<cplx> w = companion_roots(p);
  for (auto& r : w) {
    for (int it = 0; it < 12; ++it) {
      auto [v, d] = poly_eval_d(p, r);
      if (std::abs(d) < 1e-280) break;
      cplx step = v / d;
      r -= step;
      if (std::abs(step) < tol * (1.0 + std::abs(r))) break;
    }
  }
  if (max_residual(p, w) > 1e-8 * std::max(scale, 1.0))
    fail(errc::non_convergence, "root residuals failed both Aberth and companion solver");
  return w;
}

}  // namespace speccurve
