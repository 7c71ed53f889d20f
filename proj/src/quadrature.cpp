#include "speccurve/quadrature.hpp"

#include <cmath>

#include "speccurve/errors.hpp"

namespace speccurve {

namespace {

cplx circle_once(const CFun& f, cplx center, double radius, int n) {
  cplx acc(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    double th = 2.0 * kPi * double(j) / double(n);
    cplx w = radius * cplx(std::cos(th), std::sin(th));
    acc += f(center + w) * w;
  }
  return acc / double(n);
}

cplx path_once(const CFun& f, cplx s0, cplx period, int n) {
  cplx acc(0.0, 0.0);
  for (int j = 0; j < n; ++j) acc += f(s0 + period * (double(j) / double(n)));
  return acc * period / double(n);
}

double edge_phase(const CFun& f, cplx a, cplx b, cplx fa, cplx fb, int depth) {
  if (std::abs(fa) < 1e-280 || std::abs(fb) < 1e-280)
    fail(errc::contour_too_tight, "phase tracking hit a zero on the contour");
  double d = std::arg(fb / fa);
  if (std::abs(d) <= 0.5 * kPi && depth >= 3) return d;
  if (depth > 26)
    fail(errc::contour_too_tight, "phase tracking did not resolve the contour");
  cplx mid = 0.5 * (a + b);
  cplx fm = f(mid);
  return edge_phase(f, a, mid, fa, fm, depth + 1) +
         edge_phase(f, mid, b, fm, fb, depth + 1);
}

bool power_of_two_at_least_64(int n) {
  return n >= 64 && (n & (n - 1)) == 0;
}

}  // namespace

void validate(const QuadratureSpec& q) {
  if (!power_of_two_at_least_64(q.circle_nodes) ||
      !power_of_two_at_least_64(q.cycle_nodes))
    fail(errc::bad_config, "quadrature node counts must be powers of two >= 64");
  if (q.refinement_factor != 2)
    fail(errc::bad_config, "quadrature refinement factor must be 2");
  if (!(q.tol > 0.0) || q.max_nodes < q.circle_nodes ||
      q.max_nodes < q.cycle_nodes)
    fail(errc::bad_config, "quadrature tolerance/node cap out of range");
}

cplx circle_integral(const CFun& f, cplx center, double radius,
                     const QuadratureSpec& q) {
  if (!(radius > 0.0)) fail(errc::radius_invalid, "circle radius must be positive");
  int n = std::max(64, q.circle_nodes);
  cplx prev = circle_once(f, center, radius, n);
  while (true) {
    int n2 = n * q.refinement_factor;
    if (n2 > q.max_nodes)
      fail(errc::quadrature_not_converged, "circle integral hit the node cap");
    cplx cur = circle_once(f, center, radius, n2);
    if (std::abs(cur - prev) <= q.tol * (1.0 + std::abs(cur))) return cur;
    prev = cur;
    n = n2;
  }
}

cplx path_integral(const CFun& f, cplx s0, cplx period,
                   const QuadratureSpec& q) {
  int n = std::max(64, q.cycle_nodes);
  cplx prev = path_once(f, s0, period, n);
  while (true) {
    int n2 = n * q.refinement_factor;
    if (n2 > q.max_nodes)
      fail(errc::quadrature_not_converged, "path integral hit the node cap");
    cplx cur = path_once(f, s0, period, n2);
    if (std::abs(cur - prev) <= q.tol * (1.0 + std::abs(cur))) return cur;
    prev = cur;
    n = n2;
  }
}

long winding_number(const CFun& f, const std::vector<cplx>& polygon) {
  double total = 0.0;
  std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx a = polygon[i], b = polygon[(i + 1) % n];
    total += edge_phase(f, a, b, f(a), f(b), 0);
  }
  double w = total / (2.0 * kPi);
  long rounded = std::lround(w);
  if (std::abs(w - double(rounded)) > 0.1)
    fail(errc::contour_too_tight, "winding number is not close to an integer");
  return rounded;
}

std::map<int, cplx> laurent_ring(const CFun& f, cplx center, double radius,
                                 int lo, int hi, int nodes) {
  if (!(radius > 0.0)) fail(errc::radius_invalid, "ring radius must be positive");
  if (lo > hi) fail(errc::internal_check, "laurent_ring order range is empty");
  std::vector<cplx> samples(nodes);
  for (int j = 0; j < nodes; ++j) {
    double th = 2.0 * kPi * double(j) / double(nodes);
    samples[j] = f(center + radius * cplx(std::cos(th), std::sin(th)));
  }
  std::map<int, cplx> out;
  for (int k = lo; k <= hi; ++k) {
    cplx acc(0.0, 0.0);
    for (int j = 0; j < nodes; ++j) {
      double th = 2.0 * kPi * double(j) / double(nodes);
      // c_k = (1/2 i pi) oint f(u) (u-center)^{-k-1} du
      cplx w = std::exp(cplx(0.0, -th * double(k)));
      acc += samples[j] * w;
    }
    out[k] = acc / double(nodes) / std::pow(radius, double(k));
  }
  return out;
}

}  // namespace speccurve
