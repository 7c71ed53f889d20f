#include "speccurve/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "speccurve/elliptic.hpp"
#include "speccurve/errors.hpp"

namespace speccurve {

namespace {

// Circle radius for the pairing residue: just under half the clearance from
// u_inf to the nearest branch point of x or to the mirror puncture, so the
// only enclosed singularity of x^k * field is u_inf itself.
double pairing_radius(const UniformParams& p, const EndpointSet& ep) {
  const Modulus& mod = p.modulus;
  double clearance = lattice_distance(2.0 * p.u_inf, mod);
  for (cplx e : ep.e)
    clearance = std::min(clearance, lattice_distance(p.u_inf - e, mod));
  return 0.45 * clearance;
}

ModelSpec displaced_model(const ModelSpec& m, int k, double delta) {
  ModelSpec out = m;
  if (k == 0) {
    out.epsilon += delta;
  } else {
    std::vector<cplx> g = couplings(m.V1);
    g[size_t(k - 1)] += delta;
    out.V1 = potential_from_couplings(g);
  }
  return out;
}

GkProbe make_probe(const ModelSpec& m, int k, const FDPlan& plan,
                   const UniformParams& seed) {
  validate(plan);
  // Land exactly on the solved baseline; a converged seed costs one cheap
  // Newton confirmation here and makes the one-sided gate honest.
  UniformParams base = solve_inverse(m, seed);
  std::vector<double> deltas = {plan.step, -plan.step};
  if (plan.richardson) {
    deltas.push_back(0.5 * plan.step);
    deltas.push_back(-0.5 * plan.step);
  }
  std::vector<UniformParams> displaced;
  displaced.reserve(deltas.size());
  for (double d : deltas)
    displaced.push_back(solve_inverse(displaced_model(m, k, d), base));
  return GkProbe{k, plan.step, plan.richardson, base, std::move(displaced)};
}

}  // namespace

void validate(const FDPlan& plan) {
  if (!(plan.step >= 1e-9 && plan.step <= 1e-2))
    fail(errc::bad_config, "finite-difference step outside [1e-9, 1e-2]");
}

GkProbe make_gk_probe(const ModelSpec& m, int k, const FDPlan& plan,
                      const UniformParams& seed) {
  const int kmax = int(couplings(m.V1).size());
  if (k < 1 || k > kmax)
    fail(errc::bad_config, "coupling index outside [1, deg V1]");
  return make_probe(m, k, plan, seed);
}

GkProbe make_eps_probe(const ModelSpec& m, const FDPlan& plan,
                       const UniformParams& seed) {
  return make_probe(m, 0, plan, seed);
}

cplx fd_from_probe(const GkProbe& probe, const Observable& f) {
  const double h = probe.step;
  const cplx f0 = f(probe.base);
  const cplx fp = f(probe.displaced[0]);
  const cplx fm = f(probe.displaced[1]);
  const cplx d_plus = (fp - f0) / h;
  const cplx d_minus = (f0 - fm) / h;
  const double mag = std::max(std::abs(d_plus), std::abs(d_minus));
  // Below the floor the differences are solver noise, not curvature.
  const double noise_floor = 1e-8 * (1.0 + std::abs(f0)) / h;
  if (mag > noise_floor && std::abs(d_plus - d_minus) > 0.1 * mag)
    fail(errc::step_too_large,
         "one-sided differences disagree by more than 10%");
  const cplx coarse = (fp - fm) / (2.0 * h);
  if (!probe.richardson) return coarse;
  const cplx fine = (f(probe.displaced[2]) - f(probe.displaced[3])) / h;
  return (4.0 * fine - coarse) / 3.0;
}

cplx fd_gk(const Observable& f, const ModelSpec& m, int k, const FDPlan& plan,
           const UniformParams& seed) {
  return fd_from_probe(make_gk_probe(m, k, plan, seed), f);
}

cplx fd_eps(const Observable& f, const ModelSpec& m, const FDPlan& plan,
            const UniformParams& seed) {
  return fd_from_probe(make_eps_probe(m, plan, seed), f);
}

cplx contour_pair(const CFun& field, const UniformParams& p, int k,
                  const QuadratureSpec& q) {
  return contour_pair(field, p, k, q, find_endpoints(p));
}

cplx contour_pair(const CFun& field, const UniformParams& p, int k,
                  const QuadratureSpec& q, const EndpointSet& ep) {
  if (k < 1) fail(errc::bad_config, "pairing order must be positive");
  const double r = pairing_radius(p, ep);
  const CFun integrand = [&](cplx s) {
    return std::pow(x_of_u(p, s), k) * field(s);
  };
  return kPairingKappa / double(k) *
         circle_integral(integrand, p.u_inf, r, q);
}

cplx pairing_eps_weight(const UniformParams& p, int k,
                        const QuadratureSpec& q) {
  return pairing_eps_weight(p, k, q, find_endpoints(p));
}

cplx pairing_eps_weight(const UniformParams& p, int k, const QuadratureSpec& q,
                        const EndpointSet& ep) {
  return contour_pair([](cplx) { return cplx(1.0); }, p, k, q, ep);
}

std::map<int, cplx> laurent_fit(const CFun& f, cplx center, int lo, int hi,
                                double radius, int nodes) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    fail(errc::radius_invalid, "laurent_fit needs a positive finite radius");
  if (lo > hi) fail(errc::bad_config, "laurent_fit order range is empty");
  const auto outer = laurent_ring(f, center, radius, lo, hi, nodes);
  const auto inner = laurent_ring(f, center, 0.5 * radius, lo, hi, nodes);
  double scale = 0.0;
  for (const auto& [order, c] : outer) {
    scale = std::max(scale, std::abs(c));
    scale = std::max(scale, std::abs(inner.at(order)));
  }
  const double gate = 1e-6 * std::max(scale, 1e-300);
  for (const auto& [order, c] : outer)
    if (std::abs(c - inner.at(order)) > gate)
      fail(errc::inconsistent_radii,
           "Laurent coefficients differ between the two rings");
  return outer;
}

}  // namespace speccurve
