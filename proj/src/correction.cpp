#include "speccurve/correction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "speccurve/elliptic.hpp"
#include "speccurve/errors.hpp"
#include "speccurve/quadrature.hpp"

namespace speccurve {

namespace {

// Evaluation guard around the poles and punctures of Y1, in lattice metric.
constexpr double kY1Guard = kPoleGuard * 1e2;

double max_abs_on_ring(const std::vector<EndpointLocalData>& locals,
                       const UniformParams& p, cplx center, double radius,
                       int nodes) {
  double m = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double ang = 2.0 * kPi * double(j) / double(nodes);
    const cplx s = center + radius * std::exp(cplx(0.0, ang));
    m = std::max(m, std::abs(y1_of_s(p, locals, s)));
  }
  return m;
}

// log10 of the max-modulus growth from the radius-1e-1 ring to the
// radius-1e-2 ring; ~0 for a regular function, ~order for a pole.
double growth_exponent(const std::vector<EndpointLocalData>& locals,
                       const UniformParams& p, cplx center) {
  const double big = max_abs_on_ring(locals, p, center, 1e-1, 32);
  const double small = max_abs_on_ring(locals, p, center, 1e-2, 32);
  return std::log10(small / big);
}

}  // namespace

EndpointLocalData local_data(const UniformParams& p, cplx e) {
  const double sx = std::abs(p.scale_x());
  const double sy = std::abs(p.scale_y());
  const auto xd = x_derivs(p, e, 5);
  const auto yd = y_derivs(p, e, 3);
  if (std::abs(xd[1]) > 1e-8 * sx)
    fail(errc::internal_check, "local_data needs a polished zero of x'");
  if (std::abs(xd[2]) < 1e-8 * sx || std::abs(yd[1]) < 1e-8 * sy)
    fail(errc::degenerate_endpoint,
         "branch point with vanishing x'' or y' (colliding endpoints?)");
  EndpointLocalData d;
  d.e = e;
  d.x2 = xd[2];
  d.x3 = xd[3];
  d.x4 = xd[4];
  d.x5 = xd[5];
  d.y1 = yd[1];
  d.y2 = yd[2];
  d.y3 = yd[3];
  d.r = d.x3 / (3.0 * d.x2);
  d.s = d.x4 / (6.0 * d.x2);
  d.t = d.x5 / (60.0 * d.x2) - d.r * d.s;
  return d;
}

std::vector<EndpointLocalData> local_data_all(const UniformParams& p,
                                              const EndpointSet& ep) {
  std::vector<EndpointLocalData> out;
  out.reserve(ep.e.size());
  for (cplx e : ep.e) out.push_back(local_data(p, e));
  return out;
}

cplx pole_matching_coeff(const EndpointLocalData& d) {
  const cplx a = d.x3 / d.x2;
  return a * a - d.x4 / d.x2 + a * d.y2 / d.y1 - d.y3 / d.y1;
}

cplx y1_of_s(const UniformParams& p,
             const std::vector<EndpointLocalData>& locals, cplx s) {
  const Modulus& mod = p.modulus;
  for (const auto& d : locals)
    if (lattice_distance(s - d.e, mod) < kY1Guard)
      fail(errc::pole_proximity, "Y1 evaluated inside an endpoint guard");
  if (lattice_distance(s - p.u_inf, mod) < kY1Guard ||
      lattice_distance(s + p.u_inf, mod) < kY1Guard)
    fail(errc::pole_proximity, "Y1 evaluated inside a puncture guard");
  const cplx zeta1 = mod.zeta1();
  cplx sum = 0.0;
  for (const auto& d : locals) {
    const auto w = wp_derivs(s - d.e, mod, 2);
    const cplx inv = 1.0 / (48.0 * d.x2 * d.y1);
    sum += inv * (w[2] + (d.x3 / d.x2) * w[1] +
                  (pole_matching_coeff(d) - 24.0 * zeta1) * w[0]);
  }
  return sum / xy_pair(p, s).xp;
}

cplx sheet_sum_y1(const UniformParams& p, const EndpointSet& ep, cplx s) {
  const Modulus& mod = p.modulus;
  if (ep.e.empty()) fail(errc::bad_config, "sheet_sum_y1 needs endpoints");
  cplx e = ep.e[0];
  double best = std::numeric_limits<double>::infinity();
  for (cplx cand : ep.e) {
    const double dist = lattice_distance(s - cand, mod);
    if (dist < best) {
      best = dist;
      e = cand;
    }
  }
  const cplx st = sheet_pair(p, s, e);
  const auto at_s = xy_pair(p, s);
  const auto at_st = xy_pair(p, st);
  return wp(st - s, mod) / (at_st.xp * at_s.xp * (at_st.y - at_s.y));
}

cplx bargmann(const UniformParams& p, cplx s, cplx u) {
  return wp(s - u, p.modulus);
}

cplx gamma1(const UniformParams& p,
            const std::vector<EndpointLocalData>& locals) {
  const cplx zeta1 = p.modulus.zeta1();
  cplx sum = 0.0;
  for (const auto& d : locals)
    sum += (pole_matching_coeff(d) - 24.0 * zeta1) / (48.0 * d.x2 * d.y1);
  return sum;
}

F1Value f1(const UniformParams& p, const EndpointSet& ep) {
  const Modulus& mod = p.modulus;
  auto log_theta = [&](cplx u) {
    const cplx red = reduce(u, mod).reduced;
    if (lattice_distance(red, mod) < kPoleGuard)
      fail(errc::theta_zero_hit,
           "theta argument on the lattice in the F1 product");
    return std::log(theta(red, mod));
  };
  cplx L = 4.0 * std::log(p.gamma) + 4.0 * std::log(p.gammat) +
           8.0 * std::log(mod.theta_prime0());
  const cplx log_2uinf = log_theta(2.0 * p.u_inf);
  for (cplx e : ep.e) {
    const cplx log_e_minus = log_theta(e - p.u_inf);
    for (cplx et : ep.et)
      L += log_theta(e - et) + log_2uinf - log_e_minus -
           log_theta(et + p.u_inf);
  }
  F1Value out;
  out.value = -L / 24.0;
  out.branch = std::lround(std::floor((L.imag() + kPi) / (2.0 * kPi)));
  return out;
}

cplx f1_from_scales(const UniformParams& p, const EndpointSet& ep) {
  const double sy = std::abs(p.scale_y());
  cplx L = 8.0 * std::log(p.modulus.theta_prime0()) +
           2.0 * std::log(p.scale_x()) +
           double(p.d2 + 1) * std::log(p.scale_y());
  for (cplx e : ep.e) {
    const cplx yp = y_derivs(p, e, 1)[1];
    if (std::abs(yp) < 1e-8 * sy)
      fail(errc::degenerate_endpoint,
           "vanishing y' at a branch point of x in the F1 scale form");
    L += std::log(yp);
  }
  return -L / 24.0;
}

CorrectionReport correction_report(const UniformParams& p) {
  const Modulus& mod = p.modulus;
  const EndpointSet ep = find_endpoints(p);
  const auto locals = local_data_all(p, ep);

  CorrectionReport rep;
  rep.gamma1 = gamma1(p, locals);
  rep.f1 = f1(p, ep);

  // Sampling circle: centered in the cell, radius a quarter of the smallest
  // endpoint separation, clamped so the circle clears every singularity.
  const cplx center = 0.5 * (1.0 + mod.tau());
  std::vector<cplx> all_pts = ep.e;
  all_pts.insert(all_pts.end(), ep.et.begin(), ep.et.end());
  double sep = std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < all_pts.size(); ++a)
    for (size_t b = a + 1; b < all_pts.size(); ++b)
      sep = std::min(sep, lattice_distance(all_pts[a] - all_pts[b], mod));
  double clear = std::numeric_limits<double>::infinity();
  for (cplx e : ep.e) clear = std::min(clear, lattice_distance(center - e, mod));
  clear = std::min(clear, lattice_distance(center - p.u_inf, mod));
  clear = std::min(clear, lattice_distance(center + p.u_inf, mod));
  const double radius = std::min(0.25 * sep, 0.5 * clear);
  for (int j = 0; j < 64; ++j) {
    const double ang = 2.0 * kPi * double(j) / 64.0;
    const cplx s = center + radius * std::exp(cplx(0.0, ang));
    rep.y1_samples.emplace_back(s, y1_of_s(p, locals, s));
  }
  // Rays into each endpoint: geometric approach down to ~8e-4.
  const cplx ray_dir = std::exp(cplx(0.0, 0.37));
  for (const auto& d : locals)
    for (int m = 0; m < 8; ++m) {
      const cplx s = d.e + 0.1 * std::pow(0.5, m) * ray_dir;
      rep.y1_samples.emplace_back(s, y1_of_s(p, locals, s));
    }

  // Self-checks. Ellipticity of N = Y1 x' over both lattice shifts.
  auto nfun = [&](cplx s) { return y1_of_s(p, locals, s) * xy_pair(p, s).xp; };
  double ell = 0.0;
  for (int j = 0; j < 4; ++j) {
    const cplx s = center + radius * std::exp(cplx(0.0, 0.5 + 1.5 * j));
    const cplx n0 = nfun(s);
    const double scale = std::max(1.0, std::abs(n0));
    ell = std::max(ell, std::abs(nfun(s + 1.0) - n0) / scale);
    ell = std::max(ell, std::abs(nfun(s + mod.tau()) - n0) / scale);
  }
  rep.validation["ellipticity"] = ell;
  rep.validation["growth_plus"] = growth_exponent(locals, p, p.u_inf);
  rep.validation["growth_minus"] = growth_exponent(locals, p, -p.u_inf);

  // Laurent templates at each endpoint from a ring DFT of N.
  const cplx zeta1 = mod.zeta1();
  double m4 = 0.0, m3 = 0.0, m2 = 0.0;
  for (const auto& d : locals) {
    // Ring below a quarter of the distance to the nearest other pole of N
    // (the other branch points) and clear of the puncture guards.
    double ring = 1e-2;
    std::vector<cplx> obstacles = ep.e;
    obstacles.push_back(p.u_inf);
    obstacles.push_back(-p.u_inf);
    for (cplx other : obstacles)
      if (lattice_distance(d.e - other, mod) > kY1Guard)
        ring = std::min(ring, 0.25 * lattice_distance(d.e - other, mod));
    const auto c = laurent_ring(nfun, d.e, ring, -4, -2, 256);
    const cplx inv = 1.0 / (48.0 * d.x2 * d.y1);
    m4 = std::max(m4, rel_diff(c.at(-4), 6.0 * inv));
    m3 = std::max(m3, rel_diff(c.at(-3), -2.0 * (d.x3 / d.x2) * inv));
    m2 = std::max(
        m2, rel_diff(c.at(-2), (pole_matching_coeff(d) - 24.0 * zeta1) * inv));
  }
  rep.validation["laurent_m4"] = m4;
  rep.validation["laurent_m3"] = m3;
  rep.validation["laurent_m2"] = m2;
  return rep;
}

}  // namespace speccurve
