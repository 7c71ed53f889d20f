#include "speccurve/torusmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "speccurve/errors.hpp"
#include "speccurve/quadrature.hpp"

namespace speccurve {

namespace {

constexpr double kFact[5] = {1.0, 1.0, 2.0, 6.0, 24.0};

double frac01(double t) {
  t -= std::floor(t);
  return (t >= 1.0) ? 0.0 : t;
}

// Distance of v to the nearest point of 2 i pi Z.
double mod_two_pi_i_dist(cplx v) {
  const double k = std::round((v / kTwoPiI).real());
  return std::abs(v - kTwoPiI * k);
}

// Newton iteration for a zero of x' (of_x) or y', with a step clamp sized to
// the fundamental cell. Returns nullopt if it stalls, diverges, or walks into
// a puncture.
std::optional<cplx> polish_zero(const UniformParams& p, bool of_x, cplx u0,
                                double clamp, int max_iter) {
  cplx u = u0;
  try {
    for (int it = 0; it < max_iter; ++it) {
      const auto d = of_x ? x_derivs(p, u, 2) : y_derivs(p, u, 2);
      if (std::abs(d[2]) < 1e-300) return std::nullopt;
      cplx step = d[1] / d[2];
      const double a = std::abs(step);
      if (a > clamp) step *= clamp / a;
      u -= step;
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(u))) {
        const auto chk = of_x ? x_derivs(p, u, 2) : y_derivs(p, u, 2);
        if (std::abs(chk[1]) <= 1e-9 * (1.0 + std::abs(chk[2]))) return u;
        return std::nullopt;
      }
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

// Grid minima of |x'| (or |y'|) over an n x n sample of the fundamental
// cell, skipping a small mask around the two punctures where the derivative
// blows up.
std::vector<cplx> grid_seeds(const UniformParams& p, bool of_x, int n) {
  const Modulus& mod = p.modulus;
  const cplx tau = mod.tau();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> mag(static_cast<size_t>(n) * n, inf);
  auto node = [&](int i, int j) { return (i + 0.5) / n + ((j + 0.5) / n) * tau; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const cplx u = node(i, j);
      if (lattice_distance(u - p.u_inf, mod) < 0.01 ||
          lattice_distance(u + p.u_inf, mod) < 0.01)
        continue;
      mag[static_cast<size_t>(j) * n + i] =
          std::abs(of_x ? x_derivs(p, u, 1)[1] : y_derivs(p, u, 1)[1]);
    }
  }
  std::vector<cplx> seeds;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double m0 = mag[static_cast<size_t>(j) * n + i];
      if (!std::isfinite(m0)) continue;
      bool is_min = true;
      for (int dj = -1; dj <= 1 && is_min; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = (i + di + n) % n, jj = (j + dj + n) % n;
          if (mag[static_cast<size_t>(jj) * n + ii] < m0) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) seeds.push_back(node(i, j));
    }
  }
  return seeds;
}

// Argument-principle audit: partition the cell into 3x3 subcells (origin
// shifted so every boundary line stays clear of all zeros and punctures),
// compute the winding of the derivative around each subcell, and demand
//   winding + (pole multiplicity inside) == located zeros inside
// for every subcell. This proves the located set is complete.
void verify_by_winding(const UniformParams& p, bool of_x,
                       const std::vector<cplx>& zeros) {
  const Modulus& mod = p.modulus;
  const cplx tau = mod.tau();
  const int mult_plus = of_x ? 2 : p.d1 + 1;
  const int mult_minus = of_x ? p.d2 + 1 : 2;
  const std::array<std::pair<cplx, int>, 2> poles = {
      std::make_pair(reduce(p.u_inf, mod).reduced, mult_plus),
      std::make_pair(reduce(-p.u_inf, mod).reduced, mult_minus)};

  std::vector<std::pair<double, double>> marks;
  for (cplx z : zeros) marks.push_back(lattice_coords(z, mod));
  for (const auto& pm : poles) marks.push_back(lattice_coords(pm.first, mod));

  // A partition line in coordinate c sits at off + k/3; clearance 0.02 in
  // coordinate units is 0.06 after rescaling by the line spacing.
  auto lines_clear = [&](double off, bool use_a) {
    for (const auto& m : marks) {
      const double t = frac01(((use_a ? m.first : m.second) - off) * 3.0);
      if (t < 0.06 || t > 0.94) return false;
    }
    return true;
  };
  const double cands[] = {0.0,   0.041, 0.087, 0.123, 0.167,
                          0.211, 0.253, 0.297, 0.313};
  double oa = -1.0, ob = -1.0;
  for (double c : cands) {
    if (oa < 0.0 && lines_clear(c, true)) oa = c;
    if (ob < 0.0 && lines_clear(c, false)) ob = c;
  }
  if (oa < 0.0 || ob < 0.0)
    fail(errc::internal_check,
         "no 3x3 partition offset keeps boundaries clear of zeros and poles");

  auto fw = [&](cplx u) {
    return of_x ? x_derivs(p, u, 1)[1] : y_derivs(p, u, 1)[1];
  };
  auto corner = [&](double a, double b) { return cplx(a, 0.0) + b * tau; };
  auto subcell_of = [&](std::pair<double, double> c) {
    const int i = static_cast<int>(frac01(c.first - oa) * 3.0);
    const int j = static_cast<int>(frac01(c.second - ob) * 3.0);
    return std::make_pair(std::min(i, 2), std::min(j, 2));
  };

  size_t located_total = 0;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const double a0 = oa + i / 3.0, a1 = oa + (i + 1) / 3.0;
      const double b0 = ob + j / 3.0, b1 = ob + (j + 1) / 3.0;
      const std::vector<cplx> poly = {corner(a0, b0), corner(a1, b0),
                                      corner(a1, b1), corner(a0, b1)};
      const long w = winding_number(fw, poly);
      long pole_in = 0;
      for (const auto& pm : poles)
        if (subcell_of(lattice_coords(pm.first, mod)) == std::make_pair(i, j))
          pole_in += pm.second;
      long zero_in = 0;
      for (cplx z : zeros)
        if (subcell_of(lattice_coords(z, mod)) == std::make_pair(i, j)) ++zero_in;
      if (w + pole_in != zero_in)
        fail(errc::endpoint_count_mismatch,
             "argument principle disagrees with located zeros in a subcell "
             "(winding " + std::to_string(w) + ", poles " +
                 std::to_string(pole_in) + ", located " +
                 std::to_string(zero_in) + ")");
      located_total += static_cast<size_t>(zero_in);
    }
  }
  if (located_total != zeros.size())
    fail(errc::internal_check, "subcell partition lost a located zero");
}

void sort_by_lattice_coords(std::vector<cplx>& zs, const Modulus& mod) {
  std::sort(zs.begin(), zs.end(), [&](cplx l, cplx r) {
    const auto cl = lattice_coords(l, mod), cr = lattice_coords(r, mod);
    if (std::fabs(cl.first - cr.first) > 1e-9) return cl.first < cr.first;
    return cl.second < cr.second;
  });
}

std::vector<cplx> locate_zeros(const UniformParams& p, bool of_x, int expect) {
  const Modulus& mod = p.modulus;
  const double clamp = 0.1 * std::min(1.0, mod.tau().imag());
  size_t found = 0;
  for (int n : {48, 96}) {
    std::vector<cplx> roots;
    for (cplx s : grid_seeds(p, of_x, n)) {
      const auto r = polish_zero(p, of_x, s, clamp, 60);
      if (!r) continue;
      const cplx red = reduce(*r, mod).reduced;
      bool dup = false;
      for (cplx k : roots)
        if (lattice_distance(red - k, mod) < 1e-7) {
          dup = true;
          break;
        }
      if (!dup) roots.push_back(red);
    }
    for (size_t a = 0; a < roots.size(); ++a)
      for (size_t b = a + 1; b < roots.size(); ++b)
        if (lattice_distance(roots[a] - roots[b], mod) < 1e-6)
          fail(errc::collision_detected,
               "two branch points are closer than 1e-6; the configuration is "
               "degenerate");
    found = roots.size();
    if (static_cast<int>(found) > expect)
      fail(errc::endpoint_count_mismatch,
           "found " + std::to_string(found) + " zeros where " +
               std::to_string(expect) + " are possible");
    if (static_cast<int>(found) == expect) {
      verify_by_winding(p, of_x, roots);
      sort_by_lattice_coords(roots, mod);
      return roots;
    }
    // fall through: retry on the finer grid
  }
  fail(errc::endpoint_count_mismatch,
       "located only " + std::to_string(found) + " of " +
           std::to_string(expect) + " expected zeros");
}

// Derivative stacks and the analytic consistency residuals of an endpoint
// set. The residuals are exact identities of the construction:
//   sum(e) + (d2-1) u_inf in the lattice   (Abel sum over zeros of x')
//   sum_i Z(u_inf - e_i) - (d2+1) Z(2 u_inf) in 2 i pi Z
//     (vanishing residue of x' at its double pole), mirrored for y'.
void finish_set(const UniformParams& p, EndpointSet& out) {
  const Modulus& mod = p.modulus;
  out.e_x.clear();
  out.e_y.clear();
  out.et_y.clear();
  out.et_x.clear();
  cplx esum = 0.0, etsum = 0.0, zsum = 0.0, ztsum = 0.0;
  for (cplx e : out.e) {
    out.e_x.push_back(x_derivs(p, e, 5));
    out.e_y.push_back(y_derivs(p, e, 4));
    esum += e;
    zsum += zfun(p.u_inf - e, mod);
  }
  for (cplx e : out.et) {
    out.et_y.push_back(y_derivs(p, e, 5));
    out.et_x.push_back(x_derivs(p, e, 4));
    etsum += e;
    ztsum += zfun(p.u_inf + e, mod);
  }
  const cplx z2 = zfun(2.0 * p.u_inf, mod);
  out.e_sum_dist = lattice_distance(esum + double(p.d2 - 1) * p.u_inf, mod);
  out.et_sum_dist = lattice_distance(etsum - double(p.d1 - 1) * p.u_inf, mod);
  out.e_zsum_dist = mod_two_pi_i_dist(zsum - double(p.d2 + 1) * z2);
  out.et_zsum_dist = mod_two_pi_i_dist(ztsum - double(p.d1 + 1) * z2);
}

// The lattice translate of z closest (in cell coordinates) to s.
cplx nearest_translate(cplx z, cplx s, const Modulus& mod) {
  const auto c = lattice_coords(z - s, mod);
  return z - (std::round(c.first) + std::round(c.second) * mod.tau());
}

std::vector<cplx> match_to_seed(const std::vector<cplx>& found,
                                const std::vector<cplx>& seed_pts,
                                const Modulus& mod) {
  if (found.size() != seed_pts.size())
    fail(errc::internal_check, "endpoint fallback changed the zero count");
  std::vector<char> used(found.size(), 0);
  std::vector<cplx> out;
  for (cplx s : seed_pts) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < found.size(); ++i) {
      if (used[i]) continue;
      const double d = lattice_distance(found[i] - s, mod);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    if (best < 0 || bd > 0.2)
      fail(errc::non_convergence,
           "endpoint tracking lost correspondence with the seed set");
    used[static_cast<size_t>(best)] = 1;
    out.push_back(nearest_translate(found[static_cast<size_t>(best)], s, mod));
  }
  return out;
}

}  // namespace

UniformParams::UniformParams(int d1_, int d2_, Modulus mod, cplx u_inf_,
                             cplx gamma_, cplx gammat_, std::vector<cplx> xA_,
                             std::vector<cplx> yA_)
    : d1(d1_), d2(d2_), modulus(std::move(mod)), u_inf(u_inf_), gamma(gamma_),
      gammat(gammat_), xA(std::move(xA_)), yA(std::move(yA_)) {
  theta_ratio_ = theta(2.0 * u_inf, modulus) / modulus.theta_prime0();
}

void validate(const UniformParams& p) {
  if (p.d1 < 1 || p.d1 > 4 || p.d2 < 1 || p.d2 > 4)
    fail(errc::bad_config, "degrees d1 and d2 must lie in [1, 4]");
  if (static_cast<int>(p.xA.size()) != p.d2)
    fail(errc::bad_config, "xA must hold [A0, A2..A_d2], i.e. d2 entries");
  if (static_cast<int>(p.yA.size()) != p.d1)
    fail(errc::bad_config, "yA must hold [At0, At2..At_d1], i.e. d1 entries");
  if (std::abs(p.gamma) == 0.0 || std::abs(p.gammat) == 0.0)
    fail(errc::zero_leading_coefficient, "gamma and gammat must be nonzero");
  if (p.d2 >= 2 && std::abs(p.xA.back()) == 0.0)
    fail(errc::zero_leading_coefficient,
         "A_d2 must be nonzero for the declared degree d2");
  if (p.d1 >= 2 && std::abs(p.yA.back()) == 0.0)
    fail(errc::zero_leading_coefficient,
         "At_d1 must be nonzero for the declared degree d1");
  if (lattice_distance(p.u_inf, p.modulus) < 1e-6)
    fail(errc::bad_config, "puncture u_inf is too close to the lattice");
  if (lattice_distance(2.0 * p.u_inf, p.modulus) < 1e-6)
    fail(errc::bad_config,
         "2 u_inf is too close to the lattice (theta(2 u_inf) degenerates)");
}

std::vector<cplx> x_derivs(const UniformParams& p, cplx u, int max_order) {
  if (max_order < 0 || max_order > 5)
    fail(errc::bad_config, "x_derivs supports orders 0..5");
  const Modulus& mod = p.modulus;
  const cplx S = p.scale_x();
  const auto bm = zwp_bundle(u - p.u_inf, mod, max_order - 1);
  const auto bp = zwp_bundle(u + p.u_inf, mod,
                             std::max(max_order - 1, p.d2 - 2 + max_order));
  std::vector<cplx> out(static_cast<size_t>(max_order) + 1);
  out[0] = S * (bm.z - bp.z) + p.xA[0];
  for (int k = 2; k <= p.d2; ++k)
    out[0] += p.xA[static_cast<size_t>(k) - 1] / kFact[k - 1] *
              bp.wp[static_cast<size_t>(k) - 2];
  for (int m = 1; m <= max_order; ++m) {
    cplx v = S * (bp.wp[static_cast<size_t>(m) - 1] -
                  bm.wp[static_cast<size_t>(m) - 1]);
    for (int k = 2; k <= p.d2; ++k)
      v += p.xA[static_cast<size_t>(k) - 1] / kFact[k - 1] *
           bp.wp[static_cast<size_t>(k) - 2 + m];
    out[static_cast<size_t>(m)] = v;
  }
  return out;
}

std::vector<cplx> y_derivs(const UniformParams& p, cplx u, int max_order) {
  if (max_order < 0 || max_order > 5)
    fail(errc::bad_config, "y_derivs supports orders 0..5");
  const Modulus& mod = p.modulus;
  const cplx T = -p.scale_y();
  const auto bm = zwp_bundle(u - p.u_inf, mod,
                             std::max(max_order - 1, p.d1 - 2 + max_order));
  const auto bp = zwp_bundle(u + p.u_inf, mod, max_order - 1);
  std::vector<cplx> out(static_cast<size_t>(max_order) + 1);
  out[0] = T * (bm.z - bp.z) + p.yA[0];
  for (int k = 2; k <= p.d1; ++k)
    out[0] += p.yA[static_cast<size_t>(k) - 1] / kFact[k - 1] *
              bm.wp[static_cast<size_t>(k) - 2];
  for (int m = 1; m <= max_order; ++m) {
    cplx v = T * (bp.wp[static_cast<size_t>(m) - 1] -
                  bm.wp[static_cast<size_t>(m) - 1]);
    for (int k = 2; k <= p.d1; ++k)
      v += p.yA[static_cast<size_t>(k) - 1] / kFact[k - 1] *
           bm.wp[static_cast<size_t>(k) - 2 + m];
    out[static_cast<size_t>(m)] = v;
  }
  return out;
}

cplx x_of_u(const UniformParams& p, cplx u) { return x_derivs(p, u, 0)[0]; }
cplx y_of_u(const UniformParams& p, cplx u) { return y_derivs(p, u, 0)[0]; }

XYPair xy_pair(const UniformParams& p, cplx u) {
  const auto bm = zwp_bundle(u - p.u_inf, p.modulus, std::max(p.d1 - 1, 0));
  const auto bp = zwp_bundle(u + p.u_inf, p.modulus, std::max(p.d2 - 1, 0));
  const cplx S = p.scale_x();
  const cplx T = -p.scale_y();
  const cplx zdiff = bm.z - bp.z;
  const cplx wdiff = bp.wp[0] - bm.wp[0];
  XYPair r;
  r.x = S * zdiff + p.xA[0];
  r.xp = S * wdiff;
  for (int k = 2; k <= p.d2; ++k) {
    const cplx c = p.xA[static_cast<size_t>(k) - 1] / kFact[k - 1];
    r.x += c * bp.wp[static_cast<size_t>(k) - 2];
    r.xp += c * bp.wp[static_cast<size_t>(k) - 1];
  }
  r.y = T * zdiff + p.yA[0];
  r.yp = T * wdiff;
  for (int k = 2; k <= p.d1; ++k) {
    const cplx c = p.yA[static_cast<size_t>(k) - 1] / kFact[k - 1];
    r.y += c * bm.wp[static_cast<size_t>(k) - 2];
    r.yp += c * bm.wp[static_cast<size_t>(k) - 1];
  }
  return r;
}

UniformParams half_lattice_translate(const UniformParams& p, int m0, int n0) {
  const cplx tau = p.modulus.tau();
  const cplx c = 0.5 * (double(m0) + double(n0) * tau);
  // theta(2u + m0 + n0 tau) = fac * theta(2u); keeping the residue scales
  // fixed means dividing gamma, gammat by fac, and the Z quasi-period shifts
  // -2 i pi n0 are absorbed into the additive constants.
  const double sign = ((m0 + n0) % 2 == 0) ? 1.0 : -1.0;
  const cplx fac =
      sign * std::exp(-cplx(0.0, kPi) * (double(n0) * double(n0) * tau +
                                         4.0 * double(n0) * p.u_inf));
  const cplx S = p.scale_x();
  const cplx T = -p.scale_y();
  std::vector<cplx> xA = p.xA, yA = p.yA;
  xA[0] -= kTwoPiI * double(n0) * S;
  yA[0] -= kTwoPiI * double(n0) * T;
  return UniformParams(p.d1, p.d2, p.modulus, p.u_inf + c, p.gamma / fac,
                       p.gammat / fac, std::move(xA), std::move(yA));
}

UniformParams canonical_gauge(const UniformParams& p) {
  const auto c = lattice_coords(p.u_inf, p.modulus);
  const int m0 = -static_cast<int>(std::floor(2.0 * c.first));
  const int n0 = -static_cast<int>(std::floor(2.0 * c.second));
  if (m0 == 0 && n0 == 0) return p;
  return half_lattice_translate(p, m0, n0);
}

EndpointSet find_endpoints(const UniformParams& p) {
  validate(p);
  EndpointSet out;
  out.e = locate_zeros(p, true, p.d2 + 3);
  out.et = locate_zeros(p, false, p.d1 + 3);
  finish_set(p, out);
  return out;
}

EndpointSet refine_endpoints(const UniformParams& p, const EndpointSet& seed) {
  validate(p);
  const Modulus& mod = p.modulus;
  const double clamp = 0.1 * std::min(1.0, mod.tau().imag());
  // Track each seed endpoint by Newton; keep the seed's representative and
  // ordering so callers can difference endpoint data across parameter probes.
  auto track = [&](const std::vector<cplx>& olds,
                   bool of_x) -> std::optional<std::vector<cplx>> {
    std::vector<cplx> zs;
    for (cplx s : olds) {
      const auto r = polish_zero(p, of_x, s, clamp, 40);
      if (!r || std::abs(*r - s) > 0.1) return std::nullopt;
      zs.push_back(*r);
    }
    for (size_t a = 0; a < zs.size(); ++a)
      for (size_t b = a + 1; b < zs.size(); ++b)
        if (lattice_distance(zs[a] - zs[b], mod) < 1e-6) return std::nullopt;
    return zs;
  };
  EndpointSet out;
  const auto e_new = track(seed.e, true);
  const auto et_new = track(seed.et, false);
  if (e_new && et_new) {
    out.e = *e_new;
    out.et = *et_new;
  } else {
    const EndpointSet full = find_endpoints(p);
    out.e = match_to_seed(full.e, seed.e, mod);
    out.et = match_to_seed(full.et, seed.et, mod);
  }
  finish_set(p, out);
  return out;
}

cplx sheet_pair(const UniformParams& p, cplx s, cplx e) {
  const cplx dse = s - e;
  if (std::abs(dse) < 1e-7)
    fail(errc::bad_config, "sheet_pair evaluated at the branch point itself");
  const auto ex = x_derivs(p, e, 3);
  if (std::abs(ex[2]) < 1e-10 * (1.0 + std::abs(ex[3])))
    fail(errc::degenerate_endpoint,
         "x'' vanishes at the branch point; the sheets do not separate "
         "quadratically");
  const cplx xs = x_of_u(p, s);
  const double clamp = std::max(2.0 * std::abs(dse), 1e-6);
  auto newton = [&](cplx v0) -> std::optional<cplx> {
    cplx v = v0;
    try {
      for (int it = 0; it < 80; ++it) {
        const auto d = x_derivs(p, v, 1);
        if (std::abs(d[1]) < 1e-300) return std::nullopt;
        cplx step = (d[0] - xs) / d[1];
        const double a = std::abs(step);
        if (a > clamp) step *= clamp / a;
        v -= step;
        if (std::abs(v - s) > 10.0 * std::abs(dse) + 1.0) return std::nullopt;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(v))) return v;
      }
    } catch (const Error&) {
      return std::nullopt;
    }
    return std::nullopt;
  };
  // Reflected seed first; if Newton slides back to s itself, retry with the
  // cubic-corrected reflection  e - (s-e) - r (s-e)^2,  r = x'''/(3 x'').
  const cplx r = ex[3] / (3.0 * ex[2]);
  const std::array<cplx, 2> seeds = {2.0 * e - s, e - dse - r * dse * dse};
  bool trivial_hit = false;
  for (cplx v0 : seeds) {
    const auto v = newton(v0);
    if (!v) continue;
    if (std::abs(*v - s) < 0.2 * std::abs(dse)) {
      trivial_hit = true;
      continue;
    }
    if (std::abs(x_of_u(p, *v) - xs) <= 1e-9 * (1.0 + std::abs(xs))) return *v;
  }
  if (trivial_hit)
    fail(errc::seed_escaped,
         "sheet-pair Newton could not separate from the first-sheet preimage");
  fail(errc::non_convergence, "sheet-pair Newton did not converge");
}

}  // namespace speccurve
