#include "speccurve/modelmap.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "speccurve/errors.hpp"

namespace speccurve {

namespace {

double frac01(double t) {
  t -= std::floor(t);
  return (t >= 1.0) ? 0.0 : t;
}

// Shortest nonzero lattice vector length.
double shortest_lattice_vector(const Modulus& mod) {
  double best = std::numeric_limits<double>::infinity();
  for (int m = -2; m <= 2; ++m)
    for (int n = -2; n <= 2; ++n) {
      if (m == 0 && n == 0) continue;
      best = std::min(best, std::abs(double(m) + double(n) * mod.tau()));
    }
  return best;
}

// Circle radius for the moments at `center`: half the distance to the
// nearest endpoint, the other puncture, or a lattice translate.
double moment_radius(const UniformParams& p, const EndpointSet& ep,
                     cplx center, cplx other) {
  const Modulus& mod = p.modulus;
  double dmin = std::min(lattice_distance(center - other, mod),
                         shortest_lattice_vector(mod));
  for (cplx e : ep.e) dmin = std::min(dmin, lattice_distance(center - e, mod));
  for (cplx e : ep.et) dmin = std::min(dmin, lattice_distance(center - e, mod));
  const double rho = 0.5 * dmin;
  if (rho < 1e-5)
    fail(errc::contour_too_tight,
         "no valid moment radius: a singularity crowds the puncture");
  return rho;
}

// (1/2 i pi) oint num * den^{-k} du for k = 0..kmax on shared node-doubled
// circles. The moments are residues at the puncture, so the radius may be
// shrunk freely: it is halved until an argument-principle check certifies
// winding -1 for den (the puncture pole alone inside) and until the rule
// settles, which cures circles grazed by a zero of x (resp. y).
std::vector<cplx> puncture_moments(const UniformParams& p, cplx center,
                                   double rho, int kmax, bool x_side,
                                   const QuadratureSpec& q) {
  const int per_radius_cap = std::min(q.max_nodes, 8 * q.circle_nodes);
  bool winding_trouble = false;
  for (int attempt = 0; attempt < 12; ++attempt, rho *= 0.5) {
    if (rho < 1e-7) break;
    std::vector<cplx> prev;
    bool bad_winding = false;
    for (int n = q.circle_nodes; n <= per_radius_cap;
         n *= q.refinement_factor) {
      std::vector<cplx> acc(static_cast<size_t>(kmax) + 1, cplx(0.0, 0.0));
      double phase = 0.0;
      bool phase_ok = true;
      cplx first_den(0.0, 0.0), last_den(0.0, 0.0);
      for (int j = 0; j < n; ++j) {
        const double th = 2.0 * kPi * double(j) / double(n);
        const cplx w = rho * cplx(std::cos(th), std::sin(th));
        const auto r = xy_pair(p, center + w);
        const cplx num = x_side ? r.y * r.xp : r.x * r.yp;
        const cplx den = x_side ? r.x : r.y;
        const cplx invd = 1.0 / den;
        cplx term = num * w;
        for (int k = 0; k <= kmax; ++k) {
          acc[static_cast<size_t>(k)] += term;
          term *= invd;
        }
        if (j == 0) {
          first_den = den;
        } else {
          const double d = std::arg(den / last_den);
          if (std::abs(d) > 0.5 * kPi) phase_ok = false;
          phase += d;
        }
        last_den = den;
      }
      phase += std::arg(first_den / last_den);
      for (cplx& v : acc) v /= double(n);
      if (!phase_ok) continue;
      if (std::lround(phase / (2.0 * kPi)) != -1) {
        bad_winding = true;
        break;
      }
      if (!prev.empty()) {
        bool settled = true;
        for (int k = 0; k <= kmax; ++k) {
          const size_t ks = static_cast<size_t>(k);
          if (std::abs(acc[ks] - prev[ks]) >
              q.tol * std::max(1.0, std::abs(acc[ks]))) {
            settled = false;
            break;
          }
        }
        if (settled) return acc;
      }
      prev = acc;
    }
    winding_trouble = bad_winding;
  }
  if (winding_trouble)
    fail(errc::contour_too_tight,
         x_side ? "zeros of x crowd the puncture at every usable radius"
                : "zeros of y crowd the puncture at every usable radius");
  fail(errc::quadrature_not_converged,
       "puncture moments did not settle at any usable radius");
}

// Largest circular gap among obstacle coordinates in [0,1): returns the gap
// midpoint and the half width.
std::pair<double, double> widest_gap(std::vector<double> obs) {
  std::sort(obs.begin(), obs.end());
  double best_gap = obs.front() + 1.0 - obs.back();
  double best_start = obs.back();
  for (size_t i = 0; i + 1 < obs.size(); ++i) {
    const double g = obs[i + 1] - obs[i];
    if (g > best_gap) {
      best_gap = g;
      best_start = obs[i];
    }
  }
  return {frac01(best_start + 0.5 * best_gap), 0.5 * best_gap};
}

// Obstacle coordinates of the punctures and all endpoints in the chosen
// lattice direction (first = a for the tau path, second = b for the 1 path).
std::vector<double> obstacle_coords(const UniformParams& p,
                                    const EndpointSet& ep, bool use_a) {
  std::vector<double> v;
  auto push = [&](cplx u) {
    const auto c = lattice_coords(u, p.modulus);
    v.push_back(frac01(use_a ? c.first : c.second));
  };
  push(p.u_inf);
  push(-p.u_inf);
  for (cplx e : ep.e) push(e);
  for (cplx e : ep.et) push(e);
  return v;
}

// Perpendicular u-space distance between neighboring lattice lines of the
// path family: a-lines run parallel to tau, b-lines parallel to 1.
double line_spacing(const Modulus& mod, bool a_lines) {
  const double imt = mod.tau().imag();
  return a_lines ? imt / std::abs(mod.tau()) : imt;
}

cplx cycle_integral(const UniformParams& p, const EndpointSet& ep,
                    const QuadratureSpec& q, bool tau_direction) {
  const Modulus& mod = p.modulus;
  const auto [mid, half_gap] = widest_gap(obstacle_coords(p, ep, tau_direction));
  const double clearance =
      half_gap * line_spacing(mod, tau_direction);
  if (clearance < kPoleGuard * 1e3)
    fail(errc::path_blocked,
         "no cycle base point clears the punctures and endpoints");
  auto f = [&](cplx s) {
    const auto r = xy_pair(p, s);
    return r.y * r.xp;
  };
  const cplx period = tau_direction ? mod.tau() : cplx(1.0, 0.0);
  auto base_of = [&](double c) {
    return tau_direction ? cplx(c, 0.0) : c * mod.tau();
  };
  const cplx v1 = path_integral(f, base_of(mid), period, q);
  const cplx v2 =
      path_integral(f, base_of(frac01(mid + 0.5 * half_gap)), period, q);
  if (std::abs(v1 - v2) > 1e-10 * std::max(1.0, std::abs(v1)))
    fail(errc::path_blocked,
         "homologous cycle paths disagree; a singularity sits between them");
  return v1;
}

ModelSpec model_from_targets(const std::vector<cplx>& g,
                             const std::vector<cplx>& gt, cplx eps) {
  return ModelSpec{potential_from_couplings(g), potential_from_couplings(gt),
                   eps};
}

struct TargetVector {
  int d1 = 0, d2 = 0;
  std::vector<cplx> g, gt;
  cplx epsilon;
};

TargetVector targets_of(const ModelSpec& m) {
  validate(m);
  TargetVector t;
  t.g = couplings(m.V1);
  t.gt = couplings(m.V2);
  t.d1 = int(t.g.size()) - 1;
  t.d2 = int(t.gt.size()) - 1;
  t.epsilon = m.epsilon;
  return t;
}

std::vector<cplx> residual_vector(const UniformParams& p,
                                  const EndpointSet& ep,
                                  const TargetVector& t,
                                  const QuadratureSpec& q) {
  const ForwardMap f = potentials_from_params(p, q, ep);
  const cplx eps = filling_fraction(p, q, ep);
  std::vector<cplx> r;
  r.reserve(t.g.size() + t.gt.size() + 2);
  for (size_t k = 0; k < t.g.size(); ++k) r.push_back(f.g[k] - t.g[k]);
  for (size_t k = 0; k < t.gt.size(); ++k) r.push_back(f.gt[k] - t.gt[k]);
  r.push_back(f.norm_residual);
  r.push_back(eps - t.epsilon);
  return r;
}

double vec_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (cplx z : v) s += std::norm(z);
  return std::sqrt(s);
}

std::vector<cplx> pack(const UniformParams& p) {
  std::vector<cplx> z = {p.gamma, p.gammat, p.u_inf, p.modulus.tau()};
  z.insert(z.end(), p.xA.begin(), p.xA.end());
  z.insert(z.end(), p.yA.begin(), p.yA.end());
  return z;
}

UniformParams unpack(const std::vector<cplx>& z, int d1, int d2) {
  const cplx tau = z[3];
  if (!(tau.imag() > kImTauFloor))
    fail(errc::left_domain, "Im tau fell to the degeneration floor");
  Modulus mod(tau);
  std::vector<cplx> xA(z.begin() + 4, z.begin() + 4 + d2);
  std::vector<cplx> yA(z.begin() + 4 + d2, z.begin() + 4 + d2 + d1);
  return UniformParams(d1, d2, std::move(mod), z[2], z[0], z[1], std::move(xA),
                       std::move(yA));
}

std::string describe_iterate(const std::vector<cplx>& z) {
  std::ostringstream os;
  os << "last iterate:";
  os << " gamma=" << z[0] << " gammat=" << z[1] << " u_inf=" << z[2]
     << " tau=" << z[3] << " coeffs=[";
  for (size_t j = 4; j < z.size(); ++j) {
    if (j > 4) os << ", ";
    os << z[j];
  }
  os << "]";
  return os.str();
}

// Newton inversion of x (or the perturbed curves) at fixed target value,
// seeded from a nearby point; used by du_check.
cplx invert_x(const UniformParams& p, cplx seed, cplx x0) {
  cplx v = seed;
  for (int it = 0; it < 60; ++it) {
    const auto d = x_derivs(p, v, 1);
    if (std::abs(d[1]) < 1e-300)
      fail(errc::non_convergence, "curve inversion hit a critical point");
    cplx step = (d[0] - x0) / d[1];
    const double a = std::abs(step);
    if (a > 0.05) step *= 0.05 / a;
    v -= step;
    if (std::abs(v - seed) > 0.3)
      fail(errc::seed_escaped, "curve inversion left the seed neighborhood");
    if (std::abs(step) < 1e-13 * (1.0 + std::abs(v))) return v;
  }
  fail(errc::non_convergence, "curve inversion did not converge");
}

}  // namespace

void validate(const ModelSpec& m) {
  if (m.V1.degree() < 2 || m.V1.degree() > 5 || m.V2.degree() < 2 ||
      m.V2.degree() > 5)
    fail(errc::bad_config, "potential degrees must lie in [2, 5]");
  if (m.V1.is_zero() || m.V2.is_zero() ||
      std::abs(m.V1.coeffs.back()) == 0.0 ||
      std::abs(m.V2.coeffs.back()) == 0.0)
    fail(errc::zero_leading_coefficient,
         "potentials need nonzero leading coefficients");
}

std::vector<cplx> couplings(const Poly& v) {
  std::vector<cplx> g;
  for (int k = 1; k <= v.degree(); ++k)
    g.push_back(double(k) * v.coeffs[static_cast<size_t>(k)]);
  return g;
}

Poly potential_from_couplings(const std::vector<cplx>& g) {
  std::vector<cplx> c(g.size() + 1, cplx(0.0, 0.0));
  for (size_t k = 0; k < g.size(); ++k) c[k + 1] = g[k] / double(k + 1);
  return Poly(std::move(c));
}

ForwardMap potentials_from_params(const UniformParams& p,
                                  const QuadratureSpec& q) {
  return potentials_from_params(p, q, find_endpoints(p));
}

ForwardMap potentials_from_params(const UniformParams& p,
                                  const QuadratureSpec& q,
                                  const EndpointSet& ep) {
  validate(p);
  validate(q);
  const double rho_p = moment_radius(p, ep, p.u_inf, -p.u_inf);
  const double rho_m = moment_radius(p, ep, -p.u_inf, p.u_inf);
  const auto mom_p =
      puncture_moments(p, p.u_inf, rho_p, p.d1 + 1, true, q);
  const auto mom_m =
      puncture_moments(p, -p.u_inf, rho_m, p.d2 + 1, false, q);
  ForwardMap f;
  // A counterclockwise circle in s maps to a clockwise one in the x (resp.
  // y) plane, so extracting the couplings positively flips the sign of the
  // k >= 1 moments. The k = 0 normalization residue is the plain s-plane
  // residue and keeps its sign: +1 matches y ~ V1'(x) - 1/x on the physical
  // sheet.
  f.g.resize(mom_p.size() - 1);
  f.gt.resize(mom_m.size() - 1);
  for (size_t k = 1; k < mom_p.size(); ++k) f.g[k - 1] = -mom_p[k];
  for (size_t k = 1; k < mom_m.size(); ++k) f.gt[k - 1] = -mom_m[k];
  f.norm_residual = mom_p[0] - 1.0;
  f.norm_residual_mirror = mom_m[0] - 1.0;
  return f;
}

cplx filling_fraction(const UniformParams& p, const QuadratureSpec& q) {
  return filling_fraction(p, q, find_endpoints(p));
}

cplx filling_fraction(const UniformParams& p, const QuadratureSpec& q,
                      const EndpointSet& ep) {
  validate(p);
  validate(q);
  return cycle_integral(p, ep, q, true) / kTwoPiI;
}

cplx gamma_B(const UniformParams& p, const QuadratureSpec& q) {
  return gamma_B(p, q, find_endpoints(p));
}

cplx gamma_B(const UniformParams& p, const QuadratureSpec& q,
             const EndpointSet& ep) {
  validate(p);
  validate(q);
  return cycle_integral(p, ep, q, false);
}

UniformParams solve_inverse(const ModelSpec& m, const UniformParams& guess,
                            const SolveOptions& opts, SolveStats* stats) {
  const TargetVector t = targets_of(m);
  validate(guess);
  validate(opts.quad);
  if (t.d1 != guess.d1 || t.d2 != guess.d2)
    fail(errc::bad_config, "guess degrees do not match the model");
  const int n = t.d1 + t.d2 + 4;

  std::vector<cplx> z = pack(guess);
  EndpointSet ep = find_endpoints(guess);
  auto eval = [&](const std::vector<cplx>& zz, const EndpointSet& seed)
      -> std::pair<std::vector<cplx>, EndpointSet> {
    const UniformParams pp = unpack(zz, t.d1, t.d2);
    EndpointSet epp = refine_endpoints(pp, seed);
    auto r = residual_vector(pp, epp, t, opts.quad);
    return {std::move(r), std::move(epp)};
  };

  std::vector<cplx> r;
  {
    auto first = eval(z, ep);
    r = std::move(first.first);
    ep = std::move(first.second);
  }
  double rn = vec_norm(r);
  int iters_used = 0;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (rn < opts.tol) break;
    iters_used = iter + 1;

    Eigen::MatrixXcd J(n, n);
    for (int j = 0; j < n; ++j) {
      const cplx dz = opts.fd_step * (1.0 + std::abs(z[static_cast<size_t>(j)]));
      std::vector<cplx> zz = z;
      zz[static_cast<size_t>(j)] += dz;
      const auto rr = eval(zz, ep).first;
      for (int i = 0; i < n; ++i)
        J(i, j) = (rr[static_cast<size_t>(i)] - r[static_cast<size_t>(i)]) / dz;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(J);
    if (cod.rank() < n - 1)
      fail(errc::jacobian_singular,
           "forward-map Jacobian lost rank; " + describe_iterate(z));
    Eigen::VectorXcd rv(n);
    for (int i = 0; i < n; ++i) rv(i) = r[static_cast<size_t>(i)];
    Eigen::VectorXcd step = cod.solve(rv);
    // Far from the solution an ill-conditioned Jacobian can propose a wild
    // step; cap its length so the line search explores a sane segment.
    const double cap = 0.5 * (1.0 + std::sqrt(double(n)));
    if (step.norm() > cap) step *= cap / step.norm();

    bool accepted = false;
    std::optional<Error> last_err;
    for (double lambda = 1.0; lambda >= 1.0 / (1 << 20); lambda *= 0.5) {
      std::vector<cplx> zt = z;
      for (int j = 0; j < n; ++j) zt[static_cast<size_t>(j)] -= lambda * step(j);
      try {
        auto trial = eval(zt, ep);
        const double tn = vec_norm(trial.first);
        if (tn < rn) {
          z = std::move(zt);
          r = std::move(trial.first);
          ep = std::move(trial.second);
          rn = tn;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        last_err = e;
      }
    }
    if (!accepted) {
      if (last_err &&
          (last_err->code() == errc::left_domain ||
           last_err->code() == errc::modulus_degenerate ||
           last_err->code() == errc::bad_config))
        fail(errc::left_domain,
             std::string("iteration left the parameter domain (") +
                 last_err->what() + "); " + describe_iterate(z));
      fail(errc::max_iterations,
           "line search stalled before reaching tolerance; " +
               describe_iterate(z));
    }
  }
  if (!(rn < opts.tol))
    fail(errc::max_iterations,
         "no convergence within the iteration budget; " + describe_iterate(z));
  if (stats) {
    stats->iterations = iters_used;
    stats->residual_norm = rn;
  }
  return canonical_gauge(unpack(z, t.d1, t.d2));
}

UniformParams solve_continuation(const ModelSpec& target,
                                 const UniformParams& base_params,
                                 const SolveOptions& opts) {
  const TargetVector t1 = targets_of(target);
  validate(base_params);
  if (t1.d1 != base_params.d1 || t1.d2 != base_params.d2)
    fail(errc::bad_config, "base parameters do not match the target degrees");
  const EndpointSet ep = find_endpoints(base_params);
  const ForwardMap f0 = potentials_from_params(base_params, opts.quad, ep);
  const cplx eps0 = filling_fraction(base_params, opts.quad, ep);

  auto lerp = [&](double w) {
    std::vector<cplx> g(f0.g.size()), gt(f0.gt.size());
    for (size_t k = 0; k < g.size(); ++k)
      g[k] = (1.0 - w) * f0.g[k] + w * t1.g[k];
    for (size_t k = 0; k < gt.size(); ++k)
      gt[k] = (1.0 - w) * f0.gt[k] + w * t1.gt[k];
    return model_from_targets(g, gt, (1.0 - w) * eps0 + w * t1.epsilon);
  };

  UniformParams cur = base_params;
  double w = 0.0, stride = 1.0;
  while (w < 1.0 - 1e-12) {
    const double wn = std::min(1.0, w + stride);
    try {
      cur = solve_inverse(lerp(wn), cur, opts);
      w = wn;
      stride = std::min(2.0 * stride, 1.0);
    } catch (const Error&) {
      stride *= 0.5;
      if (stride < 1.0 / 1024.0) throw;
    }
  }
  return cur;
}

DuReport du_check(const UniformParams& p, const QuadratureSpec& q, double h) {
  validate(p);
  validate(q);
  const EndpointSet ep = find_endpoints(p);
  const ForwardMap f = potentials_from_params(p, q, ep);
  if (std::abs(f.norm_residual) > 1e-8)
    fail(errc::bad_config,
         "du_check needs normalized parameters (unit residue at u_inf)");
  const cplx eps = filling_fraction(p, q, ep);

  SolveOptions so;
  auto resolve = [&](cplx eps_target) {
    return solve_inverse(model_from_targets(f.g, f.gt, eps_target), p, so);
  };
  const UniformParams pp = resolve(eps + h);
  const UniformParams pm = resolve(eps - h);

  auto du_density = [&](cplx u) {
    const auto b = xy_pair(p, u);
    const cplx up_ = invert_x(pp, u, b.x);
    const cplx um_ = invert_x(pm, u, b.x);
    return (y_of_u(pp, up_) - y_of_u(pm, um_)) / (2.0 * h) * b.xp / kTwoPiI;
  };

  auto ring_max = [&](cplx center, double radius) {
    double m = 0.0;
    const int nodes = 24;
    for (int j = 0; j < nodes; ++j) {
      const double th = 2.0 * kPi * double(j) / double(nodes);
      m = std::max(m, std::abs(du_density(
                          center + radius * cplx(std::cos(th), std::sin(th)))));
    }
    return m;
  };
  DuReport rep;
  rep.growth_exponent_plus =
      std::log10(ring_max(p.u_inf, 1e-2) / ring_max(p.u_inf, 1e-1));
  rep.growth_exponent_minus =
      std::log10(ring_max(-p.u_inf, 1e-2) / ring_max(-p.u_inf, 1e-1));

  const Modulus& mod = p.modulus;
  const auto [mid_a, half_a] = widest_gap(obstacle_coords(p, ep, true));
  if (half_a * line_spacing(mod, true) < kPoleGuard * 1e3)
    fail(errc::path_blocked, "no A-cycle base point clears the obstacles");
  rep.a_cycle = path_integral(du_density, cplx(mid_a, 0.0), mod.tau(), q);

  const auto [mid_b, half_b] = widest_gap(obstacle_coords(p, ep, false));
  if (half_b * line_spacing(mod, false) < kPoleGuard * 1e3)
    fail(errc::path_blocked, "no B-cycle base point clears the obstacles");
  rep.b_cycle = path_integral(du_density, mid_b * mod.tau(), cplx(1.0, 0.0), q);

  const cplx gp = gamma_B(pp, q);
  const cplx gm = gamma_B(pm, q);
  rep.b_cycle_fd = (gp - gm) / (2.0 * h) / kTwoPiI;
  return rep;
}

std::vector<std::vector<cplx>> forward_jacobian(const UniformParams& p,
                                                const SolveOptions& opts) {
  validate(p);
  validate(opts.quad);
  const int n = p.d1 + p.d2 + 4;
  TargetVector t;  // zero targets: the Jacobian of the raw forward outputs
  t.d1 = p.d1;
  t.d2 = p.d2;
  t.g.assign(static_cast<size_t>(p.d1) + 1, cplx(0.0, 0.0));
  t.gt.assign(static_cast<size_t>(p.d2) + 1, cplx(0.0, 0.0));
  t.epsilon = cplx(0.0, 0.0);

  const std::vector<cplx> z = pack(p);
  EndpointSet ep = find_endpoints(p);
  const auto base = residual_vector(p, ep, t, opts.quad);
  std::vector<std::vector<cplx>> J(static_cast<size_t>(n),
                                   std::vector<cplx>(static_cast<size_t>(n)));
  for (int j = 0; j < n; ++j) {
    const cplx dz = opts.fd_step * (1.0 + std::abs(z[static_cast<size_t>(j)]));
    std::vector<cplx> zz = z;
    zz[static_cast<size_t>(j)] += dz;
    const UniformParams pj = unpack(zz, p.d1, p.d2);
    const EndpointSet epj = refine_endpoints(pj, ep);
    const auto rj = residual_vector(pj, epj, t, opts.quad);
    for (int i = 0; i < n; ++i)
      J[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          (rj[static_cast<size_t>(i)] - base[static_cast<size_t>(i)]) / dz;
  }
  return J;
}

}  // namespace speccurve
