// Measures the global normalization frozen in oracle.hpp as kPairingKappa.
//
// For every analytic variation Q and every coupling index k on the example
// model, the tool compares
//
//   fd     = central difference of Q through the inverse solver at g_k +- h
//   raw_k  = (1/2 i pi) oint_{u_inf} x^k Qdot ds   (bare residue)
//   res_k  = (1/2 i pi) oint_{u_inf} x^k ds
//   rate   = dQ/deps from the filling direction
//
// and prints three ratios per row: fd/raw_k (bare), fd/(raw_k/k) (order
// weight only), and fd/((raw_k + res_k*rate)/k) (full prediction with the
// fixed-filling-fraction restoration). The last column must be one constant
// across all rows; that constant is kPairingKappa. The f1 row pairs the
// field +Y1(x(s)) x'(s) against dF1/deps = rate * Gamma1 the same way: on
// this codebase's contour orientations Y1 x' coincides pointwise with the
// dotted field of the scale-form F1, so the resolvent correction enters the
// derivative identity with a plus sign and the pairing of -Y1 x' carries
// the constant -kPairingKappa.

#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "speccurve/correction.hpp"
#include "speccurve/elliptic.hpp"
#include "speccurve/modelmap.hpp"
#include "speccurve/oracle.hpp"
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

UniformParams normalized(const UniformParams& p, const QuadratureSpec& q) {
  const auto f = potentials_from_params(p, q);
  const cplx c = 1.0 / (1.0 + f.norm_residual);
  std::vector<cplx> yA = p.yA;
  for (cplx& v : yA) v *= c;
  return UniformParams(p.d1, p.d2, p.modulus, p.u_inf, p.gamma, c * p.gammat,
                       p.xA, yA);
}

struct Row {
  std::string name;
  Observable observe;
  CFun field;     // s -> Qdot(s)
  cplx eps_rate;  // dQ/deps
};

void print_ratio(const char* label, cplx num, cplx den) {
  const cplx r = num / den;
  std::printf("  %-10s %+12.8f %+12.8f i", label, r.real(), r.imag());
}

}  // namespace

int main() {
  try {
    const QuadratureSpec q{256, 512, 2, 1e-11, 1 << 16};
    const UniformParams start = normalized(generic_params(), q);
    const auto fm = potentials_from_params(start, q);
    const ModelSpec m{potential_from_couplings(fm.g),
                      potential_from_couplings(fm.gt),
                      filling_fraction(start, q)};
    const UniformParams p0 = solve_inverse(m, start);
    const EndpointSet ep0 = find_endpoints(p0);
    const auto locals0 = local_data_all(p0, ep0);
    const auto fdir = filling_direction(p0, ep0);
    const cplx g1 = gamma1(p0, locals0);
    const cplx f1_rate = -kTwoPiI / p0.modulus.tau() * g1;

    auto vp = [&](cplx s) { return variation_point(p0, ep0, s); };
    std::vector<Row> rows;
    rows.push_back({"tau", [](const UniformParams& p) { return p.modulus.tau(); },
                    [&](cplx s) { return taudot(vp(s)); }, taudot(fdir)});
    rows.push_back({"u_inf", [](const UniformParams& p) { return p.u_inf; },
                    [&](cplx s) { return uinfdot(p0, ep0, vp(s)); },
                    uinfdot(p0, ep0, fdir)});
    for (int i = 0; i < int(ep0.e.size()); ++i) {
      rows.push_back({"e[" + std::to_string(i) + "]",
                      [ep0, i](const UniformParams& p) {
                        return refine_endpoints(p, ep0).e[size_t(i)];
                      },
                      [&, i](cplx s) { return edot(p0, ep0, vp(s), i); },
                      edot(p0, ep0, fdir, i)});
    }
    rows.push_back({"ln A",
                    [p0](const UniformParams& p) {
                      return std::log(p.scale_x() / p0.scale_x());
                    },
                    [&](cplx s) { return Adot_over_A(p0, ep0, vp(s)); },
                    Adot_over_A(p0, ep0, fdir)});
    rows.push_back({"ln At",
                    [p0](const UniformParams& p) {
                      return std::log(p.scale_y() / p0.scale_y());
                    },
                    [&](cplx s) { return Atdot_over_At(p0, ep0, vp(s)); },
                    Atdot_over_At(p0, ep0, fdir)});
    rows.push_back({"ln th'0",
                    [p0](const UniformParams& p) {
                      return std::log(p.modulus.theta_prime0() /
                                      p0.modulus.theta_prime0());
                    },
                    [&](cplx s) { return dlog_theta_prime0(p0, vp(s)); },
                    dlog_theta_prime0(p0, fdir)});
    rows.push_back({"ln prod y'",
                    [p0, ep0](const UniformParams& p) {
                      const auto ep = refine_endpoints(p, ep0);
                      cplx acc = 0.0;
                      for (size_t i = 0; i < ep.e.size(); ++i)
                        acc += std::log(y_derivs(p, ep.e[i], 1)[1] /
                                        y_derivs(p0, ep0.e[i], 1)[1]);
                      return acc;
                    },
                    [&](cplx s) { return dlog_prod_yprime(p0, ep0, vp(s)); },
                    dlog_prod_yprime(p0, ep0, fdir)});
    rows.push_back({"f1",
                    [ep0](const UniformParams& p) {
                      return f1_from_scales(p, refine_endpoints(p, ep0));
                    },
                    [&](cplx s) {
                      return y1_of_s(p0, locals0, s) * xy_pair(p0, s).xp;
                    },
                    f1_rate});

    // Bare residue machinery, independent of the oracle implementation.
    double clearance = lattice_distance(2.0 * p0.u_inf, p0.modulus);
    for (cplx e : ep0.e)
      clearance =
          std::min(clearance, lattice_distance(p0.u_inf - e, p0.modulus));
    const double radius = 0.45 * clearance;
    auto residue = [&](const CFun& f, int k) {
      return circle_integral(
          [&](cplx s) { return std::pow(x_of_u(p0, s), k) * f(s); }, p0.u_inf,
          radius, q);
    };

    const FDPlan plan;
    const int kmax = int(fm.g.size());
    cplx kappa_acc = 0.0;
    double kappa_spread = 0.0;
    std::vector<cplx> fulls;
    for (int k = 1; k <= kmax; ++k) {
      std::printf("k = %d\n", k);
      const GkProbe probe = make_gk_probe(m, k, plan, p0);
      const cplx res_k = residue([](cplx) { return cplx(1.0); }, k);
      for (const Row& row : rows) {
        const cplx fd = fd_from_probe(probe, row.observe);
        const cplx raw = residue(row.field, k);
        const cplx full = (raw + res_k * row.eps_rate) / double(k);
        std::printf("%-11s |fd| %9.3e", row.name.c_str(), std::abs(fd));
        print_ratio("bare", fd, raw);
        print_ratio("1/k", fd, raw / double(k));
        print_ratio("full", fd, full);
        std::printf("\n");
        fulls.push_back(fd / full);
        kappa_acc += fd / full;
      }
    }
    const cplx kappa = kappa_acc / double(fulls.size());
    for (cplx r : fulls)
      kappa_spread = std::max(kappa_spread, std::abs(r - kappa));
    std::printf("\nkappa mean %+.10f %+.10f i   max deviation %.3e\n",
                kappa.real(), kappa.imag(), kappa_spread);
    return 0;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "derive_pairing failed: %s\n", ex.what());
    return 1;
  }
}
