#include "speccurve/elliptic.hpp"

#include <cmath>

#include "speccurve/errors.hpp"

namespace speccurve {

namespace {

// Centered representative: u = uc + m + n*tau with both lattice coordinates
// of uc in [-1/2, 1/2). Best conditioning for the q-series.
struct Centered {
  cplx uc;
  long m, n;
};

Centered reduce_centered(cplx u, cplx tau) {
  // Lattice coordinates: u = a + b*tau with a, b real.
  double b = u.imag() / tau.imag();
  double a = u.real() - b * tau.real();
  long n = std::lround(std::floor(b + 0.5));
  long m = std::lround(std::floor(a + 0.5));
  return {u - double(m) - double(n) * tau, m, n};
}

// Raw q-series for theta^{(j)}(uc), j = 0..max_order, at a centered point.
// term_j(n) = 2 (-1)^n exp(i pi tau (n+1/2)^2) ((2n+1)pi)^j trig_j((2n+1)pi uc)
// where trig cycles sin, cos, -sin, -cos.
std::array<cplx, 5> theta_series(cplx uc, cplx tau, double tol, int max_terms,
                                 int max_order) {
  std::array<cplx, 5> sum{};
  int consecutive_small = 0;
  for (int n = 0; n < max_terms; ++n) {
    double a = 2.0 * n + 1.0;
    cplx qpow = std::exp(cplx(0.0, kPi) * tau * (n + 0.5) * (n + 0.5));
    cplx w = a * kPi * uc;
    cplx s = std::sin(w), c = std::cos(w);
    double sign = (n % 2 == 0) ? 2.0 : -2.0;
    bool all_small = true;
    double apow = 1.0;
    for (int j = 0; j <= max_order; ++j) {
      cplx trig;
      switch (j % 4) {
        case 0: trig = s; break;
        case 1: trig = c; break;
        case 2: trig = -s; break;
        default: trig = -c; break;
      }
      cplx term = sign * qpow * apow * trig;
      sum[j] += term;
      if (std::abs(term) > tol * (std::abs(sum[j]) + 1.0)) all_small = false;
      apow *= a * kPi;
    }
    if (all_small) {
      if (++consecutive_small >= 2) return sum;
    } else {
      consecutive_small = 0;
    }
  }
  fail(errc::series_not_converged, "theta series hit the term cap");
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

}  // namespace

Modulus::Modulus(cplx tau, double series_tol, int max_terms)
    : tau_(tau), series_tol_(series_tol), max_terms_(max_terms) {
  if (!(tau.imag() > kImTauFloor))
    fail(errc::modulus_degenerate, "Im(tau) must exceed the series floor");
  q_ = std::exp(cplx(0.0, kPi) * tau_);

  dth0_ = theta_series(cplx(0.0, 0.0), tau_, series_tol_, max_terms_, 4);
  // Odd function: even derivatives vanish identically; clamp roundoff.
  dth0_[0] = dth0_[2] = dth0_[4] = cplx(0.0, 0.0);

  // Thin tori make theta'(0) exponentially smaller than the individual series
  // terms; once the alternating sum cancels below double precision nothing
  // downstream has significant digits, so refuse such moduli outright.
  double absum = 0.0;
  for (int n = 0; n < max_terms_; ++n) {
    double t = 2.0 * std::abs(std::exp(cplx(0.0, kPi) * tau_ * (n + 0.5) * (n + 0.5))) *
               (2.0 * n + 1.0) * kPi;
    absum += t;
    if (t < 1e-18 * absum) break;
  }
  double cancel_noise = 2.2e-16 * absum / std::abs(dth0_[1]);
  if (cancel_noise > 2e-9)
    fail(errc::modulus_degenerate,
         "theta series cancellation exhausts double precision at this tau");

  zeta1_ = dth0_[3] / (3.0 * dth0_[1]);

  // Close the derivative recursion: wp'' = 6 (wp+zeta1)^2 - g2/2 defines g2
  // from the theta route; an independent point cross-checks it.
  auto wp_stack = [&](cplx u) {
    auto th = theta_series(reduce_centered(u, tau_).uc, tau_, series_tol_,
                           max_terms_, 4);
    cplx L1 = th[1] / th[0], L2 = th[2] / th[0], L3 = th[3] / th[0],
         L4 = th[4] / th[0];
    cplx wp0 = L1 * L1 - L2;
    cplx wp2 = -L4 + 4.0 * L1 * L3 + 3.0 * L2 * L2 - 12.0 * L1 * L1 * L2 +
               6.0 * L1 * L1 * L1 * L1;
    return std::pair<cplx, cplx>(wp0, wp2);
  };
  auto [wa0, wa2] = wp_stack(0.31 + 0.27 * tau_);
  auto [wb0, wb2] = wp_stack(0.13 + 0.41 * tau_);
  cplx pa = wa0 + zeta1_, pb = wb0 + zeta1_;
  cplx g2a = 12.0 * pa * pa - 2.0 * wa2;
  cplx g2b = 12.0 * pb * pb - 2.0 * wb2;
  if (rel_diff(g2a, g2b, 1.0) > std::max(1e-8, 100.0 * cancel_noise))
    fail(errc::internal_check, "g2 closure disagrees between probe points");
  g2_ = 0.5 * (g2a + g2b);
}

TorusPoint reduce(cplx u, const Modulus& mod) {
  cplx tau = mod.tau();
  double b = u.imag() / tau.imag();
  double a = u.real() - b * tau.real();
  long n = std::lround(std::floor(b));
  long m = std::lround(std::floor(a));
  TorusPoint tp;
  tp.u = u;
  tp.m = m;
  tp.n = n;
  tp.reduced = u - double(m) - double(n) * tau;
  return tp;
}

double lattice_distance(cplx u, const Modulus& mod) {
  Centered c = reduce_centered(u, mod.tau());
  double best = std::abs(c.uc);
  for (int dm = -1; dm <= 1; ++dm)
    for (int dn = -1; dn <= 1; ++dn) {
      cplx corner = double(dm) + double(dn) * mod.tau();
      best = std::min(best, std::abs(c.uc - corner));
    }
  return best;
}

std::pair<double, double> lattice_coords(cplx u, const Modulus& mod) {
  const double b = u.imag() / mod.tau().imag();
  const double a = u.real() - b * mod.tau().real();
  return {a, b};
}

std::vector<cplx> theta_derivs(cplx u, const Modulus& mod, int max_order) {
  if (max_order < 0 || max_order > 4)
    fail(errc::internal_check, "theta_derivs supports orders 0..4");
  Centered c = reduce_centered(u, mod.tau());
  auto base = theta_series(c.uc, mod.tau(), mod.series_tol(), mod.max_terms(),
                           max_order);
  // theta(u) = g(u) theta(uc) with g = (-1)^{m+n} exp(-i pi (n^2 tau + 2 n uc)),
  // g' = -2 i pi n g; Leibniz gives the derivative reconstruction.
  double sign = ((c.m + c.n) % 2 == 0) ? 1.0 : -1.0;
  cplx g = sign * std::exp(-cplx(0.0, kPi) *
                           (double(c.n) * double(c.n) * mod.tau() +
                            2.0 * double(c.n) * c.uc));
  cplx shift = cplx(0.0, -2.0 * kPi * double(c.n));
  std::vector<cplx> out(max_order + 1);
  for (int k = 0; k <= max_order; ++k) {
    cplx acc(0.0, 0.0);
    cplx shift_pow(1.0, 0.0);
    for (int j = k; j >= 0; --j) {
      acc += binom(k, k - j) * shift_pow * base[j];
      shift_pow *= shift;
    }
    out[k] = g * acc;
  }
  return out;
}

cplx theta(cplx u, const Modulus& mod) { return theta_derivs(u, mod, 0)[0]; }

cplx zfun(cplx u, const Modulus& mod) { return zwp_bundle(u, mod, -1).z; }

std::vector<cplx> wp_derivs(cplx u, const Modulus& mod, int max_order) {
  if (max_order < 0)
    fail(errc::internal_check, "wp_derivs needs a nonnegative order");
  return zwp_bundle(u, mod, max_order).wp;
}

ZWp zwp_bundle(cplx u, const Modulus& mod, int wp_max_order) {
  if (wp_max_order > 7)
    fail(errc::internal_check, "wp orders are supported up to 7");
  if (lattice_distance(u, mod) < kPoleGuard)
    fail(errc::pole_proximity,
         "Z/wp evaluated within pole guard of the lattice");
  Centered c = reduce_centered(u, mod.tau());
  const int th_ord = (wp_max_order >= 2)   ? 4
                     : (wp_max_order >= 0) ? wp_max_order + 2
                                           : 1;
  auto th = theta_series(c.uc, mod.tau(), mod.series_tol(), mod.max_terms(),
                         th_ord);
  ZWp out;
  out.z = th[1] / th[0] - kTwoPiI * double(c.n);
  if (wp_max_order < 0) return out;

  cplx L1 = th[1] / th[0], L2 = th[2] / th[0];
  std::vector<cplx>& w = out.wp;
  w.resize(static_cast<size_t>(wp_max_order) + 1);
  w[0] = L1 * L1 - L2;
  if (wp_max_order >= 1) {
    cplx L3 = th[3] / th[0];
    w[1] = -L3 + 3.0 * L1 * L2 - 2.0 * L1 * L1 * L1;
    if (wp_max_order >= 2) {
      cplx L4 = th[4] / th[0];
      w[2] = -L4 + 4.0 * L1 * L3 + 3.0 * L2 * L2 - 12.0 * L1 * L1 * L2 +
             6.0 * L1 * L1 * L1 * L1;
    }
  }
  if (wp_max_order >= 3) {
    // Recursion in p = wp + zeta1 (the classical Weierstrass function) and
    // q = wp', closed by wp'' = 6 p^2 - g2/2.
    cplx p = w[0] + mod.zeta1();
    cplx q = w[1];
    cplx g2 = mod.g2();
    w[3] = 12.0 * p * q;
    if (wp_max_order >= 4) w[4] = 12.0 * q * q + 72.0 * p * p * p - 6.0 * g2 * p;
    if (wp_max_order >= 5) w[5] = 360.0 * p * p * q - 18.0 * g2 * q;
    if (wp_max_order >= 6)
      w[6] = 720.0 * p * q * q + 2160.0 * p * p * p * p -
             288.0 * g2 * p * p + 9.0 * g2 * g2;
    if (wp_max_order >= 7)
      w[7] = 720.0 * q * q * q + 17280.0 * p * p * p * q - 1296.0 * g2 * p * q;
  }
  return out;
}

cplx wp(cplx u, const Modulus& mod, int order) {
  if (order < 0 || order > 3)
    fail(errc::internal_check, "wp exposes orders 0..3");
  return wp_derivs(u, mod, order).back();
}

}  // namespace speccurve
