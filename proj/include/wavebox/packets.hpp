#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <utility>

#include "wavebox/errors.hpp"
#include "wavebox/geometry.hpp"

namespace wavebox {

// Moving Gaussian weight parameters: scale h, center x_o in the core
// region, half-gap rho between the horizontal walls, vertical frequency
// window center xi_o3 (odd), and its sign sigma.
struct PacketParams {
  double h = 0.1;
  Vec3 x_o{0.0, 0.0, 0.0};
  double rho = 1.0;
  int sigma = 1;
  int xi_o3 = 1;
};

inline PacketParams make_packet_params(const DomainSpec& dom, double h, const Vec3& x_o,
                                       int xi_o3) {
  if (dom.dim != 3) throw validation_error("packet parameters require a 3-d domain");
  double cap = h_o(dom);
  if (!(h > 0.0) || h > cap)
    throw validation_error("packet scale h must lie in (0, " + std::to_string(cap) + "]");
  if (xi_o3 % 2 == 0) throw validation_error("xi_o3 must be an odd integer");
  for (int d = 0; d < 2; ++d) {
    std::size_t i = static_cast<std::size_t>(d);
    if (std::abs(x_o[i]) > half_side(dom, d) - dom.r_o)
      throw validation_error("packet center must lie in the closed core region");
  }
  if (std::abs(x_o[2]) > dom.rho / 4.0)
    throw validation_error("packet center must lie in the closed core region");
  PacketParams p;
  p.h = h;
  p.x_o = x_o;
  p.rho = dom.rho;
  p.xi_o3 = xi_o3;
  p.sigma = (xi_o3 > 0) ? 1 : -1;
  return p;
}

// Image bookkeeping: images n = -2Q .. 2P+1 over propagation length L.
struct ReflectionSchedule {
  int P = 0;
  int Q = 0;
  double L = 1.0;
};

namespace detail {

using cplx = std::complex<long double>;

// All kernel internals run in 80-bit precision: the cancellation identities
// are asserted to 1e-13 relative, which double-precision quotients of the
// oscillatory factors do not reliably reach.
inline cplx a_kernel(long double x1, long double x2, long double x3, long double t,
                     long double s, long double h) {
  cplx zx(1.0L, s);
  cplx zt(1.0L, -h * s);
  long double r2 = x1 * x1 + x2 * x2 + x3 * x3;
  cplx val = std::pow(zx, -1.5L) * std::pow(zt, -0.5L);
  val *= std::exp(-(r2 / (4.0L * h)) / zx);
  val *= std::exp(-(t * t / 4.0L) / zt);
  return val;
}

inline cplx a_tilde_kernel(long double x1, long double x2, long double x3, long double t,
                           long double s, long double h) {
  cplx zx(1.0L, s);
  cplx zt(2.0L, -h * s);
  long double r2 = x1 * x1 + x2 * x2 + x3 * x3;
  cplx val = std::pow(zx, -1.5L) * (std::sqrt(2.0L) / std::sqrt(zt));
  val *= std::exp(-(r2 / (4.0L * h)) / zx);
  val *= std::exp(-(t * t / 4.0L) / zt);
  return val;
}

inline int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

inline cplx image_term(int n, long double x1, long double x2, long double x3, long double t,
                       long double s, long double xi1, long double xi2, long double xi3,
                       long double tau, const PacketParams& p) {
  long double sg = static_cast<long double>(p.sigma);
  long double rho = static_cast<long double>(p.rho);
  long double h = static_cast<long double>(p.h);
  long double flip = static_cast<long double>(parity_sign(n));
  long double two_n_rho = 2.0L * static_cast<long double>(n) * sg * rho;

  long double phase = x1 * xi1 + x2 * xi2 + t * tau;
  phase += (flip * x3 + two_n_rho) * xi3;
  phase -= (xi1 * xi1 + xi2 * xi2 + xi3 * xi3 - tau * tau) * h * s;

  long double slot1 = x1 - static_cast<long double>(p.x_o[0]) - 2.0L * xi1 * h * s;
  long double slot2 = x2 - static_cast<long double>(p.x_o[1]) - 2.0L * xi2 * h * s;
  long double slot3 =
      x3 - flip * (-two_n_rho + static_cast<long double>(p.x_o[2]) + 2.0L * xi3 * h * s);
  long double slot_t = t + 2.0L * tau * h * s;

  return flip * std::polar(1.0L, phase) * a_kernel(slot1, slot2, slot3, slot_t, s, h);
}

}  // namespace detail

inline std::complex<double> eval_a(const Vec3& x, double t, double s, double h) {
  if (!(h > 0.0)) throw validation_error("packet scale h must be > 0");
  detail::cplx v = detail::a_kernel(x[0], x[1], x[2], t, s, h);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

inline double modulus_a(const Vec3& x, double t, double s, double h) {
  if (!(h > 0.0)) throw validation_error("packet scale h must be > 0");
  double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  double s2 = s * s + 1.0;
  double hs2 = (h * s) * (h * s) + 1.0;
  return std::pow(s2, -0.75) * std::pow(hs2, -0.25) * std::exp(-r2 / (4.0 * h * s2)) *
         std::exp(-t * t / (4.0 * hs2));
}

inline std::complex<double> eval_a_tilde(const Vec3& x, double t, double s, double h) {
  if (!(h > 0.0)) throw validation_error("packet scale h must be > 0");
  detail::cplx v = detail::a_tilde_kernel(x[0], x[1], x[2], t, s, h);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

using PacketEvaluator = std::function<std::complex<double>(const Vec3&, double t, double s)>;

// Central-difference residual of (i d/ds + h(Laplace - d2/dt2)) applied to
// the evaluator; second order in the stencil step.
inline std::complex<double> pde_residual(const PacketEvaluator& f, const Vec3& x, double t,
                                         double s, double h, double step) {
  if (!(step > 0.0)) throw validation_error("stencil step must be > 0");
  if (!(s - step > 0.0))
    throw validation_error("stencil step must keep s - step above zero");
  using C = std::complex<double>;
  C center = f(x, t, s);
  C ds = (f(x, t, s + step) - f(x, t, s - step)) / (2.0 * step);
  C lap{0.0, 0.0};
  for (int d = 0; d < 3; ++d) {
    Vec3 xp = x;
    Vec3 xm = x;
    std::size_t i = static_cast<std::size_t>(d);
    xp[i] += step;
    xm[i] -= step;
    lap += (f(xp, t, s) - 2.0 * center + f(xm, t, s)) / (step * step);
  }
  C dtt = (f(x, t + step, s) - 2.0 * center + f(x, t - step, s)) / (step * step);
  return C(0.0, 1.0) * ds + h * (lap - dtt);
}

// Kernel of the n-th image operator at one frequency point (the data
// transform factor is set to 1).
inline std::complex<double> image_integrand(int n, const Vec3& x, double t, double s,
                                            const Vec3& xi, double tau,
                                            const PacketParams& p) {
  detail::cplx v = detail::image_term(n, x[0], x[1], x[2], t, s, xi[0], xi[1], xi[2], tau, p);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

// Pair n, n+1 evaluated on the cancellation plane x3 = (-1)^n sigma rho;
// analytically zero because the weight is even in its third slot.
inline std::complex<double> cancellation_residual(int n, double x1, double x2, double t,
                                                  double s, const Vec3& xi, double tau,
                                                  const PacketParams& p) {
  long double x3 = static_cast<long double>(detail::parity_sign(n)) *
                   static_cast<long double>(p.sigma) * static_cast<long double>(p.rho);
  detail::cplx v = detail::image_term(n, x1, x2, x3, t, s, xi[0], xi[1], xi[2], tau, p) +
                   detail::image_term(n + 1, x1, x2, x3, t, s, xi[0], xi[1], xi[2], tau, p);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

// Full image sum n = -2Q .. 2P+1 on a horizontal wall. face_sign +1 is the
// wall x3 = +sigma rho (everything cancels in pairs), -1 the opposite wall
// (all but the two extreme images cancel).
inline std::complex<double> face_sum(const PacketParams& p, const ReflectionSchedule& sched,
                                     int face_sign, double x1, double x2, double t, double s,
                                     const Vec3& xi, double tau) {
  if (face_sign != 1 && face_sign != -1)
    throw validation_error("face_sign must be +1 or -1");
  if (sched.P < 0 || sched.Q < 0) throw validation_error("schedule P, Q must be >= 0");
  long double x3 = static_cast<long double>(face_sign) * static_cast<long double>(p.sigma) *
                   static_cast<long double>(p.rho);
  detail::cplx acc{0.0L, 0.0L};
  for (int n = -2 * sched.Q; n <= 2 * sched.P + 1; ++n) {
    acc += detail::image_term(n, x1, x2, x3, t, s, xi[0], xi[1], xi[2], tau, p);
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

// Image counts large enough that the leftover far-wall terms sit at least
// distance sqrt(s^2+1) from the packet center for every s in [0, L].
inline ReflectionSchedule choose_PQ(double L, int xi_o3, double rho, double h_o_cap) {
  if (!(L > 0.0)) throw validation_error("propagation length L must be > 0");
  if (!(rho > 0.0)) throw validation_error("rho must be > 0");
  ReflectionSchedule sched;
  sched.L = L;
  sched.Q = static_cast<int>(std::ceil((L + 1.0) / (4.0 * rho)));
  double abs_xi = std::abs(static_cast<double>(xi_o3));
  sched.P = static_cast<int>(
      std::ceil(((L + 1.0) + 2.0 * (abs_xi + 1.0) * h_o_cap * L) / (4.0 * rho)));
  return sched;
}

// Gaussian comb over all images: sum_n exp(-offset_n^2 / (4h(s^2+1))) with
// offset_n = (-1)^n x3 s' + 2 n rho - x_o3 s' - 2 xi3 h s s', s' the sign of
// xi3. Terms below 1e-18 are dropped; each parity is a comb of spacing
// 4 rho expanded outward from its peak.
inline double image_gaussian_sum(double x3, double x_o3, double xi3, double h, double s,
                                 double rho) {
  if (!(h > 0.0)) throw validation_error("packet scale h must be > 0");
  if (!(rho > 0.0)) throw validation_error("rho must be > 0");
  const double sp = (xi3 < 0.0) ? -1.0 : 1.0;
  const double var = 4.0 * h * (s * s + 1.0);
  const double drift = -x_o3 * sp - 2.0 * xi3 * h * s * sp;
  const double tail = 1e-18;
  const long max_terms = 2'000'000;

  auto comb = [&](double base) {
    // terms exp(-(base + 4 rho m)^2 / var) over m in Z
    double peak = -base / (4.0 * rho);
    long m0 = std::lround(peak);
    double total = 0.0;
    for (int dir = 0; dir < 2; ++dir) {
      long m = (dir == 0) ? m0 : m0 - 1;
      long stepm = (dir == 0) ? 1 : -1;
      for (long cnt = 0; cnt < max_terms; ++cnt, m += stepm) {
        double off = base + 4.0 * rho * static_cast<double>(m);
        double term = std::exp(-off * off / var);
        total += term;
        if (term < tail) break;
        if (cnt == max_terms - 1)
          throw accuracy_error("image comb needs too many terms to truncate");
      }
    }
    return total;
  };

  double even = comb(x3 * sp + drift);
  double odd = comb(-x3 * sp + drift + 2.0 * rho);
  return even + odd;
}

// Empirical envelope constant for sum <= 4 + c sqrt(h(s^2+1)); the exact
// comb constant is sqrt(pi)/rho, kept with slack.
inline double image_sum_bound_constant(double rho) {
  return 2.0 * std::sqrt(std::numbers::pi) / rho + 1.0;
}

// Closed-form balance of the two scale identities
// h^{-3/2} lambda^{-1/2} = h^{1/2} and h^{-3/2} L^{-1/2} (lambda/h)^gamma =
// h^{1/2}: lambda = h^{-4}, L = h^{-(4+10 gamma)}.
inline std::pair<double, double> choose_lambda_L(double h, double gamma) {
  if (!(h > 0.0) || h > 1.0)
    throw validation_error("scale h must lie in (0, 1] so that lambda, L >= 1");
  if (!(gamma >= 1.0)) throw validation_error("gamma must be >= 1");
  double lambda = std::pow(h, -4.0);
  double big_l = std::pow(h, -(4.0 + 10.0 * gamma));

  double lhs1 = std::pow(h, -1.5) / std::sqrt(lambda);
  double lhs2 = std::pow(h, -1.5) / std::sqrt(big_l) * std::pow(lambda / h, gamma);
  double target = std::sqrt(h);
  if (std::abs(lhs1 / target - 1.0) > 1e-12 || std::abs(lhs2 / target - 1.0) > 1e-12)
    throw accuracy_error("scale identities failed the self-check");
  return {lambda, big_l};
}

}  // namespace wavebox
