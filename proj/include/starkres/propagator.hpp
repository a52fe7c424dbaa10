#pragma once

// Closed-form propagator of the crossed-field Hamiltonian
//   H = p_x^2 + (p_y + B x)^2 - F x
// (the gauge generated by the Lagrangian |w'|^2/4 + F w_x - B w_x w_y'),
// the derivative kernel used in the time-integral resolvent bound, and
// Hilbert-Schmidt norms built from them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "starkres/errors.hpp"
#include "starkres/fiber.hpp"
#include "starkres/parallel.hpp"
#include "starkres/quadrature.hpp"

namespace starkres {

struct Endpoints {
  double x0 = 0.0, y0 = 0.0;
  double x = 0.0, y = 0.0;
  double t = 1.0;
};

struct KernelValue {
  Complex value{0.0, 0.0};
  double action = 0.0;
  double prefactor_magnitude = 0.0;
};

// Bounded weight with compact support: a box, or a Gaussian cut at 4 sigma.
struct WeightSpec {
  enum class Kind { Box, Gaussian };
  Kind kind = Kind::Gaussian;
  double cx = 0.0, cy = 0.0;
  double width = 1.0;  // sigma, or box half-width
  double amplitude = 1.0;

  double operator()(double x, double y) const {
    double dx = x - cx, dy = y - cy;
    if (kind == Kind::Box)
      return (std::abs(dx) <= width && std::abs(dy) <= width) ? amplitude : 0.0;
    double r2 = (dx * dx + dy * dy) / (width * width);
    return r2 <= 16.0 ? amplitude * std::exp(-0.5 * r2) : 0.0;
  }
  double reach() const { return kind == Kind::Box ? width : 4.0 * width; }
};

namespace detail {

inline constexpr double kCausticTol = 1e-10;

inline void check_caustic(const FieldParams& p, double t) {
  if (std::abs(std::sin(p.B * t)) < kCausticTol)
    throw Error(Errc::CausticTime, "sin(Bt) vanishes");
}

// Action along the classical path, analytic in t.
template <class T>
T action(const FieldParams& p, double x0, double y0, double x, double y, T t) {
  const double B = p.B, F = p.F, u = F / B;
  T Y = (y - y0) - u * t;
  T cot = std::cos(B * t) / std::sin(B * t);
  double dx = x - x0;
  return 0.25 * u * u * t + 0.5 * u * Y - 0.5 * B * (x + x0) * Y + 0.25 * B * cot * (Y * Y + dx * dx);
}

// dS/dt at fixed endpoints
template <class T>
T action_rate(const FieldParams& p, double x0, double y0, double x, double y, T t) {
  const double B = p.B, F = p.F, u = F / B;
  T Y = (y - y0) - u * t;
  T s = std::sin(B * t), cot = std::cos(B * t) / s;
  double dx = x - x0;
  return -0.25 * u * u + 0.5 * F * (x + x0) - 0.25 * B * B * (Y * Y + dx * dx) / (s * s) -
         0.5 * F * cot * Y;
}

// Kernel of e^{-itH}; t may be complex (Im t <= 0 is the damped side).
inline Complex kernel_at(const FieldParams& p, double x0, double y0, double x, double y, Complex t) {
  const Complex I(0.0, 1.0);
  Complex S = action(p, x0, y0, x, y, t);
  return p.B / (4.0 * kPi * I * std::sin(p.B * t)) * std::exp(I * S);
}

// The factor multiplying the G(t) kernel in its time derivative.
inline Complex brace(const FieldParams& p, double gamma, const Endpoints& e) {
  const Complex I(0.0, 1.0);
  double cot = std::cos(p.B * e.t) / std::sin(p.B * e.t);
  return gamma - p.B * cot - I * action_rate(p, e.x0, e.y0, e.x, e.y, -e.t);
}

struct Axis {
  std::vector<double> x, w;
};

// n-point Gauss-Legendre rule mapped to [a, b]
inline Axis gauss_axis(int n, double a, double b) {
  Axis ax;
  ax.x.resize(n);
  ax.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double r = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = r;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (r * p1 - p0) / (r * r - 1.0);
      double step = p1 / dp;
      r -= step;
      if (std::abs(step) < 1e-16) break;
    }
    ax.x[i] = 0.5 * (a + b) - 0.5 * (b - a) * r;
    ax.w[i] = (b - a) / ((1.0 - r * r) * dp * dp);
  }
  return ax;
}

}  // namespace detail

// Classical path from (x0, y0) at s = 0 to (x, y) at s = t. With
// W = w_x + i (w_y - u s), u = F/B, the path is a uniform circle on top of the
// drift: W(s) = W(0) + D e^{iB(s-t)} sin(Bs)/sin(Bt).
inline std::pair<double, double> classical_trajectory(const FieldParams& p, const Endpoints& e,
                                                      double s) {
  detail::check_caustic(p, e.t);
  const double u = p.F / p.B;
  Complex D(e.x - e.x0, (e.y - e.y0) - u * e.t);
  Complex w = D * std::polar(std::sin(p.B * s) / std::sin(p.B * e.t), p.B * (s - e.t));
  return {e.x0 + w.real(), e.y0 + u * s + w.imag()};
}

// Lagrangian whose paths are the above: |w'|^2/4 + F w_x - B w_x w_y'
inline double lagrangian(const FieldParams& p, double wx, double vx, double vy) {
  return 0.25 * (vx * vx + vy * vy) + p.F * wx - p.B * wx * vy;
}

inline double classical_action(const FieldParams& p, const Endpoints& e) {
  detail::check_caustic(p, e.t);
  return detail::action(p, e.x0, e.y0, e.x, e.y, e.t);
}

// Kernel of e^{-itH} for H = p_x^2 + (p_y + Bx)^2 - Fx. Its modulus is
// B / (4 pi |sin Bt|) whatever the endpoints.
inline KernelValue evolution_kernel(const FieldParams& p, const Endpoints& e) {
  detail::check_caustic(p, e.t);
  KernelValue k;
  k.action = detail::action(p, e.x0, e.y0, e.x, e.y, e.t);
  k.prefactor_magnitude = p.B / (4.0 * detail::kPi * std::abs(std::sin(p.B * e.t)));
  k.value = detail::kernel_at(p, e.x0, e.y0, e.x, e.y, Complex(e.t, 0.0));
  return k;
}

// Kernel of G(t) = -i f e^{itH} g e^{gamma t}; its time integral is
// f (H - lambda - i gamma)^{-1} g at lambda = 0.
inline Complex g_kernel(const FieldParams& p, const WeightSpec& f, const WeightSpec& g,
                        double gamma, const Endpoints& e) {
  detail::check_caustic(p, e.t);
  double w = f(e.x, e.y) * g(e.x0, e.y0);
  if (w == 0.0) return {0.0, 0.0};
  Complex K = detail::kernel_at(p, e.x0, e.y0, e.x, e.y, Complex(-e.t, 0.0));
  return Complex(0.0, -1.0) * w * std::exp(gamma * e.t) * K;
}

inline Complex gprime_kernel(const FieldParams& p, const WeightSpec& f, const WeightSpec& g,
                             double gamma, const Endpoints& e) {
  detail::check_caustic(p, e.t);
  double w = f(e.x, e.y) * g(e.x0, e.y0);
  if (w == 0.0) return {0.0, 0.0};
  return g_kernel(p, f, g, gamma, e) * detail::brace(p, gamma, e);
}

struct HsValue {
  double norm = 0.0;
  double error = 0.0;
};

namespace detail {

inline double hs_gprime_at(const FieldParams& p, const WeightSpec& f, const WeightSpec& g,
                           double gamma, double t, int n) {
  Axis fx = gauss_axis(n, f.cx - f.reach(), f.cx + f.reach());
  Axis fy = gauss_axis(n, f.cy - f.reach(), f.cy + f.reach());
  Axis gx = gauss_axis(n, g.cx - g.reach(), g.cx + g.reach());
  Axis gy = gauss_axis(n, g.cy - g.reach(), g.cy + g.reach());
  const double B = p.B, F = p.F, u = F / B;
  const double s = std::sin(B * t), cot = std::cos(B * t) / s;
  const double a = B * B / (s * s);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double wf = f(fx.x[i], fy.x[j]);
      if (wf == 0.0) continue;
      wf *= wf * fx.w[i] * fy.w[j];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double wg = g(gx.x[k], gy.x[l]);
          if (wg == 0.0) continue;
          double dx = fx.x[i] - gx.x[k];
          double Y = fy.x[j] - gy.x[l] + u * t;
          double im = 0.25 * (u * u - 2.0 * F * (fx.x[i] + gx.x[k]) + a * (dx * dx + Y * Y) -
                              2.0 * F * cot * Y);
          double re = gamma - B * cot;
          sum += wf * wg * wg * gx.w[k] * gy.w[l] * (re * re + im * im);
        }
    }
  double pre = B / (4.0 * kPi * std::abs(s)) * std::exp(gamma * t);
  return pre * std::sqrt(sum);
}

}  // namespace detail

// Hilbert-Schmidt norm of G'(t) by tensor Gauss-Legendre over both supports.
// The phase of the kernel drops out of |.|^2, so the integrand is smooth; two
// orders are compared and the difference is the error estimate.
inline HsValue gprime_hs_norm(const FieldParams& p, const WeightSpec& f, const WeightSpec& g,
                              double gamma, double t, int order = 24) {
  detail::check_caustic(p, t);
  double lo = detail::hs_gprime_at(p, f, g, gamma, t, order * 2 / 3);
  double hi = detail::hs_gprime_at(p, f, g, gamma, t, order);
  return {hi, std::abs(hi - lo)};
}

struct HsBoundReport {
  std::vector<double> t, norm, ratio;
  double constant = 0.0;        // smallest C with norm <= C e^{delta t} / |sin^3|
  double far_constant = 0.0;    // same, restricted to |sin Bt| >= 1/2
  double caustic_exponent = 0.0;
  double envelope_rate = 0.0;
  double delta = 0.0;
  bool bounded = false;
  bool exponent_ok = false;
  bool envelope_ok = false;
  bool passed() const { return bounded && exponent_ok && envelope_ok; }
};

struct HsOptions {
  int order = 24;
  double caustic_window = 0.05;
  double rel_tol = 1e-4;
  int threads = 1;
};

// Probes norm(t) <= C e^{delta t}/|sin^3 Bt| on t_grid (points inside the
// caustic windows are dropped), fits the local exponent next to t = pi/B, and
// fits the decay rate of the envelope over one period starting at pi/B.
inline HsBoundReport hs_norm_check(const FieldParams& p, const WeightSpec& f, const WeightSpec& g,
                                   double gamma, double delta, const std::vector<double>& t_grid,
                                   const HsOptions& opt = {}) {
  if (!(gamma < delta && delta < 0.0))
    throw Error(Errc::InvalidArgument, "need gamma < delta < 0");
  const double B = p.B, period = detail::kPi / B;
  HsBoundReport r;
  r.delta = delta;
  for (double t : t_grid) {
    double d = std::remainder(t, period);
    if (std::abs(d) >= opt.caustic_window && t > 0.0) r.t.push_back(t);
  }
  // local exponent samples on the right of the first caustic
  std::vector<double> eps;
  for (int i = 0; i < 6; ++i) eps.push_back(1e-3 * std::pow(10.0, i / 5.0));
  // envelope samples: matched phases one period apart
  std::vector<double> phase;
  for (int i = 0; i < 8; ++i) phase.push_back(period + opt.caustic_window + (period - 2 * opt.caustic_window) * (i + 0.5) / 8);

  std::vector<double> all = r.t;
  for (double e : eps) all.push_back(period + e);
  for (double t : phase) {
    all.push_back(t);
    all.push_back(t + period);
  }
  auto vals = parallel_map(all.size(), opt.threads,
                           [&](std::size_t i) { return gprime_hs_norm(p, f, g, gamma, all[i], opt.order); });
  for (const auto& v : vals)
    if (!(v.error <= opt.rel_tol * v.norm))
      throw Error(Errc::NonConvergent, "HS quadrature did not settle");

  std::size_t at = 0;
  for (double t : r.t) {
    double s3 = std::pow(std::abs(std::sin(B * t)), 3);
    r.norm.push_back(vals[at++].norm);
    r.ratio.push_back(r.norm.back() * s3 * std::exp(-delta * t));
    r.constant = std::max(r.constant, r.ratio.back());
    if (std::abs(std::sin(B * t)) >= 0.5) r.far_constant = std::max(r.far_constant, r.ratio.back());
  }
  r.bounded = std::isfinite(r.constant) && (r.far_constant == 0.0 || r.constant <= 10.0 * r.far_constant);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double e : eps) {
    double lx = std::log(std::abs(std::sin(B * (period + e)))), ly = std::log(vals[at++].norm);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  double m = eps.size();
  r.caustic_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  r.exponent_ok = std::abs(r.caustic_exponent + 3.0) <= 0.2;

  double rate = 0.0;
  for (std::size_t i = 0; i < phase.size(); ++i) {
    double a = vals[at++].norm, b = vals[at++].norm;
    rate += std::log(b / a) / period;
  }
  r.envelope_rate = rate / phase.size();
  r.envelope_ok = std::abs(r.envelope_rate - delta) <= 0.1 * std::abs(delta);
  return r;
}

namespace detail {

// Time integral of e^{(gamma - i lambda) t} K(-t; x, x0) over t in (0, inf),
// run along i eps v (v in [0,1]) and then T + i eps. The kernel is analytic
// for Im t > 0 and the shift keeps it away from the caustics.
inline QuadResult resolvent_time_integral(const FieldParams& p, double x0, double y0, double x,
                                          double y, double gamma, double lambda, double tol) {
  const Complex I(0.0, 1.0);
  const double eps = 1.0 / std::sqrt(std::max(std::abs(lambda), 1.0));
  const Complex rate(gamma, -lambda);
  auto at = [&](Complex t) { return std::exp(rate * t) * kernel_at(p, x0, y0, x, y, -t); };
  auto vertical = [&](double v) -> Complex {
    if (v <= 0.0) return {0.0, 0.0};
    Complex t(0.0, eps * v);
    return I * eps * at(t);
  };
  // horizontal part: breakpoints at the caustics, cut where e^{gamma T} < tol^2
  const double period = kPi / p.B;
  double T = std::log(0.1 * tol) / gamma;
  std::vector<double> bp{0.0};
  for (double c = 0.5 * period; c < T; c += 0.5 * period) bp.push_back(c);
  bp.push_back(T);
  auto horizontal = [&](double s) { return at(Complex(s, eps)); };
  QuadResult a = integrate_adaptive(vertical, {0.0, 0.25, 1.0}, 0.0, tol, 40000);
  QuadResult b = integrate_adaptive(horizontal, bp, 0.0, tol, 400000);
  QuadResult r;
  r.value = a.value + b.value;
  r.error = a.error + b.error;
  r.evals = a.evals + b.evals;
  r.converged = r.error <= 10.0 * tol * std::abs(r.value) || (a.converged && b.converged);
  return r;
}

}  // namespace detail

struct ResolventOptions {
  int n_center = 12;
  int n_radial = 16;
  int n_angle = 16;
  int n_height = 16;
  double tol = 1e-6;
  int threads = 1;
};

// Hilbert-Schmidt norm of f (H - lambda - i gamma)^{-1} g from the time
// integral. |kernel| depends only on the x-centre and the separation, so the
// weights are first integrated along the common y-translation; the
// separation is done in polar form with r = s^2 to tame the log singularity.
inline double resolvent_hs_norm(const FieldParams& p, const WeightSpec& f, const WeightSpec& g,
                                double gamma, double lambda, const ResolventOptions& opt = {}) {
  if (!(gamma < 0.0)) throw Error(Errc::InvalidArgument, "gamma must be negative");
  const double Rf = f.reach(), Rg = g.reach();
  detail::Axis cx = detail::gauss_axis(opt.n_center, 0.5 * (f.cx + g.cx) - 0.5 * (Rf + Rg),
                                       0.5 * (f.cx + g.cx) + 0.5 * (Rf + Rg));
  double rmax = std::hypot(f.cx - g.cx, f.cy - g.cy) + std::sqrt(2.0) * (Rf + Rg);
  detail::Axis sr = detail::gauss_axis(opt.n_radial, 0.0, std::sqrt(rmax));

  struct Node {
    double cx, dx, dy, w;
  };
  std::vector<Node> nodes;
  for (int i = 0; i < opt.n_center; ++i)
    for (int j = 0; j < opt.n_radial; ++j)
      for (int k = 0; k < opt.n_angle; ++k) {
        double rho = sr.x[j] * sr.x[j];
        double th = 2.0 * detail::kPi * (k + 0.5) / opt.n_angle;
        double dx = rho * std::cos(th), dy = rho * std::sin(th);
        double x = cx.x[i] + 0.5 * dx, x0 = cx.x[i] - 0.5 * dx;
        // marginal weight over the shared y-translation c: y = c + dy/2, y0 = c - dy/2
        double lo = std::max(f.cy - Rf - 0.5 * dy, g.cy - Rg + 0.5 * dy);
        double hi = std::min(f.cy + Rf - 0.5 * dy, g.cy + Rg + 0.5 * dy);
        if (!(hi > lo)) continue;
        detail::Axis c = detail::gauss_axis(opt.n_height, lo, hi);
        double W = 0.0;
        for (int m = 0; m < opt.n_height; ++m) {
          double a = f(x, c.x[m] + 0.5 * dy), b = g(x0, c.x[m] - 0.5 * dy);
          W += c.w[m] * a * a * b * b;
        }
        if (W == 0.0) continue;
        double jac = 2.0 * sr.x[j] * rho * (2.0 * detail::kPi / opt.n_angle);
        nodes.push_back({cx.x[i], dx, dy, cx.w[i] * sr.w[j] * jac * W});
      }
  auto vals = parallel_map(nodes.size(), opt.threads, [&](std::size_t i) {
    const Node& n = nodes[i];
    return detail::resolvent_time_integral(p, n.cx - 0.5 * n.dx, 0.0, n.cx + 0.5 * n.dx, n.dy,
                                           gamma, lambda, opt.tol);
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!vals[i].converged) throw Error(Errc::NonConvergent, "resolvent time integral");
    sum += nodes[i].w * std::norm(vals[i].value);
  }
  return std::sqrt(sum);
}

struct DecayReport {
  std::vector<double> lambda;
  std::vector<double> norm;
  bool decreasing = false;
};

inline DecayReport resolvent_decay_probe(const FieldParams& p, const WeightSpec& f,
                                         const WeightSpec& g, double gamma,
                                         const std::vector<double>& lambdas,
                                         const ResolventOptions& opt = {}) {
  DecayReport r;
  r.lambda = lambdas;
  for (double l : lambdas) r.norm.push_back(resolvent_hs_norm(p, f, g, gamma, l, opt));
  r.decreasing = true;
  for (std::size_t i = 1; i < r.norm.size(); ++i)
    if (!(r.norm[i] < r.norm[i - 1])) r.decreasing = false;
  return r;
}

}  // namespace starkres
