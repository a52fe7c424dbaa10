#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "starkres/errors.hpp"
#include "starkres/fiber.hpp"
#include "starkres/quadrature.hpp"

namespace starkres {

struct GreenOptions {
  double tol = 1e-8;
  long max_evals = 600000;
  // contour depth for the shifted representation, in units of Delta
  double depth = 1.0;
};

enum class Representation { Direct, Shifted };

inline const char* representation_name(Representation r) {
  return r == Representation::Direct ? "direct" : "shifted";
}

struct GreenValue {
  Complex value{0.0, 0.0};
  double error = 0.0;
  long evals = 0;
  Representation representation = Representation::Direct;
};

namespace detail {

enum class KernelKind { Value, Dx, Dy };

// Integral over real kr of exp(i kr eta) K(kr + i kappa) where K is the fiber
// kernel (or its x / y derivative) at (x, xp).
inline GreenValue k_line_integral(const FieldParams& p, KernelKind kind, double x, double xp,
                                  double eta, double kappa, const GreenOptions& opt) {
  const double B = p.B;
  const double dx = std::abs(x - xp);
  const Complex I(0.0, 1.0);

  auto kernel = [&](double kr) -> Complex {
    Complex k(kr, kappa);
    FiberContext c(p, k);
    switch (kind) {
      case KernelKind::Value: return fiber_green_scaled(c, x, xp).value();
      case KernelKind::Dx: return fiber_green_dx_scaled(c, x, xp).value();
      case KernelKind::Dy: return I * k * fiber_green_scaled(c, x, xp).value();
    }
    return {};
  };
  // On the real line the kernel behaves for large |k| like e^{-dQ}/(2Q),
  // Q = sqrt((k-c)^2 + m^2), corrected to first order in the mismatch between
  // m^2 and the mean potential. Its transform is known in closed form (K0, K1),
  // so subtracting it leaves an integrand that decays like k^{-3} even at
  // coincidence.
  const bool subtract = kappa == 0.0;
  const double m = std::sqrt(B), c = 0.5 * B * (x + xp);
  const double sgn = x > xp ? 1.0 : (x < xp ? -1.0 : 0.0);
  const Complex zeta = p.z + Complex(0.0, p.b * p.F);
  const Complex mis = -p.F * 0.5 * (x + xp) - zeta - m * m;
  auto model = [&](double kr) -> Complex {
    double u = kr - c, Q = std::sqrt(u * u + m * m), E = std::exp(-dx * Q);
    double A = E / (2.0 * Q);
    double Bf = E * (dx * Q + 1.0) / (4.0 * Q * Q * Q);
    switch (kind) {
      case KernelKind::Value: return A - mis * Bf;
      case KernelKind::Dx: {
        double A_d = -0.5 * E, A_Q = -dx * E / (2.0 * Q) - E / (2.0 * Q * Q);
        double B_d = -E * dx / (4.0 * Q);
        double B_Q = -(dx * dx * E / (Q * Q) + 3.0 * E * (dx * Q + 1.0) / (Q * Q * Q * Q)) / 4.0;
        return sgn * (A_d - mis * B_d) - 0.5 * B * (u / Q) * (A_Q - mis * B_Q) + 0.5 * p.F * Bf;
      }
      case KernelKind::Dy: return I * kr * (A - mis * Bf);
    }
    return {};
  };
  auto h = [&](double kr) -> Complex {
    Complex v = kernel(kr);
    if (subtract) v -= model(kr);
    return std::polar(1.0, kr * eta) * v;
  };

  const double shift = p.F / (2.0 * B);
  const double width = 30.0 * std::sqrt(B);
  const double k_lo = B * std::min(x, xp) - shift - width;
  const double k_hi = B * std::max(x, xp) - shift + width;
  const double osc = eta != 0.0 ? kPi / std::abs(eta) : 1e300;

  std::vector<double> bp;
  {
    double w = std::min(2.0, osc);
    int n = std::max(4, int(std::ceil((k_hi - k_lo) / w)));
    for (int i = 0; i <= n; ++i) bp.push_back(k_lo + (k_hi - k_lo) * i / n);
  }
  // past this distance the subtracted integrand sits at the level of the
  // special-function rounding and the k^{-3} tail estimate takes over
  constexpr double kSubtractedTail = 250.0;
  double tail_len = dx > 0.0 ? std::max(50.0, 40.0 / dx) : 1e300;
  if (subtract) tail_len = std::min(tail_len, kSubtractedTail);
  constexpr double kMaxOsc = 300.0;
  double direct_len = tail_len;
  bool ibp = false;
  if (eta != 0.0 && tail_len * std::abs(eta) / (2.0 * kPi) > kMaxOsc) {
    direct_len = kMaxOsc * 2.0 * kPi / std::abs(eta);
    ibp = true;
  }
  std::vector<double> right, left;
  {
    double step = 2.0, pos = 0.0;
    while (pos < direct_len) {
      pos = std::min(direct_len, pos + std::min(step, osc));
      right.push_back(k_hi + pos);
      left.push_back(k_lo - pos);
      step *= 1.25;
    }
  }
  std::vector<double> all(left.rbegin(), left.rend());
  all.insert(all.end(), bp.begin(), bp.end());
  all.insert(all.end(), right.begin(), right.end());

  QuadResult q = integrate_adaptive(h, all, 2.0 * kPi * opt.tol, opt.tol, opt.max_evals);
  GreenValue out{q.value, q.error, q.evals};
  if (!q.converged)
    throw Error(Errc::NonConvergent, "k-integral did not reach the error target");

  double a_right = all.back(), a_left = all.front();
  if (ibp) {
    // repeated integration by parts on the non-oscillatory envelope
    auto g = [&](double kr) { return std::polar(1.0, -kr * eta) * h(kr); };
    Complex iw(0.0, eta);
    auto tail = [&](double A, double sgn) {
      double scale = std::abs(A - 0.5 * (k_lo + k_hi));
      if (dx > 0.0) scale = std::min(scale, 1.0 / dx);
      double hs = 0.05 * scale;
      Complex g0 = g(A), gp = g(A + hs), gm = g(A - hs);
      Complex d1 = (gp - gm) / (2.0 * hs);
      Complex d2 = (gp - 2.0 * g0 + gm) / (hs * hs);
      Complex e = std::polar(1.0, eta * A);
      Complex t0 = g0 / iw, t1 = -d1 / (iw * iw), t2 = d2 / (iw * iw * iw);
      out.evals += 3;
      double next = std::abs(t1) > 0.0 ? std::abs(t2) * std::abs(t2) / std::abs(t1) : std::abs(t2);
      double d1_err = std::abs(d2) * hs * hs / (6.0 * scale);
      out.error += next + d1_err / std::abs(iw * iw);
      return sgn * e * (t0 + t1 + t2);
    };
    out.value += tail(a_left, 1.0) + tail(a_right, -1.0);
  } else if (dx > 0.0 || subtract) {
    // exponential envelope, or k^{-3} once the model is subtracted
    auto reach = [&](double a) {
      double r = subtract ? (kind == KernelKind::Dy ? 1.0 : 0.5) * std::abs(a - c) : 1e300;
      return dx > 0.0 ? std::min(r, 1.0 / dx) : r;
    };
    out.error += std::abs(h(a_left)) * reach(a_left) + std::abs(h(a_right)) * reach(a_right);
    out.evals += 2;
  }
  if (subtract) {
    double r = std::hypot(dx, eta);
    double k0 = std::cyl_bessel_k(0.0, m * r), k1 = std::cyl_bessel_k(1.0, m * r);
    Complex S = k0 - mis * r * k1 / (2.0 * m);
    Complex dS = -m * k1 + 0.5 * mis * r * k0;  // dS/dr
    Complex ph = std::polar(1.0, c * eta);
    switch (kind) {
      case KernelKind::Value: out.value += ph * S; break;
      case KernelKind::Dx:
        out.value += ph * (I * eta * 0.5 * B * S + dS * (x - xp) / r + 0.25 * p.F * r * k1 / m);
        break;
      case KernelKind::Dy: out.value += ph * (I * c * S + dS * eta / r); break;
    }
  }
  if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
    throw Error(Errc::NonConvergent, "non-finite k-integral");
  return out;
}

inline void check_points(double x, double y, double xp, double yp) {
  if (x == xp && y == yp) throw Error(Errc::CoincidentPoints, "x = x' and y = y'");
}

inline GreenValue scale(GreenValue v, Complex factor) {
  v.value *= factor;
  v.error *= std::abs(factor);
  return v;
}

inline GreenValue direct(const FieldParams& p, KernelKind kind, double x, double y, double xp,
                         double yp, const GreenOptions& opt) {
  p.validate();
  check_points(x, y, xp, yp);
  if (kind != KernelKind::Value && x == xp)
    throw Error(Errc::DerivativeAtCoincidence, "derivative needs x != x'");
  auto r = k_line_integral(p, kind, x, xp, y - yp, 0.0, opt);
  return scale(r, 1.0 / (2.0 * kPi));
}

inline double contour_delta(const FieldParams& p) {
  if (p.F <= 0.0) throw Error(Errc::DegenerateDelta, "shifted contour needs F > 0");
  double d = (p.z.imag() + p.b * p.F) / (2.0 * p.F);
  if (!(d > 0.0)) throw Error(Errc::DegenerateDelta, "Delta must be positive");
  return d;
}

// Im k of the shifted line
inline double contour_kappa(const FieldParams& p, double y, double yp, const GreenOptions& opt) {
  double delta = contour_delta(p);
  double sgn = y > yp ? 1.0 : -1.0;
  double kappa = sgn * opt.depth * p.B * delta;
  double pole = -p.B * (p.z.imag() + p.b * p.F) / p.F;
  if (kappa <= pole) throw Error(Errc::PoleCrossing, "contour shift reaches the pole line");
  return kappa;
}

}  // namespace detail

// Poles of the fiber Green function in the k-plane: k = k1[n] + i k2.
struct PoleSet {
  double k2 = 0.0;
  std::vector<double> k1;
};

inline PoleSet pole_locations(const FieldParams& p, int nmax) {
  p.validate();
  if (p.F <= 0.0) throw Error(Errc::InvalidArgument, "pole set needs F > 0");
  PoleSet s;
  double c = p.B / p.F;
  s.k2 = -c * (p.z.imag() + p.b * p.F);
  for (int n = 0; n <= nmax; ++n)
    s.k1.push_back(c * ((2.0 * n + 1.0) * p.B - p.z.real() - p.F * p.F / (4.0 * p.B * p.B)));
  return s;
}

// Closed-form factor in front of the p-integral of the shifted representation.
inline Complex shifted_prefactor(const FieldParams& p, double y, double yp,
                                 const GreenOptions& opt = {}) {
  double kappa = detail::contour_kappa(p, y, yp, opt);
  double eta = y - yp;
  return p.B / (2.0 * detail::kPi) * std::exp(-kappa * eta) *
         std::polar(1.0, -p.F * eta / (2.0 * p.B));
}

inline GreenValue green_direct(const FieldParams& p, double x, double y, double xp, double yp,
                               const GreenOptions& opt = {}) {
  return detail::direct(p, detail::KernelKind::Value, x, y, xp, yp, opt);
}

// p-integral of the shifted representation: int dp exp(-i B p eta) G_{k(p)}(x, x').
inline GreenValue shifted_p_integral(const FieldParams& p, double x, double y, double xp,
                                     double yp, const GreenOptions& opt = {},
                                     detail::KernelKind kind = detail::KernelKind::Value) {
  p.validate();
  detail::check_points(x, y, xp, yp);
  if (y == yp) throw Error(Errc::DegenerateDelta, "shifted representation needs y != y'");
  double kappa = detail::contour_kappa(p, y, yp, opt);
  double eta = y - yp;
  auto r = detail::k_line_integral(p, kind, x, xp, eta, kappa, opt);
  r.representation = Representation::Shifted;
  // k = -B (p + F/(2B^2)) + i kappa, dk = -B dp
  return detail::scale(r, std::polar(1.0, p.F * eta / (2.0 * p.B)) / p.B);
}

inline GreenValue green_shifted(const FieldParams& p, double x, double y, double xp, double yp,
                                const GreenOptions& opt = {}) {
  auto r = shifted_p_integral(p, x, y, xp, yp, opt);
  return detail::scale(r, shifted_prefactor(p, y, yp, opt));
}

inline GreenValue green_dx(const FieldParams& p, double x, double y, double xp, double yp,
                           const GreenOptions& opt = {}) {
  return detail::direct(p, detail::KernelKind::Dx, x, y, xp, yp, opt);
}

inline GreenValue green_dy(const FieldParams& p, double x, double y, double xp, double yp,
                           const GreenOptions& opt = {}) {
  return detail::direct(p, detail::KernelKind::Dy, x, y, xp, yp, opt);
}

inline GreenValue green_dx_shifted(const FieldParams& p, double x, double y, double xp, double yp,
                                   const GreenOptions& opt = {}) {
  if (x == xp) throw Error(Errc::DerivativeAtCoincidence, "derivative needs x != x'");
  auto r = shifted_p_integral(p, x, y, xp, yp, opt, detail::KernelKind::Dx);
  return detail::scale(r, shifted_prefactor(p, y, yp, opt));
}

inline GreenValue green_dy_shifted(const FieldParams& p, double x, double y, double xp, double yp,
                                   const GreenOptions& opt = {}) {
  if (x == xp) throw Error(Errc::DerivativeAtCoincidence, "derivative needs x != x'");
  auto r = shifted_p_integral(p, x, y, xp, yp, opt, detail::KernelKind::Dy);
  return detail::scale(r, shifted_prefactor(p, y, yp, opt));
}

// Direct representation, or the shifted one when |y - y'| is large enough
// for the direct integral to lose relative accuracy.
inline GreenValue green_auto(const FieldParams& p, double x, double y, double xp, double yp,
                             const GreenOptions& opt = {}) {
  if (p.F > 0.0 && std::abs(y - yp) > 1.0 && p.z.imag() + p.b * p.F > 0.0)
    return green_shifted(p, x, y, xp, yp, opt);
  return green_direct(p, x, y, xp, yp, opt);
}

}  // namespace starkres
