#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "starkres/errors.hpp"
#include "starkres/specfun.hpp"

namespace starkres {

// Field strength B > 0, electric field F >= 0, translation parameter b,
// spectral parameter z.
struct FieldParams {
  double B = 1.0;
  double F = 0.05;
  double b = 1.0;
  Complex z{0.5, 0.0};

  void validate() const {
    if (!(B > 0.0)) throw Error(Errc::InvalidArgument, "B must be positive");
    if (!(F >= 0.0)) throw Error(Errc::InvalidArgument, "F must be nonnegative");
    if (!std::isfinite(b) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(Errc::InvalidArgument, "non-finite parameter");
  }
};

// Quantities derived from (params, k); k may be complex on a shifted contour.
struct FiberContext {
  FieldParams p;
  Complex k;

  FiberContext(const FieldParams& params, Complex kk) : p(params), k(kk) {}

  Complex x_shift(double x) const { return x - k / p.B - p.F / (2.0 * p.B * p.B); }
  Complex z_shift() const {
    return p.z + Complex(0.0, p.b * p.F) + (p.F / p.B) * k + p.F * p.F / (4.0 * p.B * p.B);
  }
  Complex a() const { return (p.B - z_shift()) / (4.0 * p.B); }
  double ztilde1() const { return p.z.real() - p.F * p.F / (4.0 * p.B * p.B); }
  // (z2 + bF) / (2F)
  double delta() const {
    if (p.F == 0.0) return std::numeric_limits<double>::infinity();
    return (p.z.imag() + p.b * p.F) / (2.0 * p.F);
  }
};

// Case table of the shifted contour, with x <= xp: case 1 for p < -xp,
// case 2 for -xp <= p <= -x, case 3 for p > -x.
enum class FiberCase { Left = 1, Middle = 2, Right = 3 };

inline FiberCase select_case(double x, double xp, double p) {
  if (x > xp) std::swap(x, xp);
  if (p < -xp) return FiberCase::Left;
  if (p > -x) return FiberCase::Right;
  return FiberCase::Middle;
}

namespace detail {

inline Scaled gaussian(Complex X, double B) { return Scaled::exp_of(-0.5 * B * X * X); }

}  // namespace detail

// Solution decaying as x -> +infinity.
inline Scaled psi1(const FiberContext& c, Complex X) {
  double sb = std::sqrt(c.p.B);
  return detail::gaussian(X, c.p.B) * detail::p_scaled(c.a(), sb * X);
}

// Solution decaying as x -> -infinity.
inline Scaled psi2(const FiberContext& c, Complex X) {
  double sb = std::sqrt(c.p.B);
  return detail::gaussian(X, c.p.B) * detail::p_scaled(c.a(), -sb * X);
}

inline Scaled dpsi1(const FiberContext& c, Complex X) {
  double B = c.p.B, sb = std::sqrt(B);
  Complex a = c.a();
  Scaled g = detail::gaussian(X, B);
  return g * detail::p_scaled(a, sb * X) * (-B * X) +
         g * detail::p_scaled(a + 0.5, sb * X) * (-2.0 * a * sb);
}

inline Scaled dpsi2(const FiberContext& c, Complex X) {
  double B = c.p.B, sb = std::sqrt(B);
  Complex a = c.a();
  Scaled g = detail::gaussian(X, B);
  return g * detail::p_scaled(a, -sb * X) * (-B * X) +
         g * detail::p_scaled(a + 0.5, -sb * X) * (2.0 * a * sb);
}

// psi1 psi2' - psi1' psi2
inline Scaled wronskian_scaled(const FiberContext& c) {
  const double pi = 3.141592653589793238462643383279502884;
  double B = c.p.B;
  Complex zk = c.z_shift();
  Complex arg = (B - zk) / (2.0 * B);
  Complex lw = 0.5 * std::log(pi * B) + (1.5 - zk / (2.0 * B)) * std::log(2.0);
  return Scaled::exp_of(lw) * detail::rgamma_scaled(arg);
}

inline Complex wronskian(const FieldParams& p, Complex k) {
  return wronskian_scaled(FiberContext(p, k)).value();
}

namespace detail {

inline void check_spectrum(const FiberContext& c) {
  Complex zk = c.z_shift();
  double B = c.p.B;
  double n = std::round((zk.real() / B - 1.0) / 2.0);
  if (n >= 0.0 && std::abs(zk - (2.0 * n + 1.0) * B) < 1e-12 * std::max(1.0, B))
    throw Error(Errc::AtSpectrum, "z(k) coincides with a Landau level");
}

}  // namespace detail

// Kernel of (h_k - z)^{-1} for the fiber operator.
inline Scaled fiber_green_scaled(const FiberContext& c, double x, double xp) {
  detail::check_spectrum(c);
  double lo = std::min(x, xp), hi = std::max(x, xp);
  return psi1(c, c.x_shift(hi)) * psi2(c, c.x_shift(lo)) / wronskian_scaled(c);
}

inline Complex fiber_green(const FieldParams& p, double x, double xp, Complex k) {
  p.validate();
  return fiber_green_scaled(FiberContext(p, k), x, xp).value();
}

// d/dx of the kernel in its first argument; requires x != xp.
inline Scaled fiber_green_dx_scaled(const FiberContext& c, double x, double xp) {
  detail::check_spectrum(c);
  if (x == xp) throw Error(Errc::DerivativeAtCoincidence, "kernel derivative jumps at x = x'");
  Scaled w = wronskian_scaled(c);
  if (x > xp) return dpsi1(c, c.x_shift(x)) * psi2(c, c.x_shift(xp)) / w;
  return psi1(c, c.x_shift(xp)) * dpsi2(c, c.x_shift(x)) / w;
}

inline Complex fiber_green_dx(const FieldParams& p, double x, double xp, Complex k) {
  p.validate();
  return fiber_green_dx_scaled(FiberContext(p, k), x, xp).value();
}

}  // namespace starkres
