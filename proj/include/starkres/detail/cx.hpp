#pragma once

#include <quadmath.h>

#include <cmath>
#include <complex>

namespace starkres::detail {

template <class T>
struct Real;

template <>
struct Real<double> {
  static double exp(double x) { return std::exp(x); }
  static double log(double x) { return std::log(x); }
  static double sin(double x) { return std::sin(x); }
  static double cos(double x) { return std::cos(x); }
  static double atan2(double y, double x) { return std::atan2(y, x); }
  static double hypot(double x, double y) { return std::hypot(x, y); }
  static double sqrt(double x) { return std::sqrt(x); }
  static double pi() { return 3.141592653589793238462643383279502884; }
  static constexpr double eps = 2.220446049250313e-16;
};

template <>
struct Real<__float128> {
  static __float128 exp(__float128 x) { return expq(x); }
  static __float128 log(__float128 x) { return logq(x); }
  static __float128 sin(__float128 x) { return sinq(x); }
  static __float128 cos(__float128 x) { return cosq(x); }
  static __float128 atan2(__float128 y, __float128 x) { return atan2q(y, x); }
  static __float128 hypot(__float128 x, __float128 y) { return hypotq(x, y); }
  static __float128 sqrt(__float128 x) { return sqrtq(x); }
  static __float128 pi() { static const __float128 v = 4 * atanq(__float128(1)); return v; }
  static constexpr double eps = 1.93e-34;
};

// Minimal complex arithmetic usable with __float128.
template <class T>
struct Cx {
  T re{0}, im{0};

  Cx() = default;
  Cx(T r, T i = T(0)) : re(r), im(i) {}
  explicit Cx(std::complex<double> z) : re(T(z.real())), im(T(z.imag())) {}

  std::complex<double> to_std() const { return {double(re), double(im)}; }

  Cx& operator+=(Cx o) { re += o.re; im += o.im; return *this; }
  Cx& operator-=(Cx o) { re -= o.re; im -= o.im; return *this; }
  Cx& operator*=(Cx o) { return *this = *this * o; }
  Cx& operator/=(Cx o) { return *this = *this / o; }

  friend Cx operator+(Cx a, Cx b) { return {a.re + b.re, a.im + b.im}; }
  friend Cx operator-(Cx a, Cx b) { return {a.re - b.re, a.im - b.im}; }
  friend Cx operator-(Cx a) { return {-a.re, -a.im}; }
  friend Cx operator*(Cx a, Cx b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cx operator*(Cx a, T s) { return {a.re * s, a.im * s}; }
  friend Cx operator*(T s, Cx a) { return {a.re * s, a.im * s}; }
  friend Cx operator/(Cx a, T s) { return {a.re / s, a.im / s}; }
  friend Cx operator/(Cx a, Cx b) {
    // Smith's algorithm
    if (fabs_(b.re) >= fabs_(b.im)) {
      T r = b.im / b.re, d = b.re + b.im * r;
      return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    T r = b.re / b.im, d = b.re * r + b.im;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
  }

  static T fabs_(T x) { return x < T(0) ? -x : x; }
};

template <class T>
T abs(Cx<T> z) { return Real<T>::hypot(z.re, z.im); }

template <class T>
T arg(Cx<T> z) { return Real<T>::atan2(z.im, z.re); }

template <class T>
Cx<T> exp(Cx<T> z) {
  T m = Real<T>::exp(z.re);
  return {m * Real<T>::cos(z.im), m * Real<T>::sin(z.im)};
}

template <class T>
Cx<T> log(Cx<T> z) { return {Real<T>::log(abs(z)), arg(z)}; }

template <class T>
Cx<T> expi(T phase) { return {Real<T>::cos(phase), Real<T>::sin(phase)}; }

}  // namespace starkres::detail
