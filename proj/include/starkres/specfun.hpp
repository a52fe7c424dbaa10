#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "starkres/detail/cx.hpp"
#include "starkres/errors.hpp"

namespace starkres {

using Complex = std::complex<double>;

// Complex number stored as mant * exp(log_scale), so that factors like
// exp(t) with |t| in the thousands survive intermediate steps.
struct Scaled {
  Complex mant{0.0, 0.0};
  double log_scale = 0.0;

  static Scaled from(Complex v) { return Scaled{v, 0.0}.normalized(); }
  // exp(w)
  static Scaled exp_of(Complex w) { return {std::polar(1.0, w.imag()), w.real()}; }
  static Scaled zero() { return {}; }

  bool is_zero() const { return mant == Complex(0.0, 0.0); }

  Scaled normalized() const {
    double m = std::abs(mant);
    if (m == 0.0 || !std::isfinite(m)) return *this;
    return {mant / m, log_scale + std::log(m)};
  }

  double log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mant)) + log_scale;
  }

  Complex log() const { return std::log(mant) + log_scale; }

  Complex value() const {
    if (is_zero()) return {0.0, 0.0};
    if (log_abs() > 709.0) throw Error(Errc::Overflow, "value exceeds double range");
    return mant * std::exp(log_scale);
  }

  friend Scaled operator*(Scaled a, Scaled b) {
    return Scaled{a.mant * b.mant, a.log_scale + b.log_scale}.normalized();
  }
  friend Scaled operator*(Scaled a, Complex c) { return Scaled{a.mant * c, a.log_scale}.normalized(); }
  friend Scaled operator*(Complex c, Scaled a) { return a * c; }
  friend Scaled operator/(Scaled a, Scaled b) {
    if (b.is_zero()) throw Error(Errc::Overflow, "division by zero");
    return Scaled{a.mant / b.mant, a.log_scale - b.log_scale}.normalized();
  }
  friend Scaled operator-(Scaled a) { return {-a.mant, a.log_scale}; }
  friend Scaled operator+(Scaled a, Scaled b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    double L = std::max(a.log_scale, b.log_scale);
    return Scaled{a.mant * std::exp(a.log_scale - L) + b.mant * std::exp(b.log_scale - L), L}
        .normalized();
  }
  friend Scaled operator-(Scaled a, Scaled b) { return a + (-b); }
};

namespace detail {

inline constexpr std::array<const char*, 20> kStirling = {
    "8.3333333333333333333333333333333333333e-2",
    "-2.7777777777777777777777777777777777778e-3",
    "7.9365079365079365079365079365079365079e-4",
    "-5.952380952380952380952380952380952381e-4",
    "8.4175084175084175084175084175084175084e-4",
    "-1.9175269175269175269175269175269175269e-3",
    "6.4102564102564102564102564102564102564e-3",
    "-2.9550653594771241830065359477124183007e-2",
    "1.7964437236883057316493849001588939669e-1",
    "-1.3924322169059011164274322169059011164",
    "1.3402864044168391994478951000690131125e+1",
    "-1.5684828462600201730636513245208897383e+2",
    "2.1931033333333333333333333333333333333e+3",
    "-3.6108771253724989357173265219242230736e+4",
    "6.9147226885131306710839525077567346755e+5",
    "-1.5238221539407416192283364958886780519e+7",
    "3.8290075139141414141414141414141414141e+8",
    "-1.0882266035784391089015149165525105375e+10",
    "3.4732028376500225225225225225225225225e+11",
    "-1.2369602142269274454251710349271324881e+13",
};

template <class T>
struct GammaParams;
template <>
struct GammaParams<double> {
  static constexpr double shift = 12.0;
  static constexpr int terms = 12;
};
template <>
struct GammaParams<__float128> {
  static constexpr double shift = 28.0;
  static constexpr int terms = 20;
};

template <class T>
const std::array<T, 20>& stirling_coeffs() {
  static const std::array<T, 20> c = [] {
    std::array<T, 20> out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
      if constexpr (std::is_same_v<T, double>)
        out[i] = std::strtod(kStirling[i], nullptr);
      else
        out[i] = strtoflt128(kStirling[i], nullptr);
    }
    return out;
  }();
  return c;
}

template <class T>
bool is_nonpositive_integer(Cx<T> z) {
  if (z.im != T(0) || z.re > T(0)) return false;
  double r = double(z.re);
  return r == std::floor(r);
}

// log(sin(pi z)), any branch
template <class T>
Cx<T> log_sin_pi(Cx<T> z) {
  const T pi = Real<T>::pi();
  Cx<T> w = Cx<T>(pi * z.re, pi * z.im);
  Cx<T> i{T(0), T(1)};
  if (w.im > T(0)) {
    Cx<T> e = exp(Cx<T>(T(2)) * i * w);
    return -i * w + log((e - Cx<T>(T(1))) / (Cx<T>(T(2)) * i));
  }
  Cx<T> e = exp(Cx<T>(T(-2)) * i * w);
  return i * w + log((Cx<T>(T(1)) - e) / (Cx<T>(T(2)) * i));
}

template <class T>
Cx<T> lgamma(Cx<T> z) {
  if (is_nonpositive_integer(z)) throw Error(Errc::PoleAtNonpositiveInteger, "log_gamma at pole");
  const T pi = Real<T>::pi();
  if (z.re < T(-200)) {
    // reflection; imaginary part is then fixed only modulo 2 pi
    Cx<T> one_minus{T(1) - z.re, -z.im};
    return Cx<T>(Real<T>::log(pi)) - log_sin_pi(z) - lgamma(one_minus);
  }
  Cx<T> w = z;
  Cx<T> shift_log{T(0), T(0)};
  const T R = T(GammaParams<T>::shift);
  while (w.re < R) {
    shift_log += log(w);
    w.re += T(1);
  }
  const auto& c = stirling_coeffs<T>();
  Cx<T> inv = Cx<T>(T(1)) / w;
  Cx<T> inv2 = inv * inv;
  Cx<T> series{T(0), T(0)};
  Cx<T> p = inv;
  for (int k = 0; k < GammaParams<T>::terms; ++k) {
    series += c[k] * p;
    p *= inv2;
  }
  Cx<T> lw = log(w);
  Cx<T> half_log_2pi{Real<T>::log(T(2) * pi) / T(2)};
  return (w - Cx<T>(T(0.5))) * lw - w + half_log_2pi + series - shift_log;
}

template <class T>
Cx<T> rgamma(Cx<T> z) {
  if (is_nonpositive_integer(z)) return {T(0), T(0)};
  return exp(-lgamma(z));
}

template <class T>
Cx<T> gamma(Cx<T> z) { return exp(lgamma(z)); }

template <class T>
struct SeriesResult {
  Cx<T> sum;
  T cond;  // max |term| / |sum|
  bool ok;
};

// Plain power series of M(a,b,t).
template <class T>
SeriesResult<T> m_series_raw(Cx<T> a, Cx<T> b, Cx<T> t, int max_terms) {
  Cx<T> term{T(1)}, sum{T(1)};
  T maxabs = T(1);
  const T eps = T(Real<T>::eps);
  for (int n = 0; n < max_terms; ++n) {
    Cx<T> num = (a + Cx<T>(T(n))) * t;
    Cx<T> den = (b + Cx<T>(T(n))) * Cx<T>(T(n + 1));
    term = term * num / den;
    sum += term;
    T at = abs(term);
    if (at > maxabs) maxabs = at;
    if (at == T(0)) return {sum, maxabs / abs(sum), true};
    T ratio = abs(num) / abs(den);
    if (ratio < T(0.5) && at <= eps * abs(sum)) {
      T s = abs(sum);
      return {sum, s > T(0) ? maxabs / s : T(1e300), true};
    }
  }
  return {sum, T(1e300), false};
}

// M(a,b,t) with the Kummer transformation applied for Re t < 0.
template <class T>
SeriesResult<T> m_series(Cx<T> a, Cx<T> b, Cx<T> t, int max_terms = 4000) {
  if (t.re < T(0)) {
    auto r = m_series_raw<T>(b - a, b, -t, max_terms);
    r.sum = exp(t) * r.sum;
    return r;
  }
  return m_series_raw<T>(a, b, t, max_terms);
}

inline void check_b(Complex b) {
  if (b.imag() == 0.0 && b.real() <= 0.0 && b.real() == std::floor(b.real()))
    throw Error(Errc::PoleInB, "b is a nonpositive integer");
}

inline bool near_integer(Complex b) {
  return std::abs(b.imag()) < 1e-12 && std::abs(b.real() - std::round(b.real())) < 1e-9;
}

inline constexpr double kDoubleCond = 1e2;
inline constexpr double kQuadCond = 1e22;
inline constexpr double kSmallT = 60.0;

inline Complex m_small(Complex a, Complex b, Complex t) {
  auto d = m_series<double>(Cx<double>(a), Cx<double>(b), Cx<double>(t));
  if (d.ok && d.cond < kDoubleCond) return d.sum.to_std();
  using Q = __float128;
  auto q = m_series<Q>(Cx<Q>(a), Cx<Q>(b), Cx<Q>(t));
  if (q.ok && double(q.cond) < kQuadCond) return q.sum.to_std();
  throw Error(Errc::NoConvergence, "M series lost all precision");
}

struct AsymSum {
  Complex sum;
  double err;  // relative size of the first omitted term
};

// sum_n (p)_n (q)_n / n! * w^n, truncated at the smallest term
inline AsymSum asym_sum(Complex p, Complex q, Complex w, int max_terms = 400) {
  Complex term = 1.0, sum = 1.0;
  double prev = 1.0;
  for (int n = 0; n < max_terms; ++n) {
    Complex next = term * (p + double(n)) * (q + double(n)) * w / double(n + 1);
    double an = std::abs(next);
    if (an == 0.0) return {sum, 0.0};
    if (an > prev && n > 0) return {sum, prev / std::abs(sum)};
    sum += next;
    term = next;
    prev = an;
    if (an < 1e-17 * std::abs(sum)) return {sum, an / std::abs(sum)};
  }
  return {sum, prev / std::abs(sum)};
}

inline Scaled rgamma_scaled(Complex z) {
  Cx<double> zz(z);
  if (is_nonpositive_integer(zz)) return Scaled::zero();
  return Scaled::exp_of(-lgamma(zz).to_std());
}

struct ScaledResult {
  Scaled value;
  double err;
};

// Large-|t| expansion of M(a,b,t).
inline ScaledResult m_asymptotic(Complex a, Complex b, Complex t) {
  const double pi = 3.141592653589793238462643383279502884;
  double sgn = t.imag() >= 0.0 ? 1.0 : -1.0;
  Complex lt = std::log(t);
  Complex I(0.0, 1.0);
  AsymSum s1 = asym_sum(a, a - b + 1.0, -1.0 / t);
  AsymSum s2 = asym_sum(b - a, 1.0 - a, 1.0 / t);
  Scaled t1 = Scaled::exp_of(sgn * I * pi * a - a * lt) * rgamma_scaled(b - a) * s1.sum;
  Scaled t2 = Scaled::exp_of(t + (a - b) * lt) * rgamma_scaled(a) * s2.sum;
  Scaled gb = Scaled::exp_of(lgamma(Cx<double>(b)).to_std());
  double err = std::max(t1.is_zero() ? 0.0 : s1.err, t2.is_zero() ? 0.0 : s2.err);
  return {gb * (t1 + t2), err};
}

// Large-|t| expansion of U(a,b,t).
inline ScaledResult u_asymptotic(Complex a, Complex b, Complex t) {
  AsymSum s = asym_sum(a, a - b + 1.0, -1.0 / t);
  return {Scaled::exp_of(-a * std::log(t)) * s.sum, s.err};
}

template <class T>
SeriesResult<T> u_connection(Complex a_, Complex b_, Complex t_) {
  Cx<T> a(a_), b(b_), t(t_);
  Cx<T> one{T(1)}, two{T(2)};
  Cx<T> g1 = gamma<T>(one - b) * rgamma<T>(a - b + one);
  Cx<T> g2 = gamma<T>(b - one) * rgamma<T>(a);
  auto m1 = m_series<T>(a, b, t);
  auto m2 = m_series<T>(a - b + one, two - b, t);
  Cx<T> pw = exp((one - b) * log(t));
  Cx<T> A = g1 * m1.sum;
  Cx<T> Bv = g2 * pw * m2.sum;
  Cx<T> sum = A + Bv;
  T mag = abs(sum);
  T cond = mag > T(0) ? std::max(m1.cond, m2.cond) * (abs(A) + abs(Bv)) / mag : T(1e300);
  return {sum, cond, m1.ok && m2.ok};
}

struct LaplaceResult {
  Complex value;
  bool ok;
};

// U(a,b,t) = 1/Gamma(a) int_0^inf e^{-t w} w^{a-1} (1+w)^{b-a-1} dw, Re a > 0,
// integrated along the ray on which t w is real and positive.
inline LaplaceResult u_laplace(Complex a, Complex b, Complex t) {
  if (a.real() <= 0.0 || std::abs(std::arg(t)) > 3.0) return {{}, false};
  static thread_local boost::math::quadrature::exp_sinh<double> integrator;
  const Complex rot = std::polar(1.0, -std::arg(t));
  const double at = std::abs(t);
  auto f = [&](double r) -> Complex {
    Complex w = r * rot;
    return std::exp(-at * r + (a - 1.0) * std::log(w) + (b - a - 1.0) * std::log(1.0 + w)) * rot;
  };
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  Complex v;
  try {
    v = integrator.integrate(f, 1e-15, &err, &l1, &levels);
  } catch (const std::exception&) {
    return {{}, false};
  }
  double mag = std::abs(v);
  if (!(mag > 0.0) || err > 1e-13 * mag || l1 > 1e3 * mag) return {{}, false};
  return {v * rgamma(Cx<double>(a)).to_std(), true};
}

inline Complex u_small(Complex a, Complex b, Complex t) {
  if (!near_integer(b)) {
    auto d = u_connection<double>(a, b, t);
    if (d.ok && d.cond < kDoubleCond) return d.sum.to_std();
  }
  if (auto l = u_laplace(a, b, t); l.ok) return l.value;
  if (near_integer(b))
    throw Error(Errc::NoConvergence, "integer b outside the supported regime");
  auto q = u_connection<__float128>(a, b, t);
  if (q.ok && double(q.cond) < kQuadCond) return q.sum.to_std();
  throw Error(Errc::NoConvergence, "U connection formula lost all precision");
}

// P(a,s) = sqrt(pi) [M(a,1/2,s^2)/Gamma(a+1/2) - 2 s M(a+1/2,3/2,s^2)/Gamma(a)],
// entire in s; equals U(a,1/2,s^2) for Re s > 0.
template <class T>
SeriesResult<T> p_series(Complex a_, Complex s_) {
  Cx<T> a(a_), s(s_);
  Cx<T> half{T(0.5)}, three_half{T(1.5)};
  Cx<T> t = s * s;
  auto m1 = m_series<T>(a, half, t);
  auto m2 = m_series<T>(a + half, three_half, t);
  Cx<T> A = rgamma<T>(a + half) * m1.sum;
  Cx<T> Bv = Cx<T>(T(-2)) * s * rgamma<T>(a) * m2.sum;
  Cx<T> sum = (A + Bv) * Real<T>::sqrt(Real<T>::pi());
  T mag = abs(A + Bv);
  T cond = mag > T(0) ? std::max(m1.cond, m2.cond) * (abs(A) + abs(Bv)) / mag : T(1e300);
  return {sum, cond, m1.ok && m2.ok};
}

inline Complex p_small(Complex a, Complex s) {
  auto d = p_series<double>(a, s);
  if (d.ok && d.cond < kDoubleCond) return d.sum.to_std();
  if (s.real() > 0.0)
    if (auto l = u_laplace(a, 0.5, s * s); l.ok) return l.value;
  auto q = p_series<__float128>(a, s);
  if (q.ok && double(q.cond) < kQuadCond) return q.sum.to_std();
  throw Error(Errc::NoConvergence, "parabolic combination lost all precision");
}

inline constexpr double kAsymTol = 1e-14;

inline Scaled p_scaled(Complex a, Complex s) {
  Complex t = s * s;
  double at = std::abs(t);
  const double sqrt_pi = 1.772453850905516027298167483341145183;
  if (s.real() > 0.0 && at >= 20.0) {
    auto u = u_asymptotic(a, 0.5, t);
    if (u.err < kAsymTol) return u.value;
  }
  if (at <= kSmallT) return Scaled::from(p_small(a, s));
  if (s.real() > 0.0) {
    auto u = u_asymptotic(a, 0.5, t);
    if (u.err < 1e-9) return u.value;
    throw Error(Errc::NoConvergence, "recessive branch outside asymptotic regime");
  }
  auto m1 = m_asymptotic(a, 0.5, t);
  auto m2 = m_asymptotic(a + 0.5, 1.5, t);
  if (std::max(m1.err, m2.err) > 1e-9)
    throw Error(Errc::NoConvergence, "M asymptotic expansion too coarse");
  Scaled A = m1.value * rgamma_scaled(a + 0.5);
  Scaled Bv = m2.value * rgamma_scaled(a) * (-2.0 * s);
  return (A + Bv) * Complex(sqrt_pi, 0.0);
}

}  // namespace detail

inline Complex log_gamma(Complex z) {
  return detail::lgamma(detail::Cx<double>(z)).to_std();
}

inline Complex rgamma(Complex z) {
  return detail::rgamma(detail::Cx<double>(z)).to_std();
}

inline Scaled kummer_m_scaled(Complex a, Complex b, Complex t) {
  detail::check_b(b);
  if (std::abs(t) <= detail::kSmallT) return Scaled::from(detail::m_small(a, b, t));
  auto r = detail::m_asymptotic(a, b, t);
  if (r.err < 1e-12) return r.value;
  return Scaled::from(detail::m_small(a, b, t));
}

inline Complex kummer_m(Complex a, Complex b, Complex t) { return kummer_m_scaled(a, b, t).value(); }

inline Scaled kummer_u_scaled(Complex a, Complex b, Complex t) {
  if (t == Complex(0.0, 0.0)) throw Error(Errc::InvalidArgument, "U at t = 0");
  if (t.real() < 0.0 && t.imag() == 0.0 && std::signbit(t.imag()))
    throw Error(Errc::BranchViolation, "arg t = -pi is outside the principal branch");
  double at = std::abs(t);
  if (at >= 20.0) {
    auto u = detail::u_asymptotic(a, b, t);
    if (u.err < detail::kAsymTol) return u.value;
  }
  if (at <= detail::kSmallT) return Scaled::from(detail::u_small(a, b, t));
  auto u = detail::u_asymptotic(a, b, t);
  if (u.err < 1e-9) return u.value;
  throw Error(Errc::NoConvergence, "U outside the supported parameter range");
}

inline Complex kummer_u(Complex a, Complex b, Complex t) { return kummer_u_scaled(a, b, t).value(); }

inline Complex dkummer_m(Complex a, Complex b, Complex t) {
  detail::check_b(b);
  return a / b * kummer_m(a + 1.0, b + 1.0, t);
}

inline Complex dkummer_u(Complex a, Complex b, Complex t) {
  return -a * kummer_u(a + 1.0, b + 1.0, t);
}

// V(a,x) = sqrt(pi) [M(a,1/2,B x^2)/Gamma(a+1/2) + 2 sqrt(B) x M(a+1/2,3/2,B x^2)/Gamma(a)]
inline Scaled kummer_v_scaled(Complex a, Complex x, double B) {
  return detail::p_scaled(a, -std::sqrt(B) * x);
}

inline Complex kummer_v(Complex a, Complex x, double B) { return kummer_v_scaled(a, x, B).value(); }

// d/dx V(a,x)
inline Scaled kummer_v_dx_scaled(Complex a, Complex x, double B) {
  double sb = std::sqrt(B);
  return detail::p_scaled(a + 0.5, -sb * x) * (2.0 * sb * a);
}

inline Complex kummer_v_dx(Complex a, Complex x, double B) { return kummer_v_dx_scaled(a, x, B).value(); }

}  // namespace starkres
