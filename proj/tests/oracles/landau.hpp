#pragma once

// Closed-form references for the pure magnetic problem (F = 0, b = 0).

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <complex>

namespace oracle {

// Green function of p_x^2 + (p_y - B x)^2 - z from the Mehler heat kernel
// B/(4 pi sinh(B t)) exp(-(B r^2/4) coth(B t)) times the gauge phase.
inline std::complex<double> landau_green(double B, std::complex<double> z, double x, double y,
                                         double xp, double yp) {
  const double pi = 3.141592653589793238462643383279502884;
  double r2 = (x - xp) * (x - xp) + (y - yp) * (y - yp);
  boost::math::quadrature::exp_sinh<double> es;
  auto part = [&](bool im) {
    return es.integrate([&](double t) {
      double q = std::exp(-B * t), om = -std::expm1(-2.0 * B * t);
      if (om <= 0.0) return 0.0;
      double lk = std::log(B / (2.0 * pi)) + std::log(q / om) - 0.25 * B * r2 * (1.0 + q * q) / om;
      std::complex<double> v = std::exp(lk + z * t);
      return im ? v.imag() : v.real();
    });
  };
  std::complex<double> g(part(false), part(true));
  return std::polar(1.0, 0.5 * B * (x + xp) * (y - yp)) * g;
}

}  // namespace oracle
