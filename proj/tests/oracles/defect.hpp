#pragma once

// Resolvent identity probe: int G(x, x') [(H - z) f](x') dx' = f(x) for a
// Gaussian f, with (H - z) f written out analytically. Polar quadrature
// around the probe point removes the logarithmic singularity of G.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <complex>

#include "starkres/green2d.hpp"

namespace oracle {

struct DefectProbe {
  std::complex<double> integral;
  double f_value;
};

inline DefectProbe defect_identity(const starkres::FieldParams& p, double x0, double y0,
                                   double a = 0.2, double c = -0.1, double s = 0.6,
                                   const starkres::GreenOptions& opt = {}) {
  using C = std::complex<double>;
  const double pi = 3.141592653589793238462643383279502884;
  const double B = p.B, F = p.F;
  auto f = [&](double x, double y) {
    double u = x - a, v = y - c;
    return std::exp(-(u * u + v * v) / (2.0 * s * s));
  };
  // H = -dx^2 - dy^2 + 2 i B x dy + B^2 x^2 - F x - i b F
  auto hf = [&](double x, double y) {
    double u = x - a, v = y - c, s2 = s * s, s4 = s2 * s2;
    C h = -(u * u / s4 - 1.0 / s2) - (v * v / s4 - 1.0 / s2) + C(0.0, -2.0 * B * x * v / s2) +
          B * B * x * x - F * x - C(0.0, p.b * F) - p.z;
    return h * f(x, y);
  };
  constexpr int kRadial = 24, kAngular = 24;
  double R = std::hypot(x0 - a, y0 - c) + 7.0 * s;
  using GL = boost::math::quadrature::gauss<double, kRadial>;
  C acc = 0.0;
  // r = R w^2 on w in [0, 1]
  auto radial = [&](double w) {
    double r = R * w * w, jac = 2.0 * R * w * r;
    C ring = 0.0;
    for (int j = 0; j < kAngular; ++j) {
      double th = 2.0 * pi * (j + 0.5) / kAngular;
      double x = x0 + r * std::cos(th), y = y0 + r * std::sin(th);
      ring += starkres::green_auto(p, x0, y0, x, y, opt).value * hf(x, y);
    }
    return ring * (2.0 * pi / kAngular) * jac;
  };
  const auto& nodes = GL::abscissa();
  const auto& weights = GL::weights();
  for (size_t i = 0; i < nodes.size(); ++i) {
    double xi = nodes[i], w = weights[i];
    if (xi == 0.0) {
      acc += w * radial(0.5);
    } else {
      acc += w * (radial(0.5 * (1.0 + xi)) + radial(0.5 * (1.0 - xi)));
    }
  }
  return {0.5 * acc, f(x0, y0)};
}

}  // namespace oracle
