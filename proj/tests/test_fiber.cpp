#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <random>

#include "oracles/kummer.hpp"
#include "starkres/fiber.hpp"

using starkres::Complex;
using starkres::Errc;
using starkres::Error;
using starkres::FiberContext;
using starkres::FieldParams;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

FieldParams params(double B, double F, double b, Complex z) {
  FieldParams p;
  p.B = B;
  p.F = F;
  p.b = b;
  p.z = z;
  return p;
}

// Resolvent of -d^2 + B^2 X^2 - zk by the Mehler heat kernel, Re zk < B.
Complex mehler_fiber(double B, Complex X, Complex Xp, Complex zk) {
  boost::math::quadrature::exp_sinh<double> es;
  auto part = [&](bool imag_part) {
    return es.integrate([&](double tau) {
      double T = 2.0 * tau;
      double q = std::exp(-B * T), om = -std::expm1(-2.0 * B * T);  // 1 - q^2
      if (om <= 0.0) return 0.0;
      Complex d = X - Xp;
      Complex e = -0.5 * B * (d * d * (1.0 + q * q) + 2.0 * X * Xp * (1.0 - q) * (1.0 - q)) / om;
      // log of sqrt(B / (2 pi sinh(BT)))
      double lp = 0.5 * (std::log(B / kPi) - B * T - std::log(om));
      Complex v = std::exp(lp + e + zk * tau);
      return imag_part ? v.imag() : v.real();
    });
  };
  return {part(false), part(true)};
}

}  // namespace

TEST(Fiber, ContextArithmetic) {
  FiberContext c0(params(1.0, 0.0, 0.0, 1.0), 0.0);
  EXPECT_EQ(c0.x_shift(0.0), Complex(0.0, 0.0));
  EXPECT_EQ(c0.z_shift(), Complex(1.0, 0.0));
  EXPECT_EQ(c0.a(), Complex(0.0, 0.0));

  FiberContext c1(params(1.0, 0.1, 0.0, 0.0), 0.0);
  EXPECT_NEAR(c1.x_shift(0.0).real(), -0.05, 1e-15);
  EXPECT_NEAR(c1.z_shift().real(), 0.0025, 1e-15);
  EXPECT_NEAR(c1.a().real(), (1.0 - 0.0025) / 4.0, 1e-15);

  FiberContext c2(params(1.3, 0.2, 1.0, {0.4, 0.1}), {0.7, -0.3});
  EXPECT_EQ(c2.x_shift(1.25) - c2.x_shift(-0.5), Complex(1.75, 0.0));
}

TEST(Fiber, PsiWithZeroParameterIsGaussian) {
  FiberContext c(params(1.0, 0.0, 0.0, 1.0), 0.0);
  for (double X : {0.3, 1.0, 2.5})
    EXPECT_LT(rel(starkres::psi1(c, X).value(), std::exp(-0.5 * X * X)), 1e-13);
}

TEST(Fiber, PsiMatchesOracleComposition) {
  // a = 0.25 means z(k) = 0 at B = 1
  FiberContext c(params(1.0, 0.0, 0.0, 0.0), 0.0);
  Complex want = std::exp(-2.0) * oracle::to_d<80>(oracle::hyperu<80>(0.25, 0.5, 4.0));
  EXPECT_LT(rel(starkres::psi1(c, 2.0).value(), want), 1e-12);
}

TEST(Fiber, PsiContinuousAcrossZero) {
  FiberContext c(params(1.0, 0.05, 1.0, {0.5, 0.02}), {0.3, 0.0});
  for (double e : {1e-6, 1e-9}) {
    Complex lo = starkres::psi1(c, -e).value(), hi = starkres::psi1(c, e).value();
    EXPECT_LT(rel(lo, hi), 1e-5);
  }
}

TEST(Fiber, WronskianClosedFormSpecialValues) {
  EXPECT_LT(rel(starkres::wronskian(params(1.0, 0.0, 0.0, 0.0), 0.0), std::pow(2.0, 1.5)), 1e-14);
  for (int n = 0; n < 4; ++n)
    EXPECT_EQ(starkres::wronskian(params(1.0, 0.0, 0.0, 2.0 * n + 1.0), 0.0), Complex(0.0, 0.0));
}

TEST(Fiber, NumericWronskianMatchesClosedForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    FieldParams p = params(0.8 + 0.5 * std::abs(u(rng)), 0.1 * std::abs(u(rng)), 1.0,
                           {1.5 * u(rng), 0.3 * u(rng)});
    Complex k(2.0 * u(rng), 0.5 * u(rng));
    FiberContext c(p, k);
    Complex want = starkres::wronskian(p, k);
    for (double x : {-5.0, -1.0, 0.0, 2.0, 5.0}) {
      Complex X = c.x_shift(x);
      Complex w = (starkres::psi1(c, X) * starkres::dpsi2(c, X) -
                   starkres::dpsi1(c, X) * starkres::psi2(c, X)).value();
      EXPECT_LT(rel(w, want), 1e-8) << "i=" << i << " x=" << x;
    }
  }
}

TEST(Fiber, GreenIsSymmetric) {
  FieldParams p = params(1.0, 0.05, 1.0, 0.5);
  for (Complex k : {Complex(0.2, 0.0), Complex(-1.0, 0.4)})
    EXPECT_EQ(starkres::fiber_green(p, 1.0, -0.5, k), starkres::fiber_green(p, -0.5, 1.0, k));
}

TEST(Fiber, GreenSolvesFiberEquation) {
  FieldParams p = params(1.0, 0.1, 1.0, {0.5, 0.05});
  const double h = 1e-3;
  for (Complex k : {Complex(0.0, 0.0), Complex(1.5, 0.0), Complex(-0.7, 0.3)}) {
    double xp = 0.25;
    for (double x : {-2.0, -0.6, 0.9, 2.2}) {
      auto G = [&](double s) { return starkres::fiber_green(p, s, xp, k); };
      Complex d2 = (-G(x + 2 * h) + 16.0 * G(x + h) - 30.0 * G(x) + 16.0 * G(x - h) - G(x - 2 * h)) /
                   (12.0 * h * h);
      Complex pot = (k - p.B * x) * (k - p.B * x) - p.F * x - Complex(0.0, p.F * p.b) - p.z;
      Complex res = -d2 + pot * G(x);
      EXPECT_LT(std::abs(res), 1e-5 * std::abs(G(x))) << k << " x=" << x;
    }
  }
}

TEST(Fiber, DerivativeJumpIsMinusOne) {
  FieldParams p = params(1.2, 0.1, 1.0, {0.3, 0.1});
  Complex k(0.4, -0.2);
  double xp = 0.7, e = 1e-9;
  Complex right = starkres::fiber_green_dx(p, xp + e, xp, k);
  Complex left = starkres::fiber_green_dx(p, xp - e, xp, k);
  EXPECT_LT(std::abs(right - left + 1.0), 1e-7);
}

TEST(Fiber, DerivativeMatchesDifferenceQuotient) {
  FieldParams p = params(1.0, 0.05, 1.0, 0.5);
  Complex k(0.3, 0.1);
  double h = 1e-5;
  for (double x : {-1.0, 2.0}) {
    Complex fd = (starkres::fiber_green(p, x + h, 0.5, k) - starkres::fiber_green(p, x - h, 0.5, k)) /
                 (2.0 * h);
    EXPECT_LT(rel(starkres::fiber_green_dx(p, x, 0.5, k), fd), 1e-7);
  }
  EXPECT_THROW(starkres::fiber_green_dx(p, 0.5, 0.5, k), Error);
}

TEST(Fiber, HarmonicOscillatorSpectralSumAtOrigin) {
  // B=1, F=0, z=-1, k=0: sum over even Hermite modes of phi_n(0)^2 / (2n+2).
  // The coincident-point sum decays like m^{-3/2}, so modes past the cutoff
  // are added through their Euler-Maclaurin tail.
  const long M = 200000;
  double c = 1.0, sum = 0.0;  // c_m = (2m)! / (4^m m!^2)
  for (long m = 0; m < M; ++m) {
    sum += c / (std::sqrt(kPi) * (4.0 * m + 2.0));
    c *= (2.0 * m + 1.0) / (2.0 * m + 2.0);
  }
  auto f = [](double m) { return std::pow(m, -1.5) * (1.0 - 5.0 / (8.0 * m)) / (4.0 * kPi); };
  double Md = double(M);
  double tail = (2.0 / std::sqrt(Md) - (5.0 / 12.0) * std::pow(Md, -1.5)) / (4.0 * kPi) + 0.5 * f(Md);
  sum += tail;
  Complex g = starkres::fiber_green(params(1.0, 0.0, 0.0, -1.0), 0.0, 0.0, 0.0);
  EXPECT_LT(std::abs(g - sum), 1e-6);
  // closed form sqrt(pi)/4 of the same sum
  EXPECT_LT(std::abs(g - std::sqrt(kPi) / 4.0), 1e-12);
}

TEST(Fiber, MatchesMehlerResolventOffDiagonal) {
  for (auto [F, k, z] : {std::tuple{0.0, Complex(0.0), Complex(-1.0)},
                         std::tuple{0.1, Complex(0.5), Complex(0.3, 0.2)},
                         std::tuple{0.05, Complex(-0.4, 0.3), Complex(0.2, -0.1)}}) {
    FieldParams p = params(1.0, F, 1.0, z);
    FiberContext c(p, k);
    for (auto [x, xp] : {std::pair{0.0, 0.0}, std::pair{0.5, -1.0}, std::pair{1.7, 2.0}}) {
      Complex want = mehler_fiber(p.B, c.x_shift(x), c.x_shift(xp), c.z_shift());
      EXPECT_LT(rel(starkres::fiber_green(p, x, xp, k), want), 1e-8) << F << " " << x << " " << xp;
    }
  }
}

TEST(Fiber, SimplePoleAtLandauLevel) {
  FieldParams p = params(1.0, 0.0, 0.0, 0.0);
  std::vector<double> le, lg;
  for (double eps : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
    p.z = Complex(1.0 - eps, 0.0);
    le.push_back(std::log(eps));
    lg.push_back(std::log(std::abs(starkres::fiber_green(p, 0.3, 0.5, 0.0))));
  }
  double n = le.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < le.size(); ++i) {
    sx += le[i];
    sy += lg[i];
    sxx += le[i] * le[i];
    sxy += le[i] * lg[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, -1.0, 0.05);
}

TEST(Fiber, AtSpectrumRaises) {
  try {
    starkres::fiber_green(params(1.0, 0.0, 0.0, 1.0), 0.1, 0.2, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AtSpectrum);
  }
}

TEST(Fiber, SolutionsDecay) {
  FiberContext c(params(1.0, 0.05, 1.0, {0.5, 0.05}), 0.2);
  double prev = 1e300;
  for (double X = 1.0; X <= 6.0; X += 0.5) {
    double v = std::abs(starkres::psi1(c, X).value());
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(std::abs(starkres::psi1(c, 6.0).value()) * std::exp(36.0 / 4.0), 1e-2);
  EXPECT_LT(std::abs(starkres::psi2(c, -6.0).value()) * std::exp(36.0 / 4.0), 1e-2);
}

TEST(Fiber, CaseSelectionTiesGoToMiddle) {
  using starkres::FiberCase;
  EXPECT_EQ(starkres::select_case(-1.0, 2.0, -3.0), FiberCase::Left);
  EXPECT_EQ(starkres::select_case(-1.0, 2.0, 0.0), FiberCase::Middle);
  EXPECT_EQ(starkres::select_case(-1.0, 2.0, 1.5), FiberCase::Right);
  EXPECT_EQ(starkres::select_case(-1.0, 2.0, -2.0), FiberCase::Middle);
  EXPECT_EQ(starkres::select_case(-1.0, 2.0, 1.0), FiberCase::Middle);
  // inputs normalized so that x' >= x
  EXPECT_EQ(starkres::select_case(2.0, -1.0, 1.5), FiberCase::Right);
}
