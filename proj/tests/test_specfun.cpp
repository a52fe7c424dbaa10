#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/kummer.hpp"
#include "starkres/specfun.hpp"

using starkres::Complex;
using starkres::Errc;
using starkres::Error;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double rel(Complex got, Complex want) {
  double d = std::abs(got - want);
  double s = std::abs(want);
  return s > 0 ? d / s : d;
}

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Specfun, MAtZeroArgumentIsOne) {
  EXPECT_EQ(starkres::kummer_m({0.7, 0.3}, {1.5, 0.0}, {0.0, 0.0}), Complex(1.0, 0.0));
  EXPECT_EQ(starkres::kummer_m({-3.2, 1.0}, {0.5, 0.2}, {0.0, 0.0}), Complex(1.0, 0.0));
}

TEST(Specfun, MWithZeroFirstParameterIsOne) {
  for (Complex t : {Complex(3.0, 1.0), Complex(-20.0, 0.0), Complex(45.0, -10.0)})
    EXPECT_LT(rel(starkres::kummer_m(0.0, 2.5, t), 1.0), 1e-14);
}

TEST(Specfun, MElementaryCase) {
  // M(a,a,t) = e^t
  for (Complex t : {Complex(2.0, 0.5), Complex(-30.0, 4.0), Complex(48.0, 0.0)})
    EXPECT_LT(rel(starkres::kummer_m({1.3, 0.2}, {1.3, 0.2}, t), std::exp(t)), 1e-12);
}

TEST(Specfun, UMatchesOracleAtOneThird) {
  Complex got = starkres::kummer_u(1.0 / 3.0, 0.5, 0.7);
  Complex want = oracle::to_d<80>(oracle::hyperu<80>(1.0 / 3.0, 0.5, 0.7));
  EXPECT_LT(rel(got, want), 1e-12);
}

TEST(Specfun, ULargeArgumentLeadingPower) {
  Complex a(0.4, 0.3);
  for (double t : {1e3, 1e4, 1e5}) {
    Complex u = starkres::kummer_u(a, 0.5, t);
    Complex lead = std::exp(-a * std::log(Complex(t)));
    EXPECT_LT(rel(u, lead), 2.0 * std::abs(a * (a + 0.5)) / t);
  }
}

TEST(Specfun, KummerOdeResidual) {
  // t w'' + (b - t) w' - a w = 0 for both M and U
  Complex a(0.35, 0.2), b(1.5, 0.0);
  for (Complex t : {Complex(0.8, 0.1), Complex(6.0, -2.0), Complex(25.0, 3.0)}) {
    Complex m = starkres::kummer_m(a, b, t);
    Complex m1 = starkres::dkummer_m(a, b, t);
    Complex m2 = a * (a + 1.0) / (b * (b + 1.0)) * starkres::kummer_m(a + 2.0, b + 2.0, t);
    Complex res = t * m2 + (b - t) * m1 - a * m;
    double scale = std::abs(t * m2) + std::abs((b - t) * m1) + std::abs(a * m);
    EXPECT_LT(std::abs(res) / scale, 1e-8);

    Complex u = starkres::kummer_u(a, b, t);
    Complex u1 = starkres::dkummer_u(a, b, t);
    Complex u2 = a * (a + 1.0) * starkres::kummer_u(a + 2.0, b + 2.0, t);
    Complex resu = t * u2 + (b - t) * u1 - a * u;
    double su = std::abs(t * u2) + std::abs((b - t) * u1) + std::abs(a * u);
    EXPECT_LT(std::abs(resu) / su, 1e-8);
  }
}

TEST(Specfun, WronskianOfMAndU) {
  // M U' - M' U = -Gamma(b) t^{-b} e^t / Gamma(a)
  Complex a(0.6, -0.4), b(0.5, 0.0);
  for (Complex t : {Complex(1.5, 0.5), Complex(9.0, 2.0), Complex(-4.0, 3.0)}) {
    Complex w = starkres::kummer_m(a, b, t) * starkres::dkummer_u(a, b, t) -
                starkres::dkummer_m(a, b, t) * starkres::kummer_u(a, b, t);
    Complex want = -std::exp(starkres::log_gamma(b) - b * std::log(t) + t) * starkres::rgamma(a);
    EXPECT_LT(rel(w, want), 1e-10);
  }
}

TEST(Specfun, LogGammaDuplication) {
  for (Complex z : {Complex(2.0, 3.0), Complex(0.3, -7.0), Complex(-2.7, 0.4), Complex(15.0, 40.0)}) {
    Complex lhs = starkres::log_gamma(z) + starkres::log_gamma(z + 0.5);
    Complex rhs = (1.0 - 2.0 * z) * std::log(2.0) + 0.5 * std::log(kPi) + starkres::log_gamma(2.0 * z);
    Complex d = lhs - rhs;
    double k = std::round(d.imag() / (2.0 * kPi));
    EXPECT_LT(std::abs(d - Complex(0.0, 2.0 * kPi * k)), 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Specfun, LogGammaMatchesOracle) {
  for (Complex z : {Complex(2.0, 3.0), Complex(0.1, 0.1), Complex(-3.5, 0.2), Complex(30.0, -12.0)}) {
    Complex want = oracle::to_d<80>(oracle::lgamma<80>(oracle::to_mp<80>(z)));
    Complex got = starkres::log_gamma(z);
    EXPECT_LT(std::abs(std::exp(got - want) - 1.0), 1e-13);
  }
}

TEST(Specfun, LogGammaPoleRaises) {
  EXPECT_EQ(error_of([] { starkres::log_gamma({-3.0, 0.0}); }), Errc::PoleAtNonpositiveInteger);
  EXPECT_EQ(starkres::rgamma({-3.0, 0.0}), Complex(0.0, 0.0));
}

TEST(Specfun, NonpositiveIntegerBRaises) {
  EXPECT_EQ(error_of([] { starkres::kummer_m(0.5, -2.0, 1.0); }), Errc::PoleInB);
  EXPECT_EQ(error_of([] { starkres::kummer_m(0.5, 0.0, 1.0); }), Errc::PoleInB);
}

TEST(Specfun, BranchViolationOnNegativeZeroImaginary) {
  EXPECT_EQ(error_of([] { starkres::kummer_u(0.5, 0.5, Complex(-2.0, -0.0)); }),
            Errc::BranchViolation);
  EXPECT_NO_THROW(starkres::kummer_u(0.5, 0.5, Complex(-2.0, 0.0)));
}

TEST(Specfun, OverflowIsReported) {
  EXPECT_EQ(error_of([] { starkres::kummer_m(0.5, 1.5, 2000.0); }), Errc::Overflow);
  auto s = starkres::kummer_m_scaled(0.5, 1.5, 2000.0);
  // leading term times (1 + (b-a)(1-a)/t)
  double want = 2000.0 + (0.5 - 1.5) * std::log(2000.0) + std::lgamma(1.5) - std::lgamma(0.5) +
                std::log1p(0.5 / 2000.0);
  EXPECT_NEAR(s.log_abs(), want, 1e-6);
}

TEST(Specfun, VContinuesUFromTheLeft) {
  // V(a, -eps) = U(a, 1/2, B eps^2)
  Complex a(0.3, 0.25);
  for (double B : {0.5, 1.0, 2.0})
    for (double e : {0.05, 0.7, 2.5, 6.0}) {
      Complex v = starkres::kummer_v(a, -e, B);
      Complex u = starkres::kummer_u(a, 0.5, B * e * e);
      EXPECT_LT(rel(v, u), 1e-11) << "B=" << B << " eps=" << e;
    }
}

TEST(Specfun, VMatchesOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(-2.0, 2.0), ux(-6.0, 6.0), uy(-1.5, 1.5);
  for (int i = 0; i < 40; ++i) {
    Complex a(ua(rng), 0.5 * ua(rng));
    Complex x(ux(rng), uy(rng));
    double B = 0.5 + 0.5 * std::abs(ua(rng));
    Complex want = oracle::to_d<80>(oracle::kummer_v<80>(a, x, B));
    EXPECT_LT(rel(starkres::kummer_v(a, x, B), want), 1e-10) << a << " " << x << " " << B;
  }
}

TEST(Specfun, VDerivativeMatchesDifferenceQuotient) {
  Complex a(0.2, 0.1);
  for (Complex x : {Complex(-2.0, 0.3), Complex(0.4, 0.0), Complex(3.0, -0.5)}) {
    double h = 1e-5;
    Complex fd = (starkres::kummer_v(a, x + h, 1.3) - starkres::kummer_v(a, x - h, 1.3)) / (2.0 * h);
    EXPECT_LT(rel(starkres::kummer_v_dx(a, x, 1.3), fd), 1e-8);
  }
}

TEST(Specfun, LargeArgumentUAgainstHighPrecisionOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 8; ++i) {
    Complex a(-1.0 + 2.0 * u(rng), u(rng) - 0.5);
    double r = 60.0 + 120.0 * u(rng), th = (u(rng) - 0.5) * 2.0;
    Complex t = std::polar(r, th);
    Complex want = oracle::to_d<200>(oracle::hyperu<200>(a, 0.5, t));
    EXPECT_LT(rel(starkres::kummer_u(a, 0.5, t), want), 1e-10) << a << " " << t;
  }
}

TEST(Specfun, RandomAdmissiblePointsAgainstOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  for (int i = 0; i < 250; ++i) {
    Complex a(-5.0 + 10.0 * u(rng), -2.0 + 4.0 * u(rng));
    double br = 0.2 + 3.6 * u(rng);
    if (std::abs(br - std::round(br)) < 0.05) br += 0.1;
    Complex b(br, i % 3 == 0 ? u(rng) - 0.5 : 0.0);
    Complex t = std::polar(0.1 + 49.9 * u(rng), (2.0 * u(rng) - 1.0) * 3.1);
    Complex m = starkres::kummer_m(a, b, t);
    Complex mw = oracle::to_d<80>(oracle::hyp1f1<80>(a, b, t));
    if (rel(m, mw) > 1e-10) ++bad;
    Complex uu = starkres::kummer_u(a, b, t);
    Complex uw = oracle::to_d<80>(oracle::hyperu<80>(a, b, t));
    if (rel(uu, uw) > 1e-10) ++bad;
  }
  EXPECT_EQ(bad, 0);
}
