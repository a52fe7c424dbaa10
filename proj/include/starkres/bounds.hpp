#pragma once

// Numeric probes of the decay envelopes of G1 and its first derivatives.
// Nothing here proves anything: empirical constants are fitted and only
// signs, rates and trends are checked.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "starkres/green2d.hpp"
#include "starkres/parallel.hpp"

namespace starkres {

struct BoundGrid {
  std::vector<double> dx{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  std::vector<double> dy{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
  double x0 = 0.0;
  int threads = 1;
  GreenOptions green{};
};

struct BoundCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct BoundReport {
  double delta = 0.0;
  double omega = 0.0;           // fitted Gaussian rate in (x' - x)^2
  double omega_residual = 0.0;  // rms of the Gaussian fit
  double y_rate = 0.0;          // fitted exponential rate in |y - y'|
  double prefactor = 0.0;       // smallest C with C2 = 0 on the grid
  double envelope_sup = 0.0;    // sup of the log-envelope
  double exponent = 0.0;        // bracket exponent used (or fitted offset)
  std::vector<BoundCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
  }
};

struct LineFit {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  double den = n * sxx - sx * sx;
  if (den == 0.0) throw Error(Errc::InvalidArgument, "degenerate regression");
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

inline GreenValue green_dx_auto(const FieldParams& p, double x, double y, double xp, double yp,
                                const GreenOptions& opt = {}) {
  if (p.F > 0.0 && std::abs(y - yp) > 1.0 && p.z.imag() + p.b * p.F > 0.0)
    return green_dx_shifted(p, x, y, xp, yp, opt);
  return green_dx(p, x, y, xp, yp, opt);
}

inline GreenValue green_dy_auto(const FieldParams& p, double x, double y, double xp, double yp,
                                const GreenOptions& opt = {}) {
  if (p.F > 0.0 && std::abs(y - yp) > 1.0 && p.z.imag() + p.b * p.F > 0.0 && x != xp)
    return green_dy_shifted(p, x, y, xp, yp, opt);
  return green_dy(p, x, y, xp, yp, opt);
}

namespace detail {

enum class ProbeKind { Value, Gradient };

// |G| or max(|dG/dx|, |dG/dy|) at (x0, 0; x0 + d, -eta)
inline double probe_abs(const FieldParams& p, ProbeKind kind, double x0, double d, double eta,
                        const GreenOptions& opt) {
  double xp = x0 + d, yp = -eta;
  if (kind == ProbeKind::Value) return std::abs(green_auto(p, x0, 0.0, xp, yp, opt).value);
  double gx = std::abs(green_dx_auto(p, x0, 0.0, xp, yp, opt).value);
  double gy = std::abs(green_dy_auto(p, x0, 0.0, xp, yp, opt).value);
  return std::max(gx, gy);
}

inline double bracket_log(double d, double delta) {
  if (!std::isfinite(delta)) return 0.0;
  return std::log1p(2.0 * d * d / (delta * delta));
}

inline double field_delta(const FieldParams& p) {
  if (p.F == 0.0) return std::numeric_limits<double>::infinity();
  return (p.z.imag() + p.b * p.F) / (2.0 * p.F);
}

struct Profiles {
  std::vector<double> x_abs;                 // eta = 0, over grid.dx
  std::vector<double> y_abs;                 // d = grid.dx.front(), over grid.dy
  std::vector<std::vector<double>> tensor;   // [dx][dy]
};

inline Profiles collect(const FieldParams& p, ProbeKind kind, const BoundGrid& g, bool with_y) {
  const std::size_t nx = g.dx.size(), ny = with_y ? g.dy.size() : 0;
  // one flat job list: x-profile first, then the tensor grid
  auto vals = parallel_map(nx + nx * ny, g.threads, [&](std::size_t i) {
    if (i < nx) return probe_abs(p, kind, g.x0, g.dx[i], 0.0, g.green);
    std::size_t j = i - nx;
    return probe_abs(p, kind, g.x0, g.dx[j / ny], g.dy[j % ny], g.green);
  });
  Profiles out;
  out.x_abs.assign(vals.begin(), vals.begin() + nx);
  out.tensor.assign(nx, std::vector<double>(ny));
  for (std::size_t j = 0; j < nx * ny; ++j) out.tensor[j / ny][j % ny] = vals[nx + j];
  if (ny > 0) out.y_abs = out.tensor.front();
  return out;
}

inline void fill_report(BoundReport& r, const FieldParams& p, const BoundGrid& g,
                        const Profiles& pr, double exponent, bool with_y) {
  r.delta = field_delta(p);
  r.exponent = exponent;
  std::vector<double> d2, ly;
  for (std::size_t i = 0; i < g.dx.size(); ++i) {
    d2.push_back(g.dx[i] * g.dx[i]);
    ly.push_back(std::log(pr.x_abs[i]) - exponent * bracket_log(g.dx[i], r.delta));
  }
  LineFit fx = fit_line(d2, ly);
  r.omega = -fx.slope;
  r.omega_residual = fx.rms;
  r.checks.push_back({"omega_positive", r.omega > 0.0, r.omega, 0.0});
  if (!with_y) return;

  std::vector<double> ys, lv;
  for (std::size_t j = 0; j < g.dy.size(); ++j) {
    ys.push_back(g.dy[j]);
    lv.push_back(std::log(pr.y_abs[j]));
  }
  r.y_rate = -fit_line(ys, lv).slope;
  r.checks.push_back({"y_rate_vs_delta", r.y_rate >= 0.95 * r.delta, r.y_rate, 0.95 * r.delta});

  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.dx.size(); ++i) {
    double d = g.dx[i];
    double base = std::log(r.delta) + r.omega * d * d - exponent * bracket_log(d, r.delta);
    sup = std::max(sup, std::log(pr.x_abs[i]) + base);
    for (std::size_t j = 0; j < g.dy.size(); ++j)
      sup = std::max(sup, std::log(pr.tensor[i][j]) + base + r.delta * g.dy[j]);
  }
  r.envelope_sup = sup;
  r.prefactor = std::exp(sup);
  r.checks.push_back({"envelope_finite", std::isfinite(sup), sup, 0.0});
}

}  // namespace detail

// |G1| <= C1 D^{-1} e^{-D|y-y'|} e^{-w (x'-x)^2} [1 + 2(x'-x)^2/D^2]^{z1/4B} [1 + C2 D^{-2}]
inline BoundReport verify_long_distance_bound(const FieldParams& p, const BoundGrid& g = {}) {
  p.validate();
  bool with_y = p.F > 0.0 && !g.dy.empty();
  if (with_y) detail::contour_delta(p);
  auto pr = detail::collect(p, detail::ProbeKind::Value, g, with_y);
  BoundReport r;
  detail::fill_report(r, p, g, pr, p.z.real() / (4.0 * p.B), with_y);
  return r;
}

// Same envelope for max(|dG/dx|, |dG/dy|) with exponent z1/4B + offset; the
// prefactor reported includes the F^2 of the bound, i.e. it estimates C3.
// The bracket offset is also fitted from the ratio |dG| / |G| on the x-profile.
struct DerivativeBoundReport {
  BoundReport report;
  double fitted_offset = 0.0;
  double c3 = 0.0;
};

inline DerivativeBoundReport verify_derivative_bound(const FieldParams& p, const BoundGrid& g = {},
                                                     double offset = 0.25) {
  p.validate();
  if (p.F <= 0.0) throw Error(Errc::InvalidArgument, "derivative bound probe needs F > 0");
  detail::contour_delta(p);
  auto pd = detail::collect(p, detail::ProbeKind::Gradient, g, true);
  auto pv = detail::collect(p, detail::ProbeKind::Value, g, false);
  DerivativeBoundReport out;
  detail::fill_report(out.report, p, g, pd, p.z.real() / (4.0 * p.B) + offset, true);
  std::vector<double> lb, lr;
  for (std::size_t i = 0; i < g.dx.size(); ++i) {
    lb.push_back(detail::bracket_log(g.dx[i], out.report.delta));
    lr.push_back(std::log(pd.x_abs[i] / pv.x_abs[i]));
  }
  out.fitted_offset = fit_line(lb, lr).slope;
  out.c3 = out.report.prefactor * p.F * p.F;
  return out;
}

// Fitted Gaussian rates for a sequence of F, and the F = 0 rate from the
// pure magnetic Green function, fitted the same way (no bracket at F = 0).
struct OmegaTrend {
  std::vector<double> F, omega;
  double extrapolated = 0.0;  // linear fit in F evaluated at F = 0
  double omega_f0 = 0.0;
  double relative_gap = 0.0;
};

inline OmegaTrend omega_trend(FieldParams p, const std::vector<double>& Fs, const BoundGrid& g = {}) {
  OmegaTrend t;
  for (double F : Fs) {
    p.F = F;
    t.F.push_back(F);
    t.omega.push_back(verify_long_distance_bound(p, [&] {
                        BoundGrid gx = g;
                        gx.dy.clear();
                        return gx;
                      }()).omega);
  }
  t.extrapolated = fit_line(t.F, t.omega).intercept;
  FieldParams p0 = p;
  p0.F = 0.0;
  t.omega_f0 = verify_long_distance_bound(p0, g).omega;
  t.relative_gap = std::abs(t.extrapolated - t.omega_f0) / t.omega_f0;
  return t;
}

// log-log slope of the derivative prefactor against F
struct PrefactorTrend {
  std::vector<double> F, prefactor;
  double slope = 0.0;
};

inline PrefactorTrend derivative_prefactor_trend(FieldParams p, const std::vector<double>& Fs,
                                                 const BoundGrid& g = {}) {
  PrefactorTrend t;
  std::vector<double> lf, lp;
  for (double F : Fs) {
    p.F = F;
    double pre = verify_derivative_bound(p, g).report.prefactor;
    t.F.push_back(F);
    t.prefactor.push_back(pre);
    lf.push_back(std::log(F));
    lp.push_back(std::log(pre));
  }
  t.slope = fit_line(lf, lp).slope;
  return t;
}

struct ShortDistanceReport {
  int order = 0;
  double delta = 0.0;
  double integral = 0.0;
  double log_slope = 0.0;            // d Re G / d ln|x - x'|
  double log_slope_variation = 0.0;  // relative spread of local slopes
  long evaluations = 0;
};

namespace detail {

template <int N>
struct GaussRule {
  using Q = boost::math::quadrature::gauss<double, N>;
  // nodes and weights on [0, 1]
  static std::vector<std::pair<double, double>> unit() {
    std::vector<std::pair<double, double>> out;
    const auto& xs = Q::abscissa();
    const auto& ws = Q::weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out.push_back({0.5 * (1.0 + xs[i]), 0.5 * ws[i]});
      if (xs[i] != 0.0) out.push_back({0.5 * (1.0 - xs[i]), 0.5 * ws[i]});
    }
    return out;
  }
};

}  // namespace detail

// int over |x'-x| < 1, y' in R of |d^m G1| e^{D |y - y'| / 2}
inline ShortDistanceReport verify_short_distance(const FieldParams& p, double x, double y, int m,
                                                 int threads = 1, const GreenOptions& opt = {},
                                                 double opt_tail = 1e-5) {
  p.validate();
  if (m != 0 && m != 1) throw Error(Errc::InvalidArgument, "order must be 0 or 1");
  const double delta = detail::contour_delta(p);
  const double pi = detail::kPi;
  ShortDistanceReport rep;
  rep.order = m;
  rep.delta = delta;

  auto mag = [&](double xp, double yp) {
    if (m == 0) return std::abs(green_auto(p, x, y, xp, yp, opt).value);
    double gx = std::abs(green_dx_auto(p, x, y, xp, yp, opt).value);
    double gy = std::abs(green_dy_auto(p, x, y, xp, yp, opt).value);
    return std::hypot(gx, gy);
  };

  struct Node {
    double xp, yp, w;
  };
  auto integrate = [&](const std::vector<Node>& nodes) {
    auto vals = parallel_map(nodes.size(), threads, [&](std::size_t i) {
      const Node& n = nodes[i];
      return n.w * mag(n.xp, n.yp) * std::exp(0.5 * delta * std::abs(n.yp - y));
    });
    rep.evaluations += long(nodes.size());
    double s = 0.0;
    for (double v : vals) s += v;
    return s;
  };
  // unit disk around (x, y) in polar form, r = s^2 to soften the singularity
  std::vector<Node> disk;
  const auto g16 = detail::GaussRule<16>::unit();
  constexpr int kAngles = 24;
  for (auto [s, ws] : g16) {
    double r = s * s;
    for (int j = 0; j < kAngles; ++j) {
      double th = 2.0 * pi * (j + 0.5) / kAngles;
      disk.push_back({x + r * std::cos(th), y + r * std::sin(th),
                      ws * 2.0 * s * r * (2.0 * pi / kAngles)});
    }
  }
  double sum = integrate(disk);
  // rest of the strip, |y' - y| > sqrt(1 - (x'-x)^2), marched outward in
  // panels that double in width (capped near the decay length) until a
  // panel no longer matters
  const auto g8 = detail::GaussRule<8>::unit();
  const auto g6 = detail::GaussRule<6>::unit();
  const double cap = std::max(1.0, 4.0 / delta);
  double start = 2.0, w = 1.0;
  for (int k = 0;; ++k) {
    const auto& rule = k < 2 ? g8 : g6;
    std::vector<Node> panel;
    for (auto [u, wu] : g8) {
      double dxp = 2.0 * u - 1.0;
      // first panel runs from the disk edge to |y' - y| = 2
      double lo = k == 0 ? std::sqrt(1.0 - dxp * dxp) : start;
      double len = k == 0 ? 2.0 - lo : w;
      for (int side : {-1, 1})
        for (auto [v, wv] : rule) panel.push_back({x + dxp, y + side * (lo + len * v), 2.0 * wu * wv * len});
    }
    double part = integrate(panel);
    sum += part;
    if (k > 0) {
      start += w;
      w = std::min(2.0 * w, cap);
    }
    if (k >= 2 && part < opt_tail * sum) break;
    if (start > 400.0 / delta + 50.0) throw Error(Errc::NonConvergent, "strip integral does not decay");
  }
  rep.integral = sum;

  // logarithmic singularity along the x-ray at y' = y
  std::vector<double> lr, re;
  for (int i = 0; i <= 8; ++i) {
    double r = std::pow(10.0, -4.0 + 0.25 * i);
    lr.push_back(std::log(r));
    re.push_back(green_direct(p, x, y, x + r, y, opt).value.real());
  }
  rep.log_slope = fit_line(lr, re).slope;
  std::vector<double> local;
  for (std::size_t i = 0; i + 1 < lr.size(); ++i) local.push_back((re[i + 1] - re[i]) / (lr[i + 1] - lr[i]));
  auto [lo, hi] = std::minmax_element(local.begin(), local.end());
  rep.log_slope_variation = (*hi - *lo) / std::abs(rep.log_slope);
  return rep;
}

// The integral at several Delta (through z2) and orders m. The bound is
// I <= C Delta^{-3}; C is taken from the largest Delta probed, and every
// other Delta must stay within a factor 3 of that envelope. The spread of
// I Delta^3 is also reported: a large spread means the envelope is loose.
struct ShortDistanceScaling {
  std::vector<ShortDistanceReport> reports;
  double envelope_excess = 0.0;  // worst I Delta^3 / (I Delta^3 at the largest Delta)
  double envelope_spread = 0.0;  // worst max/min of I Delta^3 over one order
  bool finite = false;
  bool slope_stable = false;
  bool envelope_ok = false;
  bool passed() const { return finite && slope_stable && envelope_ok; }
};

inline ShortDistanceScaling short_distance_scaling(FieldParams p, const std::vector<double>& z2s,
                                                   const std::vector<int>& orders, int threads = 1,
                                                   const GreenOptions& opt = {}, double tail_tol = 1e-5) {
  if (z2s.empty() || orders.empty()) throw Error(Errc::InvalidArgument, "nothing to probe");
  ShortDistanceScaling s;
  s.finite = true;
  s.slope_stable = true;
  for (int m : orders) {
    std::vector<std::pair<double, double>> scaled;  // (Delta, I Delta^3)
    for (double z2 : z2s) {
      p.z = Complex(p.z.real(), z2);
      ShortDistanceReport r = verify_short_distance(p, 0.0, 0.0, m, threads, opt, tail_tol);
      scaled.push_back({r.delta, r.integral * std::pow(r.delta, 3)});
      s.finite = s.finite && std::isfinite(r.integral) && r.integral > 0.0;
      s.slope_stable = s.slope_stable && r.log_slope != 0.0 && r.log_slope_variation < 0.1;
      s.reports.push_back(r);
    }
    auto ref = *std::max_element(scaled.begin(), scaled.end());
    double lo = ref.second, hi = ref.second;
    for (auto [d, v] : scaled) {
      s.envelope_excess = std::max(s.envelope_excess, v / ref.second);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    s.envelope_spread = std::max(s.envelope_spread, hi / lo);
  }
  s.envelope_ok = s.envelope_excess <= 3.0;
  return s;
}

}  // namespace starkres
