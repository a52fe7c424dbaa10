#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

namespace starkres {

struct QuadResult {
  std::complex<double> value{0.0, 0.0};
  double error = 0.0;
  long evals = 0;
  bool converged = false;
};

namespace detail {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Gauss-Kronrod 7/15 nodes on [-1,1]
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  std::complex<double> value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::complex<double> fc = f(c);
  std::complex<double> rk = fc * kWgk[7];
  std::complex<double> rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    std::complex<double> s = f(c - dx) + f(c + dx);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod 7/15 over consecutive panels [bp[i], bp[i+1]].
template <class F>
QuadResult integrate_adaptive(F&& f, const std::vector<double>& breakpoints, double abs_tol,
                              double rel_tol, long max_evals) {
  std::priority_queue<detail::Panel> heap;
  QuadResult r;
  std::complex<double> total{0.0, 0.0};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    auto p = detail::gk15(f, breakpoints[i], breakpoints[i + 1]);
    r.evals += 15;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  while (!heap.empty()) {
    if (err <= std::max(abs_tol, rel_tol * std::abs(total))) {
      r.converged = true;
      break;
    }
    if (r.evals + 30 > max_evals) break;
    detail::Panel p = heap.top();
    heap.pop();
    double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b) || (p.b - p.a) < 1e-13 * std::max(1.0, std::abs(mid))) {
      heap.push(p);  // cannot split further
      break;
    }
    auto l = detail::gk15(f, p.a, mid);
    auto rr = detail::gk15(f, mid, p.b);
    r.evals += 30;
    total += l.value + rr.value - p.value;
    err += l.error + rr.error - p.error;
    heap.push(l);
    heap.push(rr);
  }
  // recompute sums to shed accumulated rounding
  std::complex<double> v{0.0, 0.0};
  double e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  r.value = v;
  r.error = e;
  if (!r.converged) r.converged = e <= std::max(abs_tol, rel_tol * std::abs(v));
  return r;
}

}  // namespace starkres
