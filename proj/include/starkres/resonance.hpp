#pragma once

// Complex-translated crossed-field Hamiltonian on a Dirichlet box,
//   H(F, ib) = (-i d_x + B y)^2 - d_y^2 - F (x + ib) + V(x + ib, y),
// its eigenvalues near an impurity level, survival amplitudes and width fits.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "starkres/errors.hpp"
#include "starkres/fiber.hpp"
#include "starkres/quadrature.hpp"

namespace starkres {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using StateVector = Eigen::VectorXcd;

// Gaussian impurity V0 exp(-((x-xc)^2 + (y-yc)^2) / (2 sigma^2)); entire in x.
struct PotentialSpec {
  double V0 = -0.5;
  double xc = 0.0, yc = 0.0;
  double sigma = 1.0;

  Complex operator()(Complex x, double y) const {
    Complex dx = x - xc;
    double dy = y - yc;
    return V0 * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  }
  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(V0) || !std::isfinite(xc) || !std::isfinite(yc))
      throw Error(Errc::InvalidArgument, "bad potential");
  }
};

// N x N interior points on [-L, L]^2, zero outside. Index i*N + j holds
// (x_i, y_j).
struct GridSpec {
  double L = 14.0;
  int N = 256;

  double step() const { return 2.0 * L / (N + 1); }
  double coord(int i) const { return -L + (i + 1) * step(); }
  int size() const { return N * N; }

  void validate(const FieldParams& p, const PotentialSpec& pot) const {
    if (N < 64) throw Error(Errc::InvalidArgument, "N must be at least 64");
    double need = 6.0 * std::max(1.0 / std::sqrt(p.B), pot.sigma);
    if (!(L >= need)) throw Error(Errc::InvalidArgument, "box half-width below 6 magnetic lengths / widths");
    double h = step();
    if (p.B * h * h > 0.1) throw Error(Errc::GridTooCoarse, "B h^2 exceeds 0.1");
  }
};

// (-i d_x + By)^2 enters only through the Peierls phase e^{iByh} on the x
// hops, which keeps the discrete operator gauge covariant. For b = 0 it is
// Hermitian.
inline SparseMatrix build_hamiltonian(const FieldParams& p, const PotentialSpec& pot, const GridSpec& g) {
  p.validate();
  pot.validate();
  g.validate(p, pot);
  const int N = g.N;
  const double h = g.step(), ih2 = 1.0 / (h * h);
  const Complex shift(0.0, p.b);
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(5 * static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i) {
    const double x = g.coord(i);
    for (int j = 0; j < N; ++j) {
      const double y = g.coord(j);
      const int k = i * N + j;
      Complex d = 4.0 * ih2 - p.F * (x + shift);
      if (pot.V0 != 0.0) d += pot(x + shift, y);
      t.emplace_back(k, k, d);
      if (i + 1 < N) {
        Complex ph = std::polar(1.0, p.B * y * h);
        t.emplace_back(k, k + N, -ph * ih2);
        t.emplace_back(k + N, k, -std::conj(ph) * ih2);
      }
      if (j + 1 < N) {
        t.emplace_back(k, k + 1, -ih2);
        t.emplace_back(k + 1, k, -ih2);
      }
    }
  }
  SparseMatrix H(g.size(), g.size());
  H.setFromTriplets(t.begin(), t.end());
  H.makeCompressed();
  return H;
}

// sparse LU of H - z, with the failure mapped to SolverFailure
class ShiftedSolver {
 public:
  ShiftedSolver(const SparseMatrix& H, Complex z) {
    SparseMatrix A = H;
    for (int k = 0; k < A.rows(); ++k) A.coeffRef(k, k) -= z;
    lu_.analyzePattern(A);
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success) throw Error(Errc::SolverFailure, "sparse LU failed");
  }
  StateVector solve(const StateVector& b) const {
    StateVector x = lu_.solve(b);
    if (!x.allFinite()) throw Error(Errc::SolverFailure, "non-finite solve");
    return x;
  }

 private:
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

struct EigOptions {
  int krylov = 60;
  int max_restarts = 20;
  double tol = 1e-9;
  std::uint64_t seed = 12345;
};

struct EigenPairs {
  std::vector<Complex> values;
  std::vector<StateVector> vectors;
  std::vector<double> residuals;
};

namespace detail {

// Reproducible start vector; raw engine output only, so it is the same on
// every standard library.
inline StateVector start_vector(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  StateVector v(n);
  const double scale = 1.0 / static_cast<double>(std::numeric_limits<std::uint64_t>::max());
  for (int k = 0; k < n; ++k) {
    double a = gen() * scale - 0.5, b = gen() * scale - 0.5;
    v[k] = Complex(a, b);
  }
  return v / v.norm();
}

}  // namespace detail

// Up to `count` eigenpairs of H nearest sigma: Arnoldi on (H - sigma)^{-1}
// with explicit restarts from the unconverged Ritz vectors. Members of a
// dense cluster may never converge one by one; when restarts run out the
// converged pairs are returned, and SolverFailure only if there are none.
inline EigenPairs shift_invert_eigs(const SparseMatrix& H, Complex sigma, int count,
                                    const EigOptions& opt = {}) {
  const int n = static_cast<int>(H.rows());
  if (count < 1 || count > n) throw Error(Errc::InvalidArgument, "bad eigenvalue count");
  ShiftedSolver solver(H, sigma);
  const int m = std::min(n, std::max(opt.krylov, 2 * count + 10));
  StateVector v0 = detail::start_vector(n, opt.seed);
  EigenPairs best;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    Eigen::MatrixXcd V(n, m + 1);
    Eigen::MatrixXcd Hm = Eigen::MatrixXcd::Zero(m + 1, m);
    V.col(0) = v0 / v0.norm();
    int used = m;
    for (int j = 0; j < m; ++j) {
      StateVector w = solver.solve(V.col(j));
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXcd c = V.leftCols(j + 1).adjoint() * w;
        w -= V.leftCols(j + 1) * c;
        Hm.col(j).head(j + 1) += c;
      }
      double hn = w.norm();
      Hm(j + 1, j) = hn;
      if (hn < 1e-14 * Hm.col(j).norm()) {
        used = j + 1;
        break;
      }
      V.col(j + 1) = w / hn;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Hm.topLeftCorner(used, used));
    std::vector<int> order(used);
    std::iota(order.begin(), order.end(), 0);
    const auto& th = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (std::abs(th[a]) != std::abs(th[b])) return std::abs(th[a]) > std::abs(th[b]);
      if (th[a].real() != th[b].real()) return th[a].real() < th[b].real();
      return th[a].imag() < th[b].imag();
    });
    const int want = std::min(count, used);
    EigenPairs all, good;
    v0 = StateVector::Zero(n);
    for (int r = 0; r < want; ++r) {
      StateVector x = V.leftCols(used) * es.eigenvectors().col(order[r]);
      x /= x.norm();
      Complex E = sigma + 1.0 / th[order[r]];
      double res = (H * x - E * x).norm();
      all.values.push_back(E);
      all.vectors.push_back(x);
      all.residuals.push_back(res);
      if (res <= opt.tol * std::max(1.0, std::abs(E))) {
        good.values.push_back(E);
        good.vectors.push_back(x);
        good.residuals.push_back(res);
      } else {
        v0 += x;
      }
    }
    if (static_cast<int>(good.values.size()) == want || used < m) return all;
    if (good.values.size() >= best.values.size()) best = std::move(good);
  }
  if (best.values.empty()) throw Error(Errc::SolverFailure, "shift-invert Arnoldi did not converge");
  return best;
}

struct BoundState {
  Complex energy;
  StateVector phi;
  double radius = 0.0;        // rms distance from the impurity centre
  double landau_level = 0.0;  // <LLL|H_L|LLL> on the same grid
  double landau_gap = 0.0;
};

// Lowest Landau state e^{-B r^2/4 - iBxy/2} at the origin, sampled on the
// grid and normalised.
inline StateVector landau_state(const GridSpec& g, double B) {
  StateVector v(g.size());
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      double x = g.coord(i), y = g.coord(j);
      v[i * g.N + j] = std::exp(-0.25 * B * (x * x + y * y)) * std::polar(1.0, -0.5 * B * x * y);
    }
  return v / v.norm();
}

// Impurity level of H(0) = H_L + V pulled out of the lowest Landau level.
// The level is measured against the discrete Landau level, not against B.
inline BoundState bound_state(FieldParams p, const PotentialSpec& pot, const GridSpec& g,
                              const EigOptions& opt = {}) {
  p.F = 0.0;
  p.b = 0.0;
  if (pot.V0 == 0.0) throw Error(Errc::NoDetachedLevel, "no impurity");
  PotentialSpec none = pot;
  none.V0 = 0.0;
  StateVector lll = landau_state(g, p.B);
  double level = lll.dot(build_hamiltonian(p, none, g) * lll).real();
  SparseMatrix H = build_hamiltonian(p, pot, g);
  auto e = shift_invert_eigs(H, level + pot.V0, 1, opt);
  BoundState s;
  s.energy = Complex(e.values[0].real(), 0.0);
  s.landau_level = level;
  s.landau_gap = level - s.energy.real();
  if (s.landau_gap < 1e-3) throw Error(Errc::NoDetachedLevel, "level stays in the Landau cluster");
  // fix the global phase: largest component real positive
  StateVector phi = e.vectors[0];
  Eigen::Index at;
  phi.cwiseAbs().maxCoeff(&at);
  phi *= std::polar(1.0, -std::arg(phi[at]));
  s.phi = phi / phi.norm();
  double r2 = 0.0;
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      double dx = g.coord(i) - pot.xc, dy = g.coord(j) - pot.yc;
      r2 += std::norm(s.phi[i * g.N + j]) * (dx * dx + dy * dy);
    }
  s.radius = std::sqrt(r2);
  return s;
}

struct ResonanceResult {
  std::vector<Complex> eigenvalues;   // resonances, strip-filtered
  std::vector<double> drift;          // per resonance, over the b sweep
  std::vector<Complex> contaminated;  // too close to the essential line
  double b_used = 0.0;
  Complex target{0.0, 0.0};
  int principal = -1;                 // index into eigenvalues
  double b_drift = 0.0;               // drift of the principal resonance
  double line_tolerance = 0.0;        // spread of the discretised essential line
  double gamma_fit = 0.0;
  std::pair<double, double> fit_window{0.0, 0.0};
  double fit_residual = 0.0;
};

// Eigenvalues of H(F, ib) near target, at b, 1.25b and 1.5b. Eigenvalues that
// ride along with the line Im z = -bF as b changes are the discretised
// essential spectrum; their largest distance from the line is the tolerance,
// and anything within twice of it is reported as contaminated.
inline ResonanceResult resonance_eigenvalues(const FieldParams& p, const PotentialSpec& pot,
                                             const GridSpec& g, Complex target, int count = 6,
                                             const EigOptions& opt = {}) {
  if (!(p.b * p.F > 0.0)) throw Error(Errc::InvalidArgument, "need bF > 0");
  const double scales[3] = {1.0, 1.25, 1.5};
  std::vector<std::vector<Complex>> sets;
  for (double s : scales) {
    FieldParams q = p;
    q.b = p.b * s;
    sets.push_back(shift_invert_eigs(build_hamiltonian(q, pot, g), target, count, opt).values);
  }
  const double line = -p.b * p.F, move = 0.25 * p.b * p.F;
  auto nearest = [](const std::vector<Complex>& set, Complex e) {
    double best = std::numeric_limits<double>::infinity();
    for (Complex c : set) best = std::min(best, std::abs(c - e));
    return best;
  };
  ResonanceResult r;
  r.b_used = p.b;
  r.target = target;
  std::vector<double> drift;
  double tol = 0.0;
  for (Complex e : sets[0]) {
    double d = std::max(nearest(sets[1], e), nearest(sets[2], e));
    drift.push_back(d);
    // tracking the line: moved by a sizeable fraction of the line shift
    if (nearest(sets[1], e + Complex(0.0, -move)) < 0.25 * move && d > 0.5 * move)
      tol = std::max(tol, std::abs(e.imag() - line));
  }
  r.line_tolerance = tol;
  for (std::size_t k = 0; k < sets[0].size(); ++k) {
    Complex e = sets[0][k];
    bool in_strip = e.imag() > line && e.imag() <= 1e-8;
    if (!in_strip) continue;
    if (std::abs(e.imag() - line) <= 2.0 * tol || drift[k] > 0.5 * move) {
      r.contaminated.push_back(e);
      continue;
    }
    r.eigenvalues.push_back(e);
    r.drift.push_back(drift[k]);
  }
  if (r.eigenvalues.empty())
    throw Error(Errc::EssentialContamination, "every eigenvalue near the target sits on the essential line");
  // the longest-lived resonance governs the late-time decay
  r.principal = 0;
  for (std::size_t k = 1; k < r.eigenvalues.size(); ++k)
    if (std::abs(r.eigenvalues[k].imag()) < std::abs(r.eigenvalues[r.principal].imag()))
      r.principal = static_cast<int>(k);
  r.b_drift = r.drift[r.principal];
  return r;
}

struct SurvivalSeries {
  std::vector<double> t;
  std::vector<Complex> amplitude;
  double norm_drift = 0.0;  // largest | |psi| - 1 | seen
  double dt = 0.0;
};

struct SurvivalOptions {
  double t_end = 140.0;
  double dt = 0.05;
  double sample_every = 1.0;
  double drift_tol = 1e-8;     // per unit time
  double phase_budget = 0.1;   // dt times the energy scale of phi
};

// A(t) = (phi, e^{-itH(F)} phi) by Crank-Nicolson on the b = 0 operator.
// The truncated operator is bounded, so the scheme is unitary; the step is
// checked against the energy content of phi instead of the full spectrum.
inline SurvivalSeries survival_amplitude(FieldParams p, const PotentialSpec& pot, const GridSpec& g,
                                         const StateVector& phi, const SurvivalOptions& opt = {}) {
  p.b = 0.0;
  if (std::abs(phi.norm() - 1.0) > 1e-10) throw Error(Errc::InvalidArgument, "phi must be normalised");
  if (!(opt.dt > 0.0) || !(opt.t_end > 0.0)) throw Error(Errc::InvalidArgument, "bad time grid");
  SparseMatrix H = build_hamiltonian(p, pot, g);
  StateVector Hphi = H * phi;
  double mean = phi.dot(Hphi).real();
  double spread = std::sqrt(std::max(0.0, Hphi.squaredNorm() - mean * mean));
  if (opt.dt * (std::abs(mean) + spread) > opt.phase_budget)
    throw Error(Errc::StepTooLarge, "time step too coarse for the energy content of phi");

  const Complex a(0.0, 0.5 * opt.dt);
  SparseMatrix Minus = -a * H;
  for (int k = 0; k < Minus.rows(); ++k) Minus.coeffRef(k, k) += 1.0;
  // (1 + aH) psi' = (1 - aH) psi, and 1 + aH = a (H + 1/a)
  ShiftedSolver solver(H, -1.0 / a);
  const long steps = std::lround(opt.t_end / opt.dt);
  const long every = std::max(1L, std::lround(opt.sample_every / opt.dt));
  SurvivalSeries s;
  s.dt = opt.dt;
  StateVector psi = phi;
  for (long n = 0; n <= steps; ++n) {
    if (n % every == 0) {
      s.t.push_back(n * opt.dt);
      s.amplitude.push_back(phi.dot(psi));
    }
    if (n == steps) break;
    psi = solver.solve(Minus * psi) / a;
    s.norm_drift = std::max(s.norm_drift, std::abs(psi.norm() - 1.0));
  }
  if (s.norm_drift > opt.drift_tol * std::max(1.0, opt.t_end))
    throw Error(Errc::StepTooLarge, "norm drift above tolerance");
  return s;
}

struct WidthFit {
  double gamma = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  double residual = 0.0;
  double decades = 0.0;  // decay of |A|^2 across the window, in decades
};

// Least-squares slope of log|A|^2 over the widest late-time window whose
// largest deviation from the line stays below residual_tol.
inline WidthFit fit_width(const std::vector<double>& t, const std::vector<double>& prob,
                          double residual_tol = 1e-3, std::size_t min_points = 8) {
  const std::size_t n = t.size();
  if (prob.size() != n || n < min_points) throw Error(Errc::InvalidArgument, "series too short");
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(prob[k] > 0.0)) throw Error(Errc::InvalidArgument, "nonpositive probability");
    y[k] = std::log(prob[k]);
  }
  for (std::size_t lo = 0; lo + min_points <= n; ++lo) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = n - lo;
    for (std::size_t k = lo; k < n; ++k) sx += t[k], sy += y[k], sxx += t[k] * t[k], sxy += t[k] * y[k];
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double icpt = (sy - slope * sx) / m;
    double worst = 0.0;
    for (std::size_t k = lo; k < n; ++k) worst = std::max(worst, std::abs(y[k] - icpt - slope * t[k]));
    if (worst <= residual_tol) {
      WidthFit f;
      f.gamma = -slope;
      f.window = {t[lo], t[n - 1]};
      f.residual = worst;
      f.decades = (y[lo] - y[n - 1]) / std::log(10.0);
      return f;
    }
  }
  throw Error(Errc::NoLinearRegime, "no late-time window is log-linear");
}

inline WidthFit fit_width(const SurvivalSeries& s, double residual_tol = 1e-3) {
  std::vector<double> prob;
  for (Complex a : s.amplitude) prob.push_back(std::norm(a));
  return fit_width(s.t, prob, residual_tol);
}

// Q_eta(lambda) = (2 pi i)^{-1} [(psi, R(lambda + i eta) phi) - (psi, R(lambda - i eta) phi)]
// for the b = 0 operator; real and nonnegative when psi = phi.
inline Complex spectral_density(FieldParams p, const PotentialSpec& pot, const GridSpec& g,
                                const StateVector& psi, const StateVector& phi, double lambda,
                                double eta) {
  if (!(eta > 0.0)) throw Error(Errc::InvalidArgument, "eta must be positive");
  p.b = 0.0;
  SparseMatrix H = build_hamiltonian(p, pot, g);
  StateVector up = ShiftedSolver(H, Complex(lambda, eta)).solve(phi);
  StateVector dn = ShiftedSolver(H, Complex(lambda, -eta)).solve(phi);
  return (psi.dot(up) - psi.dot(dn)) / Complex(0.0, 2.0 * detail::kPi);
}

// Lanczos tridiagonalisation of the b = 0 operator from phi. The continued
// fraction gives (phi, (H - z)^{-1} phi) for any z, so whole density sweeps
// cost one Krylov run.
class SpectralLanczos {
 public:
  SpectralLanczos(FieldParams p, const PotentialSpec& pot, const GridSpec& g, const StateVector& phi,
                  int steps = 600) {
    p.b = 0.0;
    SparseMatrix H = build_hamiltonian(p, pot, g);
    norm2_ = phi.squaredNorm();
    StateVector q = phi / std::sqrt(norm2_), prev = StateVector::Zero(phi.size());
    double beta = 0.0;
    for (int k = 0; k < steps; ++k) {
      StateVector w = H * q - beta * prev;
      double a = q.dot(w).real();
      w -= a * q;
      alpha_.push_back(a);
      beta = w.norm();
      if (beta < 1e-12) break;
      beta_.push_back(beta);
      prev = q;
      q = w / beta;
    }
  }

  Complex resolvent(Complex z) const {
    Complex f = 0.0;
    for (std::size_t k = alpha_.size(); k-- > 0;) {
      double b2 = k < beta_.size() ? beta_[k] * beta_[k] : 0.0;
      f = 1.0 / (alpha_[k] - z - b2 * f);
    }
    return norm2_ * f;
  }

  double density(double lambda, double eta) const {
    return resolvent(Complex(lambda, eta)).imag() / detail::kPi;
  }

  // Gershgorin interval of the tridiagonal matrix; holds the whole measure
  std::pair<double, double> range() const {
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 0; k < alpha_.size(); ++k) {
      double r = (k < beta_.size() ? beta_[k] : 0.0) + (k > 0 ? beta_[k - 1] : 0.0);
      lo = std::min(lo, alpha_[k] - r);
      hi = std::max(hi, alpha_[k] + r);
    }
    return {lo, hi};
  }

 private:
  std::vector<double> alpha_, beta_;
  double norm2_ = 1.0;
};

// int Q_eta(l) e^{-itl} dl over [lo, hi] by composite Gauss-Legendre with
// panels narrower than eta.
inline Complex density_fourier(const SpectralLanczos& s, double eta, double t, double lo, double hi) {
  const double width = std::min(0.2 * eta, 0.2 / std::max(1.0, std::abs(t)));
  const long panels = std::max(1L, std::lround(std::ceil((hi - lo) / width)));
  const double h = (hi - lo) / panels;
  static constexpr double xg[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  Complex sum = 0.0;
  for (long k = 0; k < panels; ++k) {
    double c = lo + (k + 0.5) * h;
    for (int i = 0; i < 3; ++i) {
      double l = c + 0.5 * h * xg[i];
      sum += 0.5 * h * wg[i] * s.density(l, eta) * std::polar(1.0, -t * l);
    }
  }
  return sum;
}

struct EigenfreeReport {
  std::vector<double> re_z;               // probe centres
  std::vector<int> strip_eigenvalues;     // eigenvalues found in 0 >= Im >= -aF near each centre
  std::vector<double> smallest_singular;  // sigma_min(H - z) at z = re - i aF/2
  bool no_eigenvalues = false;
  bool singular_nondecreasing = false;
  double singular_floor = 0.0;  // smallest sigma_min seen
};

namespace detail {

// smallest singular value of A = H - z by inverse iteration on A^* A, using
// an LU of A and one of A^*.
inline double smallest_singular(const SparseMatrix& H, Complex z, std::uint64_t seed, int iters = 30) {
  ShiftedSolver a(H, z);
  SparseMatrix Ha = H.adjoint();
  ShiftedSolver ah(Ha, std::conj(z));
  StateVector v = start_vector(static_cast<int>(H.rows()), seed);
  double est = 0.0;
  for (int k = 0; k < iters; ++k) {
    StateVector w = ah.solve(a.solve(v));
    double nrm = w.norm();
    double next = 1.0 / std::sqrt(nrm);
    v = w / nrm;
    if (k > 3 && std::abs(next - est) < 1e-10 * next) return next;
    est = next;
  }
  return est;
}

}  // namespace detail

// No eigenvalue of H(F, ib) with large |Re z| in the strip 0 >= Im z >= -aF,
// and the resolvent stays bounded along Im z = -aF/2.
inline EigenfreeReport large_lambda_eigenfree_check(const FieldParams& p, const PotentialSpec& pot,
                                                    const GridSpec& g, double strip_a,
                                                    const std::vector<double>& centres,
                                                    const std::vector<double>& singular_centres,
                                                    const EigOptions& opt = {}) {
  if (!(strip_a * p.F < p.b * p.F)) throw Error(Errc::InvalidArgument, "need aF < bF");
  SparseMatrix H = build_hamiltonian(p, pot, g);
  EigenfreeReport r;
  r.re_z = centres;
  r.no_eigenvalues = true;
  for (double c : centres) {
    auto e = shift_invert_eigs(H, Complex(c, -0.5 * strip_a * p.F), 4, opt);
    int inside = 0;
    for (Complex v : e.values)
      if (v.imag() <= 0.0 && v.imag() >= -strip_a * p.F) ++inside;
    r.strip_eigenvalues.push_back(inside);
    if (inside > 0) r.no_eigenvalues = false;
  }
  r.singular_nondecreasing = true;
  for (double c : singular_centres) {
    r.smallest_singular.push_back(detail::smallest_singular(H, Complex(c, -0.5 * strip_a * p.F), opt.seed));
    std::size_t k = r.smallest_singular.size();
    if (k > 1 && r.smallest_singular[k - 1] < r.smallest_singular[k - 2] * (1.0 - 1e-6))
      r.singular_nondecreasing = false;
  }
  if (!r.smallest_singular.empty())
    r.singular_floor = *std::min_element(r.smallest_singular.begin(), r.smallest_singular.end());
  return r;
}

}  // namespace starkres
