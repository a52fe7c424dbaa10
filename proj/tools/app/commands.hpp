#pragma once

// Subcommand bodies. Each one validates its whole config first, computes,
// and hands finished files to the OutputSet; nothing touches disk here.

#include <spdlog/spdlog.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "app/config.hpp"
#include "app/io.hpp"
#include "starkres/bounds.hpp"
#include "starkres/green2d.hpp"
#include "starkres/propagator.hpp"
#include "starkres/resonance.hpp"
#include "starkres/specfun.hpp"

namespace starkres::app {

struct Context {
  json cfg = json::object();
  int threads = 1;
  std::uint64_t seed = 12345;
};

// Thrown when a check inside a command fails without a library error.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json cx(Complex z) { return json::array({z.real(), z.imag()}); }

inline json field_json(const FieldParams& p) {
  return {{"B", p.B}, {"F", p.F}, {"b", p.b}, {"z", cx(p.z)}};
}

// ---- green ---------------------------------------------------------------

inline void cmd_green(const Context& ctx, OutputSet& out) {
  const json& c = ctx.cfg;
  check_object(c, "config", {"schema_version", "command", "field", "points", "grid", "tol", "representation"});
  FieldParams p = parse_field(c);
  GreenOptions opt;
  opt.tol = get_num(c, "tol", opt.tol, "config");
  require(opt.tol > 0.0, "tol must be positive");
  std::string rep = get_str(c, "representation", "auto", "config");
  require(rep == "auto" || rep == "direct" || rep == "shifted", "representation must be auto, direct or shifted");

  struct Pt {
    double x, y, xp, yp;
  };
  std::vector<Pt> pts;
  require(c.contains("points") != c.contains("grid"), "give exactly one of 'points' or 'grid'");
  if (c.contains("points")) {
    const json& a = c.at("points");
    require(a.is_array() && !a.empty(), "points: expected a non-empty list");
    for (const json& e : a) {
      require(e.is_array() && e.size() == 4, "points: each entry is [x, y, xp, yp]");
      for (const json& v : e) require(v.is_number(), "points: expected numbers");
      pts.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>(), e[3].get<double>()});
    }
  } else {
    const json& g = c.at("grid");
    check_object(g, "grid", {"x", "y", "xp", "yp"});
    double x = get_num(g, "x", 0.0, "grid"), y = get_num(g, "y", 0.0, "grid");
    auto xs = get_values(g, "xp", {}, "grid");
    auto ys = get_values(g, "yp", {}, "grid");
    require(!xs.empty() && !ys.empty(), "grid needs xp and yp");
    for (double xp : xs)
      for (double yp : ys) pts.push_back({x, y, xp, yp});
  }
  for (const Pt& q : pts) require(q.x != q.xp || q.y != q.yp, "points: coincident source and target");
  if (rep == "shifted") {
    for (const Pt& q : pts) require(q.y != q.yp, "points: shifted representation needs y != yp");
  }
  spdlog::info("green: {} points on {} threads", pts.size(), ctx.threads);

  auto vals = parallel_map(pts.size(), ctx.threads, [&](std::size_t i) {
    const Pt& q = pts[i];
    if (rep == "direct") return green_direct(p, q.x, q.y, q.xp, q.yp, opt);
    if (rep == "shifted") return green_shifted(p, q.x, q.y, q.xp, q.yp, opt);
    return green_auto(p, q.x, q.y, q.xp, q.yp, opt);
  });
  Csv csv({"x", "y", "xp", "yp", "re_G", "im_G", "abs_err", "representation", "evals"});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Pt& q = pts[i];
    const GreenValue& v = vals[i];
    csv.row({q.x, q.y, q.xp, q.yp, v.value.real(), v.value.imag(), v.error,
             std::string(representation_name(v.representation)), v.evals});
  }
  out.add("green.csv", csv.str());
}

// ---- propagator ----------------------------------------------------------

inline void propagator_kernel(const Context& ctx, const FieldParams& p, OutputSet& out) {
  const json& c = ctx.cfg;
  json k = c.value("kernel", json::object());
  check_object(k, "kernel", {"x0", "y0", "x", "y", "t"});
  Endpoints e;
  e.x0 = get_num(k, "x0", 0.0, "kernel");
  e.y0 = get_num(k, "y0", 0.0, "kernel");
  e.x = get_num(k, "x", 1.0, "kernel");
  e.y = get_num(k, "y", 0.5, "kernel");
  auto ts = get_values(k, "t", {0.5, 1.0, 1.5}, "kernel");
  Csv csv({"t", "re_K", "im_K", "abs_K", "action", "status"});
  for (double t : ts) {
    e.t = t;
    try {
      KernelValue v = evolution_kernel(p, e);
      csv.row({t, v.value.real(), v.value.imag(), std::abs(v.value), v.action, std::string("ok")});
    } catch (const Error& err) {
      if (err.code() != Errc::CausticTime) throw;
      csv.row({t, std::string(), std::string(), std::string(), std::string(), std::string("caustic")});
    }
  }
  out.add("kernel.csv", csv.str());
}

inline void propagator_hs(const Context& ctx, const FieldParams& p, OutputSet& out) {
  json h = ctx.cfg.value("hs_bound", json::object());
  check_object(h, "hs_bound", {"f", "g", "gamma", "delta", "t", "order"});
  WeightSpec f = parse_weight(h.value("f", json::object()), "hs_bound.f");
  WeightSpec g = parse_weight(h.value("g", json::object()), "hs_bound.g");
  double gamma = get_num(h, "gamma", -0.5, "hs_bound");
  double delta = get_num(h, "delta", -0.45, "hs_bound");
  require(gamma < delta && delta < 0.0, "hs_bound: need gamma < delta < 0");
  HsOptions opt;
  opt.order = get_int(h, "order", opt.order, "hs_bound");
  require(opt.order >= 6, "hs_bound.order must be at least 6");
  opt.threads = ctx.threads;
  auto ts = get_values(h, "t", {}, "hs_bound");
  if (ts.empty())
    for (double t = 0.1; t < 3.0 * detail::kPi; t += 0.05) ts.push_back(t);
  HsBoundReport r = hs_norm_check(p, f, g, gamma, delta, ts, opt);
  Csv csv({"t", "hs_norm", "ratio_to_envelope"});
  for (std::size_t i = 0; i < r.t.size(); ++i) csv.row({r.t[i], r.norm[i], r.ratio[i]});
  out.add("hs_norm.csv", csv.str());
  out.add_json("hs_bound.json", {{"schema_version", kSchemaVersion},
                                 {"field", field_json(p)},
                                 {"gamma", gamma},
                                 {"delta", delta},
                                 {"constant", r.constant},
                                 {"far_constant", r.far_constant},
                                 {"caustic_exponent", r.caustic_exponent},
                                 {"envelope_rate", r.envelope_rate},
                                 {"bounded", r.bounded},
                                 {"exponent_ok", r.exponent_ok},
                                 {"envelope_ok", r.envelope_ok},
                                 {"passed", r.passed()}});
}

inline void propagator_decay(const Context& ctx, const FieldParams& p, OutputSet& out) {
  json d = ctx.cfg.value("resolvent_decay", json::object());
  check_object(d, "resolvent_decay", {"f", "g", "gammas", "lambdas", "tol"});
  WeightSpec f = parse_weight(d.value("f", json::object()), "resolvent_decay.f");
  WeightSpec g = parse_weight(d.value("g", json::object()), "resolvent_decay.g");
  auto gammas = get_values(d, "gammas", {-0.5, -1.0}, "resolvent_decay");
  auto lambdas = get_values(d, "lambdas", {20.0, 40.0, 80.0}, "resolvent_decay");
  for (double gm : gammas) require(gm < 0.0, "resolvent_decay.gammas must be negative");
  ResolventOptions opt;
  opt.tol = get_num(d, "tol", opt.tol, "resolvent_decay");
  require(opt.tol > 0.0, "resolvent_decay.tol must be positive");
  opt.threads = ctx.threads;
  Csv csv({"gamma", "lambda", "hs_norm"});
  json rows = json::array();
  bool all = true;
  for (double gm : gammas) {
    DecayReport r = resolvent_decay_probe(p, f, g, gm, lambdas, opt);
    for (std::size_t i = 0; i < r.lambda.size(); ++i) csv.row({gm, r.lambda[i], r.norm[i]});
    rows.push_back({{"gamma", gm}, {"lambda", r.lambda}, {"hs_norm", r.norm}, {"decreasing", r.decreasing}});
    all = all && r.decreasing;
  }
  out.add("resolvent_decay.csv", csv.str());
  out.add_json("resolvent_decay.json",
               {{"schema_version", kSchemaVersion}, {"field", field_json(p)}, {"sweeps", rows}, {"passed", all}});
}

inline void cmd_propagator(const Context& ctx, OutputSet& out) {
  const json& c = ctx.cfg;
  check_object(c, "config", {"schema_version", "command", "field", "mode", "kernel", "hs_bound", "resolvent_decay"});
  FieldParams p = parse_field(c);
  std::string mode = get_str(c, "mode", "kernel", "config");
  if (mode == "kernel") propagator_kernel(ctx, p, out);
  else if (mode == "hs_bound") propagator_hs(ctx, p, out);
  else if (mode == "resolvent_decay") propagator_decay(ctx, p, out);
  else throw ConfigError("mode must be kernel, hs_bound or resolvent_decay");
}

// ---- resonance / survival ------------------------------------------------

struct ResonanceInputs {
  FieldParams p;
  PotentialSpec pot;
  GridSpec grid;
  EigOptions eig;
  int count = 6;
  std::optional<Complex> target;
};

inline ResonanceInputs parse_resonance_inputs(const Context& ctx) {
  const json& c = ctx.cfg;
  ResonanceInputs in;
  in.p = parse_field(c);
  if (!c.contains("field") || !c.at("field").contains("F")) in.p.F = 0.1;
  in.pot = parse_potential(c);
  in.grid = parse_grid(c);
  in.eig = parse_eig(c, ctx.seed);
  in.count = get_int(c, "count", in.count, "config");
  require(in.count >= 1 && in.count <= 50, "count must be in [1, 50]");
  if (c.contains("target")) in.target = get_complex(c, "target", {}, "config");
  require(in.p.b * in.p.F > 0.0, "resonances need b > 0 and F > 0");
  return in;
}

inline json bound_json(const BoundState& s) {
  return {{"energy", cx(s.energy)}, {"landau_level", s.landau_level}, {"gap", s.landau_gap}, {"radius", s.radius}};
}

inline json resonance_json(const ResonanceResult& r) {
  json ev = json::array();
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
    ev.push_back({{"E", cx(r.eigenvalues[i])}, {"b_drift", r.drift[i]}, {"principal", int(i) == r.principal}});
  json cont = json::array();
  for (Complex z : r.contaminated) cont.push_back(cx(z));
  return {{"b_used", r.b_used},
          {"target", cx(r.target)},
          {"eigenvalues", ev},
          {"contaminated", cont},
          {"principal", cx(r.eigenvalues.at(r.principal))},
          {"b_drift", r.b_drift},
          {"line_tolerance", r.line_tolerance}};
}

inline void cmd_resonance(const Context& ctx, OutputSet& out) {
  check_object(ctx.cfg, "config",
               {"schema_version", "command", "field", "potential", "grid", "eig", "count", "target"});
  ResonanceInputs in = parse_resonance_inputs(ctx);
  in.grid.validate(in.p, in.pot);
  json report = {{"schema_version", kSchemaVersion}, {"field", field_json(in.p)}};
  Complex target;
  if (in.target) {
    target = *in.target;
  } else {
    BoundState s = bound_state(in.p, in.pot, in.grid, in.eig);
    report["bound_state"] = bound_json(s);
    target = s.energy;
  }
  spdlog::info("resonance: N={} target=({}, {})", in.grid.N, target.real(), target.imag());
  ResonanceResult r = resonance_eigenvalues(in.p, in.pot, in.grid, target, in.count, in.eig);
  report["resonances"] = resonance_json(r);
  Csv csv({"re_E", "im_E", "b_drift", "principal"});
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
    csv.row({r.eigenvalues[i].real(), r.eigenvalues[i].imag(), r.drift[i], long(int(i) == r.principal)});
  out.add("eigenvalues.csv", csv.str());
  out.add_json("resonance.json", report);
}

inline void cmd_survival(const Context& ctx, OutputSet& out) {
  const json& c = ctx.cfg;
  check_object(c, "config",
               {"schema_version", "command", "field", "potential", "grid", "eig", "count", "target", "survival", "fit"});
  ResonanceInputs in = parse_resonance_inputs(ctx);
  in.grid.validate(in.p, in.pot);
  SurvivalOptions so;
  if (c.contains("survival")) {
    const json& s = c.at("survival");
    check_object(s, "survival", {"t_end", "dt", "sample_every", "drift_tol", "phase_budget"});
    so.t_end = get_num(s, "t_end", so.t_end, "survival");
    so.dt = get_num(s, "dt", so.dt, "survival");
    so.sample_every = get_num(s, "sample_every", so.sample_every, "survival");
    so.drift_tol = get_num(s, "drift_tol", so.drift_tol, "survival");
    so.phase_budget = get_num(s, "phase_budget", so.phase_budget, "survival");
  }
  require(so.t_end > 0.0 && so.dt > 0.0 && so.sample_every > 0.0, "survival times must be positive");
  require(so.drift_tol > 0.0 && so.phase_budget > 0.0, "survival tolerances must be positive");
  double residual_tol = 1e-3;
  if (c.contains("fit")) {
    check_object(c.at("fit"), "fit", {"residual_tol"});
    residual_tol = get_num(c.at("fit"), "residual_tol", residual_tol, "fit");
  }
  require(residual_tol > 0.0, "fit.residual_tol must be positive");

  BoundState s = bound_state(in.p, in.pot, in.grid, in.eig);
  Complex target = in.target.value_or(s.energy);
  ResonanceResult r = resonance_eigenvalues(in.p, in.pot, in.grid, target, in.count, in.eig);
  Complex E = r.eigenvalues.at(r.principal);
  spdlog::info("survival: principal resonance ({}, {}), propagating to t={}", E.real(), E.imag(), so.t_end);
  SurvivalSeries a = survival_amplitude(in.p, in.pot, in.grid, s.phi, so);
  std::vector<double> prob;
  Csv csv({"t", "abs_A2", "log_abs_A2"});
  for (std::size_t k = 0; k < a.t.size(); ++k) {
    double q = std::norm(a.amplitude[k]);
    prob.push_back(q);
    csv.row({a.t[k], q, std::log(q)});
  }
  WidthFit w = fit_width(a.t, prob, residual_tol);
  double target_width = -2.0 * E.imag();
  double ratio = w.gamma / target_width;
  out.add("survival.csv", csv.str());
  out.add_json("survival.json", {{"schema_version", kSchemaVersion},
                                 {"field", field_json(in.p)},
                                 {"bound_state", bound_json(s)},
                                 {"resonances", resonance_json(r)},
                                 {"gamma_fit", w.gamma},
                                 {"minus_two_im_E", target_width},
                                 {"ratio", ratio},
                                 {"fit_window", {w.window.first, w.window.second}},
                                 {"fit_residual", w.residual},
                                 {"fit_decades", w.decades},
                                 {"norm_drift", a.norm_drift},
                                 {"dt", a.dt}});
}

// ---- verify-bounds -------------------------------------------------------

inline json bound_report_json(const BoundReport& r) {
  json checks = json::array();
  for (const BoundCheck& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
  return {{"delta", r.delta},       {"omega", r.omega},
          {"omega_residual", r.omega_residual}, {"y_rate", r.y_rate},
          {"prefactor", r.prefactor}, {"envelope_sup", r.envelope_sup},
          {"exponent", r.exponent}, {"checks", checks},
          {"passed", r.passed()}};
}

inline void cmd_verify_bounds(const Context& ctx, OutputSet& out) {
  const json& c = ctx.cfg;
  check_object(c, "config", {"schema_version", "command", "field", "probes", "bound_grid", "F_sequence", "short", "tol"});
  FieldParams p = parse_field(c);
  BoundGrid g;
  g.threads = ctx.threads;
  g.green.tol = get_num(c, "tol", g.green.tol, "config");
  require(g.green.tol > 0.0, "tol must be positive");
  if (c.contains("bound_grid")) {
    const json& b = c.at("bound_grid");
    check_object(b, "bound_grid", {"dx", "dy", "x0"});
    g.dx = get_values(b, "dx", g.dx, "bound_grid");
    g.dy = get_values(b, "dy", g.dy, "bound_grid");
    g.x0 = get_num(b, "x0", g.x0, "bound_grid");
  }
  require(g.dx.size() >= 3 && g.dy.size() >= 3, "bound_grid needs at least 3 dx and 3 dy values");
  for (double d : g.dx) require(d >= 1.0, "bound_grid.dx values must be >= 1");
  auto Fs = get_values(c, "F_sequence", {0.2, 0.1, 0.05}, "config");
  for (double F : Fs) require(F > 0.0, "F_sequence values must be positive");
  std::vector<std::string> probes = {"long", "derivative", "trend", "short"};
  if (c.contains("probes")) {
    probes.clear();
    require(c.at("probes").is_array(), "probes: expected a list");
    for (const json& e : c.at("probes")) {
      require(e.is_string(), "probes: expected strings");
      std::string s = e.get<std::string>();
      require(s == "long" || s == "derivative" || s == "trend" || s == "short", "unknown probe '" + s + "'");
      probes.push_back(s);
    }
  }
  std::vector<double> z2s = {0.0, -0.025};
  std::vector<int> orders = {0, 1};
  double tail_tol = 1e-5;
  if (c.contains("short")) {
    const json& s = c.at("short");
    check_object(s, "short", {"z2", "orders", "tail_tol"});
    z2s = get_values(s, "z2", z2s, "short");
    if (s.contains("orders")) {
      orders.clear();
      for (double m : get_values(s, "orders", {}, "short")) {
        require(m == 0.0 || m == 1.0, "short.orders must be 0 or 1");
        orders.push_back(int(m));
      }
    }
    tail_tol = get_num(s, "tail_tol", tail_tol, "short");
    require(tail_tol > 0.0, "short.tail_tol must be positive");
  }
  require(p.F > 0.0, "field.F must be positive for the bound probes");
  for (double z2 : z2s) require(z2 + p.b * p.F > 0.0, "short.z2 must keep Delta positive");
  require(p.z.imag() + p.b * p.F > 0.0, "Delta must be positive");

  json rep = {{"schema_version", kSchemaVersion}, {"field", field_json(p)}};
  bool all = true;
  auto has = [&](const char* n) { return std::find(probes.begin(), probes.end(), n) != probes.end(); };
  if (has("long")) {
    spdlog::info("verify-bounds: long-distance probe");
    BoundReport r = verify_long_distance_bound(p, g);
    rep["long_distance"] = bound_report_json(r);
    all = all && r.passed();
  }
  if (has("derivative")) {
    spdlog::info("verify-bounds: derivative probe");
    DerivativeBoundReport r = verify_derivative_bound(p, g);
    json j = bound_report_json(r.report);
    j["fitted_offset"] = r.fitted_offset;
    j["c3"] = r.c3;
    rep["derivative"] = j;
    all = all && r.report.passed();
  }
  if (has("trend")) {
    spdlog::info("verify-bounds: F trends");
    BoundGrid gx = g;
    OmegaTrend ot = omega_trend(p, Fs, gx);
    PrefactorTrend pt = derivative_prefactor_trend(p, Fs, gx);
    bool slope_ok = pt.slope >= -2.0;
    rep["omega_trend"] = {{"F", ot.F}, {"omega", ot.omega}, {"extrapolated", ot.extrapolated},
                          {"omega_f0", ot.omega_f0}, {"relative_gap", ot.relative_gap}};
    rep["prefactor_trend"] = {{"F", pt.F}, {"prefactor", pt.prefactor}, {"slope", pt.slope},
                              {"no_faster_than_F_minus_2", slope_ok}};
    all = all && slope_ok;
  }
  if (has("short")) {
    spdlog::info("verify-bounds: short-distance probe");
    ShortDistanceScaling s = short_distance_scaling(p, z2s, orders, ctx.threads, g.green, tail_tol);
    json rows = json::array();
    for (const ShortDistanceReport& r : s.reports)
      rows.push_back({{"order", r.order}, {"delta", r.delta}, {"integral", r.integral},
                      {"scaled", r.integral * std::pow(r.delta, 3)}, {"log_slope", r.log_slope},
                      {"log_slope_variation", r.log_slope_variation}, {"evaluations", r.evaluations}});
    rep["short_distance"] = {{"probes", rows},
                             {"envelope_excess", s.envelope_excess},
                             {"envelope_spread", s.envelope_spread},
                             {"slope_stable", s.slope_stable},
                             {"envelope_ok", s.envelope_ok},
                             {"passed", s.passed()}};
    all = all && s.passed();
  }
  rep["passed"] = all;
  out.add_json("bounds.json", rep);
}

// ---- selftest ------------------------------------------------------------

inline bool cmd_selftest(const Context& ctx, OutputSet& out) {
  check_object(ctx.cfg, "config", {"schema_version", "command"});
  json checks = json::array();
  bool all = true;
  auto check = [&](const std::string& name, double value, double want, double tol) {
    double err = std::abs(value - want);
    bool ok = err <= tol;
    checks.push_back({{"name", name}, {"value", value}, {"expected", want}, {"error", err}, {"passed", ok}});
    all = all && ok;
  };
  // closed forms of the Kummer functions at seeded random points
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> unit(0.2, 3.0);
  for (int k = 0; k < 4; ++k) {
    double t = unit(rng), a = unit(rng);
    check("kummer_m_exponential", std::abs(kummer_m(1.0, 2.0, t) - (std::exp(t) - 1.0) / t) / std::exp(t), 0.0, 1e-13);
    check("kummer_u_power", std::abs(kummer_u(a, a + 1.0, t) - std::pow(t, -a)) / std::pow(t, -a), 0.0, 1e-10);
  }
  // synthetic survival series with a known width
  std::vector<double> ts, pr;
  for (int k = 0; k <= 400; ++k) {
    double t = 0.1 * k;
    ts.push_back(t);
    pr.push_back(std::exp(-0.2 * t) * (1.0 + 0.3 * std::exp(-t)));
  }
  check("synthetic_width", fit_width(ts, pr).gamma, 0.2, 1e-3);
  // kernel modulus law
  FieldParams p{1.0, 0.05, 1.0, {0.5, 0.0}};
  Endpoints e{0.0, 0.0, 1.3, -0.4, 0.7};
  check("kernel_modulus", std::abs(evolution_kernel(p, e).value), p.B / (4.0 * detail::kPi * std::sin(p.B * 0.7)), 1e-14);
  // two representations of one Green value
  GreenValue d = green_direct(p, 0.0, 0.0, 2.0, 1.5), s = green_shifted(p, 0.0, 0.0, 2.0, 1.5);
  check("green_cross_representation", std::abs(d.value - s.value), 0.0, 10.0 * (d.error + s.error) + 1e-12);
  // pole spacing
  PoleSet ps = pole_locations(p, 3);
  check("pole_spacing", ps.k1[1] - ps.k1[0], 2.0 * p.B * p.B / p.F, 1e-9);
  out.add_json("selftest.json", {{"schema_version", kSchemaVersion}, {"checks", checks}, {"passed", all}});
  return all;
}

}  // namespace starkres::app
