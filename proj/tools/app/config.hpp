#pragma once

// JSON run configuration: strict key checking and range validation before any
// computation starts.

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "starkres/fiber.hpp"
#include "starkres/propagator.hpp"
#include "starkres/resonance.hpp"

namespace starkres::app {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(path + ": unknown key '" + it.key() + "'");
  }
}

inline double get_num(const json& j, const char* key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path + "." + key + ": not finite");
  return d;
}

inline int get_int(const json& j, const char* key, int fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

inline std::string get_str(const json& j, const char* key, const std::string& fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(path + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

inline Complex get_complex(const json& j, const char* key, Complex fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(path + "." + key + ": expected a number or [re, im]");
}

// A list of numbers, or a range {"from", "to", "n"} with n >= 1 points.
inline std::vector<double> get_values(const json& j, const char* key, std::vector<double> fallback,
                                      const std::string& path) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  const std::string here = path + "." + key;
  std::vector<double> out;
  if (v.is_array()) {
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(here + ": expected numbers");
      out.push_back(e.get<double>());
    }
  } else if (v.is_object()) {
    check_object(v, here, {"from", "to", "n"});
    require(v.contains("from") && v.contains("to") && v.contains("n"), here + ": range needs from, to, n");
    double a = get_num(v, "from", 0.0, here), b = get_num(v, "to", 0.0, here);
    int n = get_int(v, "n", 1, here);
    require(n >= 1 && n <= 1000000, here + ".n out of range");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  } else {
    throw ConfigError(here + ": expected a list or a range");
  }
  require(!out.empty(), here + ": empty");
  return out;
}

inline FieldParams parse_field(const json& root) {
  FieldParams p;
  if (!root.contains("field")) return p;
  const json& j = root.at("field");
  check_object(j, "field", {"B", "F", "b", "z"});
  p.B = get_num(j, "B", p.B, "field");
  p.F = get_num(j, "F", p.F, "field");
  p.b = get_num(j, "b", p.b, "field");
  p.z = get_complex(j, "z", p.z, "field");
  require(p.B > 0.0, "field.B must be positive");
  require(p.F >= 0.0, "field.F must be nonnegative");
  return p;
}

inline PotentialSpec parse_potential(const json& root) {
  PotentialSpec v;
  if (!root.contains("potential")) return v;
  const json& j = root.at("potential");
  check_object(j, "potential", {"V0", "xc", "yc", "sigma"});
  v.V0 = get_num(j, "V0", v.V0, "potential");
  v.xc = get_num(j, "xc", v.xc, "potential");
  v.yc = get_num(j, "yc", v.yc, "potential");
  v.sigma = get_num(j, "sigma", v.sigma, "potential");
  require(v.sigma > 0.0, "potential.sigma must be positive");
  return v;
}

inline GridSpec parse_grid(const json& root) {
  GridSpec g;
  if (!root.contains("grid")) return g;
  const json& j = root.at("grid");
  check_object(j, "grid", {"L", "N"});
  g.L = get_num(j, "L", g.L, "grid");
  g.N = get_int(j, "N", g.N, "grid");
  require(g.N >= 64, "grid.N must be at least 64");
  require(g.L > 0.0, "grid.L must be positive");
  return g;
}

inline EigOptions parse_eig(const json& root, std::uint64_t seed) {
  EigOptions e;
  e.seed = seed;
  if (!root.contains("eig")) return e;
  const json& j = root.at("eig");
  check_object(j, "eig", {"krylov", "max_restarts", "tol"});
  e.krylov = get_int(j, "krylov", e.krylov, "eig");
  e.max_restarts = get_int(j, "max_restarts", e.max_restarts, "eig");
  e.tol = get_num(j, "tol", e.tol, "eig");
  require(e.krylov >= 8, "eig.krylov must be at least 8");
  require(e.max_restarts >= 0, "eig.max_restarts must be nonnegative");
  require(e.tol > 0.0, "eig.tol must be positive");
  return e;
}

inline WeightSpec parse_weight(const json& j, const std::string& path) {
  check_object(j, path, {"kind", "cx", "cy", "width", "amplitude"});
  WeightSpec w;
  std::string kind = get_str(j, "kind", "gaussian", path);
  if (kind == "gaussian") w.kind = WeightSpec::Kind::Gaussian;
  else if (kind == "box") w.kind = WeightSpec::Kind::Box;
  else throw ConfigError(path + ".kind: expected 'gaussian' or 'box'");
  w.cx = get_num(j, "cx", w.cx, path);
  w.cy = get_num(j, "cy", w.cy, path);
  w.width = get_num(j, "width", 0.5, path);
  w.amplitude = get_num(j, "amplitude", w.amplitude, path);
  require(w.width > 0.0, path + ".width must be positive");
  return w;
}

inline json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("schema_version")) {
    if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kSchemaVersion)
      throw ConfigError("unsupported schema_version");
  }
  return j;
}

}  // namespace starkres::app
