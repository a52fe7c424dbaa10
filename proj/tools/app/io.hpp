#pragma once

// Output side: RFC-4180 CSV, JSON reports, SHA-256 digests and the run
// manifest. Every file goes through OutputSet so the manifest lists exactly
// what was written.

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace starkres::app {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// 17 significant digits, so a reader gets the same double back
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

class Csv {
 public:
  using Cell = std::variant<std::string, double, long>;

  explicit Csv(std::vector<std::string> header) : width_(header.size()) { line(header); }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
    std::vector<std::string> out;
    for (const Cell& c : cells) {
      if (auto* s = std::get_if<std::string>(&c)) out.push_back(*s);
      else if (auto* d = std::get_if<double>(&c)) out.push_back(fmt_double(*d));
      else out.push_back(std::to_string(std::get<long>(c)));
    }
    line(out);
    ++rows_;
  }

  std::size_t rows() const { return rows_; }
  const std::string& str() const { return text_; }

 private:
  void line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_ += ',';
      text_ += csv_field(fields[i]);
    }
    text_ += "\r\n";
  }
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

inline void write_atomic(const fs::path& path, const std::string& data) {
  fs::path tmp = path;
  tmp += ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << data;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects outputs in memory and writes them in one ordered pass, then the
// manifest last.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string data) { files_.push_back({name, std::move(data)}); }
  void add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }

  json write_all() {
    fs::create_directories(dir_);
    json list = json::array();
    for (const auto& [name, data] : files_) {
      write_atomic(dir_ / name, data);
      list.push_back({{"file", name}, {"sha256", sha256_hex(data)}, {"bytes", data.size()}});
    }
    return list;
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

struct ManifestInfo {
  std::string command;
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  std::string started, finished;
  std::string status;  // "ok" or the error text
  int exit_code = 0;
  json outputs = json::array();
};

// Writes manifest.json; a previous manifest with the same config hash marks
// this run as a reproduction, and the output digests are compared.
inline json write_manifest(const fs::path& dir, const ManifestInfo& m) {
  fs::create_directories(dir);
  fs::path path = dir / "manifest.json";
  bool reproduction = false;
  json identical = nullptr;
  if (fs::exists(path)) {
    try {
      std::ifstream in(path);
      json old = json::parse(in);
      if (old.value("config_hash", "") == m.config_hash && old.value("command", "") == m.command) {
        reproduction = true;
        identical = old.value("outputs", json::array()) == m.outputs;
      }
    } catch (const std::exception&) {
      // an unreadable old manifest just means no comparison
    }
  }
  json j = {{"schema_version", 1},
            {"tool", "starkres"},
            {"version", m.version},
            {"command", m.command},
            {"config_hash", m.config_hash},
            {"seed", m.seed},
            {"started", m.started},
            {"finished", m.finished},
            {"tasks", json::array({{{"name", m.command}, {"status", m.status}, {"exit_code", m.exit_code}}})},
            {"outputs", m.outputs},
            {"reproduction", reproduction},
            {"outputs_identical_to_previous", identical}};
  write_atomic(path, j.dump(2) + "\n");
  return j;
}

}  // namespace starkres::app
