// starkres command-line tool.
//
//   starkres <command> [--config PATH] [--out DIR] [--threads N] [--seed N]
//
// commands: green, propagator, resonance, survival, verify-bounds, selftest
// exit codes: 0 ok, 1 failed check or other error, 2 config error,
//             3 non-convergence, 4 essential-spectrum contamination,
//             5 norm drift during propagation

#include <boost/program_options.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "app/commands.hpp"

#ifndef STARKRES_VERSION
#define STARKRES_VERSION "0.0.0"
#endif

namespace po = boost::program_options;
using namespace starkres;
using namespace starkres::app;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kNonConvergent = 3, kContaminated = 4, kDrift = 5 };

void setup_logging() {
  auto logger = spdlog::stderr_color_st("starkres");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("STARKRES_LOG")) {
    auto lvl = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour real names
    if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
    else spdlog::warn("ignoring unknown STARKRES_LOG level '{}'", env);
  }
}

int exit_for(const Error& e, const std::string& command) {
  switch (e.code()) {
    case Errc::NonConvergent:
    case Errc::NoConvergence:
    case Errc::SolverFailure:
      return kNonConvergent;
    case Errc::EssentialContamination:
      return kContaminated;
    case Errc::StepTooLarge:
      return command == "survival" ? kDrift : kFailed;
    case Errc::InvalidArgument:
    case Errc::GridTooCoarse:
      return kConfig;
    default:
      return kFailed;
  }
}

// Runs the command; returns (exit code, status text).
std::pair<int, std::string> dispatch(const std::string& command, const Context& ctx, OutputSet& out) {
  try {
    if (command == "green") cmd_green(ctx, out);
    else if (command == "propagator") cmd_propagator(ctx, out);
    else if (command == "resonance") cmd_resonance(ctx, out);
    else if (command == "survival") cmd_survival(ctx, out);
    else if (command == "verify-bounds") cmd_verify_bounds(ctx, out);
    else if (command == "selftest") {
      if (!cmd_selftest(ctx, out)) return {kFailed, "selftest checks failed"};
    } else {
      return {kConfig, "unknown command '" + command + "'"};
    }
  } catch (const ConfigError& e) {
    return {kConfig, std::string("config error: ") + e.what()};
  } catch (const Error& e) {
    return {exit_for(e, command), e.what()};
  }
  return {kOk, "ok"};
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  std::string command, config_path, out_dir = "out";
  int threads = 1;
  std::uint64_t seed = 12345;

  po::options_description opts("options");
  opts.add_options()("help,h", "show help")("config", po::value(&config_path), "JSON config file")(
      "out", po::value(&out_dir)->default_value("out"), "output directory")(
      "threads", po::value(&threads)->default_value(1), "worker threads")(
      "seed", po::value(&seed)->default_value(12345), "seed for randomised sampling")(
      "command", po::value(&command), "subcommand");
  po::positional_options_description pos;
  pos.add("command", 1);
  po::variables_map vm;
  try {
    po::store(po::command_line_parser(argc, argv).options(opts).positional(pos).run(), vm);
    po::notify(vm);
  } catch (const po::error& e) {
    std::cerr << "starkres: " << e.what() << "\n";
    return kConfig;
  }
  if (vm.count("help") || command.empty()) {
    std::cout << "usage: starkres <green|propagator|resonance|survival|verify-bounds|selftest> [options]\n"
              << opts;
    return command.empty() && !vm.count("help") ? kConfig : kOk;
  }
  if (threads < 1 || threads > 256) {
    std::cerr << "starkres: --threads must be in [1, 256]\n";
    return kConfig;
  }

  Context ctx;
  ctx.threads = threads;
  ctx.seed = seed;
  ManifestInfo m;
  m.command = command;
  m.version = STARKRES_VERSION;
  m.seed = seed;
  m.started = utc_now();
  try {
    if (!config_path.empty()) ctx.cfg = load_config(config_path);
    if (ctx.cfg.contains("command") && ctx.cfg.at("command") != command)
      throw ConfigError("config is for command '" + ctx.cfg.at("command").dump() + "'");
  } catch (const ConfigError& e) {
    std::cerr << "starkres: " << e.what() << "\n";
    return kConfig;
  }
  m.config_hash = sha256_hex(json{{"command", command}, {"config", ctx.cfg}, {"seed", seed}}.dump());

  OutputSet out(out_dir);
  auto [code, status] = dispatch(command, ctx, out);
  if (code == kConfig && status.rfind("unknown command", 0) == 0) {
    std::cerr << "starkres: " << status << "\n";
    return code;
  }
  try {
    // a failed run writes no data files, only the manifest saying why
    if (code == kOk || command == "selftest") m.outputs = out.write_all();
    m.finished = utc_now();
    m.status = status;
    m.exit_code = code;
    write_manifest(out.dir(), m);
  } catch (const std::exception& e) {
    std::cerr << "starkres: cannot write outputs: " << e.what() << "\n";
    return kFailed;
  }
  if (code != kOk) std::cerr << "starkres: " << status << "\n";
  else spdlog::info("{}: done, {} files", command, m.outputs.size());
  return code;
}
