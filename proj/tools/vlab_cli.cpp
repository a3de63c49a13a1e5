// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
//
// vlab: experiment driver. Each subcommand runs one verification suite and
// writes manifest.json, checks.csv, one CSV per result table and
// failures.json into the output directory. Exit status is 0 when every
// check passes, 1 when a check fails and 2 on usage or config errors.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vlab/parallel.hpp"
#include "vlab/suites.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  bool strict = false;
  bool show_config = false;
};

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw vlab::ConfigError("cannot open config " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw vlab::ConfigError("config " + path + ": " + e.what());
  }
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
  if (!os) throw std::runtime_error("cannot write " + p.string());
}

int run(const vlab::suites::Suite& suite, const Options& opt, CLI::App& sub) {
  json user = load_config(opt.config);
  json overrides = json::object();
  if (sub.count("--seed")) {
    user["seed"] = opt.seed;
    overrides["seed"] = {{"value", opt.seed}, {"source", "--seed"}};
  }
  const json cfg = vlab::suites::resolve(suite, user);
  if (opt.show_config) {
    std::cout << json{{"schema", vlab::kConfigSchema}, {"subcommand", suite.name}, {"config", cfg}}.dump(2) << '\n';
    return 0;
  }

  std::string thread_source = "hardware";
  if (opt.threads > 0)
    thread_source = "--threads";
  else if (const char* env = std::getenv("VLAB_THREADS"); env && std::atoi(env) > 0)
    thread_source = "VLAB_THREADS";
  const int threads = vlab::resolve_threads(opt.threads);
  overrides["threads"] = {{"value", threads}, {"source", thread_source}};

  const fs::path out = opt.out.empty() ? fs::path("vlab-out") / suite.name : fs::path(opt.out);
  fs::create_directories(out);

  const std::string started = utc_now();
  const auto report = suite.run(cfg, vlab::suites::RunContext{threads, out});
  const std::string finished = utc_now();
  const bool passed = report.passed(opt.strict);

  json outputs = json::array({"checks.csv", "failures.json"});
  {
    std::ofstream os(out / "checks.csv", std::ios::binary);
    report.checks_table().write_csv(os);
  }
  for (const auto& t : report.tables) {
    std::ofstream os(out / (t.name + ".csv"), std::ios::binary);
    t.write_csv(os);
    outputs.push_back(t.name + ".csv");
  }
  write_file(out / "failures.json", report.failure_report(opt.strict).dump(2) + "\n");
  const json manifest{{"schema", vlab::kConfigSchema},
                      {"version", VLAB_VERSION},
                      {"subcommand", suite.name},
                      {"config", cfg},
                      {"config_file", opt.config},
                      {"overrides", overrides},
                      {"strict", opt.strict},
                      {"passed", passed},
                      {"outputs", outputs},
                      {"started_at", started},
                      {"finished_at", finished}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& c : report.checks)
    std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << ": " << vlab::format_double(c.value) << ' '
              << c.relation << ' ' << vlab::format_double(c.threshold) << '\n';
  for (const auto& w : report.warnings) std::cout << "[warn] " << w << '\n';
  std::cout << suite.name << (passed ? " passed" : " FAILED") << " (" << out.string() << ")\n";
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vlab: stochastic point-vortex verification driver"};
  app.set_version_flag("--version", std::string(VLAB_VERSION));
  app.require_subcommand(1);

  Options opt;
  for (const auto& s : vlab::suites::registry()) {
    auto* sub = app.add_subcommand(s.name, s.summary);
    sub->add_option("--config", opt.config, "JSON config (schema " + std::string(vlab::kConfigSchema) + ")")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "master seed (overrides the config)");
    sub->add_option("--threads", opt.threads, "worker threads (default: VLAB_THREADS, else all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "output directory (default vlab-out/<subcommand>)");
    sub->add_flag("--strict", opt.strict, "treat warnings as failures");
    sub->add_flag("--show-config", opt.show_config, "print the resolved config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (auto* sub : app.get_subcommands()) {
    try {
      return run(vlab::suites::find_suite(sub->get_name()), opt, *sub);
    } catch (const vlab::ConfigError& e) {
      std::cerr << "vlab: " << e.what() << '\n';
      return 2;
    } catch (const std::invalid_argument& e) {
      std::cerr << "vlab: invalid parameters: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "vlab: " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}
