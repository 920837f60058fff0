// granflow: simulate / verify / scenarios

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "granflow/config.hpp"
#include "granflow/output.hpp"
#include "granflow/scenarios.hpp"
#include "granflow/solver.hpp"
#include "granflow/verify.hpp"

namespace fs = std::filesystem;
using namespace granflow;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

nlohmann::json checks_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckResult& c : checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold},
                   {"detail", c.detail}});
  return arr;
}

int cmd_simulate(const std::string& config_path, const fs::path& out) {
  SimConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    const bool parse = e.kind() == ConfigError::Kind::parse;
    std::cerr << (parse ? "config parse error: " : "config validation error in '" + config_path + "': ")
              << e.what() << "\n";
    return kConfigError;
  }

  try {
    fs::create_directories(out);
    EnergyMonitor monitor(cfg);
    SnapshotWriter snapshots(cfg, out);
    const SimState final_state = simulate(cfg, {monitor.observer(), snapshots.observer()});
    const std::string run_id = default_run_id(cfg);
    const nlohmann::json report = run_report(run_id, cfg, monitor, final_state);
    for (const auto& w : report["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    const OutputManifest m = write_run_outputs(out, run_id, cfg, monitor, final_state, report, snapshots.files());
    std::cout << "run " << m.run_id << ": " << monitor.steps().size() << " steps, t = " << final_state.t
              << ", outputs in " << out.string() << "\n";
    return kOk;
  } catch (const SimulationError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kSolverError;
  }
}

int cmd_verify(const fs::path& out, const std::string& fault, bool keep_going) {
  VerifyOptions opts;
  opts.threads = thread_count_from_env();
  opts.fail_fast = !keep_going;
  if (fault == "plastic-sign") {
    opts.inject_plastic_sign_fault = true;
  } else if (!fault.empty()) {
    std::cerr << "unknown fault '" << fault << "'\n";
    return kConfigError;
  }
  VerifyReport rep;
  try {
    rep = run_verify(opts);
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  }
  for (const CheckResult& c : rep.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
  fs::create_directories(out);
  write_text(out / "verify_report.json", rep.to_json().dump(2) + "\n");
  if (!rep.pass) {
    std::cerr << "verify failed: " << rep.first_failure << "\n";
    return kCheckFailed;
  }
  return kOk;
}

int cmd_scenarios(const std::string& only, const fs::path& out) {
  std::vector<Scenario> selected;
  const std::vector<std::string> names = split_names(only);
  if (names.empty()) {
    selected = builtin_scenarios();
  } else {
    std::set<std::string> seen;
    for (const std::string& n : names) {
      if (!seen.insert(n).second) continue;
      try {
        selected.push_back(find_scenario(n));
      } catch (const std::out_of_range&) {
        std::cerr << "unknown scenario '" << n << "'; known:";
        for (const Scenario& s : builtin_scenarios()) std::cerr << " " << s.name;
        std::cerr << "\n";
        return kConfigError;
      }
    }
  }

  std::vector<ScenarioRun> runs;
  try {
    runs = run_scenarios(selected, thread_count_from_env());
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  }

  bool all = true;
  nlohmann::json summary = nlohmann::json::array();
  for (const ScenarioRun& r : runs) {
    nlohmann::json report = run_report(r.name, r.cfg, r.monitor, r.final_state);
    report["scenario"] = r.name;
    report["pass"] = r.pass;
    report["checks"] = checks_json(r.checks);
    report["metrics"] = r.metrics;
    for (const std::string& w : r.warnings) report["warnings"].push_back(w);
    write_run_outputs(out / r.name, r.name, r.cfg, r.monitor, r.final_state, report);
    summary.push_back({{"scenario", r.name}, {"pass", r.pass}, {"manifest", r.name + "/manifest.json"}});
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "\n";
    for (const CheckResult& c : r.checks)
      if (!c.pass) std::cout << "  failed " << c.name << ": " << c.detail << "\n";
    all = all && r.pass;
  }
  write_text(out / "scenarios.json", summary.dump(2) + "\n");
  return all ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for pore-pressure activated granular flow"};
  app.require_subcommand(1);

  std::string config_path, out_dir, only, fault;
  bool keep_going = false;

  auto* sim = app.add_subcommand("simulate", "Run one simulation from a JSON config");
  sim->add_option("--config", config_path, "Config file")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();

  auto* ver = app.add_subcommand("verify", "Run the property and oracle suite");
  ver->add_option("--out", out_dir, "Output directory")->required();
  ver->add_flag("--keep-going", keep_going, "Run every check even after a failure");
  ver->add_option("--inject-fault", fault)->group("");

  auto* sc = app.add_subcommand("scenarios", "Run built-in scenarios");
  sc->add_option("--only", only, "Comma-separated scenario names");
  sc->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (sim->parsed()) return cmd_simulate(config_path, out_dir);
  if (ver->parsed()) return cmd_verify(out_dir, fault, keep_going);
  return cmd_scenarios(only, out_dir);
}
