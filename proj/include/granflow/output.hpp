#pragma once

// Deterministic run outputs: per-step CSV time series, legacy ASCII VTK
// snapshots, JSON report/config echo and the manifest tying them together.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "granflow/analysis.hpp"
#include "granflow/config.hpp"
#include "granflow/solver.hpp"

namespace granflow {

/// %.17g
std::string format_double(double x);

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string kind;  // timeseries_csv, field_vtk, report_json, config_json
};

struct OutputManifest {
  std::string run_id;
  std::string config_hash;
  std::vector<OutputFile> files;

  nlohmann::json to_json() const;
};

inline constexpr const char* kTimeseriesColumns =
    "step,t,kinetic_energy,stress_power,plastic,viscous,newtonian,slip,forcing_work,div_linf,slack,margin,pf_l2,"
    "picard_iterations";

std::string timeseries_csv(const EnergyMonitor& monitor);

/// Cell data p, p_f, |Dv|, |S| and the cell-averaged velocity.
std::string vtk_snapshot(const SimState& state, const SimConfig& cfg);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Summary of a finished run: step count, final time, energy-monitor verdicts, warnings.
nlohmann::json run_report(const std::string& run_id, const SimConfig& cfg, const EnergyMonitor& monitor,
                          const SimState& final_state);

/// Writes field snapshots every cfg.output.snapshot_every steps while attached.
class SnapshotWriter {
 public:
  SnapshotWriter(const SimConfig& cfg, std::filesystem::path dir);
  Observer observer();
  const std::vector<OutputFile>& files() const { return files_; }

 private:
  SimConfig cfg_;
  std::filesystem::path dir_;
  std::vector<OutputFile> files_;
};

/// Writes timeseries.csv, final.vtk (if enabled), config.json, report.json and
/// manifest.json into dir; `extra` lists files already written there.
OutputManifest write_run_outputs(const std::filesystem::path& dir, const std::string& run_id, const SimConfig& cfg,
                                 const EnergyMonitor& monitor, const SimState& final_state,
                                 const nlohmann::json& report, const std::vector<OutputFile>& extra = {});

/// name-<first 12 hex digits of the config hash>
std::string default_run_id(const SimConfig& cfg);

}  // namespace granflow
