#include "granflow/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "granflow/discretization.hpp"

namespace granflow {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json OutputManifest::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const OutputFile& f : files) files_json.push_back({{"path", f.path}, {"kind", f.kind}});
  return {{"run_id", run_id}, {"config_hash", config_hash}, {"files", files_json}};
}

std::string timeseries_csv(const EnergyMonitor& monitor) {
  std::string out = kTimeseriesColumns;
  out += '\n';
  const auto& reports = monitor.reports();
  const auto& steps = monitor.steps();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const EnergyReport& r = reports[k];
    const StepInfo& s = steps[k];
    const double cols[] = {s.t,           r.kinetic_next, r.stress_power, r.plastic,
                           r.viscous,     r.newtonian,    r.slip,         r.forcing_work,
                           r.div_linf,    r.slack,        r.margin,       std::sqrt(r.pf_norm_sq_next)};
    out += std::to_string(s.step);
    for (double c : cols) {
      out += ',';
      out += format_double(c);
    }
    out += ',';
    out += std::to_string(s.picard_iterations);
    out += '\n';
  }
  return out;
}

std::string vtk_snapshot(const SimState& state, const SimConfig& cfg) {
  const Grid& g = cfg.grid;
  ScalarField tau(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      tau(i, j) = yield_stress(lithostatic_pressure(cfg, state.t, g.xc(i), g.yc(j)), state.p_f(i, j),
                               cfg.rheology.q_star);
  const StressState st = evaluate_stress_state(state.v, tau, cfg.rheology, cfg.slip);

  std::string out;
  out.reserve(static_cast<std::size_t>(g.cell_count()) * 120);
  out += "# vtk DataFile Version 3.0\n";
  out += "granflow " + cfg.name + " t=" + format_double(state.t) + "\n";
  out += "ASCII\nDATASET STRUCTURED_POINTS\n";
  out += "DIMENSIONS " + std::to_string(g.nx + 1) + " " + std::to_string(g.ny + 1) + " 1\n";
  out += "ORIGIN 0 0 0\n";
  out += "SPACING " + format_double(g.hx()) + " " + format_double(g.hy()) + " 1\n";
  out += "CELL_DATA " + std::to_string(g.cell_count()) + "\n";

  auto scalars = [&](const char* name, auto&& value) {
    out += "SCALARS ";
    out += name;
    out += " double 1\nLOOKUP_TABLE default\n";
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        out += format_double(value(i, j));
        out += '\n';
      }
  };
  scalars("p", [&](int i, int j) { return state.p(i, j); });
  scalars("p_f", [&](int i, int j) { return state.p_f(i, j); });
  scalars("strain_rate", [&](int i, int j) { return norm(st.D(i, j)); });
  scalars("stress", [&](int i, int j) { return norm(st.Z(i, j) + st.V(i, j)); });

  out += "VECTORS velocity double\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 c = state.v.cell_average(i, j);
      out += format_double(c.x) + " " + format_double(c.y) + " 0\n";
    }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json run_report(const std::string& run_id, const SimConfig& cfg, const EnergyMonitor& monitor,
                          const SimState& final_state) {
  nlohmann::json warnings = nlohmann::json::array();
  int max_picard = 0;
  for (const StepInfo& s : monitor.steps()) {
    max_picard = std::max(max_picard, s.picard_iterations);
    if (s.cfl_warning && warnings.empty())
      warnings.push_back("CFL number " + format_double(s.cfl) + " exceeds 0.5 at step " + std::to_string(s.step));
  }
  return {
      {"run_id", run_id},
      {"config_hash", config_hash(cfg)},
      {"steps", monitor.steps().size()},
      {"t_final", final_state.t},
      {"max_picard_iterations", max_picard},
      {"max_div_linf", monitor.max_div()},
      {"max_slack_ratio", monitor.max_slack_ratio()},
      {"dissipation_signs_ok", monitor.dissipation_signs_ok()},
      {"velocity_bound", {{"ok", monitor.velocity_bound_ok()},
                          {"lhs", monitor.velocity_bound_lhs()},
                          {"rhs", monitor.velocity_bound_rhs()}}},
      {"pore_pressure_bound", {{"ok", monitor.pressure_bound_ok()},
                               {"accumulation_monotone", monitor.accumulation_monotone()},
                               {"lhs", monitor.pressure_bound_lhs()},
                               {"rhs", monitor.pressure_bound_rhs()}}},
      {"final_velocity_linf", final_state.v.linf_norm()},
      {"final_pf_l2", final_state.p_f.l2_norm()},
      {"warnings", warnings},
  };
}

SnapshotWriter::SnapshotWriter(const SimConfig& cfg, std::filesystem::path dir) : cfg_(cfg), dir_(std::move(dir)) {}

Observer SnapshotWriter::observer() {
  return [this](const SimState&, const SimState& next, const StepInfo& info) {
    const int every = cfg_.output.snapshot_every;
    if (every <= 0 || !cfg_.output.write_vtk || info.step % every != 0) return;
    char name[40];
    std::snprintf(name, sizeof name, "field_%06lld.vtk", static_cast<long long>(info.step));
    write_text(dir_ / name, vtk_snapshot(next, cfg_));
    files_.push_back({name, "field_vtk"});
  };
}

OutputManifest write_run_outputs(const std::filesystem::path& dir, const std::string& run_id, const SimConfig& cfg,
                                 const EnergyMonitor& monitor, const SimState& final_state,
                                 const nlohmann::json& report, const std::vector<OutputFile>& extra) {
  std::filesystem::create_directories(dir);
  OutputManifest m;
  m.run_id = run_id;
  m.config_hash = config_hash(cfg);

  write_text(dir / "timeseries.csv", timeseries_csv(monitor));
  m.files.push_back({"timeseries.csv", "timeseries_csv"});
  m.files.insert(m.files.end(), extra.begin(), extra.end());
  if (cfg.output.write_vtk) {
    write_text(dir / "final.vtk", vtk_snapshot(final_state, cfg));
    m.files.push_back({"final.vtk", "field_vtk"});
  }
  write_text(dir / "config.json", config_to_json(cfg).dump(2) + "\n");
  m.files.push_back({"config.json", "config_json"});
  write_text(dir / "report.json", report.dump(2) + "\n");
  m.files.push_back({"report.json", "report_json"});
  write_text(dir / "manifest.json", m.to_json().dump(2) + "\n");
  return m;
}

std::string default_run_id(const SimConfig& cfg) { return cfg.name + "-" + config_hash(cfg).substr(0, 12); }

}  // namespace granflow
