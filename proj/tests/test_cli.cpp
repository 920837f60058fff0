#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("granflow_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result run(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(GRANFLOW_CLI_PATH) + " " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

nlohmann::json small_config() {
  return nlohmann::json::parse(R"({
    "name": "cli-small",
    "grid": {"nx": 12, "ny": 12},
    "rheology": {"q_star": 0.5, "delta_star": 0.1},
    "time": {"dt": 0.01, "t_end": 0.05},
    "forcing": {"body_force": {"kind": "vortex", "amplitude": 2.0},
                "lithostatic": {"value": 1.0}},
    "initial": {"pore_pressure": {"kind": "cosine", "value": 0.5, "amplitude": 0.2}}
  })");
}

std::vector<std::string> csv_column(const std::string& csv, const std::string& name) {
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  std::stringstream hs(line);
  std::string cell;
  int col = -1, k = 0;
  while (std::getline(hs, cell, ',')) {
    if (cell == name) col = k;
    ++k;
  }
  std::vector<std::string> out;
  if (col < 0) return out;
  while (std::getline(ss, line)) {
    std::stringstream ls(line);
    for (int i = 0; std::getline(ls, cell, ','); ++i)
      if (i == col) out.push_back(cell);
  }
  return out;
}

}  // namespace

TEST_CASE("simulate: missing config file exits 2 and names the path") {
  const fs::path dir = scratch("missing");
  const Result r = run("simulate --config /nonexistent/cfg.json --out '" + (dir / "o").string() + "'", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("/nonexistent/cfg.json") != std::string::npos);
}

TEST_CASE("simulate: unknown key exits 2") {
  const fs::path dir = scratch("unknown_key");
  nlohmann::json doc = small_config();
  doc["grid"]["nz"] = 4;
  const fs::path cfg = write_config(dir, doc);
  const Result r = run("simulate --config '" + cfg.string() + "' --out '" + (dir / "o").string() + "'", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("nz") != std::string::npos);
}

TEST_CASE("simulate: invalid value exits 2 with a validation message") {
  const fs::path dir = scratch("invalid");
  nlohmann::json doc = small_config();
  doc["time"]["dt"] = -1.0;
  const fs::path cfg = write_config(dir, doc);
  const Result r = run("simulate --config '" + cfg.string() + "' --out '" + (dir / "o").string() + "'", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("validation") != std::string::npos);
  CHECK(r.err.find("time.dt") != std::string::npos);
}

TEST_CASE("simulate: zero forcing from rest keeps zero kinetic energy") {
  const fs::path dir = scratch("zero");
  nlohmann::json doc = small_config();
  doc["forcing"]["body_force"] = {{"kind", "zero"}};
  const fs::path cfg = write_config(dir, doc);
  const Result r = run("simulate --config '" + cfg.string() + "' --out '" + (dir / "o").string() + "'", dir);
  REQUIRE(r.code == 0);
  const std::vector<std::string> ke = csv_column(slurp(dir / "o" / "timeseries.csv"), "kinetic_energy");
  CHECK(ke.size() == 5);
  for (const std::string& x : ke) CHECK(std::stod(x) == 0.0);
}

TEST_CASE("simulate: outputs, manifest and byte-identical reruns") {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = write_config(dir, small_config());
  const Result a = run("simulate --config '" + cfg.string() + "' --out '" + (dir / "a").string() + "'", dir);
  const Result b = run("simulate --config '" + cfg.string() + "' --out '" + (dir / "b").string() + "'", dir);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const char* f : {"timeseries.csv", "final.vtk", "config.json", "report.json", "manifest.json"}) {
    CHECK(fs::exists(dir / "a" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const std::string csv = slurp(dir / "a" / "timeseries.csv");
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.rfind("step,t,kinetic_energy", 0) == 0);
  CHECK(slurp(dir / "a" / "final.vtk").rfind("# vtk DataFile Version 3.0", 0) == 0);

  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["run_id"].get<std::string>().rfind("cli-small-", 0) == 0);
  CHECK(manifest["config_hash"].get<std::string>().size() == 64);
  const nlohmann::json report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report["steps"] == 5);
}

TEST_CASE("simulate: snapshot cadence") {
  const fs::path dir = scratch("snapshots");
  nlohmann::json doc = small_config();
  doc["output"] = {{"snapshot_every", 2}};
  const fs::path cfg = write_config(dir, doc);
  const Result r = run("simulate --config '" + cfg.string() + "' --out '" + (dir / "o").string() + "'", dir);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "o" / "field_000002.vtk"));
  CHECK(fs::exists(dir / "o" / "field_000004.vtk"));
  CHECK_FALSE(fs::exists(dir / "o" / "field_000003.vtk"));
}

TEST_CASE("simulate: Picard failure exits 3") {
  const fs::path dir = scratch("picard");
  nlohmann::json doc = small_config();
  doc["time"]["picard_max"] = 1;
  const fs::path cfg = write_config(dir, doc);
  const Result r = run("simulate --config '" + cfg.string() + "' --out '" + (dir / "o").string() + "'", dir);
  CHECK(r.code == 3);
}

TEST_CASE("scenarios: filter writes one manifest") {
  const fs::path dir = scratch("filter");
  const Result r = run("scenarios --only heat-decay --out '" + (dir / "o").string() + "'", dir);
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "o" / "heat-decay" / "manifest.json"));
  int manifests = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "o"))
    if (e.path().filename() == "manifest.json") ++manifests;
  CHECK(manifests == 1);
  const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "o" / "scenarios.json"));
  REQUIRE(summary.size() == 1);
  CHECK(summary[0]["pass"] == true);
}

TEST_CASE("scenarios: unknown name exits 2 and lists the known ones") {
  const fs::path dir = scratch("unknown_scenario");
  const Result r = run("scenarios --only no-such --out '" + (dir / "o").string() + "'", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("heat-decay") != std::string::npos);
}

TEST_CASE("verify: injected plastic sign fault fails monotonicity") {
  const fs::path dir = scratch("fault");
  const Result r = run("verify --inject-fault plastic-sign --out '" + (dir / "o").string() + "'", dir);
  CHECK(r.code == 1);
  CHECK(r.err.find("monotonicity") != std::string::npos);
  const nlohmann::json rep = nlohmann::json::parse(slurp(dir / "o" / "verify_report.json"));
  CHECK(rep["pass"] == false);
}

TEST_CASE("usage errors exit 2") {
  const fs::path dir = scratch("usage");
  CHECK(run("", dir).code == 2);
  CHECK(run("simulate", dir).code == 2);
  CHECK(run("frobnicate", dir).code == 2);
  CHECK(run("--help", dir).code == 0);
}
