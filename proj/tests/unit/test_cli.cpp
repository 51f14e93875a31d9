#include <doctest.h>

#include "vibrowalk/cli.hpp"
#include "vibrowalk/config.hpp"

#include <filesystem>
#include <sstream>

using namespace vibrowalk;
using doctest::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "vibrowalk_unit" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(std::vector<std::string> args, std::string* err_out = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  if (err_out) *err_out = err.str();
  return code;
}

json read_json(const fs::path& p) { return json::parse(read_text(p.string())); }

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  write_text(p.string(), j.dump());
  return p;
}

}  // namespace

TEST_CASE("quantity parsing") {
  CHECK(parse_quantity(12, "length", "x") == 12.0);
  CHECK(parse_quantity("12 mm", "length", "x") == Approx(0.012));
  CHECK(parse_quantity("50 g", "mass", "x") == Approx(0.05));
  CHECK(parse_quantity("0.2 ms", "time", "x") == Approx(2e-4));
  CHECK(parse_quantity("35 Hz", "frequency", "x") == 35.0);
  CHECK_THROWS_AS(parse_quantity("12 kg", "length", "x"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("twelve", "length", "x"), ConfigError);
  CHECK_THROWS_AS(parse_quantity(true, "length", "x"), ConfigError);
}

TEST_CASE("config round trip and hash") {
  const Config d;
  const Config back = config_from_json(config_to_json(d));
  CHECK(canonical_config(back) == canonical_config(d));
  CHECK(config_hash(back) == config_hash(d));

  Config s = d;
  s.seed = 9;
  CHECK(config_hash(s) != config_hash(d));

  json j = json::parse(R"({"sim": {"dt": "0.1 ms", "duration": 3}, "sweep": {"f_axis": [-10, 10]}})");
  const Config c = config_from_json(j);
  CHECK(c.run.sim.dt == Approx(1e-4));
  CHECK(c.run.duration == 3.0);
  CHECK(c.axes.f_axis == std::vector<double>{-10, 10});
  CHECK(config_hash(config_from_json(config_to_json(c))) == config_hash(c));

  CHECK_THROWS_AS(config_from_json(json::parse(R"({"sim": {"dtt": 1}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"sim": {"dt": -1}})")).validate(), ConfigError);
}

TEST_CASE("number formatting and CSV") {
  for (double v : {0.0, 1.0, -2.5, 1e-12, 0.1 + 0.2, 32.498634, 6.02e23}) CHECK(std::stod(fmt(v)) == v);
  const CsvTable t = parse_csv("a,b\n1,2\n3,4\n");
  CHECK_NOTHROW(require_columns(t, {"a", "b"}));
  CHECK_THROWS_AS(require_columns(t, {"a", "c"}), SchemaError);
  CHECK(csv_row({"x", "y"}) == "x,y\n");
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("cli exit codes, manifest and error.json") {
  const fs::path d = scratch("codes");
  CHECK(run({"--out-dir", d.string(), "nope"}) == kExitUsage);
  CHECK(run({"--out-dir", d.string()}) == kExitUsage);
  CHECK(run({"--out-dir", d.string(), "simulate", "--f", "10"}) == kExitUsage);

  CHECK(run({"--out-dir", d.string(), "--config", (d / "missing.json").string(), "envelope"}) == kExitConfig);
  CHECK(read_json(d / "error.json")["kind"] == "config");

  const fs::path bad = write_config(d, {{"sim", {{"dtt", 1}}}});
  CHECK(run({"--out-dir", d.string(), "--config", bad.string(), "envelope"}) == kExitConfig);

  const fs::path cal = scratch("noseed");
  CHECK(run({"--out-dir", cal.string(), "calibrate"}) == kExitConfig);
  CHECK(read_json(cal / "error.json")["message"].get<std::string>().find("seed") != std::string::npos);
  const json m = read_json(cal / "manifest.json");
  CHECK(m["status"] == "error");
  CHECK(m["exit_code"] == kExitConfig);

  const fs::path sel = scratch("missing_input");
  CHECK(run({"--out-dir", sel.string(), "select", "--indices", (sel / "none.csv").string()}) == kExitRuntime);
  CHECK(fs::exists(sel / "error.json"));
}

TEST_CASE("cli envelope") {
  const fs::path d = scratch("envelope");
  REQUIRE(run({"--out-dir", d.string(), "envelope", "--f", "10", "--theta", "30"}) == kExitOk);
  const CsvTable t = read_csv((d / "envelope.csv").string());
  REQUIRE(t.rows.size() == 360);
  double peak = 0.0;
  for (const auto& r : t.rows) peak = std::max(peak, std::hypot(std::stod(r.at(3)), std::stod(r.at(4))));
  CHECK(peak == Approx(2.6529).epsilon(1e-4));
  const json m = read_json(d / "manifest.json");
  CHECK(m["status"] == "ok");
  CHECK(m["command"] == "envelope");
  CHECK(m["seed"].is_null());
  CHECK(m["config_hash"].is_string());
  for (const char* k : {"tool", "version", "cmdline", "jobs", "started", "finished", "outputs"}) CHECK(m.contains(k));
  CHECK_FALSE(fs::exists(d / "error.json"));
}

TEST_CASE("cli sweep, indices and select") {
  const fs::path d = scratch("sweep");
  const fs::path cfg = write_config(d, {{"sim", {{"duration", 0.02}, {"settle", 0.01}}}});
  REQUIRE(run({"--out-dir", d.string(), "--config", cfg.string(), "--jobs", "2", "sweep"}) == kExitOk);
  const SweepGrid g = read_sweep_csv((d / "sweep.csv").string());
  CHECK(g.cells.size() == 195);

  const fs::path s = scratch("sens");
  const fs::path small = write_config(s, {{"sim", {{"duration", 0.02}, {"settle", 0.01}}},
                                          {"sweep", {{"f_axis", {-10, 10}}, {"theta_axis", {0, 90}}}}});
  REQUIRE(run({"--out-dir", s.string(), "--config", small.string(), "sensitivity"}) == kExitOk);
  for (const char* c : {"vx", "vy", "w"}) CHECK(fs::exists(s / (std::string("heatmap_") + c + ".csv")));
  const CsvTable p = read_csv((s / "p_map.csv").string());
  CHECK_NOTHROW(require_columns(p, {"f_hz", "theta_deg", "direction", "P", "sign", "mask", "reason"}));
  const IndexGrid idx = read_index_csv((s / "index.csv").string());
  CHECK(idx.cells.size() == 12);

  const fs::path q = scratch("select");
  REQUIRE(run({"--out-dir", q.string(), "select", "--indices", (s / "index.csv").string()}) == kExitOk);
  const std::string text = read_text((q / "selection.txt").string());
  // Speeds this small leave every mode without a qualifying cell.
  CHECK(text.find("no qualifying cells") != std::string::npos);
}

TEST_CASE("cli calibrate is reproducible") {
  const json c = {{"sim", {{"dt", 5e-4}, {"duration", 0.2}, {"settle", 0.1}}},
                  {"calibration", {{"synthetic_grid", {{"f_axis", {20}}, {"theta_axis", {0, 90}}}}}}};
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path d = scratch("calibrate" + std::to_string(k));
    const fs::path cfg = write_config(d, c);
    REQUIRE(run({"--out-dir", d.string(), "--config", cfg.string(), "--seed", "3", "--jobs", k == 0 ? "1" : "2",
                 "calibrate", "--budget", "6"}) == kExitOk);
    reports[k] = read_text((d / "calibration_report.json").string());
    CHECK(read_json(d / "manifest.json")["seed"] == 3);
  }
  CHECK(reports[0] == reports[1]);
}
