#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "slowlight/cli/commands.hpp"

namespace fs = std::filesystem;
using namespace slowlight;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("slowlight_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args, const std::string& env = "") {
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = env + " '" + std::string(SLOWLIGHT_CLI_PATH) + "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string preset(const std::string& name) {
  return std::string(SLOWLIGHT_CONFIG_DIR) + "/" + name + ".json";
}

fs::path write_config(const std::string& name, const json& doc) {
  const auto p = scratch() / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

json base_config() {
  return {{"catalog", std::string(SLOWLIGHT_DATA_DIR) + "/rb_two_line.json"},
          {"cell", {{"temperature_c", 294}, {"length_m", 0.07}}},
          {"density", {{"calibrate", json::object()}}},
          {"pulse", {{"shape", "sinc"}, {"t0_fs", 250}, {"center_nm", 787}}}};
}

/// Data rows of a CSV: skips '#' comments and the header.
std::vector<std::vector<std::string>> csv_rows(const std::string& text, std::vector<std::string>* header = nullptr) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!seen_header) {
      seen_header = true;
      if (header) *header = cells;
      continue;
    }
    rows.push_back(cells);
  }
  return rows;
}

double column(const std::vector<std::string>& header, const std::vector<std::string>& row,
              const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return std::stod(row[i]);
  }
  ADD_FAILURE() << "no column " << name;
  return 0.0;
}

}  // namespace

TEST(Cli, EmptyCellSpectrumIsZero) {
  const auto r = run("spectrum --config '" + preset("vacuum") + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> header;
  const auto rows = csv_rows(r.out, &header);
  ASSERT_EQ(rows.size(), 17u);
  for (const auto& row : rows) {
    EXPECT_EQ(column(header, row, "group_delay_ps"), 0.0);
    EXPECT_EQ(column(header, row, "transmission"), 1.0);
  }
  EXPECT_NE(r.out.find("# config: "), std::string::npos);
}

TEST(Cli, VacuumPropagationHasNoDelay) {
  const auto r = run("propagate --config '" + preset("vacuum") + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> header;
  const auto rows = csv_rows(r.out, &header);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(column(header, rows[0], "fractional_delay"), 0.0, 1e-12);
  EXPECT_NEAR(column(header, rows[0], "fractional_broadening"), 0.0, 1e-12);
}

TEST(Cli, MissingCatalogExitsTwo) {
  auto doc = base_config();
  doc["catalog"] = "no_such_catalog.json";
  const auto r = run("propagate --config '" + write_config("missing.json", doc).string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no_such_catalog.json"), std::string::npos) << r.err;
}

TEST(Cli, FieldErrorsExitTwo) {
  auto doc = base_config();
  doc["cell"]["passes"] = 0;
  auto r = run("propagate --config '" + write_config("passes.json", doc).string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cell.passes"), std::string::npos) << r.err;

  doc = base_config();
  doc["pulse"]["shape"] = "triangle";
  r = run("propagate --config '" + write_config("shape.json", doc).string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("pulse.shape"), std::string::npos) << r.err;

  doc = base_config();
  doc["cell"]["temperature_c"] = 900;
  r = run("propagate --config '" + write_config("hot.json", doc).string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cell.temperature_c"), std::string::npos) << r.err;

  std::ofstream(scratch() / "broken.json") << "{\"catalog\": ";
  r = run("spectrum --config '" + (scratch() / "broken.json").string() + "'");
  EXPECT_EQ(r.code, 2);

  EXPECT_EQ(run("propagate").code, 2);
  EXPECT_EQ(run("frobnicate --config x").code, 2);
  EXPECT_EQ(run("propagate --config '" + preset("fig3b") + "' --format xml").code, 2);
}

TEST(Cli, TinyGridExitsThreeWithGuidance) {
  auto doc = base_config();
  doc["cell"]["temperature_c"] = 326;
  doc["pulse"] = {{"shape", "gaussian"}, {"t0_fs", 250}};
  doc["grid"] = {{"samples", 1024}, {"time_step_fs", 15}, {"duration_factor", 0.5}};
  const auto r = run("propagate --config '" + write_config("tiny.json", doc).string() + "'");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("enlarge the time window"), std::string::npos) << r.err;
}

TEST(Cli, GridBelowPolicyExitsThree) {
  auto doc = base_config();
  doc["grid"] = {{"samples", 1024}, {"time_step_fs", 15}};
  const auto r = run("propagate --config '" + write_config("short.json", doc).string() + "'");
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, OutputIsByteIdentical) {
  const auto a = run("propagate --config '" + preset("fig3b") + "'");
  const auto b = run("propagate --config '" + preset("fig3b") + "'");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto s1 = run("--threads 1 sweep --config '" + preset("fig4") + "'");
  const auto s2 = run("--threads 3 sweep --config '" + preset("fig4") + "'");
  ASSERT_EQ(s1.code, 0) << s1.err;
  EXPECT_EQ(s1.out, s2.out);
}

TEST(Cli, CatalogDirectoryFromEnvironment) {
  auto doc = base_config();
  doc["catalog"] = "rb_two_line.json";
  const auto cfg = write_config("env.json", doc).string();
  EXPECT_EQ(run("propagate --config '" + cfg + "'", "env -u SLOWLIGHT_CATALOG_DIR").code, 2);
  const auto r = run("propagate --config '" + cfg + "'",
                     "SLOWLIGHT_CATALOG_DIR='" + std::string(SLOWLIGHT_DATA_DIR) + "'");
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, OverridesAndJsonOutput) {
  const auto r = run("propagate --config '" + preset("fig3b") + "' --temp-c 25 --t0-fs 300 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("command"), "propagate");
  EXPECT_EQ(doc.at("config").at("cell").at("temperature_c").get<double>(), 25.0);
  EXPECT_EQ(doc.at("config").at("pulse").at("t0_fs").get<double>(), 300.0);
  const auto& cols = doc.at("columns");
  const auto& row = doc.at("rows").at(0);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "t0_fs") {
      EXPECT_NEAR(row[i].get<double>(), 300.0, 3.0);
    }
  }
}

TEST(Cli, PropagateWritesCompanionFiles) {
  const auto out = scratch() / "fig3b.csv";
  const auto r = run("propagate --config '" + preset("fig3b") + "' --out '" + out.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* suffix : {"input", "output", "transfer"}) {
    EXPECT_TRUE(fs::exists(scratch() / (std::string("fig3b.") + suffix + ".csv"))) << suffix;
  }
  std::ifstream in(scratch() / "fig3b.output.csv");
  const auto env = read_envelope(in);
  EXPECT_NEAR(omega_to_nm(env.carrier), 787.5, 1e-9);
}

TEST(Cli, RegimeCommand) {
  const auto r = run("regime --t0-fs 250 --gamma 37699111.84 --ratio 1000");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_NEAR(doc.at("exact_over_asymptotic").get<double>(), 1.0, 1e-2);
  EXPECT_EQ(doc.at("regime"), "dispersion-dominated");
  EXPECT_EQ(run("regime --t0-fs 250 --gamma 1 --ratio 0.5773502691896258").code, 3);
  EXPECT_EQ(run("regime --t0-fs 250 --gamma 1").code, 2);
}

TEST(RunConfig, ParsesPresets) {
  for (const char* name : {"fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6", "vacuum"}) {
    const auto c = cli::load_run_config(preset(name));
    EXPECT_NO_THROW(cli::resolve(c)) << name;
  }
  const auto fig6 = cli::load_run_config(preset("fig6"));
  EXPECT_EQ(fig6.sweep_pulses.size(), 3u);
  EXPECT_EQ(fig6.sweep_temperatures_c.size(), 32u);
}

TEST(RunConfig, RejectsConflicts) {
  auto doc = base_config();
  doc["density"] = {{"scale", 1.0}, {"calibrate", json::object()}};
  EXPECT_THROW(cli::parse_run_config(doc), ConfigError);
  doc = base_config();
  doc["pulse"]["bandwidth_nm"] = 6.9;
  EXPECT_THROW(cli::parse_run_config(doc), ConfigError);
  doc = base_config();
  doc["grid"] = {{"samples", 1024}};
  EXPECT_THROW(cli::parse_run_config(doc), ConfigError);
  doc = base_config();
  doc.erase("catalog");
  EXPECT_THROW(cli::parse_run_config(doc), ConfigError);
}
