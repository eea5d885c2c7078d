#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "edm/io.hpp"
#include "json.hpp"

using namespace edm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("edm_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

long csv_error_line(const fs::path& path) {
  try {
    (void)read_spikes_csv(path);
  } catch (const CsvError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("spike, rewire and snapshot CSVs round-trip") {
  const auto dir = scratch("roundtrip");
  const std::vector<SpikeRecord> spikes{{0.01, 3}, {0.02, 0}, {17.33, 9}};
  write_spikes_csv(dir / "s.csv", spikes);
  CHECK(read_spikes_csv(dir / "s.csv") == spikes);
  CHECK(read_text(dir / "s.csv").rfind(std::string(kSpikesHeader) + "\n", 0) == 0);

  const std::vector<RewireEvent> events{{1.5, 2, 4, -1, 0.25, std::nan("")}, {2.0, 1, 3, 0, 1.0, 0.5}};
  write_rewires_csv(dir / "r.csv", events);
  const auto back = read_rewires_csv(dir / "r.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].removed == -1);
  CHECK(std::isnan(back[0].q));
  CHECK(back[1].q == 0.5);
  CHECK(back[1].added == 3);

  Snapshot snap;
  snap.t = 0.1;
  snap.mean_v = 3.3;
  snap.mean_activity = 0.2;
  snap.sigma_global = 0.4;
  snap.min_deg = 1;
  snap.max_deg = 3;
  write_snapshots_csv(dir / "n.csv", {snap});
  const auto snaps = read_snapshots_csv(dir / "n.csv");
  REQUIRE(snaps.size() == 1);
  CHECK(snaps[0].mean_v == 3.3);
  CHECK(snaps[0].max_deg == 3);
}

TEST_CASE("malformed CSVs report the offending line") {
  const auto dir = scratch("malformed");
  write_text(dir / "trunc.csv", "t_ms,agent_id\n0.1,1\n0.2\n");
  CHECK(csv_error_line(dir / "trunc.csv") == 3);
  write_text(dir / "header.csv", "time,agent\n0.1,1\n");
  CHECK(csv_error_line(dir / "header.csv") == 1);
  write_text(dir / "text.csv", "t_ms,agent_id\n0.1,1\n0.2,1\nabc,2\n");
  CHECK(csv_error_line(dir / "text.csv") == 4);
  write_text(dir / "order.csv", "t_ms,agent_id\n0.3,1\n0.2,1\n");
  CHECK(csv_error_line(dir / "order.csv") == 3);
  write_text(dir / "neg.csv", "t_ms,agent_id\n0.3,-1\n");
  CHECK(csv_error_line(dir / "neg.csv") == 2);
  write_text(dir / "empty.csv", "");
  CHECK(csv_error_line(dir / "empty.csv") == 1);
  CHECK(csv_error_line(dir / "missing.csv") == 0);
  write_text(dir / "crlf.csv", "t_ms,agent_id\r\n0.1,1\r\n\r\n");
  CHECK(read_spikes_csv(dir / "crlf.csv").size() == 1);
}

TEST_CASE("empty spike log analyses to zero avalanches") {
  const auto report = analyze_logs({}, {}, 0.2);
  CHECK(report.avalanches.empty());
  CHECK_FALSE(report.fit);
  CHECK_FALSE(report.fit_error.empty());
  CHECK_FALSE(report.branching);
  const auto j = nlohmann::json::parse(stats_json(report));
  CHECK(j["avalanches"]["count"] == 0);
  CHECK(j["power_law"].is_null());
}

TEST_CASE("write_run and write_analysis produce the documented files") {
  const auto dir = scratch("run");
  SimConfig c;
  c.t_total = 100.0;
  c.initial_links = 1;
  const auto run = run_simulation(c);
  write_run(dir, run, R"({"note": "extra"})");
  for (const char* f : {"spikes.csv", "rewires.csv", "snapshots.csv", "run.json"}) CHECK(fs::exists(dir / f));
  const auto j = nlohmann::json::parse(read_text(dir / "run.json"));
  CHECK(j["seed"] == c.seed);
  CHECK(j["note"] == "extra");
  CHECK(j["config"]["n_agents"] == 10);
  CHECK(j["summary"]["spikes"] == run.summary.spikes);

  const auto report = analyze_logs(read_spikes_csv(dir / "spikes.csv"),
                                   read_snapshots_csv(dir / "snapshots.csv"), 0.2);
  CHECK(report.spikes == run.summary.spikes);
  REQUIRE(report.branching);
  CHECK(report.branching->terminal == doctest::Approx(run.summary.branching.terminal).epsilon(1e-15));
  write_analysis(dir / "analysis", report, run.log.snapshots);
  CHECK(fs::exists(dir / "analysis" / "stats.json"));
  CHECK(read_text(dir / "analysis" / "plotdata" / "avalanche_sizes.csv").rfind("z,count\n", 0) == 0);
  CHECK(read_text(dir / "analysis" / "plotdata" / "sigma.csv").rfind("t_ms,sigma_global\n", 0) == 0);
}
