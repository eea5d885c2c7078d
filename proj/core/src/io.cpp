#include "edm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace edm {

using nlohmann::json;
namespace fs = std::filesystem;

CsvError::CsvError(const std::string& file, long line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return {buf, end};
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

class CsvReader {
 public:
  CsvReader(const fs::path& path, const char* header, std::size_t columns)
      : file_(path.string()), in_(path, std::ios::binary), columns_(columns) {
    if (!in_) throw CsvError(file_, 0, "cannot open file");
    std::string line;
    if (!std::getline(in_, line)) {
      throw CsvError(file_, 1, std::string("missing header '") + header + "'");
    }
    ++line_no_;
    strip_cr(line);
    if (line != header) {
      throw CsvError(file_, 1, std::string("expected header '") + header + "', got '" + line + "'");
    }
  }

  // Reads the next data row; false at end of file. Blank trailing lines are skipped.
  bool next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      strip_cr(line);
      if (line.empty()) continue;
      fields_.clear();
      std::size_t start = 0;
      while (true) {
        const auto comma = line.find(',', start);
        fields_.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (fields_.size() != columns_) {
        fail("expected " + std::to_string(columns_) + " fields, got " + std::to_string(fields_.size()));
      }
      return true;
    }
    return false;
  }

  double real(std::size_t k) const {
    const auto& f = fields_[k];
    double x = 0.0;
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
    if (ec != std::errc{} || end != f.data() + f.size() || f.empty()) {
      fail("field " + std::to_string(k + 1) + " is not a number: '" + f + "'");
    }
    return x;
  }

  int integer(std::size_t k) const {
    const auto& f = fields_[k];
    int x = 0;
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
    if (ec != std::errc{} || end != f.data() + f.size() || f.empty()) {
      fail("field " + std::to_string(k + 1) + " is not an integer: '" + f + "'");
    }
    return x;
  }

  [[noreturn]] void fail(const std::string& what) const { throw CsvError(file_, line_no_, what); }

 private:
  static void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }

  std::string file_;
  std::ifstream in_;
  std::size_t columns_;
  long line_no_ = 0;
  std::vector<std::string> fields_;
};

json branching_json(const BranchingSummary& b) {
  return {{"mean", b.mean},
          {"min", b.min},
          {"max", b.max},
          {"terminal", b.terminal},
          {"regime", to_string(b.regime)}};
}

json boltzmann_json(const BoltzmannFit& b) {
  return {{"kl", b.kl}, {"pass", b.pass}, {"states", b.states}, {"samples", b.samples}};
}

}  // namespace

void write_spikes_csv(const fs::path& path, const std::vector<SpikeRecord>& spikes) {
  auto out = open_out(path);
  out << kSpikesHeader << '\n';
  for (const auto& s : spikes) out << format_double(s.t) << ',' << s.agent << '\n';
  close_checked(out, path);
}

void write_rewires_csv(const fs::path& path, const std::vector<RewireEvent>& events) {
  auto out = open_out(path);
  out << kRewiresHeader << '\n';
  for (const auto& e : events) {
    out << format_double(e.time) << ',' << e.source << ',' << e.added << ',' << e.removed << ','
        << format_double(e.p) << ',' << format_double(e.q) << '\n';
  }
  close_checked(out, path);
}

void write_snapshots_csv(const fs::path& path, const std::vector<Snapshot>& snapshots) {
  auto out = open_out(path);
  out << kSnapshotsHeader << '\n';
  for (const auto& s : snapshots) {
    out << format_double(s.t) << ',' << format_double(s.mean_v) << ','
        << format_double(s.mean_activity) << ',' << format_double(s.sigma_global) << ','
        << s.min_deg << ',' << s.max_deg << '\n';
  }
  close_checked(out, path);
}

std::vector<SpikeRecord> read_spikes_csv(const fs::path& path) {
  CsvReader csv(path, kSpikesHeader, 2);
  std::vector<SpikeRecord> out;
  while (csv.next()) {
    SpikeRecord r{csv.real(0), csv.integer(1)};
    if (r.agent < 0) csv.fail("agent_id must be >= 0");
    if (!out.empty() && r.t < out.back().t) csv.fail("spike times must be nondecreasing");
    out.push_back(r);
  }
  return out;
}

std::vector<RewireEvent> read_rewires_csv(const fs::path& path) {
  CsvReader csv(path, kRewiresHeader, 6);
  std::vector<RewireEvent> out;
  while (csv.next()) {
    out.push_back({csv.real(0), csv.integer(1), csv.integer(2), csv.integer(3), csv.real(4),
                   csv.real(5)});
  }
  return out;
}

std::vector<Snapshot> read_snapshots_csv(const fs::path& path) {
  CsvReader csv(path, kSnapshotsHeader, 6);
  std::vector<Snapshot> out;
  while (csv.next()) {
    Snapshot s;
    s.t = csv.real(0);
    s.mean_v = csv.real(1);
    s.mean_activity = csv.real(2);
    s.sigma_global = csv.real(3);
    s.min_deg = csv.integer(4);
    s.max_deg = csv.integer(5);
    out.push_back(std::move(s));
  }
  return out;
}

std::string run_json(const RunArtifacts& run, const std::string& extra_json) {
  const auto& s = run.summary;
  json summary{{"steps", s.steps},
               {"spikes", s.spikes},
               {"rewires", s.rewires},
               {"mean_activity", s.mean_activity},
               {"branching", branching_json(s.branching)},
               {"u_bar", s.u_bar},
               {"global_field", s.global_field},
               {"total_drift", s.total_drift},
               {"activity_density", {{"value", s.activity_density.value},
                                     {"standard_error", s.activity_density.standard_error}}},
               {"final_energy", s.final_energy},
               {"topology_valid", s.topology_check.empty()}};
  summary["boltzmann"] = s.boltzmann ? boltzmann_json(*s.boltzmann) : json(nullptr);
  json j{{"config", json::parse(config_to_json(run.config))},
         {"seed", run.seed},
         {"summary", summary},
         {"decision", {{"class", to_string(s.decision.decision)},
                       {"wrong_choice", s.decision.wrong_choice}}}};
  if (!extra_json.empty()) j.update(json::parse(extra_json));
  return j.dump(2);
}

void write_run(const fs::path& dir, const RunArtifacts& run, const std::string& extra_json) {
  fs::create_directories(dir);
  write_spikes_csv(dir / "spikes.csv", run.log.spikes);
  write_rewires_csv(dir / "rewires.csv", run.rewires);
  write_snapshots_csv(dir / "snapshots.csv", run.log.snapshots);
  auto out = open_out(dir / "run.json");
  out << run_json(run, extra_json) << '\n';
  close_checked(out, dir / "run.json");
}

AnalysisReport analyze_logs(const std::vector<SpikeRecord>& spikes,
                            const std::vector<Snapshot>& snapshots, double bin_width,
                            double transient_fraction) {
  AnalysisReport r;
  r.bin_width = bin_width;
  r.spikes = static_cast<long>(spikes.size());
  r.avalanches = detect_avalanches(spikes, bin_width);
  std::vector<double> sizes;
  sizes.reserve(r.avalanches.size());
  for (const auto& a : r.avalanches) sizes.push_back(static_cast<double>(a.size));
  try {
    r.fit = fit_power_law(sizes);
  } catch (const std::exception& e) {
    r.fit_error = e.what();
  }
  if (!snapshots.empty()) {
    std::vector<double> sigma;
    sigma.reserve(snapshots.size());
    for (const auto& s : snapshots) sigma.push_back(s.sigma_global);
    r.branching = branching_summary(sigma, transient_fraction);
  }
  return r;
}

std::string stats_json(const AnalysisReport& r) {
  std::map<long, long> histogram;
  for (const auto& a : r.avalanches) ++histogram[a.size];
  json hist = json::array();
  for (const auto& [z, count] : histogram) hist.push_back({{"z", z}, {"count", count}});

  json j{{"bin_width_ms", r.bin_width},
         {"spikes", r.spikes},
         {"avalanches", {{"count", r.avalanches.size()}, {"histogram", hist}}}};
  if (r.fit) {
    const auto& f = *r.fit;
    j["power_law"] = {{"exponent", f.exponent},
                      {"alpha", f.alpha},
                      {"alpha_stderr", f.alpha_stderr},
                      {"z_min", f.z_min},
                      {"log_slope", f.log_slope},
                      {"r_squared", f.r_squared},
                      {"decades", f.decades},
                      {"ks_distance", f.ks_distance},
                      {"samples", f.samples},
                      {"is_power_law", f.is_power_law()}};
  } else {
    j["power_law"] = nullptr;
    j["power_law_error"] = r.fit_error;
  }
  j["branching"] = r.branching ? branching_json(*r.branching) : json(nullptr);
  j["boltzmann"] = r.boltzmann ? boltzmann_json(*r.boltzmann) : json(nullptr);
  return j.dump(2);
}

void write_analysis(const fs::path& dir, const AnalysisReport& report,
                    const std::vector<Snapshot>& snapshots) {
  fs::create_directories(dir / "plotdata");
  {
    auto out = open_out(dir / "stats.json");
    out << stats_json(report) << '\n';
    close_checked(out, dir / "stats.json");
  }
  {
    std::map<long, long> histogram;
    for (const auto& a : report.avalanches) ++histogram[a.size];
    auto out = open_out(dir / "plotdata" / "avalanche_sizes.csv");
    out << "z,count\n";
    for (const auto& [z, count] : histogram) out << z << ',' << count << '\n';
    close_checked(out, dir / "plotdata" / "avalanche_sizes.csv");
  }
  {
    auto out = open_out(dir / "plotdata" / "sigma.csv");
    out << "t_ms,sigma_global\n";
    for (const auto& s : snapshots) out << format_double(s.t) << ',' << format_double(s.sigma_global) << '\n';
    close_checked(out, dir / "plotdata" / "sigma.csv");
  }
}

}  // namespace edm
