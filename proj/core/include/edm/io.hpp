#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edm/analysis.hpp"
#include "edm/network.hpp"
#include "edm/records.hpp"
#include "edm/simulation.hpp"

namespace edm {

/// Malformed CSV input; line() is 1-based and includes the header.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& file, long line, const std::string& what);
  [[nodiscard]] long line() const { return line_; }

 private:
  long line_;
};

inline constexpr const char* kSpikesHeader = "t_ms,agent_id";
inline constexpr const char* kRewiresHeader = "t_ms,source,added,removed,p,q";
inline constexpr const char* kSnapshotsHeader =
    "t_ms,mean_v,mean_activity,sigma_global,min_deg,max_deg";

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

void write_spikes_csv(const std::filesystem::path& path, const std::vector<SpikeRecord>& spikes);
void write_rewires_csv(const std::filesystem::path& path, const std::vector<RewireEvent>& events);
void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snapshots);

[[nodiscard]] std::vector<SpikeRecord> read_spikes_csv(const std::filesystem::path& path);
[[nodiscard]] std::vector<RewireEvent> read_rewires_csv(const std::filesystem::path& path);
[[nodiscard]] std::vector<Snapshot> read_snapshots_csv(const std::filesystem::path& path);

/// run.json: config echo, seed, summary statistics and decision class.
/// extra_json, when given, is merged in as a JSON object (e.g. seed provenance).
[[nodiscard]] std::string run_json(const RunArtifacts& run, const std::string& extra_json = {});

/// Writes spikes.csv, rewires.csv, snapshots.csv and run.json into dir.
void write_run(const std::filesystem::path& dir, const RunArtifacts& run,
               const std::string& extra_json = {});

/// Offline statistics over a spike log and snapshot series.
struct AnalysisReport {
  double bin_width = 0.0;
  std::vector<Avalanche> avalanches;
  std::optional<PowerLawFit> fit;
  std::string fit_error;  // why no fit was produced, if any
  std::optional<BranchingSummary> branching;
  std::optional<BoltzmannFit> boltzmann;
  long spikes = 0;
};

[[nodiscard]] AnalysisReport analyze_logs(const std::vector<SpikeRecord>& spikes,
                                          const std::vector<Snapshot>& snapshots, double bin_width,
                                          double transient_fraction = 0.2);

[[nodiscard]] std::string stats_json(const AnalysisReport& report);

/// Writes stats.json and plotdata/{avalanche_sizes,sigma}.csv into dir.
void write_analysis(const std::filesystem::path& dir, const AnalysisReport& report,
                    const std::vector<Snapshot>& snapshots);

}  // namespace edm
