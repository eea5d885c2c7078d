#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "edm/config.hpp"

namespace edm::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kDiverged = 2 };

struct SimulateOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
};

struct AnalyzeOptions {
  std::filesystem::path spikes;
  std::optional<std::filesystem::path> snapshots;
  double bin = 0.2;
  std::filesystem::path out;
};

struct SweepOptions {
  std::filesystem::path spec;
  int parallel = 1;
};

/// One axis of a parameter sweep. Paths inside the spec file are resolved
/// relative to the spec file's directory.
struct SweepSpec {
  SimConfig base;
  std::string axis;  // config key, "eif.<name>" for nested fields
  std::vector<double> values;
  int replicates = 1;
  std::filesystem::path out;
};

/// Raised for an unreadable or inconsistent sweep spec.
class SweepSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[nodiscard]] SweepSpec parse_sweep_spec(const std::string& text,
                                         const std::filesystem::path& base_dir);
[[nodiscard]] SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// base_seed XOR (cell_index * 0x9E3779B97F4A7C15).
[[nodiscard]] std::uint64_t derive_cell_seed(std::uint64_t base_seed, std::uint64_t cell_index);

/// Copy of base with the axis field set to value. Throws SweepSpecError if
/// the axis is not a numeric config field.
[[nodiscard]] SimConfig apply_axis(const SimConfig& base, const std::string& axis, double value);

inline constexpr const char* kSweepSummaryHeader =
    "axis_value,replicate,seed,status,sigma_terminal,lambda_hat,mean_activity";

// Each command writes exactly one JSON status line to `status` and
// diagnostics through the logger; the return value is the process exit code.
int cmd_simulate(const SimulateOptions& options, std::ostream& status);
int cmd_analyze(const AnalyzeOptions& options, std::ostream& status);
int cmd_sweep(const SweepOptions& options, std::ostream& status);

/// Configures the stderr logger from EDM_LOG (error, info, debug).
void init_logging();

}  // namespace edm::cli
