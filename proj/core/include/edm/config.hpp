#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edm {

/// Raised when a configuration violates one of its documented bounds.
/// The message names the offending field and the bound.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponential integrate-and-fire parameters. Potentials are in shifted
/// coordinates (reset at 0 mV), conductances in mS, capacitance in uF,
/// times in ms.
struct EifParams {
  double capacitance = 1.0;
  double leak_conductance = 0.1;
  double exp_conductance = 0.1;
  double syn_conductance = 0.05;
  double neib_conductance = 0.05;
  double v_leak = 0.0;
  double v_threshold = 10.0;
  double v_reset = 0.0;
  double v_syn = 20.0;
  double delta_t = 1.0;
  double v_peak = 15.0;  // numerical spike cutoff, V_T + 5 delta_T
  double tau_ref = 2.0;
  double v_gamma = 10.0;
  double delta_gamma = 2.0;
  double tau_gamma = 5.0;

  bool operator==(const EifParams&) const = default;
};

/// Which candidate set the local branching ratio sums over.
enum class SigmaMode {
  CurrentNeighbors,  // the agent's current outward links
  TopK,              // K highest coupling probabilities while unsaturated
};

struct SimConfig {
  int n_agents = 10;
  int max_links = 3;
  /// Outward links per agent at t = 0; a negative value means max_links.
  int initial_links = -1;

  double dt = 0.01;
  double t_total = 1000.0;
  std::uint64_t seed = 1;

  EifParams eif{};
  double noise_sigma = 0.5;
  double noise_correlation = 0.0;

  /// Per-agent evidence drift g_i in mV/ms. A single entry is broadcast to
  /// every agent by validate_config.
  std::vector<double> drift_bias{1.0};
  double gain = 0.1;
  double decision_threshold = 8.0;

  /// Per-agent spike threshold V_Ti used by the rewiring probabilities.
  /// Empty means eif.v_threshold for every agent.
  std::vector<double> thresholds{};

  double avalanche_bin = 0.2;
  bool cap_sigma = true;
  SigmaMode sigma_mode = SigmaMode::CurrentNeighbors;
  double kb = 1.0;

  bool rewiring = true;
  double observation_noise = 0.0;
  bool verbatim_gamma = false;
  int snapshot_stride = 10;
  double transient_fraction = 0.2;

  double v_init_min = 0.0;
  double v_init_max = 10.0;

  bool operator==(const SimConfig&) const = default;

  [[nodiscard]] int effective_initial_links() const {
    return initial_links < 0 ? max_links : initial_links;
  }
  [[nodiscard]] long steps() const;
  /// Input-sequence length d = t_total / dt.
  [[nodiscard]] double sequence_length() const { return t_total / dt; }
  [[nodiscard]] double threshold_of(int agent) const;
};

/// Lower feasibility bound of an equicorrelated N x N correlation matrix.
[[nodiscard]] double min_noise_correlation(int n_agents);

/// Checks every invariant and returns the config with drift_bias broadcast
/// to n_agents entries. Throws ConfigError on the first violation.
[[nodiscard]] SimConfig validate_config(SimConfig raw);

/// Parses a JSON config document. Missing keys keep their defaults,
/// unknown keys are rejected. The result is not validated.
[[nodiscard]] SimConfig config_from_json(std::string_view text);
[[nodiscard]] std::string config_to_json(const SimConfig& config, int indent = 2);

[[nodiscard]] SimConfig load_config(const std::string& path);

[[nodiscard]] std::string_view to_string(SigmaMode mode);

}  // namespace edm
