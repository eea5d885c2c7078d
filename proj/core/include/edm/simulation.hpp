#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "edm/analysis.hpp"
#include "edm/config.hpp"
#include "edm/meanfield.hpp"
#include "edm/network.hpp"
#include "edm/neuron.hpp"
#include "edm/records.hpp"
#include "edm/sde.hpp"
#include "edm/topology.hpp"

namespace edm {

/// A potential became NaN or infinite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int agent, long step, double value);
  [[nodiscard]] int agent() const { return agent_; }
  [[nodiscard]] long step() const { return step_; }

 private:
  int agent_;
  long step_;
};

struct SpikeLog {
  std::vector<SpikeRecord> spikes;
  std::vector<Snapshot> snapshots;
};

/// Samples gathered at every snapshot for the offline statistics.
struct TrajectorySamples {
  std::vector<double> quiescent_potentials;  // potentials of agents with s = 0
  std::vector<double> gating_sigmoid;        // Phi(X_i) = Gamma_inf(X_i)
  std::vector<double> firing_probability;    // p(s_i = 1 | X_i)
};

/// Full state of one run. step() executes, in order: correlated noise,
/// ionic currents and EIF drift, Euler-Maruyama update, gating relaxation,
/// spike detection / reset, rewiring of agents that fired, logging.
class World {
 public:
  explicit World(const SimConfig& config);

  void step(SpikeLog& log, std::vector<RewireEvent>& rewires);

  [[nodiscard]] const SimConfig& config() const { return config_; }
  [[nodiscard]] const Topology& topology() const { return topology_; }
  [[nodiscard]] Topology& topology() { return topology_; }
  [[nodiscard]] const std::vector<AgentState>& agents() const { return agents_; }
  [[nodiscard]] std::vector<AgentState>& agents() { return agents_; }
  [[nodiscard]] double time() const { return static_cast<double>(step_index_) * config_.dt; }
  [[nodiscard]] long step_index() const { return step_index_; }
  [[nodiscard]] const TrajectorySamples& samples() const { return samples_; }

  [[nodiscard]] std::vector<double> potentials() const;
  [[nodiscard]] std::vector<int> states() const;
  [[nodiscard]] std::vector<double> thresholds() const;
  [[nodiscard]] double sigma_global() const;
  [[nodiscard]] Snapshot snapshot() const;

  /// Per-agent neighbour-coupling term alpha sum_j a_ij (y_j - x_i), the
  /// per-agent form used by step().
  [[nodiscard]] std::vector<double> neighbor_coupling(std::span<const double> observed,
                                                      double gain) const;

 private:
  void record_snapshot(SpikeLog& log);

  SimConfig config_;
  Topology topology_;
  std::vector<AgentState> agents_;
  Rng rng_;
  CorrelatedNoise noise_;
  long step_index_ = 0;
  TrajectorySamples samples_;

  std::vector<double> dw_;
  std::vector<double> drift_;
  std::vector<double> beta_;
  std::vector<double> v_;
  std::vector<double> observed_;
  std::vector<double> neighbor_v_;
  std::vector<int> spiked_;
};

/// Matrix form -alpha L X of the neighbour coupling (observed = true state).
[[nodiscard]] std::vector<double> neighbor_coupling_matrix_form(const Topology& topology,
                                                                std::span<const double> potentials,
                                                                double gain);

enum class DecisionClass { Optimal, SubOptimal, Undecided };
[[nodiscard]] std::string to_string(DecisionClass decision);

struct DecisionOutcome {
  DecisionClass decision = DecisionClass::Undecided;
  bool wrong_choice = false;
};

/// Classifies a population-mean trajectory against thresholds +-z, where the
/// correct side is the sign of mean_drift.
[[nodiscard]] DecisionOutcome classify_decision(std::span<const double> mean_trajectory, double z,
                                                double mean_drift);

/// Cumulative time average of the series; the last element is the u-bar
/// estimate. Requires at least two points.
[[nodiscard]] std::vector<double> running_mean_state(std::span<const double> series);

struct RunSummary {
  long steps = 0;
  long spikes = 0;
  long rewires = 0;
  double mean_activity = 0.0;
  BranchingSummary branching{};
  double u_bar = 0.0;
  DecisionOutcome decision{};
  double global_field = 0.0;
  double total_drift = 0.0;
  Estimate activity_density{};
  double final_energy = 0.0;
  std::optional<BoltzmannFit> boltzmann{};
  std::string topology_check{};
};

struct RunArtifacts {
  SimConfig config;
  std::uint64_t seed = 0;
  SpikeLog log;
  std::vector<RewireEvent> rewires;
  Topology final_topology;
  TrajectorySamples samples;
  RunSummary summary;
};

/// Runs round(t_total / dt) steps from a validated copy of config.
[[nodiscard]] RunArtifacts run_simulation(const SimConfig& config);

}  // namespace edm
