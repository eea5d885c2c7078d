#pragma once

#include <span>
#include <vector>

#include "edm/config.hpp"
#include "edm/sde.hpp"
#include "edm/topology.hpp"

namespace edm {

/// One accepted link change. removed is -1 when the link was added into a
/// free slot; q is NaN in that case.
struct RewireEvent {
  double time = 0.0;
  int source = 0;
  int added = 0;
  int removed = -1;
  double p = 0.0;
  double q = 0.0;
};

/// P_ij = (X_j - X_i) / (V_Ti + V_Tj) * (K - K_i) / K, clamped to [0, 1].
[[nodiscard]] double coupling_probability(int i, int j, std::span<const double> potentials,
                                          std::span<const double> thresholds,
                                          const Topology& topology, int max_links);

/// Q_ij = (1 - (X_i - X_j) / (V_Ti + V_Tj)) * K_i / K, clamped to [0, 1].
/// Throws std::invalid_argument unless j is currently linked from i.
[[nodiscard]] double decoupling_probability(int i, int j, std::span<const double> potentials,
                                            std::span<const double> thresholds,
                                            const Topology& topology, int max_links);

/// Source of the link-change probabilities used by rewire_agent.
class RewireProbabilities {
 public:
  virtual ~RewireProbabilities() = default;
  [[nodiscard]] virtual double coupling(int i, int j, const Topology& topology) const = 0;
  [[nodiscard]] virtual double decoupling(int i, int j, const Topology& topology) const = 0;
};

/// The voltage-difference rules above, evaluated on a fixed state snapshot.
class VoltageRewireProbabilities final : public RewireProbabilities {
 public:
  VoltageRewireProbabilities(std::span<const double> potentials, std::span<const double> thresholds,
                             int max_links)
      : potentials_(potentials), thresholds_(thresholds), max_links_(max_links) {}

  [[nodiscard]] double coupling(int i, int j, const Topology& topology) const override {
    return coupling_probability(i, j, potentials_, thresholds_, topology, max_links_);
  }
  [[nodiscard]] double decoupling(int i, int j, const Topology& topology) const override {
    return decoupling_probability(i, j, potentials_, thresholds_, topology, max_links_);
  }

 private:
  std::span<const double> potentials_;
  std::span<const double> thresholds_;
  int max_links_;
};

/// One rewiring pass for an active agent i. Non-neighbours are visited in a
/// fresh random order; each is coupled with probability P_ij. A successful
/// coupling first tries to drop one current neighbour (random order, each
/// accepted with Q_ij). Without a drop the addition only goes through while
/// i has a free slot, so out-degrees never exceed max_links.
std::vector<RewireEvent> rewire_agent(int i, Topology& topology,
                                      const RewireProbabilities& probabilities, int max_links,
                                      double time, Rng& rng);

/// sigma_j: sum of P_jt over agent j's candidate slots, optionally capped at 1.
[[nodiscard]] double local_branching_ratio(int j, std::span<const double> potentials,
                                           std::span<const double> thresholds,
                                           const Topology& topology, int max_links, bool cap,
                                           SigmaMode mode = SigmaMode::CurrentNeighbors);

/// sigma~ = sum_j sigma_j / (N - 1).
[[nodiscard]] double global_branching_ratio(std::span<const double> potentials,
                                            std::span<const double> thresholds,
                                            const Topology& topology, int max_links, bool cap,
                                            SigmaMode mode = SigmaMode::CurrentNeighbors);

}  // namespace edm
