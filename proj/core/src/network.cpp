#include "edm/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace edm {

namespace {

double at(std::span<const double> v, int i) { return v[static_cast<std::size_t>(i)]; }

}  // namespace

double coupling_probability(int i, int j, std::span<const double> potentials,
                            std::span<const double> thresholds, const Topology& topology,
                            int max_links) {
  const double raw = (at(potentials, j) - at(potentials, i)) /
                     (at(thresholds, i) + at(thresholds, j)) *
                     static_cast<double>(max_links - topology.out_degree(i)) / max_links;
  return std::clamp(raw, 0.0, 1.0);
}

double decoupling_probability(int i, int j, std::span<const double> potentials,
                              std::span<const double> thresholds, const Topology& topology,
                              int max_links) {
  if (!topology.has_edge(i, j)) {
    throw std::invalid_argument("decoupling_probability: " + std::to_string(j) +
                                " is not a neighbour of " + std::to_string(i));
  }
  const double raw = (1.0 - (at(potentials, i) - at(potentials, j)) /
                                (at(thresholds, i) + at(thresholds, j))) *
                     static_cast<double>(topology.out_degree(i)) / max_links;
  return std::clamp(raw, 0.0, 1.0);
}

std::vector<RewireEvent> rewire_agent(int i, Topology& topology,
                                      const RewireProbabilities& probabilities, int max_links,
                                      double time, Rng& rng) {
  std::vector<RewireEvent> events;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<int> candidates;
  for (int j = 0; j < topology.size(); ++j) {
    if (j != i && !topology.has_edge(i, j)) candidates.push_back(j);
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);

  for (int j : candidates) {
    const double p = probabilities.coupling(i, j, topology);
    if (!(uniform(rng) < p)) continue;

    std::vector<int> current = topology.neighbors(i);
    std::shuffle(current.begin(), current.end(), rng);
    int removed = -1;
    double q = std::numeric_limits<double>::quiet_NaN();
    for (int k : current) {
      const double qk = probabilities.decoupling(i, k, topology);
      if (uniform(rng) < qk) {
        removed = k;
        q = qk;
        break;
      }
    }
    if (removed < 0 && topology.out_degree(i) >= max_links) continue;

    if (removed >= 0) topology.remove_edge(i, removed);
    topology.add_edge(i, j);
    events.push_back({time, i, j, removed, p, q});
  }
  return events;
}

double local_branching_ratio(int j, std::span<const double> potentials,
                             std::span<const double> thresholds, const Topology& topology,
                             int max_links, bool cap, SigmaMode mode) {
  double sigma = 0.0;
  if (mode == SigmaMode::TopK && topology.out_degree(j) < max_links) {
    std::vector<double> p;
    for (int t = 0; t < topology.size(); ++t) {
      if (t != j) p.push_back(coupling_probability(j, t, potentials, thresholds, topology, max_links));
    }
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(max_links), p.size());
    std::partial_sort(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k), p.end(),
                      std::greater<>());
    for (std::size_t m = 0; m < k; ++m) sigma += p[m];
  } else {
    for (int t = 0; t < topology.size(); ++t) {
      if (topology.has_edge(j, t)) {
        sigma += coupling_probability(j, t, potentials, thresholds, topology, max_links);
      }
    }
  }
  return cap ? std::min(sigma, 1.0) : sigma;
}

double global_branching_ratio(std::span<const double> potentials,
                              std::span<const double> thresholds, const Topology& topology,
                              int max_links, bool cap, SigmaMode mode) {
  const int n = topology.size();
  if (n < 2) throw std::invalid_argument("global_branching_ratio: N must be >= 2");
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    total += local_branching_ratio(j, potentials, thresholds, topology, max_links, cap, mode);
  }
  return total / (n - 1);
}

}  // namespace edm
