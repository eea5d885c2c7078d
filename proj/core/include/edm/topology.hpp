#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace edm {

/// Directed simple graph over N agents. Row i of the adjacency matrix holds
/// the outward links of agent i; weights are 1 for every present edge.
class Topology {
 public:
  Topology() = default;
  explicit Topology(int n);

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] double weight(int i, int j) const { return adjacency_[index(i, j)]; }
  [[nodiscard]] bool has_edge(int i, int j) const { return weight(i, j) != 0.0; }
  [[nodiscard]] int out_degree(int i) const { return out_degree_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] const std::vector<int>& out_degrees() const { return out_degree_; }

  /// Outward neighbours of i in ascending index order.
  [[nodiscard]] std::vector<int> neighbors(int i) const;
  /// Agents with an edge into i, ascending.
  [[nodiscard]] std::vector<int> in_neighbors(int i) const;

  /// Adds i -> j. Throws std::invalid_argument on self loops or duplicates.
  void add_edge(int i, int j);
  /// Removes i -> j. Throws std::invalid_argument if the edge is absent.
  void remove_edge(int i, int j);

  [[nodiscard]] Eigen::MatrixXd adjacency() const;

  /// Empty string when simple, zero-diagonal, degree-consistent and capped
  /// at max_links; otherwise a description of the first violation.
  [[nodiscard]] std::string check_invariants(int max_links) const;

  bool operator==(const Topology&) const = default;

 private:
  [[nodiscard]] std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<double> adjacency_;
  std::vector<int> out_degree_;
};

/// Every agent links to k distinct, uniformly chosen other agents.
[[nodiscard]] Topology init_topology(int n, int k, std::uint64_t seed);

/// L = D - A with D the out-degree diagonal.
[[nodiscard]] Eigen::MatrixXd laplacian(const Topology& topology);

}  // namespace edm
