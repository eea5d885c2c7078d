#include "edm/topology.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace edm {

Topology::Topology(int n)
    : n_(n),
      adjacency_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0),
      out_degree_(static_cast<std::size_t>(n), 0) {
  if (n < 1) throw std::invalid_argument("topology needs at least one node");
}

std::vector<int> Topology::neighbors(int i) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(out_degree(i)));
  for (int j = 0; j < n_; ++j) {
    if (has_edge(i, j)) out.push_back(j);
  }
  return out;
}

std::vector<int> Topology::in_neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j) {
    if (has_edge(j, i)) out.push_back(j);
  }
  return out;
}

void Topology::add_edge(int i, int j) {
  if (i == j) throw std::invalid_argument("self loop " + std::to_string(i));
  if (has_edge(i, j)) {
    throw std::invalid_argument("duplicate edge " + std::to_string(i) + "->" + std::to_string(j));
  }
  adjacency_[index(i, j)] = 1.0;
  ++out_degree_[static_cast<std::size_t>(i)];
}

void Topology::remove_edge(int i, int j) {
  if (!has_edge(i, j)) {
    throw std::invalid_argument("no edge " + std::to_string(i) + "->" + std::to_string(j));
  }
  adjacency_[index(i, j)] = 0.0;
  --out_degree_[static_cast<std::size_t>(i)];
}

Eigen::MatrixXd Topology::adjacency() const {
  Eigen::MatrixXd a(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) a(i, j) = weight(i, j);
  }
  return a;
}

std::string Topology::check_invariants(int max_links) const {
  for (int i = 0; i < n_; ++i) {
    if (weight(i, i) != 0.0) return "self loop at " + std::to_string(i);
    int count = 0;
    for (int j = 0; j < n_; ++j) {
      const double w = weight(i, j);
      if (w < 0.0) return "negative weight at " + std::to_string(i) + "," + std::to_string(j);
      if (w != 0.0) ++count;
    }
    if (count != out_degree(i)) {
      return "out_degree mismatch at " + std::to_string(i) + ": stored " +
             std::to_string(out_degree(i)) + ", counted " + std::to_string(count);
    }
    if (count > max_links) {
      return "degree cap exceeded at " + std::to_string(i) + ": " + std::to_string(count) + " > " +
             std::to_string(max_links);
    }
  }
  return {};
}

Topology init_topology(int n, int k, std::uint64_t seed) {
  if (k < 0 || k > n - 1) {
    throw std::invalid_argument("init_topology: k must lie in [0, n-1]");
  }
  Topology topology(n);
  std::mt19937_64 rng(seed);
  std::vector<int> candidates;
  candidates.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    candidates.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) candidates.push_back(j);
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    for (int c = 0; c < k; ++c) topology.add_edge(i, candidates[static_cast<std::size_t>(c)]);
  }
  return topology;
}

Eigen::MatrixXd laplacian(const Topology& topology) {
  Eigen::MatrixXd l = -topology.adjacency();
  for (int i = 0; i < topology.size(); ++i) l(i, i) = topology.out_degree(i);
  return l;
}

}  // namespace edm
