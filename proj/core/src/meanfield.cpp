#include "edm/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace edm {

namespace {

// Normalised exp(logits) with a max shift; -inf logits map to 0.
std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw DegenerateDistributionError("softmax of an empty set");
  double top = -std::numeric_limits<double>::infinity();
  for (double l : logits) {
    if (std::isnan(l)) throw DegenerateDistributionError("softmax: NaN logit");
    top = std::max(top, l);
  }
  if (!std::isfinite(top)) {
    throw DegenerateDistributionError("softmax: no finite logit to normalise");
  }
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - top);
    total += out[k];
  }
  for (auto& p : out) p /= total;
  return out;
}

}  // namespace

double boltzmann_unit_on_probability(double delta_e, double temperature) {
  if (!(temperature > 0.0)) {
    throw std::domain_error("boltzmann_unit_on_probability: temperature must be > 0");
  }
  return 1.0 / (1.0 + std::exp(-delta_e / temperature));
}

std::vector<double> boltzmann_distribution(std::span<const double> energies, double kt) {
  if (energies.empty()) throw DegenerateDistributionError("boltzmann_distribution: no energies");
  if (!(kt > 0.0)) throw std::domain_error("boltzmann_distribution: kT must be > 0");
  std::vector<double> logits(energies.size());
  std::transform(energies.begin(), energies.end(), logits.begin(),
                 [kt](double e) { return -e / kt; });
  return softmax(logits);
}

double total_drift(std::span<const double> drifts) {
  double w = 0.0;
  for (double g : drifts) w += std::abs(g);
  return w;
}

double local_field(int i, const Topology& topology, std::span<const double> drifts,
                   double total_drift) {
  if (total_drift == 0.0) throw std::domain_error("local_field: total drift W is zero");
  double acc = 0.0;
  for (int j = 0; j < topology.size(); ++j) {
    acc += topology.weight(j, i) * drifts[static_cast<std::size_t>(j)];
  }
  return -acc / total_drift;
}

double global_field(std::span<const double> local_fields, int max_links, int n) {
  if (max_links < 1 || n < 1) throw std::domain_error("global_field: K and N must be >= 1");
  double acc = 0.0;
  for (double f : local_fields) acc += f / max_links;
  return acc / n;
}

double thermodynamic_beta(double local_field, double global_field, double kb, bool verbatim) {
  if (verbatim || local_field > 0.0) return 1.0 / (kb * local_field);
  return 1.0 / (kb * std::max(std::abs(global_field), 1e-6));
}

FieldSummary summarize_fields(const Topology& topology, std::span<const double> drifts,
                              int max_links, double kb, bool verbatim_gamma) {
  FieldSummary s;
  const int n = topology.size();
  s.total_drift = total_drift(drifts);
  s.local_fields.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    s.local_fields[static_cast<std::size_t>(i)] = local_field(i, topology, drifts, s.total_drift);
  }
  s.global_field = global_field(s.local_fields, max_links, n);
  s.thermodynamic_beta.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    s.thermodynamic_beta[static_cast<std::size_t>(i)] = thermodynamic_beta(
        s.local_fields[static_cast<std::size_t>(i)], s.global_field, kb, verbatim_gamma);
  }
  return s;
}

double mean_field_exponent(int i, const Topology& topology, const FieldSummary& fields,
                           std::span<const double> coupling_row,
                           std::span<const double> decoupling_row, double bias_sum) {
  double outside = 0.0;
  double inside = 0.0;
  for (int j = 0; j < topology.size(); ++j) {
    if (j == i) continue;
    const auto sj = static_cast<std::size_t>(j);
    if (topology.has_edge(i, j)) {
      inside += fields.local_fields[sj] * decoupling_row[sj];
    } else {
      outside += fields.global_field * coupling_row[sj];
    }
  }
  const double gamma = fields.thermodynamic_beta[static_cast<std::size_t>(i)];
  return -gamma * (outside - inside + bias_sum);
}

std::vector<double> mean_field_firing_prob(std::span<const double> exponents) {
  std::vector<double> weights(exponents.size());
  double total = 0.0;
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    weights[k] = std::exp(exponents[k]);
    total += weights[k];
  }
  if (exponents.empty() || !(total > 0.0) || !std::isfinite(total)) {
    std::ostringstream msg;
    msg << "mean_field_firing_prob: degenerate weights for exponents [";
    for (std::size_t k = 0; k < exponents.size(); ++k) msg << (k ? ", " : "") << exponents[k];
    msg << "]";
    throw DegenerateDistributionError(msg.str());
  }
  for (auto& w : weights) w /= total;
  return weights;
}

double mean_activity(std::span<const int> states) {
  if (states.empty()) return 0.0;
  double on = 0.0;
  for (int s : states) on += s;
  return on / static_cast<double>(states.size());
}

Estimate activity_density_estimate(std::span<const double> phi,
                                   std::span<const double> firing_prob) {
  if (phi.empty()) throw std::invalid_argument("activity_density_estimate: empty trajectory");
  if (phi.size() != firing_prob.size()) {
    throw std::invalid_argument("activity_density_estimate: sample count mismatch");
  }
  const auto n = static_cast<double>(phi.size());
  double mean = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) mean += phi[k] * firing_prob[k];
  mean /= n;
  double ss = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double d = phi[k] * firing_prob[k] - mean;
    ss += d * d;
  }
  const double se = phi.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {mean, se};
}

std::vector<double> absorbing_state_distribution(std::span<const double> potentials,
                                                 double global_field, double kb) {
  if (potentials.empty()) {
    throw DegenerateDistributionError("absorbing_state_distribution: no quiescent agents");
  }
  if (global_field == 0.0) {
    throw std::domain_error("absorbing_state_distribution: global field is zero");
  }
  const double temperature = kb * global_field;
  std::vector<double> logits(potentials.size());
  std::transform(potentials.begin(), potentials.end(), logits.begin(),
                 [temperature](double x) { return -x / temperature; });
  return softmax(logits);
}

double global_energy(const Topology& topology, std::span<const int> states,
                     std::span<const double> biases) {
  double e = 0.0;
  const int n = topology.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      e -= topology.weight(i, j) * states[static_cast<std::size_t>(i)] *
           states[static_cast<std::size_t>(j)];
    }
    e -= biases[static_cast<std::size_t>(i)] * states[static_cast<std::size_t>(i)];
  }
  return e;
}

}  // namespace edm
