#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "edm/topology.hpp"

namespace edm {

/// Raised when a Boltzmann-type normalisation has nothing to normalise.
class DegenerateDistributionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// P(on) = 1 / (1 + exp(-delta_e / temperature)). Throws for temperature <= 0.
[[nodiscard]] double boltzmann_unit_on_probability(double delta_e, double temperature);

/// P_m = exp(-e_m / kT) / sum_n exp(-e_n / kT), computed with a max shift.
/// +infinity energies receive probability 0.
[[nodiscard]] std::vector<double> boltzmann_distribution(std::span<const double> energies,
                                                         double kt);

/// Sum of drift magnitudes, the normaliser W of the local field.
[[nodiscard]] double total_drift(std::span<const double> drifts);

/// F_i = -sum_j a_ji g_j / W over agents linking into i.
[[nodiscard]] double local_field(int i, const Topology& topology, std::span<const double> drifts,
                                 double total_drift);

/// Fbar = sum_i (F_i / K) / N.
[[nodiscard]] double global_field(std::span<const double> local_fields, int max_links, int n);

/// Thermodynamic beta gamma_i = 1 / (k_B F_i). Unless verbatim, a
/// non-positive F_i falls back to 1 / (k_B max(|Fbar|, 1e-6)).
[[nodiscard]] double thermodynamic_beta(double local_field, double global_field, double kb,
                                        bool verbatim);

struct FieldSummary {
  std::vector<double> local_fields;
  double global_field = 0.0;
  double total_drift = 0.0;
  std::vector<double> thermodynamic_beta;
};

[[nodiscard]] FieldSummary summarize_fields(const Topology& topology, std::span<const double> drifts,
                                            int max_links, double kb, bool verbatim_gamma);

/// Exponent argument -gamma_i (sum_{j not linked} Fbar P_ij
///   - sum_{j linked} F_j Q_ij + d b_i) of agent i's mean-field weight.
/// coupling_row / decoupling_row are indexed by j; decoupling entries are
/// read only for current neighbours.
[[nodiscard]] double mean_field_exponent(int i, const Topology& topology, const FieldSummary& fields,
                                         std::span<const double> coupling_row,
                                         std::span<const double> decoupling_row, double bias_sum);

/// Normalises exp(exponent_i) over all agents. The weights are evaluated
/// without shifting; if none is a positive finite number a
/// DegenerateDistributionError listing the exponents is thrown.
[[nodiscard]] std::vector<double> mean_field_firing_prob(std::span<const double> exponents);

/// Fraction of agents in state 1.
[[nodiscard]] double mean_activity(std::span<const int> states);

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of H = int Phi(X) p(s | X) dX from paired samples
/// of Phi(X) and p(s = 1 | X) along a trajectory.
[[nodiscard]] Estimate activity_density_estimate(std::span<const double> phi,
                                                 std::span<const double> firing_prob);

/// Softmax of -X_i / (k_B Fbar) over the supplied quiescent potentials.
[[nodiscard]] std::vector<double> absorbing_state_distribution(std::span<const double> potentials,
                                                               double global_field, double kb);

/// Diagnostic Boltzmann-machine energy E = -sum_{i<j} h_ij s_i s_j - sum_i b_i s_i
/// with h_ij = a_ij.
[[nodiscard]] double global_energy(const Topology& topology, std::span<const int> states,
                                   std::span<const double> biases);

}  // namespace edm
