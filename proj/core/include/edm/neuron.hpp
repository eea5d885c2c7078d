#pragma once

#include <span>

#include "edm/config.hpp"
#include "edm/topology.hpp"

namespace edm {

/// Per-agent dynamical state. State s = 1 exactly while the agent sits in
/// its absolute refractory window after a spike.
struct AgentState {
  double v = 0.0;                     // membrane potential, mV
  int s = 0;                          // binary decision state
  double gamma = 0.0;                 // gating variable in [0, 1]
  double refractory_remaining = 0.0;  // ms
  double threshold = 10.0;            // V_Ti, mV
  double drift = 0.0;                 // g_i, mV/ms
  double v_end = 0.0;                 // potential at the last reset

  [[nodiscard]] bool refractory() const { return refractory_remaining > 0.0; }
  bool operator==(const AgentState&) const = default;
};

/// Ionic current components in uA.
struct IonCurrents {
  double i_neib = 0.0;
  double i_noise = 0.0;
  double i_syn = 0.0;

  [[nodiscard]] double total() const { return i_neib + i_noise + i_syn; }
};

/// dV/dt of the exponential integrate-and-fire membrane:
///   (-g_L (v - V_L) + g_T dT exp((v - V_T)/dT) + i_ion) / C.
/// During the refractory window the exponential term is the constant it
/// takes at the reset potential.
[[nodiscard]] double eif_drift(double v, const EifParams& p, double i_ion, bool in_refractory);

/// The frozen exponential term used while refractory.
[[nodiscard]] double frozen_exponential_term(const EifParams& p);

/// i_syn = g_syn Gamma (V_syn - v); i_neib = g_neib sum_j (y_j - v) over the
/// observed potentials of outward neighbours (unit weights).
[[nodiscard]] IonCurrents ionic_current(const AgentState& agent,
                                        std::span<const double> neighbor_potentials,
                                        double noise_term, const EifParams& p);

/// Gamma_inf(v) = 1 / (1 + exp(-(v - V_gamma) / delta_gamma)).
[[nodiscard]] double gating_equilibrium(double v, double v_gamma, double delta_gamma);

/// Exponential-Euler relaxation of tau dGamma/dt = Gamma_inf(v) - Gamma.
[[nodiscard]] double gating_step(double gamma, double v, const EifParams& p, double dt);

/// Spike detection, reset and refractory bookkeeping for one step.
/// Returns true when the agent fired in this step.
bool detect_spike_and_reset(AgentState& agent, const EifParams& p, double dt);

/// Conditional firing probability of agent i given the previous potentials,
/// clamped to [0, 1]. Neighbour terms use unit link weights:
///   num = X_i + g + alpha sum_{j in out(i)} (X_j - X_i)
///   den = V_T + alpha sum_{j in in(i)} (X_i - X_j) / K
/// If den <= 0 the result is 1 for a positive numerator and 0 otherwise.
[[nodiscard]] double firing_probability(int i, std::span<const double> potentials,
                                        const Topology& topology, double gain, double drift,
                                        double v_threshold, int max_links);

}  // namespace edm
