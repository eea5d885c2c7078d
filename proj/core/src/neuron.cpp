#include "edm/neuron.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "edm/meanfield.hpp"

namespace edm {

double frozen_exponential_term(const EifParams& p) {
  return p.exp_conductance * p.delta_t * std::exp((p.v_reset - p.v_threshold) / p.delta_t);
}

double eif_drift(double v, const EifParams& p, double i_ion, bool in_refractory) {
  assert(in_refractory || v <= p.v_peak);
  const double exponential =
      in_refractory ? frozen_exponential_term(p)
                    : p.exp_conductance * p.delta_t * std::exp((v - p.v_threshold) / p.delta_t);
  return (-p.leak_conductance * (v - p.v_leak) + exponential + i_ion) / p.capacitance;
}

IonCurrents ionic_current(const AgentState& agent, std::span<const double> neighbor_potentials,
                          double noise_term, const EifParams& p) {
  IonCurrents c;
  c.i_syn = p.syn_conductance * agent.gamma * (p.v_syn - agent.v);
  double coupling = 0.0;
  for (double y : neighbor_potentials) coupling += y - agent.v;
  c.i_neib = p.neib_conductance * coupling;
  c.i_noise = noise_term;
  return c;
}

double gating_equilibrium(double v, double v_gamma, double delta_gamma) {
  return boltzmann_unit_on_probability(v - v_gamma, delta_gamma);
}

double gating_step(double gamma, double v, const EifParams& p, double dt) {
  const double target = gating_equilibrium(v, p.v_gamma, p.delta_gamma);
  const double next = target + (gamma - target) * std::exp(-dt / p.tau_gamma);
  return std::clamp(next, 0.0, 1.0);
}

bool detect_spike_and_reset(AgentState& agent, const EifParams& p, double dt) {
  if (agent.refractory()) {
    agent.refractory_remaining -= dt;
    // Absorb rounding so tau_ref / dt steps end the window exactly.
    if (agent.refractory_remaining < 0.5 * dt) agent.refractory_remaining = 0.0;
    agent.v = p.v_reset;
    agent.s = agent.refractory() ? 1 : 0;
    return false;
  }
  if (agent.v >= p.v_peak) {
    agent.v = p.v_reset;
    agent.v_end = p.v_reset;
    agent.refractory_remaining = p.tau_ref;
    agent.s = 1;
    return true;
  }
  agent.s = 0;
  return false;
}

double firing_probability(int i, std::span<const double> potentials, const Topology& topology,
                          double gain, double drift, double v_threshold, int max_links) {
  if (max_links < 1) throw std::invalid_argument("firing_probability: K must be >= 1");
  const double xi = potentials[static_cast<std::size_t>(i)];
  double outward = 0.0;
  double inward = 0.0;
  for (int j = 0; j < topology.size(); ++j) {
    const double xj = potentials[static_cast<std::size_t>(j)];
    outward += topology.weight(i, j) * (xj - xi);
    inward += topology.weight(j, i) * (xi - xj);
  }
  const double numerator = xi + drift + gain * outward;
  const double denominator = v_threshold + gain * inward / max_links;
  if (!(denominator > 0.0)) return numerator > 0.0 ? 1.0 : 0.0;
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

}  // namespace edm
