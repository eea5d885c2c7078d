#include <cmath>
#include <limits>

#include "doctest.h"
#include "edm/meanfield.hpp"
#include "edm/neuron.hpp"

using namespace edm;

TEST_CASE("eif drift at the leak equilibrium with a cancelling current") {
  const EifParams p;
  const double exponential = p.exp_conductance * p.delta_t * std::exp((p.v_leak - p.v_threshold) / p.delta_t);
  CHECK(eif_drift(p.v_leak, p, -exponential, false) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("eif drift hand evaluations") {
  const EifParams p;
  CHECK(eif_drift(p.v_threshold, p, 0.0, false) == doctest::Approx(-0.9).epsilon(1e-14));
  const double expected = -0.1 * 11.0 + 0.1 * std::exp(1.0);
  CHECK(eif_drift(p.v_threshold + p.delta_t, p, 0.0, false) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(-0.8282).epsilon(1e-4));
}

TEST_CASE("eif drift scales with capacitance and adds the ionic current") {
  EifParams p;
  p.capacitance = 2.0;
  const double base = eif_drift(3.0, p, 0.0, false);
  CHECK(eif_drift(3.0, p, 1.0, false) == doctest::Approx(base + 0.5).epsilon(1e-14));
}

TEST_CASE("refractory drift freezes the exponential at the reset value") {
  const EifParams p;
  const double frozen = p.exp_conductance * p.delta_t * std::exp((p.v_reset - p.v_threshold) / p.delta_t);
  CHECK(frozen_exponential_term(p) == doctest::Approx(frozen).epsilon(1e-15));
  for (double v : {0.0, 5.0, 14.0}) {
    const double expected = (-p.leak_conductance * (v - p.v_leak) + frozen + 0.3) / p.capacitance;
    CHECK(eif_drift(v, p, 0.3, true) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("ionic current components") {
  EifParams p;
  AgentState a;
  a.v = 4.0;
  a.gamma = 0.0;
  CHECK(ionic_current(a, {}, 0.0, p).i_syn == 0.0);

  a.v = p.v_syn;
  a.gamma = 0.8;
  CHECK(ionic_current(a, {}, 0.0, p).i_syn == 0.0);

  p.neib_conductance = 0.1;
  a.v = 10.0;
  const std::vector<double> neighbours{12.0, 12.0};
  const auto c = ionic_current(a, neighbours, 0.25, p);
  CHECK(c.i_neib == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(c.i_noise == 0.25);
  CHECK(c.total() == doctest::Approx(c.i_neib + c.i_syn + 0.25).epsilon(1e-15));
}

TEST_CASE("gating equilibrium") {
  CHECK(gating_equilibrium(10.0, 10.0, 2.0) == 0.5);
  CHECK(gating_equilibrium(12.0, 10.0, 2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));
  CHECK(gating_equilibrium(12.0, 10.0, 2.0) == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(gating_equilibrium(1e6, 10.0, 2.0) == 1.0);
  CHECK(gating_equilibrium(-1e6, 10.0, 2.0) == 0.0);
}

TEST_CASE("gating relaxation") {
  const EifParams p;
  const double v = 7.0;
  const double target = gating_equilibrium(v, p.v_gamma, p.delta_gamma);
  CHECK(gating_step(target, v, p, 0.1) == doctest::Approx(target).epsilon(1e-15));

  const double v_high = 1e4;  // equilibrium 1
  CHECK(gating_step(0.0, v_high, p, p.tau_gamma) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(gating_step(0.0, v_high, p, p.tau_gamma) == doctest::Approx(0.6321).epsilon(1e-4));
  CHECK(gating_step(0.2, v, p, 1e6) == doctest::Approx(target).epsilon(1e-14));
}

TEST_CASE("spike at the cutoff resets and starts the refractory window") {
  const EifParams p;
  AgentState a;
  a.v = p.v_peak;
  CHECK(detect_spike_and_reset(a, p, 0.01));
  CHECK(a.v == p.v_reset);
  CHECK(a.refractory_remaining == p.tau_ref);
  CHECK(a.s == 1);
}

TEST_CASE("below the cutoff nothing changes") {
  const EifParams p;
  AgentState a;
  a.v = std::nextafter(p.v_peak, 0.0);
  a.gamma = 0.3;
  const AgentState before = a;
  CHECK_FALSE(detect_spike_and_reset(a, p, 0.01));
  CHECK(a == before);
}

TEST_CASE("no spike is emitted during the refractory window") {
  const EifParams p;
  AgentState a;
  a.v = p.v_peak;
  REQUIRE(detect_spike_and_reset(a, p, 0.01));
  int refractory_steps = 0;
  while (a.refractory()) {
    a.v = p.v_peak + 50.0;  // forced above the cutoff
    CHECK_FALSE(detect_spike_and_reset(a, p, 0.01));
    CHECK(a.v == p.v_reset);
    ++refractory_steps;
  }
  CHECK(refractory_steps == 200);
  CHECK(a.s == 0);
  a.v = p.v_peak;
  CHECK(detect_spike_and_reset(a, p, 0.01));
}

TEST_CASE("firing probability") {
  Topology t(3);
  t.add_edge(0, 1);
  t.add_edge(1, 0);
  t.add_edge(2, 0);

  SUBCASE("zero numerator") {
    const std::vector<double> x{0.0, 0.0, 0.0};
    CHECK(firing_probability(0, x, t, 0.1, 0.0, 10.0, 2) == 0.0);
  }
  SUBCASE("ratio exactly one") {
    const std::vector<double> x{10.0, 10.0, 10.0};
    CHECK(firing_probability(0, x, t, 0.1, 0.0, 10.0, 2) == 1.0);
  }
  SUBCASE("hand evaluation with a neighbour term") {
    // agent 1 links to 0 only, and only 0 links into 1: alpha (y - x) = 0.5 * 4 = 2,
    // inward term alpha (x_1 - x_0) / K = 0.5 * (-4) / 2 = -1 is avoided by a
    // dedicated topology with no inward link
    Topology u(2);
    u.add_edge(1, 0);
    const std::vector<double> x{9.0, 5.0};
    CHECK(firing_probability(1, x, u, 0.5, 1.0, 10.0, 1) == doctest::Approx(0.8).epsilon(1e-15));
  }
  SUBCASE("clamping and non-positive denominator") {
    const std::vector<double> x{30.0, 0.0, 0.0};
    CHECK(firing_probability(0, x, t, 0.0, 0.0, 10.0, 2) == 1.0);
    const std::vector<double> y{-5.0, 0.0, 0.0};
    CHECK(firing_probability(0, y, t, 0.0, 0.0, 10.0, 2) == 0.0);
    CHECK(firing_probability(0, x, t, 0.0, 1.0, -1.0, 2) == 1.0);
    CHECK(firing_probability(0, y, t, 0.0, 1.0, -1.0, 2) == 0.0);
  }
}

TEST_CASE("gating sigmoid is the Boltzmann unit probability") {
  const EifParams p;
  for (int k = 0; k <= 100; ++k) {
    const double v = -20.0 + 0.5 * k;
    CHECK(gating_equilibrium(v, p.v_gamma, p.delta_gamma) ==
          boltzmann_unit_on_probability(v - p.v_gamma, p.delta_gamma));
  }
}
