#include <cmath>
#include <vector>

#include "doctest.h"
#include "edm/simulation.hpp"
#include "oracles.hpp"

using namespace edm;

namespace {

SimConfig isolated_pair(double drift) {
  SimConfig c;
  c.n_agents = 2;
  c.max_links = 1;
  c.eif.neib_conductance = 0.0;
  c.eif.syn_conductance = 0.0;
  c.noise_sigma = 0.0;
  c.drift_bias = {drift};
  c.rewiring = false;
  c.v_init_min = 0.0;
  c.v_init_max = 0.0;
  return c;
}

}  // namespace

TEST_CASE("symmetric quiescent pair follows the intrinsic membrane drift") {
  SimConfig c = isolated_pair(0.0);
  c.eif.neib_conductance = 0.05;
  c.v_init_min = c.v_init_max = 5.0;
  World world(c);
  for (auto& a : world.agents()) a.gamma = 0.0;
  SpikeLog log;
  std::vector<RewireEvent> rewires;
  const EifParams p = c.eif;
  auto f = [&](double v) {
    return (-p.leak_conductance * (v - p.v_leak) +
            p.exp_conductance * p.delta_t * std::exp((v - p.v_threshold) / p.delta_t)) /
           p.capacitance;
  };
  double reference = 5.0;
  for (int k = 0; k < 1000; ++k) {
    world.step(log, rewires);
    reference += c.dt * f(reference);
  }
  CHECK(log.spikes.empty());
  const auto& a = world.agents();
  CHECK(a[0].v == a[1].v);
  CHECK(a[0].v == doctest::Approx(reference).epsilon(1e-12));
  CHECK(a[0].v < 5.0);
}

TEST_CASE("constant suprathreshold input spikes periodically at the oracle period") {
  const double drift = 2.0;
  const auto c = validate_config(isolated_pair(drift));
  const auto run = run_simulation([&] {
    auto cfg = c;
    cfg.t_total = 200.0;
    return cfg;
  }());
  const EifParams p = c.eif;
  const double climb = oracle::rk4_hitting_time(
      [&](double v) {
        return (-p.leak_conductance * (v - p.v_leak) +
                p.exp_conductance * p.delta_t * std::exp((v - p.v_threshold) / p.delta_t) + drift) /
               p.capacitance;
      },
      p.v_reset, p.v_peak, 1e-5);
  const double period = p.tau_ref + climb;

  std::vector<double> times;
  for (const auto& s : run.log.spikes) {
    if (s.agent == 0) times.push_back(s.t);
  }
  REQUIRE(times.size() >= 5);
  CHECK(std::abs(times.front() - climb) <= 2.0 * c.dt);
  for (std::size_t k = 1; k < times.size(); ++k) {
    CHECK(std::abs(times[k] - times[k - 1] - period) <= 2.0 * c.dt);
  }
}

TEST_CASE("identical seeds give identical logs") {
  SimConfig c;
  c.t_total = 50.0;
  c.initial_links = 1;
  c.seed = 31;
  const auto a = run_simulation(c);
  const auto b = run_simulation(c);
  CHECK(a.log.spikes == b.log.spikes);
  CHECK(a.log.snapshots == b.log.snapshots);
  CHECK(a.final_topology == b.final_topology);
  REQUIRE(a.rewires.size() == b.rewires.size());
  c.seed = 32;
  CHECK_FALSE(run_simulation(c).log.spikes == a.log.spikes);
}

TEST_CASE("a single-step run logs one snapshot") {
  SimConfig c;
  c.t_total = c.dt;
  const auto run = run_simulation(c);
  CHECK(run.summary.steps == 1);
  CHECK(run.log.snapshots.size() == 1);
  CHECK(run.log.snapshots[0].t == doctest::Approx(c.dt).epsilon(1e-15));
}

TEST_CASE("a dead network never spikes and keeps a constant branching series") {
  SimConfig c;
  c.noise_sigma = 0.0;
  c.drift_bias = {0.0};
  c.v_init_max = 5.0;
  c.t_total = 100.0;
  const auto run = run_simulation(c);
  CHECK(run.log.spikes.empty());
  for (const auto& s : run.log.snapshots) CHECK(s.sigma_global == run.log.snapshots.front().sigma_global);
}

TEST_CASE("default network spikes under suprathreshold drift") {
  SimConfig c;  // N = 10, K = 3, 1e5 steps
  const auto cfg = validate_config(c);
  REQUIRE(cfg.steps() == 100000);
  // deterministic one-agent reduction reaches the cutoff
  const EifParams p = cfg.eif;
  const double g = cfg.drift_bias.front();
  const double t_hit = oracle::rk4_hitting_time(
      [&](double v) {
        return (-p.leak_conductance * (v - p.v_leak) +
                p.exp_conductance * p.delta_t * std::exp((v - p.v_threshold) / p.delta_t) + g) /
               p.capacitance;
      },
      p.v_reset, p.v_peak, 1e-3);
  REQUIRE(std::isfinite(t_hit));
  const auto run = run_simulation(cfg);
  CHECK_FALSE(run.log.spikes.empty());
  CHECK(run.summary.topology_check.empty());
  CHECK(run.log.snapshots.size() == 10000);
}

TEST_CASE("neighbour coupling equals the Laplacian form") {
  SimConfig c;
  c.n_agents = 8;
  c.max_links = 3;
  c.seed = 4;
  World world(c);
  const auto x = world.potentials();
  const auto per_agent = world.neighbor_coupling(x, 0.3);
  const auto matrix = neighbor_coupling_matrix_form(world.topology(), x, 0.3);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(per_agent[i] == doctest::Approx(matrix[i]).epsilon(1e-13));
}

TEST_CASE("divergent potentials raise DivergenceError") {
  SimConfig c;
  c.eif.capacitance = 1e-320;
  c.t_total = 1.0;
  try {
    (void)run_simulation(c);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 0);
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
}

TEST_CASE("decision classification") {
  std::vector<double> ramp;
  for (int k = 0; k <= 20; ++k) ramp.push_back(0.5 * k);
  CHECK(classify_decision(ramp, 8.0, 1.0).decision == DecisionClass::Optimal);

  std::vector<double> halfway;
  for (int k = 0; k <= 20; ++k) halfway.push_back(0.2 * k);  // ends at z / 2
  const auto sub = classify_decision(halfway, 8.0, 1.0);
  CHECK(sub.decision == DecisionClass::SubOptimal);
  CHECK_FALSE(sub.wrong_choice);

  const std::vector<double> negative{0.0, -1.0, -2.0};
  const auto wrong = classify_decision(negative, 8.0, 1.0);
  CHECK(wrong.decision == DecisionClass::Undecided);
  CHECK(wrong.wrong_choice);

  std::vector<double> mirrored;
  for (double x : ramp) mirrored.push_back(-x);
  CHECK(classify_decision(mirrored, 8.0, -0.5).decision == DecisionClass::Optimal);
  CHECK(classify_decision(mirrored, 8.0, 0.5).wrong_choice);
}

TEST_CASE("running mean state") {
  const auto constant = running_mean_state(std::vector<double>(50, 3.25));
  CHECK(constant.back() == 3.25);

  std::vector<double> alternating(10000);
  for (std::size_t k = 0; k < alternating.size(); ++k) alternating[k] = static_cast<double>(k % 2);
  CHECK(running_mean_state(alternating).back() == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS_AS((void)running_mean_state(std::vector<double>{1.0}), InsufficientDataError);
}

TEST_CASE("running mean of an OU path matches the stationary mean") {
  OuSpec spec{.alpha = 1.0, .g = 2.0, .beta = 0.5, .x0 = 2.0};
  const double dt = 0.01;
  Rng rng(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x{spec.x0};
  std::vector<double> path;
  const std::vector<double> beta{spec.beta};
  for (int k = 0; k < 200000; ++k) {
    const std::vector<double> dw{std::sqrt(dt) * normal(rng)};
    x = em_step(x, std::vector<double>{spec.g - spec.alpha * x[0]}, beta, dw, dt);
    path.push_back(x[0]);
  }
  const double u_bar = running_mean_state(path).back();
  const double se = oracle::batch_means_se(path);
  CHECK(std::abs(u_bar - ou_exact_mean(spec, 1e3)) < 3.0 * se);
}

TEST_CASE("snapshots record degree statistics within the cap") {
  SimConfig c;
  c.initial_links = 0;
  c.max_links = 4;
  c.t_total = 200.0;
  const auto run = run_simulation(c);
  CHECK(run.summary.rewires > 0);
  for (const auto& s : run.log.snapshots) {
    CHECK(s.min_deg >= 0);
    CHECK(s.max_deg <= 4);
    int agents = 0;
    for (int n : s.degree_histogram) agents += n;
    CHECK(agents == c.n_agents);
  }
}
