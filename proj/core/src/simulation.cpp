#include "edm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace edm {

namespace {

// Decorrelates the dynamics stream from the topology stream, which is
// seeded with the raw seed.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

DivergenceError::DivergenceError(int agent, long step, double value)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "non-finite potential " << value << " for agent " << agent << " at step " << step;
        return os.str();
      }()),
      agent_(agent),
      step_(step) {}

World::World(const SimConfig& config)
    : config_(validate_config(config)),
      topology_(init_topology(config_.n_agents, config_.effective_initial_links(), config_.seed)),
      rng_(splitmix64(config_.seed)),
      noise_(config_.n_agents, config_.noise_correlation) {
  const auto n = static_cast<std::size_t>(config_.n_agents);
  agents_.resize(n);
  std::uniform_real_distribution<double> initial(config_.v_init_min, config_.v_init_max);
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = agents_[i];
    a.v = config_.v_init_min == config_.v_init_max ? config_.v_init_min : initial(rng_);
    a.gamma = gating_equilibrium(a.v, config_.eif.v_gamma, config_.eif.delta_gamma);
    a.threshold = config_.threshold_of(static_cast<int>(i));
    a.drift = config_.drift_bias[i];
    a.v_end = config_.eif.v_reset;
  }
  dw_.resize(n);
  drift_.resize(n);
  beta_.assign(n, config_.noise_sigma);
  v_.resize(n);
  observed_.resize(n);
}

std::vector<double> World::potentials() const {
  std::vector<double> v(agents_.size());
  std::transform(agents_.begin(), agents_.end(), v.begin(), [](const AgentState& a) { return a.v; });
  return v;
}

std::vector<int> World::states() const {
  std::vector<int> s(agents_.size());
  std::transform(agents_.begin(), agents_.end(), s.begin(), [](const AgentState& a) { return a.s; });
  return s;
}

std::vector<double> World::thresholds() const {
  std::vector<double> t(agents_.size());
  std::transform(agents_.begin(), agents_.end(), t.begin(),
                 [](const AgentState& a) { return a.threshold; });
  return t;
}

double World::sigma_global() const {
  const auto v = potentials();
  const auto th = thresholds();
  return global_branching_ratio(v, th, topology_, config_.max_links, config_.cap_sigma,
                                config_.sigma_mode);
}

std::vector<double> World::neighbor_coupling(std::span<const double> observed, double gain) const {
  const int n = topology_.size();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double xi = agents_[static_cast<std::size_t>(i)].v;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (topology_.has_edge(i, j)) acc += topology_.weight(i, j) * (observed[static_cast<std::size_t>(j)] - xi);
    }
    out[static_cast<std::size_t>(i)] = gain * acc;
  }
  return out;
}

std::vector<double> neighbor_coupling_matrix_form(const Topology& topology,
                                                  std::span<const double> potentials, double gain) {
  const Eigen::Map<const Eigen::VectorXd> x(potentials.data(),
                                            static_cast<Eigen::Index>(potentials.size()));
  const Eigen::VectorXd out = -gain * (laplacian(topology) * x);
  return {out.data(), out.data() + out.size()};
}

Snapshot World::snapshot() const {
  Snapshot s;
  s.t = time();
  const auto n = static_cast<double>(agents_.size());
  double sum_v = 0.0;
  double on = 0.0;
  for (const auto& a : agents_) {
    sum_v += a.v;
    on += a.s;
  }
  s.mean_v = sum_v / n;
  s.mean_activity = on / n;
  s.sigma_global = sigma_global();
  const auto& deg = topology_.out_degrees();
  const auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
  s.min_deg = *lo;
  s.max_deg = *hi;
  s.degree_histogram.assign(static_cast<std::size_t>(config_.max_links) + 1, 0);
  for (int d : deg) ++s.degree_histogram[static_cast<std::size_t>(d)];
  return s;
}

void World::record_snapshot(SpikeLog& log) {
  log.snapshots.push_back(snapshot());
  const auto v = potentials();
  const auto& p = config_.eif;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& a = agents_[i];
    if (a.s == 0) samples_.quiescent_potentials.push_back(a.v);
    samples_.gating_sigmoid.push_back(gating_equilibrium(a.v, p.v_gamma, p.delta_gamma));
    samples_.firing_probability.push_back(firing_probability(
        static_cast<int>(i), v, topology_, config_.gain, a.drift, a.threshold, config_.max_links));
  }
}

void World::step(SpikeLog& log, std::vector<RewireEvent>& rewires) {
  const auto& p = config_.eif;
  const double dt = config_.dt;
  const int n = config_.n_agents;

  // (1) correlated Wiener increments
  noise_.draw(dt, rng_, dw_);

  // (2) currents and drift from the state at the start of the step
  for (int i = 0; i < n; ++i) observed_[static_cast<std::size_t>(i)] = agents_[static_cast<std::size_t>(i)].v;
  std::normal_distribution<double> observation(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const auto& a = agents_[static_cast<std::size_t>(i)];
    neighbor_v_.clear();
    for (int j = 0; j < n; ++j) {
      if (!topology_.has_edge(i, j)) continue;
      double y = observed_[static_cast<std::size_t>(j)];
      if (config_.observation_noise > 0.0) y += config_.observation_noise * observation(rng_);
      neighbor_v_.push_back(y);
    }
    const IonCurrents c = ionic_current(a, neighbor_v_, 0.0, p);
    drift_[static_cast<std::size_t>(i)] = eif_drift(a.v, p, c.total(), a.refractory()) + a.drift;
  }

  // (3) Euler-Maruyama
  for (int i = 0; i < n; ++i) v_[static_cast<std::size_t>(i)] = agents_[static_cast<std::size_t>(i)].v;
  em_step_inplace(v_, drift_, beta_, dw_, dt);
  for (int i = 0; i < n; ++i) {
    const double v = v_[static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) throw DivergenceError(i, step_index_, v);
    agents_[static_cast<std::size_t>(i)].v = v;
  }

  // (4) gating
  for (auto& a : agents_) a.gamma = gating_step(a.gamma, a.v, p, dt);

  // (5) spikes
  const double t_end = static_cast<double>(step_index_ + 1) * dt;
  spiked_.clear();
  for (int i = 0; i < n; ++i) {
    if (detect_spike_and_reset(agents_[static_cast<std::size_t>(i)], p, dt)) {
      spiked_.push_back(i);
      log.spikes.push_back({t_end, i});
    }
  }

  // (6) rewiring, sequential in index order on the post-reset state
  if (config_.rewiring && !spiked_.empty()) {
    const auto v = potentials();
    const auto th = thresholds();
    const VoltageRewireProbabilities rules(v, th, config_.max_links);
    for (int i : spiked_) {
      auto events = rewire_agent(i, topology_, rules, config_.max_links, t_end, rng_);
      rewires.insert(rewires.end(), events.begin(), events.end());
    }
  }

  // (7) logging
  ++step_index_;
  if (step_index_ % config_.snapshot_stride == 0 || step_index_ == config_.steps()) {
    record_snapshot(log);
  }
}

std::string to_string(DecisionClass decision) {
  switch (decision) {
    case DecisionClass::Optimal:
      return "optimal";
    case DecisionClass::SubOptimal:
      return "sub-optimal";
    case DecisionClass::Undecided:
      return "undecided";
  }
  return "unknown";
}

DecisionOutcome classify_decision(std::span<const double> mean_trajectory, double z,
                                  double mean_drift) {
  DecisionOutcome out;
  if (mean_trajectory.empty() || mean_drift == 0.0) return out;
  const double sign = mean_drift > 0.0 ? 1.0 : -1.0;
  for (double x : mean_trajectory) {
    if (sign * x >= z) {
      out.decision = DecisionClass::Optimal;
      return out;
    }
    if (sign * x <= -z) {
      out.wrong_choice = true;
      return out;
    }
  }
  const double terminal = sign * mean_trajectory.back();
  if (terminal > 0.0) {
    out.decision = DecisionClass::SubOptimal;
  } else if (terminal < 0.0) {
    out.wrong_choice = true;
  }
  return out;
}

std::vector<double> running_mean_state(std::span<const double> series) {
  if (series.size() < 2) throw InsufficientDataError("running_mean_state: need >= 2 snapshots");
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    acc += series[k];
    out[k] = acc / static_cast<double>(k + 1);
  }
  return out;
}

RunArtifacts run_simulation(const SimConfig& config) {
  World world(config);
  RunArtifacts out;
  out.config = world.config();
  out.seed = out.config.seed;
  const long steps = out.config.steps();
  out.log.snapshots.reserve(static_cast<std::size_t>(steps / out.config.snapshot_stride + 1));
  for (long k = 0; k < steps; ++k) world.step(out.log, out.rewires);
  out.final_topology = world.topology();
  out.samples = world.samples();

  auto& s = out.summary;
  const auto& cfg = out.config;
  s.steps = steps;
  s.spikes = static_cast<long>(out.log.spikes.size());
  s.rewires = static_cast<long>(out.rewires.size());

  std::vector<double> sigma;
  std::vector<double> mean_v;
  double activity = 0.0;
  for (const auto& snap : out.log.snapshots) {
    sigma.push_back(snap.sigma_global);
    mean_v.push_back(snap.mean_v);
    activity += snap.mean_activity;
  }
  s.mean_activity = activity / static_cast<double>(out.log.snapshots.size());
  s.branching = branching_summary(sigma, cfg.transient_fraction);
  s.u_bar = mean_v.size() >= 2 ? running_mean_state(mean_v).back() : mean_v.front();
  const double mean_drift =
      std::accumulate(cfg.drift_bias.begin(), cfg.drift_bias.end(), 0.0) / cfg.n_agents;
  s.decision = classify_decision(mean_v, cfg.decision_threshold, mean_drift);

  if (total_drift(cfg.drift_bias) > 0.0) {
    const auto fields =
        summarize_fields(out.final_topology, cfg.drift_bias, cfg.max_links, cfg.kb, cfg.verbatim_gamma);
    s.global_field = fields.global_field;
    s.total_drift = fields.total_drift;
  }
  s.activity_density = activity_density_estimate(out.samples.gating_sigmoid,
                                                 out.samples.firing_probability);
  s.final_energy = global_energy(out.final_topology, world.states(), cfg.drift_bias);
  if (s.global_field != 0.0 &&
      static_cast<long>(out.samples.quiescent_potentials.size()) >= kMinBoltzmannSamples) {
    s.boltzmann = boltzmann_fit_check(out.samples.quiescent_potentials, s.global_field, cfg.kb);
  }
  s.topology_check = out.final_topology.check_invariants(cfg.max_links);
  return out;
}

}  // namespace edm
