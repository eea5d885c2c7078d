#include "edm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace edm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

std::string fmt_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(std::string(field) + " must be > 0 (got " + fmt_num(value) + ")");
  }
}

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) fail(std::string(field) + " must be finite");
}

void validate_eif(const EifParams& p) {
  require_positive(p.capacitance, "eif.capacitance");
  require_positive(p.delta_t, "eif.delta_t");
  require_positive(p.delta_gamma, "eif.delta_gamma");
  require_positive(p.tau_ref, "eif.tau_ref");
  require_positive(p.tau_gamma, "eif.tau_gamma");
  for (auto [v, name] : {std::pair{p.leak_conductance, "eif.leak_conductance"},
                         {p.exp_conductance, "eif.exp_conductance"},
                         {p.syn_conductance, "eif.syn_conductance"},
                         {p.neib_conductance, "eif.neib_conductance"},
                         {p.v_leak, "eif.v_leak"},
                         {p.v_threshold, "eif.v_threshold"},
                         {p.v_reset, "eif.v_reset"},
                         {p.v_syn, "eif.v_syn"},
                         {p.v_peak, "eif.v_peak"},
                         {p.v_gamma, "eif.v_gamma"}}) {
    require_finite(v, name);
  }
  if (!(p.v_peak > p.v_threshold)) {
    fail("eif.v_peak must be > eif.v_threshold (got " + fmt_num(p.v_peak) + " <= " +
         fmt_num(p.v_threshold) + ")");
  }
  if (p.v_reset > p.v_threshold) {
    fail("eif.v_reset must be <= eif.v_threshold (got " + fmt_num(p.v_reset) + ")");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      fail(std::string("field '") + key + "' has the wrong type: " + e.what());
    }
  }
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known,
                    const std::string& prefix) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) fail("unknown config key '" + prefix + key + "'");
  }
}

EifParams eif_from_json(const json& j) {
  if (!j.is_object()) fail("field 'eif' must be an object");
  reject_unknown(j,
                 {"capacitance", "leak_conductance", "exp_conductance", "syn_conductance",
                  "neib_conductance", "v_leak", "v_threshold", "v_reset", "v_syn", "delta_t",
                  "v_peak", "tau_ref", "v_gamma", "delta_gamma", "tau_gamma"},
                 "eif.");
  EifParams p;
  read(j, "capacitance", p.capacitance);
  read(j, "leak_conductance", p.leak_conductance);
  read(j, "exp_conductance", p.exp_conductance);
  read(j, "syn_conductance", p.syn_conductance);
  read(j, "neib_conductance", p.neib_conductance);
  read(j, "v_leak", p.v_leak);
  read(j, "v_threshold", p.v_threshold);
  read(j, "v_reset", p.v_reset);
  read(j, "v_syn", p.v_syn);
  read(j, "delta_t", p.delta_t);
  // v_peak follows delta_t and v_threshold unless given explicitly.
  p.v_peak = p.v_threshold + 5.0 * p.delta_t;
  read(j, "v_peak", p.v_peak);
  read(j, "tau_ref", p.tau_ref);
  read(j, "v_gamma", p.v_gamma);
  read(j, "delta_gamma", p.delta_gamma);
  read(j, "tau_gamma", p.tau_gamma);
  return p;
}

json eif_to_json(const EifParams& p) {
  return json{{"capacitance", p.capacitance},
              {"leak_conductance", p.leak_conductance},
              {"exp_conductance", p.exp_conductance},
              {"syn_conductance", p.syn_conductance},
              {"neib_conductance", p.neib_conductance},
              {"v_leak", p.v_leak},
              {"v_threshold", p.v_threshold},
              {"v_reset", p.v_reset},
              {"v_syn", p.v_syn},
              {"delta_t", p.delta_t},
              {"v_peak", p.v_peak},
              {"tau_ref", p.tau_ref},
              {"v_gamma", p.v_gamma},
              {"delta_gamma", p.delta_gamma},
              {"tau_gamma", p.tau_gamma}};
}

SigmaMode sigma_mode_from(const std::string& s) {
  if (s == "current_neighbors") return SigmaMode::CurrentNeighbors;
  if (s == "top_k") return SigmaMode::TopK;
  fail("sigma_mode must be 'current_neighbors' or 'top_k' (got '" + s + "')");
}

}  // namespace

long SimConfig::steps() const { return std::lround(t_total / dt); }

double SimConfig::threshold_of(int agent) const {
  return thresholds.empty() ? eif.v_threshold : thresholds.at(static_cast<std::size_t>(agent));
}

std::string_view to_string(SigmaMode mode) {
  return mode == SigmaMode::TopK ? "top_k" : "current_neighbors";
}

double min_noise_correlation(int n_agents) {
  return n_agents > 1 ? std::max(-1.0 / (n_agents - 1), -1.0) : -1.0;
}

SimConfig validate_config(SimConfig c) {
  const int n = c.n_agents;
  if (n < 2) fail("n_agents must be >= 2 (got " + std::to_string(n) + ")");
  if (c.max_links < 1) fail("max_links must be >= 1 (got " + std::to_string(c.max_links) + ")");
  if (c.max_links > n - 1) {
    fail("max_links must be <= N-1 (got K=" + std::to_string(c.max_links) +
         ", N=" + std::to_string(n) + ")");
  }
  if (c.initial_links > c.max_links) {
    fail("initial_links must be <= max_links (got " + std::to_string(c.initial_links) + " > " +
         std::to_string(c.max_links) + ")");
  }
  require_positive(c.dt, "dt");
  if (!(c.t_total >= c.dt) || !std::isfinite(c.t_total)) {
    fail("t_total must be >= dt (got t_total=" + fmt_num(c.t_total) + ", dt=" + fmt_num(c.dt) +
         ")");
  }
  validate_eif(c.eif);

  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) {
    fail("noise_sigma must be >= 0 (got " + fmt_num(c.noise_sigma) + ")");
  }
  const double lo = min_noise_correlation(n);
  if (!(c.noise_correlation < 1.0)) {
    fail("noise_correlation must be < 1 (got " + fmt_num(c.noise_correlation) + ")");
  }
  if (!(c.noise_correlation > lo)) {
    fail("noise_correlation below PSD bound: must be > " + fmt_num(lo) + " = -1/(N-1) for N=" +
         std::to_string(n) + " (got " + fmt_num(c.noise_correlation) + ")");
  }

  if (c.drift_bias.size() == 1) {
    c.drift_bias.assign(static_cast<std::size_t>(n), c.drift_bias.front());
  }
  if (c.drift_bias.size() != static_cast<std::size_t>(n)) {
    fail("drift_bias must have 1 or n_agents entries (got " +
         std::to_string(c.drift_bias.size()) + ")");
  }
  for (double g : c.drift_bias) require_finite(g, "drift_bias");

  if (!c.thresholds.empty()) {
    if (c.thresholds.size() == 1) c.thresholds.assign(static_cast<std::size_t>(n), c.thresholds[0]);
    if (c.thresholds.size() != static_cast<std::size_t>(n)) {
      fail("thresholds must have 0, 1 or n_agents entries (got " +
           std::to_string(c.thresholds.size()) + ")");
    }
    for (double v : c.thresholds) require_finite(v, "thresholds");
  }

  require_finite(c.gain, "gain");
  require_positive(c.decision_threshold, "decision_threshold");
  require_positive(c.avalanche_bin, "avalanche_bin");
  require_positive(c.kb, "kb");
  if (!(c.observation_noise >= 0.0)) fail("observation_noise must be >= 0");
  if (c.snapshot_stride < 1) fail("snapshot_stride must be >= 1");
  if (!(c.transient_fraction >= 0.0 && c.transient_fraction < 1.0)) {
    fail("transient_fraction must lie in [0, 1)");
  }
  require_finite(c.v_init_min, "v_init_min");
  require_finite(c.v_init_max, "v_init_max");
  if (c.v_init_min > c.v_init_max) fail("v_init_min must be <= v_init_max");
  if (c.v_init_max > c.eif.v_peak) fail("v_init_max must be <= eif.v_peak");
  return c;
}

SimConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config must be a JSON object");
  reject_unknown(j,
                 {"n_agents", "max_links", "initial_links", "dt", "t_total", "seed", "eif",
                  "noise_sigma", "noise_correlation", "drift_bias", "gain",
                  "decision_threshold", "thresholds", "avalanche_bin", "cap_sigma",
                  "sigma_mode", "kb", "rewiring", "observation_noise", "verbatim_gamma",
                  "snapshot_stride", "transient_fraction", "v_init_min", "v_init_max"},
                 "");
  SimConfig c;
  read(j, "n_agents", c.n_agents);
  read(j, "max_links", c.max_links);
  read(j, "initial_links", c.initial_links);
  read(j, "dt", c.dt);
  read(j, "t_total", c.t_total);
  read(j, "seed", c.seed);
  if (auto it = j.find("eif"); it != j.end()) c.eif = eif_from_json(*it);
  read(j, "noise_sigma", c.noise_sigma);
  read(j, "noise_correlation", c.noise_correlation);
  if (auto it = j.find("drift_bias"); it != j.end()) {
    if (it->is_number()) {
      c.drift_bias = {it->get<double>()};
    } else {
      read(j, "drift_bias", c.drift_bias);
    }
  }
  read(j, "gain", c.gain);
  read(j, "decision_threshold", c.decision_threshold);
  if (auto it = j.find("thresholds"); it != j.end()) {
    if (it->is_number()) {
      c.thresholds = {it->get<double>()};
    } else {
      read(j, "thresholds", c.thresholds);
    }
  }
  read(j, "avalanche_bin", c.avalanche_bin);
  read(j, "cap_sigma", c.cap_sigma);
  if (auto it = j.find("sigma_mode"); it != j.end()) {
    if (!it->is_string()) fail("field 'sigma_mode' must be a string");
    c.sigma_mode = sigma_mode_from(it->get<std::string>());
  }
  read(j, "kb", c.kb);
  read(j, "rewiring", c.rewiring);
  read(j, "observation_noise", c.observation_noise);
  read(j, "verbatim_gamma", c.verbatim_gamma);
  read(j, "snapshot_stride", c.snapshot_stride);
  read(j, "transient_fraction", c.transient_fraction);
  read(j, "v_init_min", c.v_init_min);
  read(j, "v_init_max", c.v_init_max);
  return c;
}

std::string config_to_json(const SimConfig& c, int indent) {
  json j{{"n_agents", c.n_agents},
         {"max_links", c.max_links},
         {"initial_links", c.initial_links},
         {"dt", c.dt},
         {"t_total", c.t_total},
         {"seed", c.seed},
         {"eif", eif_to_json(c.eif)},
         {"noise_sigma", c.noise_sigma},
         {"noise_correlation", c.noise_correlation},
         {"drift_bias", c.drift_bias},
         {"gain", c.gain},
         {"decision_threshold", c.decision_threshold},
         {"thresholds", c.thresholds},
         {"avalanche_bin", c.avalanche_bin},
         {"cap_sigma", c.cap_sigma},
         {"sigma_mode", std::string(to_string(c.sigma_mode))},
         {"kb", c.kb},
         {"rewiring", c.rewiring},
         {"observation_noise", c.observation_noise},
         {"verbatim_gamma", c.verbatim_gamma},
         {"snapshot_stride", c.snapshot_stride},
         {"transient_fraction", c.transient_fraction},
         {"v_init_min", c.v_init_min},
         {"v_init_max", c.v_init_max}};
  return j.dump(indent);
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

}  // namespace edm
