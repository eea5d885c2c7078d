#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "edm/cli.hpp"
#include "edm/io.hpp"
#include "edm/simulation.hpp"
#include "json.hpp"

namespace edm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;

json* find_field(json& root, const std::string& axis) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = axis.find('.', start);
    const auto key = axis.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

struct CellResult {
  double axis_value = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::string status;
  std::optional<double> sigma_terminal;
  std::optional<double> lambda_hat;
  std::optional<double> mean_activity;
};

std::string optional_field(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string{};
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

CellResult run_cell(const SweepSpec& spec, std::size_t value_index, int replicate) {
  const auto cell_index = value_index * static_cast<std::size_t>(spec.replicates) +
                          static_cast<std::size_t>(replicate);
  CellResult r;
  r.axis_value = spec.values[value_index];
  r.replicate = replicate;
  r.seed = derive_cell_seed(spec.base.seed, cell_index);

  std::ostringstream name;
  name << "cell_" << cell_index;
  const fs::path dir = spec.out / name.str();
  try {
    auto config = apply_axis(spec.base, spec.axis, r.axis_value);
    config.seed = r.seed;
    config = validate_config(config);
    const auto run = run_simulation(config);
    const json provenance{{"sweep",
                           {{"axis", spec.axis},
                            {"axis_value", r.axis_value},
                            {"replicate", replicate},
                            {"cell_index", cell_index},
                            {"base_seed", spec.base.seed},
                            {"seed_rule", "base_seed XOR (cell_index * 0x9E3779B97F4A7C15)"}}}};
    write_run(dir, run, provenance.dump());
    const auto report = analyze_logs(run.log.spikes, run.log.snapshots, config.avalanche_bin,
                                     config.transient_fraction);
    write_analysis(dir, report, run.log.snapshots);
    r.status = "ok";
    r.sigma_terminal = run.summary.branching.terminal;
    if (report.fit) r.lambda_hat = report.fit->exponent;
    r.mean_activity = run.summary.mean_activity;
  } catch (const DivergenceError& e) {
    r.status = std::string("failed: diverged: ") + e.what();
  } catch (const std::exception& e) {
    r.status = std::string("failed: ") + e.what();
  }
  if (r.status != "ok") {
    spdlog::warn("sweep cell {} ({}={}, replicate {}): {}", cell_index, spec.axis, r.axis_value,
                 replicate, r.status);
  } else {
    spdlog::debug("sweep cell {} done", cell_index);
  }
  return r;
}

}  // namespace

std::uint64_t derive_cell_seed(std::uint64_t base_seed, std::uint64_t cell_index) {
  return base_seed ^ (cell_index * kSeedStride);
}

SimConfig apply_axis(const SimConfig& base, const std::string& axis, double value) {
  json j = json::parse(config_to_json(base));
  json* field = find_field(j, axis);
  if (field == nullptr || !field->is_number()) {
    throw SweepSpecError("sweep axis '" + axis + "' is not a numeric config field");
  }
  if (field->is_number_integer() || field->is_number_unsigned()) {
    if (value != std::floor(value)) {
      throw SweepSpecError("sweep axis '" + axis + "' is integer-valued; got " + format_double(value));
    }
    *field = static_cast<long long>(value);
  } else {
    *field = value;
  }
  return config_from_json(j.dump());
}

SweepSpec parse_sweep_spec(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SweepSpecError(std::string("sweep spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SweepSpecError("sweep spec must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "base_config" && key != "axis" && key != "values" && key != "replicates" &&
        key != "out") {
      throw SweepSpecError("unknown sweep spec key '" + key + "'");
    }
  }

  SweepSpec spec;
  try {
    const auto& base = j.at("base_config");
    if (base.is_string()) {
      fs::path path = base.get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      spec.base = load_config(path.string());
    } else if (base.is_object()) {
      spec.base = config_from_json(base.dump());
    } else {
      throw SweepSpecError("base_config must be a path or an object");
    }
    spec.axis = j.at("axis").get<std::string>();
    spec.values = j.at("values").get<std::vector<double>>();
    spec.replicates = j.value("replicates", 1);
    spec.out = j.at("out").get<std::string>();
  } catch (const json::exception& e) {
    throw SweepSpecError(std::string("sweep spec: ") + e.what());
  }
  if (spec.out.is_relative()) spec.out = base_dir / spec.out;
  if (spec.values.empty()) throw SweepSpecError("sweep spec: values must be nonempty");
  if (spec.replicates < 1) throw SweepSpecError("sweep spec: replicates must be >= 1");
  // Rejects unknown or non-numeric axes up front; per-value bounds are
  // checked per cell.
  (void)apply_axis(spec.base, spec.axis, spec.values.front());
  return spec;
}

SweepSpec load_sweep_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SweepSpecError("cannot read sweep spec '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep_spec(buffer.str(), path.parent_path());
}

int cmd_sweep(const SweepOptions& options, std::ostream& status) {
  auto fail = [&](const std::string& message) {
    spdlog::error("{}", message);
    status << json{{"status", "error"}, {"command", "sweep"}, {"code", kFailure}, {"message", message}}
                  .dump()
           << std::endl;
    return kFailure;
  };
  if (options.parallel < 1) return fail("--parallel must be >= 1");

  SweepSpec spec;
  try {
    spec = load_sweep_spec(options.spec);
  } catch (const std::exception& e) {
    return fail(e.what());
  }

  const std::size_t cells = spec.values.size() * static_cast<std::size_t>(spec.replicates);
  spdlog::info("sweep: axis {} x {} values x {} replicates on {} workers", spec.axis,
               spec.values.size(), spec.replicates, options.parallel);
  std::vector<CellResult> results(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      const auto reps = static_cast<std::size_t>(spec.replicates);
      results[c] = run_cell(spec, c / reps, static_cast<int>(c % reps));
    }
  };
  {
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(options.parallel), cells);
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
  }

  std::size_t ok = 0;
  try {
    fs::create_directories(spec.out);
    std::ofstream csv(spec.out / "sweep_summary.csv", std::ios::binary | std::ios::trunc);
    csv << kSweepSummaryHeader << '\n';
    for (const auto& r : results) {
      if (r.status == "ok") ++ok;
      csv << format_double(r.axis_value) << ',' << r.replicate << ',' << r.seed << ','
          << csv_quote(r.status) << ',' << optional_field(r.sigma_terminal) << ','
          << optional_field(r.lambda_hat) << ',' << optional_field(r.mean_activity) << '\n';
    }
    if (!csv) return fail("cannot write sweep_summary.csv");
  } catch (const std::exception& e) {
    return fail(e.what());
  }

  const int code = ok > 0 ? kOk : kFailure;
  status << json{{"status", ok > 0 ? "ok" : "error"},
                 {"command", "sweep"},
                 {"code", code},
                 {"out", spec.out.string()},
                 {"cells", cells},
                 {"succeeded", ok},
                 {"failed", cells - ok}}
                .dump()
         << std::endl;
  return code;
}

}  // namespace edm::cli
