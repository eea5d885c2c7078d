#include <cstdlib>
#include <exception>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "edm/cli.hpp"
#include "edm/io.hpp"
#include "edm/simulation.hpp"
#include "json.hpp"

namespace edm::cli {

using nlohmann::json;

void init_logging() {
  auto logger = spdlog::get("edm");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("edm");
    spdlog::set_default_logger(logger);
  }
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("EDM_LOG")) {
    const std::string v = env;
    if (v == "error") {
      level = spdlog::level::err;
    } else if (v == "debug") {
      level = spdlog::level::debug;
    } else if (v != "info") {
      logger->warn("EDM_LOG='{}' not recognised; using info", v);
    }
  }
  logger->set_level(level);
}

namespace {

int report_error(std::ostream& status, const char* command, int code, const std::string& message) {
  spdlog::error("{}", message);
  status << json{{"status", "error"}, {"command", command}, {"code", code}, {"message", message}}.dump()
         << std::endl;
  return code;
}

}  // namespace

int cmd_simulate(const SimulateOptions& options, std::ostream& status) {
  SimConfig config;
  try {
    config = load_config(options.config.string());
    if (options.seed) config.seed = *options.seed;
    config = validate_config(config);
  } catch (const ConfigError& e) {
    return report_error(status, "simulate", kFailure, e.what());
  }

  spdlog::info("simulate: N={} K={} steps={} seed={}", config.n_agents, config.max_links,
               config.steps(), config.seed);
  RunArtifacts run;
  try {
    run = run_simulation(config);
  } catch (const DivergenceError& e) {
    return report_error(status, "simulate", kDiverged, e.what());
  }

  try {
    write_run(options.out, run);
  } catch (const std::exception& e) {
    return report_error(status, "simulate", kFailure, e.what());
  }
  const auto& s = run.summary;
  spdlog::info("simulate: {} spikes, {} rewires, sigma mean {:.4f}", s.spikes, s.rewires,
               s.branching.mean);
  status << json{{"status", "ok"},
                 {"command", "simulate"},
                 {"out", options.out.string()},
                 {"seed", config.seed},
                 {"spikes", s.spikes},
                 {"rewires", s.rewires},
                 {"sigma_mean", s.branching.mean}}
                .dump()
         << std::endl;
  return kOk;
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& status) {
  if (!(options.bin > 0.0)) {
    return report_error(status, "analyze", kFailure, "--bin must be > 0");
  }
  AnalysisReport report;
  std::vector<Snapshot> snapshots;
  try {
    const auto spikes = read_spikes_csv(options.spikes);
    if (options.snapshots) snapshots = read_snapshots_csv(*options.snapshots);
    report = analyze_logs(spikes, snapshots, options.bin);
  } catch (const CsvError& e) {
    return report_error(status, "analyze", kFailure, e.what());
  }
  if (!report.fit) spdlog::info("analyze: no power-law fit ({})", report.fit_error);

  try {
    write_analysis(options.out, report, snapshots);
  } catch (const std::exception& e) {
    return report_error(status, "analyze", kFailure, e.what());
  }
  json line{{"status", "ok"},
            {"command", "analyze"},
            {"out", options.out.string()},
            {"avalanches", report.avalanches.size()}};
  line["lambda_hat"] = report.fit ? json(report.fit->exponent) : json(nullptr);
  status << line.dump() << std::endl;
  return kOk;
}

}  // namespace edm::cli
