#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "edm/records.hpp"

namespace edm {

class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Maximal run of consecutive non-empty time bins.
struct Avalanche {
  double start = 0.0;   // ms, left edge of the first bin
  long duration = 0;    // bins
  long size = 0;        // spikes

  bool operator==(const Avalanche&) const = default;
};

[[nodiscard]] std::vector<Avalanche> detect_avalanches(std::span<const double> spike_times,
                                                       double bin_width);
[[nodiscard]] std::vector<Avalanche> detect_avalanches(std::span<const SpikeRecord> spikes,
                                                       double bin_width);

/// Hurwitz zeta sum_{k>=0} (q + k)^{-s} for s > 1, q > 0.
[[nodiscard]] double hurwitz_zeta(double s, double q);

struct PowerLawFit {
  double exponent = 0.0;  // density slope Lambda = -alpha (negative)
  double alpha = 0.0;     // discrete MLE of the tail exponent
  double alpha_stderr = 0.0;
  double z_min = 1.0;
  double log_slope = 0.0;  // least-squares slope of log-binned density
  double r_squared = 0.0;
  double decades = 0.0;    // span of the bins used in the regression
  double ks_distance = 0.0;
  long samples = 0;

  /// Power-law verdict used throughout: negative exponent and a straight
  /// log-log density over enough decades.
  [[nodiscard]] bool is_power_law(double min_r_squared = 0.9, double min_decades = 1.5) const {
    return exponent < 0.0 && r_squared >= min_r_squared && decades >= min_decades;
  }
};

inline constexpr long kMinPowerLawSamples = 50;

/// Discrete maximum-likelihood fit of P(z) ~ z^{-alpha} for z >= z_min,
/// plus a log-binned least-squares diagnostic. Throws InsufficientDataError
/// below kMinPowerLawSamples samples and std::domain_error for a degenerate
/// (single-valued) sample.
[[nodiscard]] PowerLawFit fit_power_law(std::span<const double> sizes, double z_min = 1.0);

enum class Regime { SubCritical, Critical, SuperCritical };
[[nodiscard]] std::string to_string(Regime regime);

struct BranchingSummary {
  double mean = 0.0;  // after discarding the transient
  double min = 0.0;
  double max = 0.0;
  double terminal = 0.0;
  Regime regime = Regime::SubCritical;
};

/// Sub-critical below 0.9, critical in [0.9, 1.1], super-critical above.
[[nodiscard]] Regime classify_regime(double sigma);

[[nodiscard]] BranchingSummary branching_summary(std::span<const double> sigma_series,
                                                 double transient_fraction = 0.2);

struct BoltzmannFit {
  double kl = 0.0;
  bool pass = false;
  int states = 0;
  long samples = 0;
};

inline constexpr double kBoltzmannKlPass = 0.1;
inline constexpr long kMinBoltzmannSamples = 100;

/// Compares the empirical distribution of quiescent potentials with the
/// softmax of -X / (k_B Fbar) over the same states via KL(empirical || model).
/// Samples with at most max_states distinct values are treated as discrete
/// levels; otherwise they are grouped into max_states equal-width bins
/// represented by their within-bin mean.
[[nodiscard]] BoltzmannFit boltzmann_fit_check(std::span<const double> quiescent_potentials,
                                               double global_field, double kb,
                                               int max_states = 50);

}  // namespace edm
