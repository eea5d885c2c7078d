#include "edm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/tools/minima.hpp>

namespace edm {

std::vector<Avalanche> detect_avalanches(std::span<const double> spike_times, double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("detect_avalanches: bin_width must be > 0");
  std::vector<long> bins;
  bins.reserve(spike_times.size());
  for (double t : spike_times) bins.push_back(static_cast<long>(std::floor(t / bin_width)));
  std::sort(bins.begin(), bins.end());

  std::vector<Avalanche> out;
  std::size_t k = 0;
  while (k < bins.size()) {
    const long first = bins[k];
    long last = first;
    long size = 0;
    while (k < bins.size() && bins[k] <= last + 1) {
      last = bins[k];
      ++size;
      ++k;
    }
    out.push_back({static_cast<double>(first) * bin_width, last - first + 1, size});
  }
  return out;
}

std::vector<Avalanche> detect_avalanches(std::span<const SpikeRecord> spikes, double bin_width) {
  std::vector<double> times;
  times.reserve(spikes.size());
  for (const auto& s : spikes) times.push_back(s.t);
  return detect_avalanches(times, bin_width);
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw std::domain_error("hurwitz_zeta: need s > 1, q > 0");
  // Euler-Maclaurin with a short direct head.
  constexpr int head = 12;
  static constexpr double bernoulli_over_factorial[] = {
      1.0 / 6.0 / 2.0,                  // B2 / 2!
      -1.0 / 30.0 / 24.0,               // B4 / 4!
      1.0 / 42.0 / 720.0,               // B6 / 6!
      -1.0 / 30.0 / 40320.0,            // B8 / 8!
      5.0 / 66.0 / 3628800.0,           // B10 / 10!
      -691.0 / 2730.0 / 479001600.0,    // B12 / 12!
  };
  double sum = 0.0;
  for (int k = 0; k < head; ++k) sum += std::pow(q + k, -s);
  const double a = q + head;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  double rising = s;  // s (s+1) ... (s + 2j - 2)
  double power = std::pow(a, -s - 1.0);
  for (int j = 0; j < 6; ++j) {
    sum += bernoulli_over_factorial[j] * rising * power;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    power /= a * a;
  }
  return sum;
}

namespace {

struct LogBinned {
  double slope = 0.0;
  double r_squared = 0.0;
  double decades = 0.0;
};

LogBinned log_binned_regression(const std::vector<double>& sorted, double z_min) {
  const double z_max = sorted.back();
  const double span = std::log10(z_max / z_min);
  const int n_bins = std::max(5, static_cast<int>(std::ceil(span * 5.0)));
  const double step = (span + 1e-9) / n_bins;

  std::vector<double> xs;
  std::vector<double> ys;
  const auto n = static_cast<double>(sorted.size());
  auto it = sorted.begin();
  for (int b = 0; b < n_bins; ++b) {
    const double lo = z_min * std::pow(10.0, b * step);
    const double hi = z_min * std::pow(10.0, (b + 1) * step);
    // integer support inside [lo, hi)
    const double first = std::ceil(lo);
    const double width = std::ceil(hi) - first;
    auto end = std::lower_bound(it, sorted.end(), b + 1 == n_bins ? std::nextafter(hi, HUGE_VAL) : hi);
    const auto count = static_cast<double>(end - it);
    it = end;
    if (width < 1.0 || count == 0.0) continue;
    const double last = first + width - 1.0;
    xs.push_back(std::log10(std::sqrt(first * last)));
    ys.push_back(std::log10(count / (n * width)));
  }
  LogBinned out;
  if (xs.size() < 2) return out;
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  out.slope = sxy / sxx;
  out.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 0.0;
  out.decades = xs.back() - xs.front();
  return out;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> sizes, double z_min) {
  if (!(z_min >= 1.0)) throw std::invalid_argument("fit_power_law: z_min must be >= 1");
  std::vector<double> z;
  z.reserve(sizes.size());
  for (double s : sizes) {
    if (s >= z_min) z.push_back(s);
  }
  if (static_cast<long>(z.size()) < kMinPowerLawSamples) {
    throw InsufficientDataError("fit_power_law: " + std::to_string(z.size()) +
                                " samples at or above z_min; need at least " +
                                std::to_string(kMinPowerLawSamples) + " (run longer)");
  }
  std::sort(z.begin(), z.end());
  if (z.front() == z.back()) throw std::domain_error("fit_power_law: degenerate distribution");

  const auto n = static_cast<double>(z.size());
  double sum_log = 0.0;
  for (double v : z) sum_log += std::log(v);

  auto neg_log_likelihood = [&](double a) { return n * std::log(hurwitz_zeta(a, z_min)) + a * sum_log; };
  const auto [alpha, nll] =
      boost::math::tools::brent_find_minima(neg_log_likelihood, 1.0 + 1e-6, 12.0, 50);
  (void)nll;

  PowerLawFit fit;
  fit.alpha = alpha;
  fit.exponent = -alpha;
  fit.alpha_stderr = (alpha - 1.0) / std::sqrt(n);
  fit.z_min = z_min;
  fit.samples = static_cast<long>(z.size());

  const auto binned = log_binned_regression(z, z_min);
  fit.log_slope = binned.slope;
  fit.r_squared = binned.r_squared;
  fit.decades = binned.decades;

  const double norm = hurwitz_zeta(alpha, z_min);
  double ks = 0.0;
  for (std::size_t k = 0; k < z.size();) {
    std::size_t j = k;
    while (j < z.size() && z[j] == z[k]) ++j;
    const double below = static_cast<double>(k) / n;  // empirical CDF just below z[k]
    const double upto = static_cast<double>(j) / n;
    const double model_below = 1.0 - hurwitz_zeta(alpha, z[k]) / norm;
    const double model_upto = 1.0 - hurwitz_zeta(alpha, z[k] + 1.0) / norm;
    ks = std::max({ks, std::abs(upto - model_upto), std::abs(below - model_below)});
    k = j;
  }
  fit.ks_distance = std::min(ks, 1.0);
  return fit;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::SubCritical:
      return "sub-critical";
    case Regime::Critical:
      return "critical";
    case Regime::SuperCritical:
      return "super-critical";
  }
  return "unknown";
}

Regime classify_regime(double sigma) {
  if (sigma < 0.9) return Regime::SubCritical;
  if (sigma > 1.1) return Regime::SuperCritical;
  return Regime::Critical;
}

BranchingSummary branching_summary(std::span<const double> sigma_series, double transient_fraction) {
  if (sigma_series.empty()) throw InsufficientDataError("branching_summary: empty series");
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0)) {
    throw std::invalid_argument("branching_summary: transient fraction must lie in [0, 1)");
  }
  const auto n = sigma_series.size();
  auto skip = static_cast<std::size_t>(std::floor(static_cast<double>(n) * transient_fraction));
  skip = std::min(skip, n - 1);

  BranchingSummary s;
  const auto tail = sigma_series.subspan(skip);
  s.mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
  const auto [lo, hi] = std::minmax_element(sigma_series.begin(), sigma_series.end());
  s.min = *lo;
  s.max = *hi;
  s.terminal = sigma_series.back();
  s.regime = classify_regime(s.mean);
  return s;
}

BoltzmannFit boltzmann_fit_check(std::span<const double> samples, double global_field, double kb,
                                 int max_states) {
  if (static_cast<long>(samples.size()) < kMinBoltzmannSamples) {
    throw InsufficientDataError("boltzmann_fit_check: " + std::to_string(samples.size()) +
                                " samples; need at least " + std::to_string(kMinBoltzmannSamples));
  }
  if (global_field == 0.0 || !(kb > 0.0)) {
    throw std::domain_error("boltzmann_fit_check: need nonzero global field and kb > 0");
  }
  // state representative -> (sum of members, count)
  std::map<double, std::pair<double, long>> levels;
  for (double x : samples) {
    auto& slot = levels[x];
    slot.first += x;
    ++slot.second;
  }
  std::vector<std::pair<double, long>> states;  // (representative, count)
  if (static_cast<int>(levels.size()) <= max_states) {
    for (const auto& [x, acc] : levels) states.emplace_back(x, acc.second);
  } else {
    const double lo = levels.begin()->first;
    const double hi = levels.rbegin()->first;
    const double width = (hi - lo) / max_states;
    std::vector<std::pair<double, long>> bins(static_cast<std::size_t>(max_states), {0.0, 0});
    for (const auto& [x, acc] : levels) {
      auto b = static_cast<std::size_t>(std::min<double>(max_states - 1, std::floor((x - lo) / width)));
      bins[b].first += acc.first;
      bins[b].second += acc.second;
    }
    for (const auto& [sum, count] : bins) {
      if (count > 0) states.emplace_back(sum / static_cast<double>(count), count);
    }
  }

  const double temperature = kb * global_field;
  double top = -HUGE_VAL;
  for (const auto& [x, _] : states) top = std::max(top, -x / temperature);
  double z = 0.0;
  for (const auto& [x, _] : states) z += std::exp(-x / temperature - top);

  const auto n = static_cast<double>(samples.size());
  double kl = 0.0;
  for (const auto& [x, count] : states) {
    const double empirical = static_cast<double>(count) / n;
    const double model = std::exp(-x / temperature - top) / z;
    kl += empirical * std::log(empirical / model);
  }
  BoltzmannFit fit;
  fit.kl = std::max(kl, 0.0);
  fit.pass = fit.kl <= kBoltzmannKlPass;
  fit.states = static_cast<int>(states.size());
  fit.samples = static_cast<long>(samples.size());
  return fit;
}

}  // namespace edm
