#include "edm/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "edm/config.hpp"
#include "edm/quadrature.hpp"

namespace edm {

CorrelatedNoise::CorrelatedNoise(int n, double col) : n_(n), col_(col), z_(n) {
  if (n < 1) throw std::invalid_argument("CorrelatedNoise: n must be >= 1");
  const double lo = n > 1 ? min_noise_correlation(n) : -1.0;
  if (!(col < 1.0) || !(col > lo)) {
    throw std::invalid_argument("CorrelatedNoise: correlation " + std::to_string(col) +
                                " outside the PSD range (" + std::to_string(lo) + ", 1)");
  }
  if (col < 0.0) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(n, n, col);
    r.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("CorrelatedNoise: correlation matrix is not positive definite");
    }
    chol_ = llt.matrixL();
  }
}

void CorrelatedNoise::draw(double dt, Rng& rng, std::span<double> out) {
  if (static_cast<int>(out.size()) != n_) throw std::invalid_argument("CorrelatedNoise: size");
  const double scale = std::sqrt(dt);
  if (col_ >= 0.0) {
    const double shared = col_ > 0.0 ? std::sqrt(col_) * normal_(rng) : 0.0;
    const double own = std::sqrt(1.0 - col_);
    for (auto& w : out) w = scale * (shared + own * normal_(rng));
    return;
  }
  for (int i = 0; i < n_; ++i) z_[i] = normal_(rng);
  // Lower-triangular product, row by row.
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (int k = 0; k <= i; ++k) acc += chol_(i, k) * z_[k];
    out[static_cast<std::size_t>(i)] = scale * acc;
  }
}

NoiseBlock correlated_increments(int n, double col, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("correlated_increments: dt must be > 0");
  CorrelatedNoise noise(n, col);
  NoiseBlock block(static_cast<std::size_t>(n));
  noise.draw(dt, rng, block);
  return block;
}

void em_step_inplace(std::span<double> x, std::span<const double> drift,
                     std::span<const double> beta, std::span<const double> dw, double dt) {
  const auto n = x.size();
  if (drift.size() != n || beta.size() != n || dw.size() != n) {
    throw std::invalid_argument("em_step: dimension mismatch (x=" + std::to_string(n) +
                                ", drift=" + std::to_string(drift.size()) +
                                ", beta=" + std::to_string(beta.size()) +
                                ", dW=" + std::to_string(dw.size()) + ")");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be > 0");
  for (std::size_t i = 0; i < n; ++i) x[i] += drift[i] * dt + beta[i] * dw[i];
}

std::vector<double> em_step(std::span<const double> x, std::span<const double> drift,
                            std::span<const double> beta, std::span<const double> dw, double dt) {
  std::vector<double> out(x.begin(), x.end());
  em_step_inplace(out, drift, beta, dw, dt);
  return out;
}

double ou_fundamental_solution(const std::function<double(double)>& alpha, double t0, double t) {
  if (t == t0) return 1.0;
  return std::exp(adaptive_simpson(alpha, t0, t, 1e-10));
}

double ou_exact_mean(const OuSpec& spec, double t) {
  if (t < 0.0) throw std::invalid_argument("ou_exact_mean: t must be >= 0");
  if (spec.is_constant()) {
    const double a = spec.alpha;
    if (!std::isfinite(a) || !std::isfinite(spec.g)) {
      throw std::invalid_argument("ou_exact_mean: non-finite coefficients");
    }
    if (a == 0.0) return spec.x0 + spec.g * t;
    const double decay = std::exp(-a * t);
    return spec.x0 * decay + spec.g * (-std::expm1(-a * t)) / a;
  }
  // mean = x0 e^{-A(t)} + int_0^t e^{-(A(t)-A(s))} g(s) ds, A the running integral of alpha
  auto alpha = [&spec](double u) { return spec.alpha_at(u); };
  auto cumulative = [&](double s) { return s == 0.0 ? 0.0 : adaptive_simpson(alpha, 0.0, s, 1e-11); };
  const double a_t = cumulative(t);
  auto integrand = [&](double s) { return std::exp(-(a_t - cumulative(s))) * spec.g_at(s); };
  double forced = 0.0;
  try {
    forced = adaptive_simpson(integrand, 0.0, t, 1e-9);
  } catch (const QuadratureError& e) {
    throw std::invalid_argument(std::string("ou_exact_mean: non-integrable spec: ") + e.what());
  }
  return spec.x0 * std::exp(-a_t) + forced;
}

double ou_exact_variance(const OuSpec& spec, double t) {
  if (!spec.is_constant()) {
    throw std::invalid_argument("ou_exact_variance: constant coefficients required");
  }
  if (!(spec.alpha > 0.0)) {
    throw std::invalid_argument("ou_exact_variance: alpha must be > 0");
  }
  return spec.beta * spec.beta * (-std::expm1(-2.0 * spec.alpha * t)) / (2.0 * spec.alpha);
}

std::vector<double> ou_exact_paths(const OuSpec& spec, double t, int n_paths, Rng& rng) {
  if (!spec.is_constant()) {
    throw std::invalid_argument("ou_exact_paths: constant coefficients required");
  }
  if (!(spec.alpha > 0.0)) throw std::invalid_argument("ou_exact_paths: alpha must be > 0");
  if (n_paths < 0) throw std::invalid_argument("ou_exact_paths: n_paths must be >= 0");
  const double mean = ou_exact_mean(spec, t);
  const double sd = std::sqrt(ou_exact_variance(spec, t));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(n_paths));
  for (auto& x : out) x = mean + sd * normal(rng);
  return out;
}

}  // namespace edm
