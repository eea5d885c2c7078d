#pragma once

#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace edm {

using Rng = std::mt19937_64;

/// One step of Wiener increments dW_i, each ~ Normal(0, dt).
using NoiseBlock = std::vector<double>;

/// Equicorrelated Gaussian increment generator. For col >= 0 one shared
/// factor plus independent parts is used; negative correlations go through
/// the Cholesky factor of the N x N equicorrelation matrix.
class CorrelatedNoise {
 public:
  CorrelatedNoise(int n, double col);

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] double correlation() const { return col_; }

  /// Fills out (size n) with increments scaled to variance dt.
  void draw(double dt, Rng& rng, std::span<double> out);

 private:
  int n_;
  double col_;
  Eigen::MatrixXd chol_;  // lower factor, only for col < 0
  Eigen::VectorXd z_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

[[nodiscard]] NoiseBlock correlated_increments(int n, double col, double dt, Rng& rng);

/// Euler-Maruyama update x' = x + drift dt + beta o dW.
[[nodiscard]] std::vector<double> em_step(std::span<const double> x, std::span<const double> drift,
                                          std::span<const double> beta, std::span<const double> dw,
                                          double dt);
/// In-place form used by the simulation loop.
void em_step_inplace(std::span<double> x, std::span<const double> drift,
                     std::span<const double> beta, std::span<const double> dw, double dt);

/// Linear SDE dx = (g(t) - alpha(t) x) dt + beta dW, x(0) = x0.
/// When alpha_fn / g_fn are empty the constants are used.
struct OuSpec {
  double alpha = 1.0;
  double g = 0.0;
  double beta = 0.0;
  double x0 = 0.0;
  std::function<double(double)> alpha_fn{};
  std::function<double(double)> g_fn{};

  [[nodiscard]] bool is_constant() const { return !alpha_fn && !g_fn; }
  [[nodiscard]] double alpha_at(double t) const { return alpha_fn ? alpha_fn(t) : alpha; }
  [[nodiscard]] double g_at(double t) const { return g_fn ? g_fn(t) : g; }
};

/// E[x(t)]. Closed form for constant coefficients, nested adaptive
/// quadrature otherwise.
[[nodiscard]] double ou_exact_mean(const OuSpec& spec, double t);

/// Var[x(t)] for constant coefficients: beta^2 (1 - e^{-2 alpha t}) / (2 alpha).
[[nodiscard]] double ou_exact_variance(const OuSpec& spec, double t);

/// exp of the integral of alpha over [t0, t]; equals 1 at t = t0.
[[nodiscard]] double ou_fundamental_solution(const std::function<double(double)>& alpha, double t0,
                                             double t);

/// Draws n_paths samples of x(t) from the exact Gaussian transition law.
/// Requires constant coefficients and alpha > 0.
[[nodiscard]] std::vector<double> ou_exact_paths(const OuSpec& spec, double t, int n_paths,
                                                 Rng& rng);

}  // namespace edm
