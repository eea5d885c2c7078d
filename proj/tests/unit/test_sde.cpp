#include <cmath>
#include <vector>

#include "doctest.h"
#include "edm/quadrature.hpp"
#include "edm/sde.hpp"
#include "oracles.hpp"

using namespace edm;

namespace {

// Pearson correlation of columns a and b over the rows of samples.
double correlation(const std::vector<std::vector<double>>& rows, std::size_t a, std::size_t b) {
  double ma = 0.0, mb = 0.0;
  for (const auto& r : rows) {
    ma += r[a];
    mb += r[b];
  }
  ma /= static_cast<double>(rows.size());
  mb /= static_cast<double>(rows.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (const auto& r : rows) {
    sab += (r[a] - ma) * (r[b] - mb);
    saa += (r[a] - ma) * (r[a] - ma);
    sbb += (r[b] - mb) * (r[b] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<std::vector<double>> draw_rows(int n, double col, double dt, int steps, std::uint64_t seed) {
  CorrelatedNoise noise(n, col);
  Rng rng(seed);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(steps), std::vector<double>(n));
  for (auto& r : rows) noise.draw(dt, rng, r);
  return rows;
}

}  // namespace

TEST_CASE("independent increments are uncorrelated") {
  const auto rows = draw_rows(4, 0.0, 0.01, 100000, 1);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) CHECK(std::abs(correlation(rows, a, b)) < 0.02);
  }
}

TEST_CASE("positive equicorrelation is reproduced") {
  const auto rows = draw_rows(10, 0.5, 0.01, 100000, 2);
  for (std::size_t a = 0; a < 10; ++a) {
    for (std::size_t b = a + 1; b < 10; ++b) CHECK(correlation(rows, a, b) == doctest::Approx(0.5).epsilon(0.06));
  }
}

TEST_CASE("negative equicorrelation goes through the Cholesky path") {
  const double col = -0.1;  // bound for n = 10 is -1/9
  const auto rows = draw_rows(10, col, 0.01, 100000, 3);
  for (std::size_t a = 0; a < 10; ++a) {
    for (std::size_t b = a + 1; b < 10; ++b) CHECK(std::abs(correlation(rows, a, b) - col) < 0.02);
  }
}

TEST_CASE("increment variance equals dt for any correlation") {
  for (double col : {0.0, 0.5, 0.999, -0.05}) {
    const double dt = 0.02;
    const auto rows = draw_rows(5, col, dt, 100000, 4);
    std::vector<double> first;
    for (const auto& r : rows) first.push_back(r[0]);
    const auto m = oracle::sample_moments(first);
    CHECK(std::abs(m.variance - dt) < 4.0 * m.variance_se);
    CHECK(std::abs(m.mean) < 4.0 * m.mean_se);
  }
}

TEST_CASE("noise constructor rejects infeasible correlations") {
  CHECK_THROWS_AS(CorrelatedNoise(10, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(CorrelatedNoise(10, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CorrelatedNoise(0, 0.0), std::invalid_argument);
  Rng rng(1);
  CHECK_THROWS_AS((void)correlated_increments(3, 0.0, 0.0, rng), std::invalid_argument);
  CHECK(correlated_increments(3, 0.2, 0.1, rng).size() == 3);
}

TEST_CASE("em_step identity and pure drift") {
  const std::vector<double> x{1.0, -2.0, 3.5};
  const std::vector<double> zero(3, 0.0);
  const std::vector<double> dw{0.3, -0.1, 0.2};
  CHECK(em_step(x, zero, zero, dw, 0.01) == x);

  const std::vector<double> origin(3, 0.0);
  const std::vector<double> ones(3, 1.0);
  for (double v : em_step(origin, ones, zero, dw, 0.01)) CHECK(v == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("em_step rejects mismatched sizes and non-positive dt") {
  const std::vector<double> a(3, 0.0);
  const std::vector<double> b(2, 0.0);
  CHECK_THROWS_AS((void)em_step(a, b, a, a, 0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)em_step(a, a, a, a, 0.0), std::invalid_argument);
}

TEST_CASE("em_step on linear decay converges at first order") {
  auto integrate = [](double dt) {
    std::vector<double> x{1.0};
    const std::vector<double> zero{0.0};
    const auto steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) x = em_step(x, std::vector<double>{-x[0]}, zero, zero, dt);
    return x[0];
  };
  const double exact = std::exp(-1.0);
  const double e1 = std::abs(integrate(1e-2) - exact);
  const double e2 = std::abs(integrate(5e-3) - exact);
  CHECK(e1 < 0.01);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(integrate(1e-4) - 0.3679) < 1e-4);
}

TEST_CASE("OU mean closed form") {
  OuSpec zero_drift{.alpha = 1.3, .g = 0.0, .beta = 0.4, .x0 = 0.0};
  for (double t : {0.0, 0.5, 3.0}) CHECK(ou_exact_mean(zero_drift, t) == 0.0);

  OuSpec unit{.alpha = 1.0, .g = 1.0, .beta = 0.5, .x0 = 0.0};
  CHECK(ou_exact_mean(unit, 50.0) == doctest::Approx(1.0).epsilon(1e-12));

  OuSpec s{.alpha = 2.0, .g = 3.0, .beta = 0.0, .x0 = 0.0};
  CHECK(ou_exact_mean(s, 0.5) == doctest::Approx(1.5 * (1.0 - std::exp(-1.0))).epsilon(1e-14));
  CHECK(ou_exact_mean(s, 0.5) == doctest::Approx(0.9482).epsilon(1e-4));

  OuSpec with_start{.alpha = 1.0, .g = 0.0, .beta = 0.0, .x0 = 5.0};
  CHECK(ou_exact_mean(with_start, 1.0) == doctest::Approx(5.0 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("OU variance closed form") {
  OuSpec s{.alpha = 1.0, .g = 1.0, .beta = 0.5, .x0 = 0.0};
  for (double t : {0.5, 1.0, 5.0}) {
    CHECK(ou_exact_variance(s, t) ==
          doctest::Approx(0.25 * (1.0 - std::exp(-2.0 * t)) / 2.0).epsilon(1e-14));
  }
  CHECK(ou_exact_variance(s, 0.0) == 0.0);
}

TEST_CASE("time-varying OU mean agrees with a fine Euler reference") {
  OuSpec s;
  s.x0 = 0.5;
  s.alpha_fn = [](double t) { return 1.0 + 0.5 * std::sin(t); };
  s.g_fn = [](double t) { return 2.0 + t; };
  // deterministic ODE dx = (g - alpha x) dt by RK4 as reference
  double x = s.x0;
  const double h = 1e-4;
  auto f = [&](double t, double v) { return s.g_fn(t) - s.alpha_fn(t) * v; };
  for (int k = 0; k < 20000; ++k) {
    const double t = k * h;
    const double k1 = f(t, x);
    const double k2 = f(t + h / 2, x + h / 2 * k1);
    const double k3 = f(t + h / 2, x + h / 2 * k2);
    const double k4 = f(t + h, x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(ou_exact_mean(s, 2.0) == doctest::Approx(x).epsilon(1e-7));
}

TEST_CASE("fundamental solution") {
  CHECK(ou_fundamental_solution([](double) { return 0.0; }, 0.0, 3.0) == 1.0);
  CHECK(ou_fundamental_solution([](double) { return 0.7; }, 1.0, 4.0) ==
        doctest::Approx(std::exp(0.7 * 3.0)).epsilon(1e-12));
  CHECK(ou_fundamental_solution([](double e) { return e; }, 0.0, 2.0) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
}

TEST_CASE("exact OU sampling") {
  Rng rng(7);
  OuSpec deterministic{.alpha = 1.0, .g = 2.0, .beta = 0.0, .x0 = 1.0};
  for (double v : ou_exact_paths(deterministic, 0.8, 100, rng)) {
    CHECK(v == doctest::Approx(ou_exact_mean(deterministic, 0.8)).epsilon(1e-15));
  }

  OuSpec stationary{.alpha = 1.0, .g = 0.0, .beta = 1.0, .x0 = 0.0};
  const auto m = oracle::sample_moments(ou_exact_paths(stationary, 40.0, 10000, rng));
  CHECK(std::abs(m.variance - 0.5) < 3.0 * m.variance_se);

  OuSpec decay{.alpha = 1.0, .g = 0.0, .beta = 1.0, .x0 = 5.0};
  const auto d = oracle::sample_moments(ou_exact_paths(decay, 1.0, 10000, rng));
  CHECK(std::abs(d.mean - 5.0 * std::exp(-1.0)) < 3.0 * d.mean_se);

  OuSpec bad{.alpha = 0.0, .g = 0.0, .beta = 1.0, .x0 = 0.0};
  CHECK_THROWS_AS((void)ou_exact_paths(bad, 1.0, 10, rng), std::invalid_argument);
}

TEST_CASE("adaptive Simpson") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(adaptive_simpson([](double x) { return x * x; }, 3.0, 0.0) == doctest::Approx(-9.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
  CHECK_THROWS_AS((void)adaptive_simpson([](double x) { return 1.0 / x; }, -1.0, 1.0),
                  QuadratureError);
}
