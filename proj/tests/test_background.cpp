#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "gravlam/background.hpp"

using Catch::Approx;
using namespace gravlam;

namespace {

// Upper 0.001 quantile of chi-square with 15 degrees of freedom (16 bins).
constexpr double chi2_crit_15dof_p001 = 37.697;
// Asymptotic Kolmogorov-Smirnov critical coefficient at significance 0.001:
// sqrt(ln(2/alpha)/2); reject if D * sqrt(n) exceeds it.
constexpr double ks_crit_p001 = 1.9495;

double chi_square_uniform(const std::vector<double>& values, double lo, double hi, int bins) {
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    int bin = static_cast<int>((v - lo) / (hi - lo) * bins);
    bin = std::clamp(bin, 0, bins - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  const double expected = static_cast<double>(values.size()) / bins;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  return chi2;
}

double ks_statistic_uniform(std::vector<double> values, double lo, double hi) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = (values[i] - lo) / (hi - lo);
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(cdf - i / n));
  }
  return d;
}

SpectrumConfig band(double lo, double hi, double strain, int count) {
  return SpectrumConfig{lo, hi, strain, count};
}

}  // namespace

TEST_CASE("SpectrumConfig validation") {
  CHECK_NOTHROW(band(1.0, 2.0, 1e-6, 10).validate());
  CHECK_THROWS_AS(band(0.0, 2.0, 1e-6, 10).validate(), std::invalid_argument);
  CHECK_THROWS_AS(band(3.0, 2.0, 1e-6, 10).validate(), std::invalid_argument);
  CHECK_THROWS_AS(band(1.0, 2.0, 2e-3, 10).validate(), std::invalid_argument);
  CHECK_THROWS_AS(band(1.0, 2.0, -1e-6, 10).validate(), std::invalid_argument);
  CHECK_THROWS_AS(band(1.0, 2.0, 1e-6, 0).validate(), std::invalid_argument);
}

TEST_CASE("BackgroundMode construction enforces invariants") {
  SymTensor4 e;
  e.set(1, 1, 1.0);
  const double omega = 5.0;
  const double k0 = omega / speed_of_light;
  const MetricPerturbation source(e, FourVector(k0, k0, 0.0, 0.0), 1e-6);
  const std::array<double, 3> dir{1.0, 0.0, 0.0};

  CHECK_NOTHROW(BackgroundMode(k0 * k0, omega, 1.0, dir, source));
  // omega inconsistent with riemann
  CHECK_THROWS_AS(BackgroundMode(k0 * k0, 2.0 * omega, 1.0, dir, source),
                  std::invalid_argument);
  // phase out of range
  CHECK_THROWS_AS(BackgroundMode(k0 * k0, omega, -0.1, dir, source), std::invalid_argument);
  CHECK_THROWS_AS(BackgroundMode(k0 * k0, omega, two_pi, dir, source), std::invalid_argument);
  // non-unit direction
  CHECK_THROWS_AS(BackgroundMode(k0 * k0, omega, 1.0, {2.0, 0.0, 0.0}, source),
                  std::invalid_argument);
}

TEST_CASE("sample_ensemble basics") {
  SECTION("degenerate band pins omega exactly") {
    const auto ensemble = sample_ensemble(band(7.5, 7.5, 1e-6, 1), 11);
    REQUIRE(ensemble.modes.size() == 1);
    CHECK(ensemble.modes[0].omega() == 7.5);
  }

  SECTION("every sampled mode satisfies its invariants") {
    const auto ensemble = sample_ensemble(band(1.0, 100.0, 1e-5, 2000), 5);
    for (const auto& mode : ensemble.modes) {
      CHECK(mode.omega() >= 1.0);
      CHECK(mode.omega() < 100.0);
      CHECK(mode.phase() >= 0.0);
      CHECK(mode.phase() < two_pi);
      CHECK(mode.omega() == Approx(speed_of_light * std::sqrt(mode.riemann())).epsilon(1e-12));
      const auto& d = mode.direction();
      CHECK(std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) == Approx(1.0).epsilon(1e-12));
      CHECK(mode.strain() == 1e-5);
    }
  }

  SECTION("deterministic in the seed") {
    const auto first = sample_ensemble(band(1.0, 10.0, 1e-6, 100), 42);
    const auto second = sample_ensemble(band(1.0, 10.0, 1e-6, 100), 42);
    REQUIRE(first.modes.size() == second.modes.size());
    for (std::size_t i = 0; i < first.modes.size(); ++i) {
      CHECK(first.modes[i].omega() == second.modes[i].omega());
      CHECK(first.modes[i].phase() == second.modes[i].phase());
      CHECK(first.modes[i].direction() == second.modes[i].direction());
      CHECK(first.modes[i].riemann() == second.modes[i].riemann());
    }
    const auto other = sample_ensemble(band(1.0, 10.0, 1e-6, 100), 43);
    CHECK(first.modes[0].phase() != other.modes[0].phase());
  }

  SECTION("rejects invalid spectra") {
    CHECK_THROWS_AS(sample_ensemble(band(0.0, 1.0, 1e-6, 10), 1), std::invalid_argument);
  }
}

TEST_CASE("background statistics") {
  SECTION("phase uniformity, chi-square over 16 bins") {
    const auto ensemble = sample_ensemble(band(1.0, 10.0, 1e-6, 10000), 7);
    std::vector<double> phases;
    phases.reserve(ensemble.modes.size());
    for (const auto& m : ensemble.modes) phases.push_back(m.phase());
    CHECK(chi_square_uniform(phases, 0.0, two_pi, 16) < chi2_crit_15dof_p001);
  }

  SECTION("phase uniformity, Kolmogorov-Smirnov at 1e5") {
    const auto ensemble = sample_ensemble(band(1.0, 10.0, 1e-6, 100000), 13);
    std::vector<double> phases;
    phases.reserve(ensemble.modes.size());
    for (const auto& m : ensemble.modes) phases.push_back(m.phase());
    const double d = ks_statistic_uniform(phases, 0.0, two_pi);
    CHECK(d * std::sqrt(static_cast<double>(phases.size())) < ks_crit_p001);
  }

  SECTION("direction isotropy") {
    const auto ensemble = sample_ensemble(band(1.0, 10.0, 1e-6, 100000), 17);
    double mx = 0.0, my = 0.0, mz = 0.0;
    std::vector<double> cos_polar;
    cos_polar.reserve(ensemble.modes.size());
    for (const auto& m : ensemble.modes) {
      mx += m.direction()[0];
      my += m.direction()[1];
      mz += m.direction()[2];
      cos_polar.push_back(m.direction()[2]);
    }
    const double n = static_cast<double>(ensemble.modes.size());
    const double mean_norm = std::sqrt(mx * mx + my * my + mz * mz) / n;
    CHECK(mean_norm < 4.0 / std::sqrt(n));
    CHECK(chi_square_uniform(cos_polar, -1.0, 1.0, 16) < chi2_crit_15dof_p001);
  }
}

TEST_CASE("sample_lambda is uniform on the circle") {
  rng::Xoshiro256StarStar gen(2024);
  const int n = 1000000;
  double cos_sum = 0.0;
  long long in_lower_half = 0;
  for (int i = 0; i < n; ++i) {
    const double alpha = sample_lambda(gen).alpha;
    REQUIRE(alpha >= 0.0);
    REQUIRE(alpha < two_pi);
    cos_sum += std::cos(alpha);
    if (alpha < std::numbers::pi) ++in_lower_half;
  }
  // CLT bound: sigma(cos alpha) = 1/sqrt(2) < 1, so 4 sigma / sqrt(n) < 4e-3
  CHECK(std::abs(cos_sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
  // binomial stderr 0.0005, 4 sigma window
  CHECK(std::abs(static_cast<double>(in_lower_half) / n - 0.5) < 0.002);
}

TEST_CASE("mode_phase arithmetic") {
  const auto ensemble = sample_ensemble(band(1.0, 1.0, 1e-6, 1), 3);
  const auto& sampled = ensemble.modes[0];
  CHECK(mode_phase(sampled, 0.0) == sampled.phase());

  SymTensor4 e;
  e.set(1, 1, 1.0);
  const auto make = [&](double omega, double phase) {
    const double k0 = omega / speed_of_light;
    return BackgroundMode(k0 * k0, omega, phase, {0.0, 0.0, 1.0},
                          MetricPerturbation(e, FourVector(k0, 0.0, 0.0, k0), 1e-6));
  };

  const auto full_period = make(two_pi, 0.0);
  CHECK(mode_phase(full_period, 1.0) == Approx(0.0).margin(1e-12));

  const auto half_rate = make(std::numbers::pi, std::numbers::pi / 2.0);
  CHECK(mode_phase(half_rate, 1.0) == Approx(3.0 * std::numbers::pi / 2.0).epsilon(1e-15));

  CHECK_THROWS_AS(mode_phase(full_period, std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("heisenberg_diagnostic") {
  SymTensor4 e;
  e.set(1, 1, 1.0);
  const auto make = [&](double omega, double strain) {
    const double k0 = omega / speed_of_light;
    return BackgroundMode(k0 * k0, omega, 0.0, {0.0, 0.0, 1.0},
                          MetricPerturbation(e, FourVector(k0, 0.0, 0.0, k0), strain));
  };

  SECTION("zero strain gives zeros") {
    const auto d = heisenberg_diagnostic(make(1e15, 0.0), 9.109e-31, 1e-10);
    CHECK(d.delta_x == 0.0);
    CHECK(d.delta_p == 0.0);
    CHECK(d.product_over_hbar == 0.0);
  }

  SECTION("electron-scale mode") {
    const double mass = 9.109e-31;
    const double omega = 1e15;
    const double ell0 = 1e-10;
    const auto d = heisenberg_diagnostic(make(omega, 1e-6), mass, ell0);
    CHECK(d.delta_x == Approx(1e-16).epsilon(1e-15));
    // two independent evaluation orders for delta_p
    const double dp_a = (mass * omega) * (1e-6 * ell0);
    const double dp_b = mass * (omega * (1e-6 * ell0));
    CHECK(d.delta_p == Approx(dp_a).epsilon(1e-15));
    CHECK(dp_a == Approx(dp_b).epsilon(1e-15));
    CHECK(d.product_over_hbar ==
          Approx(1e-16 * dp_a / 1.054571817e-34).epsilon(1e-13));
  }

  SECTION("doubling strain doubles delta_x and quadruples the product") {
    const auto d1 = heisenberg_diagnostic(make(1e15, 1e-6), 9.109e-31, 1e-10);
    const auto d2 = heisenberg_diagnostic(make(1e15, 2e-6), 9.109e-31, 1e-10);
    CHECK(d2.delta_x == Approx(2.0 * d1.delta_x).epsilon(1e-14));
    CHECK(d2.product_over_hbar == Approx(4.0 * d1.product_over_hbar).epsilon(1e-14));
  }

  SECTION("rejects non-positive mass") {
    CHECK_THROWS_AS(heisenberg_diagnostic(make(1e15, 1e-6), 0.0, 1e-10),
                    std::invalid_argument);
    CHECK_THROWS_AS(heisenberg_diagnostic(make(1e15, 1e-6), -1.0, 1e-10),
                    std::invalid_argument);
    CHECK_THROWS_AS(heisenberg_diagnostic(make(1e15, 1e-6), 9.1e-31, 0.0),
                    std::invalid_argument);
  }
}
