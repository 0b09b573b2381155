#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "gravlam/background.hpp"
#include "gravlam/constants.hpp"
#include "gravlam/rng.hpp"

namespace gravlam {

enum class Method { closed_form, quadrature, monte_carlo };

constexpr std::string_view method_name(Method method) {
  switch (method) {
    case Method::closed_form: return "closed_form";
    case Method::quadrature: return "quadrature";
    case Method::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

/// One correlation value M(theta). std_error is 0 for the deterministic
/// methods; n_samples is 0 for closed-form results.
struct CorrelationEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long long n_samples = 0;
  Method method = Method::closed_form;
};

/// The four analyzer orientations (a, a', b, b') in the polarizer plane,
/// stored reduced to [0, 2*pi). Correlations depend only on differences, so
/// the reduction is harmless for every estimator here (all are 2*pi-periodic).
class AnalyzerConfig {
 public:
  AnalyzerConfig(double a, double a_prime, double b, double b_prime)
      : a_(wrap_checked(a, "a")), a_prime_(wrap_checked(a_prime, "a_prime")),
        b_(wrap_checked(b, "b")), b_prime_(wrap_checked(b_prime, "b_prime")) {}

  /// The configuration with successive pi/4 separations that maximizes S for
  /// the cosine correlation: (0, -pi/2, -pi/4, pi/4).
  static AnalyzerConfig chsh_optimal() {
    return AnalyzerConfig(0.0, -std::numbers::pi / 2.0, -std::numbers::pi / 4.0,
                          std::numbers::pi / 4.0);
  }

  double a() const { return a_; }
  double a_prime() const { return a_prime_; }
  double b() const { return b_; }
  double b_prime() const { return b_prime_; }

 private:
  static double wrap_checked(double angle, const char* name) {
    detail::require_finite(angle, name);
    return wrap_two_pi(angle);
  }

  double a_, a_prime_, b_, b_prime_;
};

/// The four pairwise correlations and S = (m_ab + m_apb + m_abp - m_apbp)/2.
struct ChshResult {
  CorrelationEstimate m_ab;
  CorrelationEstimate m_apb;
  CorrelationEstimate m_abp;
  CorrelationEstimate m_apbp;
  double s = 0.0;
  double s_std_error = 0.0;
};

/// M(theta) = cos(theta): the projection-model correlation in closed form.
inline CorrelationEstimate correlation_closed_form(double theta) {
  detail::require_finite(theta, "theta");
  return {std::cos(theta), 0.0, 0, Method::closed_form};
}

/// Composite Simpson evaluation of (1/pi) * integral_0^{2pi} of
/// cos(alpha) cos(alpha + theta) d(alpha), keeping the literal 1/pi
/// normalization. Exact to rounding for this trigonometric integrand once
/// the panel count clears the Nyquist rate, hence the 1e-10 contract at 64
/// panels.
inline CorrelationEstimate correlation_quadrature(double theta, int panels) {
  detail::require_finite(theta, "theta");
  if (panels < 8 || panels % 2 != 0) {
    throw std::invalid_argument("panels must be an even integer >= 8");
  }
  const auto integrand = [theta](double alpha) { return std::cos(alpha) * std::cos(alpha + theta); };
  const double h = two_pi / panels;
  double sum = integrand(0.0) + integrand(two_pi);
  for (int i = 1; i < panels; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
  }
  const double integral = h / 3.0 * sum;
  return {integral / std::numbers::pi, 0.0, 0, Method::quadrature};
}

/// Fixed substream count for Monte Carlo estimators. Work is always split
/// into this many shards with hashed seeds and reduced in shard order, so an
/// estimate depends only on (n, seed), never on the worker count.
inline constexpr int monte_carlo_shard_count = 64;

namespace detail {

struct RunningMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

template <typename SampleFn>
RunningMoments sample_moments(long long n, std::uint64_t seed, int workers,
                              const SampleFn& sample) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  const int shards = monte_carlo_shard_count;
  std::vector<RunningMoments> partial(static_cast<std::size_t>(shards));

  const auto run_shard = [&](int shard) {
    long long count = n / shards + (shard < n % shards ? 1 : 0);
    rng::Xoshiro256StarStar gen(rng::substream_seed(seed, static_cast<std::uint64_t>(shard)));
    RunningMoments m;
    for (long long i = 0; i < count; ++i) {
      const double x = sample(gen);
      m.sum += x;
      m.sum_sq += x * x;
    }
    partial[static_cast<std::size_t>(shard)] = m;
  };

  if (workers == 1) {
    for (int s = 0; s < shards; ++s) run_shard(s);
  } else {
    const int thread_count = std::min(workers, shards);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int w = 0; w < thread_count; ++w) {
      pool.emplace_back([&, w] {
        for (int s = w; s < shards; s += thread_count) run_shard(s);
      });
    }
    for (auto& th : pool) th.join();
  }

  RunningMoments total;
  for (const auto& m : partial) {  // fixed order, independent of scheduling
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }
  return total;
}

inline double sample_variance(const RunningMoments& m, long long n) {
  return std::max(0.0, (m.sum_sq - m.sum * m.sum / static_cast<double>(n)) /
                           static_cast<double>(n - 1));
}

}  // namespace detail

/// Monte Carlo estimate of the projection-model correlation. Draws alpha
/// uniform on [0, 2*pi) and averages cos(alpha) cos(alpha + theta); the
/// factor 2 bridges the 1/pi normalization of the defining integral against
/// the uniform density 1/(2*pi) so the estimator targets cos(theta).
inline CorrelationEstimate correlation_monte_carlo(double theta, long long n, std::uint64_t seed,
                                                   int workers = 1) {
  detail::require_finite(theta, "theta");
  if (n < 100) throw std::invalid_argument("monte carlo requires n >= 100");
  const auto moments =
      detail::sample_moments(n, seed, workers, [theta](rng::Xoshiro256StarStar& gen) {
        const double alpha = sample_lambda(gen).alpha;
        return std::cos(alpha) * std::cos(alpha + theta);
      });
  const double mean = moments.sum / static_cast<double>(n);
  const double variance = detail::sample_variance(moments, n);
  return {2.0 * mean, 2.0 * std::sqrt(variance / static_cast<double>(n)), n,
          Method::monte_carlo};
}

/// Dichotomic comparator model: outcomes A = sign(cos alpha) and
/// B = sign(cos(alpha - theta)), correlation mean(A*B). The population value
/// is the sawtooth 1 - 2*theta/pi on [0, pi], the textbook +-1-outcome model
/// that obeys the classic |S| <= 1 bound.
inline CorrelationEstimate correlation_sign_model(double theta, long long n, std::uint64_t seed,
                                                  int workers = 1) {
  detail::require_finite(theta, "theta");
  if (n < 100) throw std::invalid_argument("monte carlo requires n >= 100");
  const auto moments =
      detail::sample_moments(n, seed, workers, [theta](rng::Xoshiro256StarStar& gen) {
        const double alpha = sample_lambda(gen).alpha;
        const double a = std::cos(alpha) >= 0.0 ? 1.0 : -1.0;
        const double b = std::cos(alpha - theta) >= 0.0 ? 1.0 : -1.0;
        return a * b;
      });
  const double mean = moments.sum / static_cast<double>(n);
  const double variance = detail::sample_variance(moments, n);
  return {mean, std::sqrt(variance / static_cast<double>(n)), n, Method::monte_carlo};
}

/// Evaluates S = (M(b-a) + M(b-a') + M(b'-a) - M(b'-a'))/2 through the given
/// correlator. Only the four angle differences enter, so a global rotation
/// of the analyzers leaves the result unchanged.
template <typename Correlator>
ChshResult bell_s(const AnalyzerConfig& config, Correlator&& correlator) {
  ChshResult result;
  result.m_ab = correlator(config.b() - config.a());
  result.m_apb = correlator(config.b() - config.a_prime());
  result.m_abp = correlator(config.b_prime() - config.a());
  result.m_apbp = correlator(config.b_prime() - config.a_prime());
  result.s = 0.5 * (result.m_ab.value + result.m_apb.value + result.m_abp.value -
                    result.m_apbp.value);
  result.s_std_error =
      0.5 * std::sqrt(result.m_ab.std_error * result.m_ab.std_error +
                      result.m_apb.std_error * result.m_apb.std_error +
                      result.m_abp.std_error * result.m_abp.std_error +
                      result.m_apbp.std_error * result.m_apbp.std_error);
  return result;
}

/// Bound check against both inequalities, with a 4-sigma statistical slack
/// for Monte Carlo results. `within_experimental_bound` is the strict
/// |S| <= sqrt(2) comparison with no slack.
struct BoundReport {
  double s = 0.0;
  double s_std_error = 0.0;
  bool classic_bound_satisfied = false;
  bool refined_bound_satisfied = false;
  bool within_experimental_bound = false;
  double margin_classic = 0.0;
  double margin_refined = 0.0;
};

inline BoundReport check_bounds(const ChshResult& result) {
  BoundReport report;
  report.s = result.s;
  report.s_std_error = result.s_std_error;
  const double slack = 4.0 * result.s_std_error;
  const double abs_s = std::abs(result.s);
  report.classic_bound_satisfied = abs_s <= 1.0 + slack;
  report.refined_bound_satisfied = abs_s <= std::numbers::sqrt2 + slack;
  report.within_experimental_bound = abs_s <= std::numbers::sqrt2;
  report.margin_classic = 1.0 + slack - abs_s;
  report.margin_refined = std::numbers::sqrt2 + slack - abs_s;
  return report;
}

struct SweepPoint {
  double phi = 0.0;
  ChshResult chsh;
};

/// S along the one-parameter analyzer family a = 0, a' = -2*phi, b = -phi,
/// b' = phi (successive separations phi). With the closed-form correlator
/// S(phi) = (3*cos(phi) - cos(3*phi))/2, maximized at phi = pi/4.
template <typename Correlator>
std::vector<SweepPoint> sweep_s(std::span<const double> phi_grid, Correlator&& correlator) {
  if (phi_grid.empty()) throw std::invalid_argument("sweep grid must be nonempty");
  std::vector<SweepPoint> points;
  points.reserve(phi_grid.size());
  for (double phi : phi_grid) {
    points.push_back({phi, bell_s(AnalyzerConfig(0.0, -2.0 * phi, -phi, phi), correlator)});
  }
  return points;
}

/// steps+1 evenly spaced points on [lo, hi]; a single point when lo == hi.
inline std::vector<double> uniform_grid(double lo, double hi, int steps) {
  detail::require_finite(lo, "grid lo");
  detail::require_finite(hi, "grid hi");
  if (lo > hi) throw std::invalid_argument("grid range is empty or inverted");
  if (lo == hi) return {lo};
  if (steps < 1) throw std::invalid_argument("grid needs at least one step");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 1);
  const double width = (hi - lo) / steps;
  for (int i = 0; i <= steps; ++i) grid.push_back(lo + i * width);
  return grid;
}

}  // namespace gravlam
