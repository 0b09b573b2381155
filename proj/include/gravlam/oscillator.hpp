#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gravlam/background.hpp"
#include "gravlam/constants.hpp"

namespace gravlam {

/// Relative separation of the particle pair at one instant.
struct DeviationState {
  double ell = 0.0;      // m
  double ell_dot = 0.0;  // m/s
  double t = 0.0;        // s
};

/// Uniformly sampled deviation history. Construction checks that times are
/// strictly increasing with spacing dt.
class Trajectory {
 public:
  Trajectory(std::vector<DeviationState> states, double omega, double dt)
      : states_(std::move(states)), omega_(omega), dt_(dt) {
    if (states_.empty()) throw std::invalid_argument("trajectory must be nonempty");
    if (!(dt_ > 0.0)) throw std::invalid_argument("trajectory dt must be > 0");
    for (std::size_t i = 1; i < states_.size(); ++i) {
      const double gap = states_[i].t - states_[i - 1].t;
      if (!(gap > 0.0)) throw std::invalid_argument("trajectory times must be increasing");
      const double slack = 1e-12 * dt_ + 8.0 * 2.220446049250313e-16 *
                                             std::max(std::abs(states_[i].t), dt_);
      if (std::abs(gap - dt_) > slack) {
        throw std::invalid_argument("trajectory spacing must be uniform");
      }
    }
  }

  const std::vector<DeviationState>& states() const { return states_; }
  const DeviationState& front() const { return states_.front(); }
  const DeviationState& back() const { return states_.back(); }
  std::size_t size() const { return states_.size(); }
  double omega() const { return omega_; }
  double dt() const { return dt_; }

 private:
  std::vector<DeviationState> states_;
  double omega_;  // rad/s
  double dt_;     // s
};

/// omega = c * sqrt(R) for the deviation oscillator.
inline double omega_from_riemann(double riemann) {
  if (riemann < 0.0) {
    throw std::domain_error("imaginary frequency: mode evaluated outside oscillatory regime");
  }
  return speed_of_light * std::sqrt(riemann);
}

/// Reading of the spatial factor exp(k.x) in the closed-form solution.
/// `phase` treats the whole exponent as i*(k.x + omega*t), the standard
/// plane-wave form; `literal_growth` keeps exp(k.x) as a real factor.
enum class SpatialFactor { phase, literal_growth };

/// Closed-form solution ell0 * exp(i(k.x + omega t)) of the deviation
/// oscillator, as a complex pair. Under the default reading the modulus is
/// ell0 for every input.
inline std::complex<double> analytic_solution(double ell0, double omega, double k_dot_x,
                                              double t,
                                              SpatialFactor factor = SpatialFactor::phase) {
  detail::require_finite(ell0, "ell0");
  detail::require_finite(omega, "omega");
  detail::require_finite(k_dot_x, "k_dot_x");
  detail::require_finite(t, "t");
  if (factor == SpatialFactor::phase) {
    const double arg = k_dot_x + omega * t;
    return {ell0 * std::cos(arg), ell0 * std::sin(arg)};
  }
  const double growth = std::exp(k_dot_x);
  return {ell0 * growth * std::cos(omega * t), ell0 * growth * std::sin(omega * t)};
}

/// Stability/accuracy guard for the fixed-step integrator.
inline constexpr double max_omega_dt = 0.1;

/// Integrates ell'' + omega^2 ell = 0 with classical fixed-step RK4 from
/// `initial`, producing steps+1 states at t = t0 + i*dt. Fixed steps keep
/// runs bit-reproducible; the step cap omega*dt <= 0.1 bounds the relative
/// error of the final state by C * steps * (omega*dt)^5 with C = 0.01
/// (phase error of the RK4 growth factor, verified by the test suite).
inline Trajectory integrate_deviation(const DeviationState& initial, double omega, double dt,
                                      int steps) {
  if (!(omega >= 0.0)) throw std::invalid_argument("omega must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (omega * dt > max_omega_dt) {
    throw std::invalid_argument("omega*dt = " + std::to_string(omega * dt) +
                                " exceeds the stability guard 0.1; reduce dt");
  }

  std::vector<DeviationState> states;
  states.reserve(static_cast<std::size_t>(steps) + 1);
  states.push_back(initial);

  const double w2 = omega * omega;
  double ell = initial.ell;
  double v = initial.ell_dot;
  for (int i = 1; i <= steps; ++i) {
    const double k1l = v;
    const double k1v = -w2 * ell;
    const double k2l = v + 0.5 * dt * k1v;
    const double k2v = -w2 * (ell + 0.5 * dt * k1l);
    const double k3l = v + 0.5 * dt * k2v;
    const double k3v = -w2 * (ell + 0.5 * dt * k2l);
    const double k4l = v + dt * k3v;
    const double k4v = -w2 * (ell + dt * k3l);
    ell += dt / 6.0 * (k1l + 2.0 * (k2l + k3l) + k4l);
    v += dt / 6.0 * (k1v + 2.0 * (k2v + k3v) + k4v);
    states.push_back({ell, v, initial.t + i * dt});
  }
  return Trajectory(std::move(states), omega, dt);
}

/// Conserved oscillator energy (per unit mass, scaled): v^2 + omega^2 ell^2.
inline double oscillator_energy(const DeviationState& state, double omega) {
  return state.ell_dot * state.ell_dot + omega * omega * state.ell * state.ell;
}

namespace detail {

/// Deterministic pairwise-tree reduction; parallel evaluation of subtrees
/// reproduces the same sum for any worker count.
template <typename TermFn>
double pairwise_sum(std::size_t begin, std::size_t end, const TermFn& term) {
  const std::size_t n = end - begin;
  if (n <= 8) {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += term(i);
    return sum;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

}  // namespace detail

/// Superposed displacement response at time t: sum over modes of
/// ell0 * strain * cos(mode_phase(n, t)). The per-mode amplitude is the
/// linear detector response strain x separation; superposition is exact in
/// the linearized regime.
inline double superpose_background(const BackgroundEnsemble& ensemble, double ell0, double t) {
  if (ensemble.modes.empty()) {
    throw std::invalid_argument("superpose_background requires a nonempty ensemble");
  }
  return detail::pairwise_sum(0, ensemble.modes.size(), [&](std::size_t i) {
    const BackgroundMode& mode = ensemble.modes[i];
    return ell0 * mode.strain() * std::cos(mode_phase(mode, t));
  });
}

}  // namespace gravlam
