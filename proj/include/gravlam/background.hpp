#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gravlam/constants.hpp"
#include "gravlam/geometry.hpp"
#include "gravlam/rng.hpp"

namespace gravlam {

/// Sampling distribution for the random background. The underlying
/// distribution of metric disturbances is not pinned down by theory, so the
/// least-informative choice is isolated here: uniform frequencies in a band,
/// uniform phases, isotropic directions, one constant strain per mode.
struct SpectrumConfig {
  double omega_min = 0.0;  // rad/s
  double omega_max = 0.0;  // rad/s
  double strain = 0.0;     // dimensionless, per mode
  int mode_count = 0;

  void validate() const {
    if (!(omega_min > 0.0)) throw std::invalid_argument("omega_min must be > 0");
    if (!(omega_max >= omega_min)) throw std::invalid_argument("omega_max must be >= omega_min");
    if (!(strain >= 0.0)) throw std::invalid_argument("strain must be >= 0");
    if (strain > weak_field_max_strain) throw std::invalid_argument("strain exceeds weak-field bound 1e-3");
    if (mode_count < 1) throw std::invalid_argument("mode_count must be >= 1");
  }

  friend bool operator==(const SpectrumConfig&, const SpectrumConfig&) = default;
};

inline constexpr double unit_direction_tol = 1e-12;
inline constexpr double omega_riemann_tol = 1e-12;

/// One sampled mode of the hidden-variable background: curvature scale R
/// (1/m^2), oscillation frequency omega = c*sqrt(R), initial phase, unit
/// propagation direction, and the generating plane-wave perturbation.
class BackgroundMode {
 public:
  BackgroundMode(double riemann, double omega, double phase, std::array<double, 3> direction,
                 MetricPerturbation source)
      : riemann_(riemann), omega_(omega), phase_(phase), direction_(direction),
        source_(source) {
    if (!(riemann_ >= 0.0)) throw std::invalid_argument("riemann must be >= 0");
    const double expected_omega = speed_of_light * std::sqrt(riemann_);
    const double scale = std::max(omega_, expected_omega);
    if (std::abs(omega_ - expected_omega) > omega_riemann_tol * scale) {
      throw std::invalid_argument("omega must equal c*sqrt(riemann)");
    }
    if (!(phase_ >= 0.0) || phase_ >= two_pi) {
      throw std::invalid_argument("phase must lie in [0, 2*pi)");
    }
    const double norm = std::sqrt(direction_[0] * direction_[0] + direction_[1] * direction_[1] +
                                  direction_[2] * direction_[2]);
    if (std::abs(norm - 1.0) > unit_direction_tol) {
      throw std::invalid_argument("direction must be a unit vector");
    }
  }

  double riemann() const { return riemann_; }
  double omega() const { return omega_; }
  double phase() const { return phase_; }
  const std::array<double, 3>& direction() const { return direction_; }
  const MetricPerturbation& source() const { return source_; }
  double strain() const { return source_.amplitude(); }

 private:
  double riemann_;  // 1/m^2
  double omega_;    // rad/s
  double phase_;    // radians in [0, 2*pi)
  std::array<double, 3> direction_;
  MetricPerturbation source_;
};

/// A reproducible draw of the background: same (seed, spectrum, count)
/// yields a bit-identical ensemble with the same binary.
struct BackgroundEnsemble {
  std::vector<BackgroundMode> modes;
  std::uint64_t seed = 0;
  SpectrumConfig spectrum;
};

/// Planar hidden variable: the angle of the unit vector lambda in the
/// polarizer plane, in [0, 2*pi).
struct HiddenVariable {
  double alpha = 0.0;
};

namespace detail {

/// Generating perturbation for a sampled mode: e_11 polarization of unit
/// Frobenius norm, null wave vector along `direction` with k^0 = omega/c,
/// amplitude = per-mode strain.
inline MetricPerturbation make_mode_source(double omega, const std::array<double, 3>& direction,
                                           double strain) {
  SymTensor4 polarization;
  polarization.set(1, 1, 1.0);
  const double k0 = omega / speed_of_light;
  const FourVector wave_vector(k0, k0 * direction[0], k0 * direction[1], k0 * direction[2]);
  return MetricPerturbation(polarization, wave_vector, strain);
}

}  // namespace detail

/// Samples `spectrum.mode_count` modes: omega uniform on the band, phase
/// uniform on [0, 2*pi), direction uniform on the unit sphere (equal-area in
/// cos of the polar angle), riemann = (omega/c)^2. Four uniform draws per
/// mode, in that order; deterministic in the seed.
inline BackgroundEnsemble sample_ensemble(const SpectrumConfig& spectrum, std::uint64_t seed) {
  spectrum.validate();
  BackgroundEnsemble ensemble;
  ensemble.seed = seed;
  ensemble.spectrum = spectrum;
  ensemble.modes.reserve(static_cast<std::size_t>(spectrum.mode_count));

  rng::Xoshiro256StarStar gen(seed);
  for (int n = 0; n < spectrum.mode_count; ++n) {
    const double omega = rng::uniform(gen, spectrum.omega_min, spectrum.omega_max);
    const double phase = rng::uniform(gen, 0.0, two_pi);
    const double z = rng::uniform(gen, -1.0, 1.0);
    const double azimuth = rng::uniform(gen, 0.0, two_pi);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const std::array<double, 3> direction{rho * std::cos(azimuth), rho * std::sin(azimuth), z};

    const double k0 = omega / speed_of_light;
    const double riemann = k0 * k0;
    ensemble.modes.emplace_back(riemann, omega, phase, direction,
                                detail::make_mode_source(omega, direction, spectrum.strain));
  }
  return ensemble;
}

/// Draws the planar hidden variable: alpha uniform on [0, 2*pi).
inline HiddenVariable sample_lambda(rng::Xoshiro256StarStar& gen) {
  return {rng::uniform(gen, 0.0, two_pi)};
}

/// Mode phase at time t: (phase0 + omega*t) reduced to [0, 2*pi).
inline double mode_phase(const BackgroundMode& mode, double t) {
  detail::require_finite(t, "time");
  return wrap_two_pi(mode.phase() + mode.omega() * t);
}

struct HeisenbergDiagnostic {
  double delta_x = 0.0;            // m
  double delta_p = 0.0;            // kg m/s
  double product_over_hbar = 0.0;  // dimensionless
};

/// Reports the scale of the mode's disturbance against the uncertainty
/// bound: displacement amplitude strain*ell0, momentum scale m*omega*dx,
/// and their product over hbar. Purely diagnostic; nothing is filtered.
inline HeisenbergDiagnostic heisenberg_diagnostic(const BackgroundMode& mode,
                                                  double particle_mass, double ell0) {
  if (!(particle_mass > 0.0)) throw std::invalid_argument("particle mass must be > 0");
  if (!(ell0 > 0.0)) throw std::invalid_argument("ell0 must be > 0");
  HeisenbergDiagnostic d;
  d.delta_x = mode.strain() * ell0;
  d.delta_p = particle_mass * mode.omega() * d.delta_x;
  d.product_over_hbar = d.delta_x * d.delta_p / reduced_planck;
  return d;
}

}  // namespace gravlam
