#pragma once

#include <cmath>
#include <numbers>

namespace gravlam {

// SI defining constant, exact.
inline constexpr double speed_of_light = 299792458.0;  // m/s

// CODATA 2018 reduced Planck constant.
inline constexpr double reduced_planck = 1.054571817e-34;  // J s

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Strains above this are outside the weak-field regime this library models.
inline constexpr double weak_field_max_strain = 1e-3;

/// Reduces an angle to [0, 2*pi).
inline double wrap_two_pi(double angle) {
  double r = std::fmod(angle, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;  // fmod/add can round up to the period itself
  return r;
}

}  // namespace gravlam
