#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "gravlam/constants.hpp"

namespace gravlam {

namespace detail {

inline void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace detail

/// Contravariant 4-vector; index 0 is the time component (x^0 = c*t for
/// positions, k^0 = omega/c for wave vectors). Components are validated
/// finite at construction and immutable afterwards.
class FourVector {
 public:
  FourVector() = default;

  FourVector(double t, double x, double y, double z) : components_{t, x, y, z} {
    for (double c : components_) detail::require_finite(c, "FourVector component");
  }

  double operator[](int mu) const { return components_[static_cast<std::size_t>(mu)]; }

  double spatial_norm_squared() const {
    return components_[1] * components_[1] + components_[2] * components_[2] +
           components_[3] * components_[3];
  }

  friend bool operator==(const FourVector&, const FourVector&) = default;

 private:
  std::array<double, 4> components_{};
};

/// Symmetric rank-2 tensor on 4 indices. Only the upper triangle is stored,
/// so t(mu, nu) == t(nu, mu) holds exactly by construction.
class SymTensor4 {
 public:
  SymTensor4() = default;

  static SymTensor4 identity() {
    SymTensor4 t;
    for (int mu = 0; mu < 4; ++mu) t.set(mu, mu, 1.0);
    return t;
  }

  double operator()(int mu, int nu) const { return packed_[pack_index(mu, nu)]; }

  void set(int mu, int nu, double value) {
    detail::require_finite(value, "SymTensor4 entry");
    packed_[pack_index(mu, nu)] = value;
  }

  /// Frobenius norm of the full 4x4 matrix (off-diagonals counted twice).
  double frobenius_norm() const {
    double sum = 0.0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const double v = (*this)(mu, nu);
        sum += v * v;
      }
    return std::sqrt(sum);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : packed_) m = std::max(m, std::abs(v));
    return m;
  }

  SymTensor4 operator*(double scale) const {
    SymTensor4 out;
    for (std::size_t i = 0; i < packed_.size(); ++i) out.packed_[i] = packed_[i] * scale;
    return out;
  }

  SymTensor4 operator+(const SymTensor4& other) const {
    SymTensor4 out;
    for (std::size_t i = 0; i < packed_.size(); ++i)
      out.packed_[i] = packed_[i] + other.packed_[i];
    return out;
  }

  friend bool operator==(const SymTensor4&, const SymTensor4&) = default;

 private:
  static std::size_t pack_index(int mu, int nu) {
    if (mu < 0 || mu > 3 || nu < 0 || nu > 3) throw std::out_of_range("tensor index");
    if (mu > nu) std::swap(mu, nu);
    // (0,0)=0 (0,1)=1 (0,2)=2 (0,3)=3 (1,1)=4 (1,2)=5 (1,3)=6 (2,2)=7 (2,3)=8 (3,3)=9
    return static_cast<std::size_t>(mu * 4 - mu * (mu + 1) / 2 + nu);
  }

  std::array<double, 10> packed_{};
};

/// Contraction k_gamma x^gamma with Minkowski signature (+,-,-,-), so a
/// plane wave cos(k.x) propagates along the spatial part of k.
inline double minkowski_dot(const FourVector& k, const FourVector& x) {
  return k[0] * x[0] - k[1] * x[1] - k[2] * x[2] - k[3] * x[3];
}

inline constexpr double null_wave_vector_tol = 1e-12;
inline constexpr double unit_polarization_tol = 1e-12;

/// One weak-field plane-wave metric mode: unit-Frobenius polarization
/// tensor, null wave vector (k^0 = omega/c, units 1/m) and dimensionless
/// strain amplitude. Construction enforces all three invariants plus the
/// weak-field strain cap.
class MetricPerturbation {
 public:
  MetricPerturbation(SymTensor4 polarization, FourVector wave_vector, double amplitude)
      : polarization_(polarization), wave_vector_(wave_vector), amplitude_(amplitude) {
    if (!(amplitude_ >= 0.0)) {
      throw std::invalid_argument("strain amplitude must be >= 0");
    }
    if (amplitude_ > weak_field_max_strain) {
      throw std::invalid_argument("strain amplitude exceeds weak-field bound 1e-3");
    }
    const double t2 = wave_vector_[0] * wave_vector_[0];
    const double s2 = wave_vector_.spatial_norm_squared();
    if (std::abs(t2 - s2) > null_wave_vector_tol * std::max(t2, s2)) {
      throw std::invalid_argument("wave vector must be null: (k0)^2 == |k|^2");
    }
    if (std::abs(polarization_.frobenius_norm() - 1.0) > unit_polarization_tol) {
      throw std::invalid_argument("polarization must have unit Frobenius norm");
    }
  }

  const SymTensor4& polarization() const { return polarization_; }
  const FourVector& wave_vector() const { return wave_vector_; }
  double amplitude() const { return amplitude_; }

 private:
  SymTensor4 polarization_;
  FourVector wave_vector_;
  double amplitude_;
};

/// Rescales a tensor to unit Frobenius norm (convenience for building
/// polarizations). Rejects the zero tensor.
inline SymTensor4 normalized(const SymTensor4& t) {
  const double norm = t.frobenius_norm();
  if (!(norm > 0.0)) throw std::invalid_argument("cannot normalize a zero tensor");
  return t * (1.0 / norm);
}

/// Metric perturbation h_munu(x) = 2 * eps * e_munu * cos(k.x + offset),
/// the real form of e*exp(i k.x) + e**exp(-i k.x) for real polarization.
/// Every entry is bounded by 2*eps.
inline SymTensor4 perturbation_at(const MetricPerturbation& mode, const FourVector& x,
                                  double phase_offset) {
  detail::require_finite(phase_offset, "phase offset");
  const double phase = minkowski_dot(mode.wave_vector(), x) + phase_offset;
  return mode.polarization() * (2.0 * mode.amplitude() * std::cos(phase));
}

/// Which flat background the perturbation is added to. The Kronecker delta
/// is the default; the Minkowski variant is exposed as an alternative
/// convention (the correlation pipeline only contracts spatial directions,
/// where the two agree up to overall sign).
enum class MetricSignature { kronecker_delta, minkowski };

/// g_munu = delta_munu + h_munu. Requires weak-field h (entries <= 1e-3).
inline SymTensor4 metric_at(const SymTensor4& h,
                            MetricSignature signature = MetricSignature::kronecker_delta) {
  if (h.max_abs() > weak_field_max_strain) {
    throw std::invalid_argument("perturbation entries exceed weak-field bound 1e-3");
  }
  SymTensor4 flat = SymTensor4::identity();
  if (signature == MetricSignature::minkowski) {
    for (int i = 1; i < 4; ++i) flat.set(i, i, -1.0);
  }
  return flat + h;
}

/// Scalar product g_munu A^mu B^nu. The sum is grouped over the symmetric
/// index pairs, so exchanging A and B is bit-exact.
inline double scalar_product(const SymTensor4& g, const FourVector& a, const FourVector& b) {
  double total = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    total += g(mu, mu) * (a[mu] * b[mu]);
    for (int nu = mu + 1; nu < 4; ++nu) {
      total += g(mu, nu) * (a[mu] * b[nu] + a[nu] * b[mu]);
    }
  }
  return total;
}

/// Linearized curvature component R_0101 = -1/2 d0 d0 h_11, evaluated
/// analytically for the plane-wave mode:
///
///   R_0101(x) = (k^0)^2 * eps * e_11 * cos(k.x + offset)      [1/m^2]
///
/// The sign convention makes R >= 0 at wave antinodes when e_11 > 0, so the
/// oscillator frequency omega = c*sqrt(R) is real there.
inline double riemann_0101(const MetricPerturbation& mode, const FourVector& x,
                           double phase_offset) {
  detail::require_finite(phase_offset, "phase offset");
  const double k0 = mode.wave_vector()[0];
  const double phase = minkowski_dot(mode.wave_vector(), x) + phase_offset;
  return k0 * k0 * mode.amplitude() * mode.polarization()(1, 1) * std::cos(phase);
}

}  // namespace gravlam
