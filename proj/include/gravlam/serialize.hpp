#pragma once

#include <charconv>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <system_error>

#include <json.hpp>

#include "gravlam/background.hpp"
#include "gravlam/correlation.hpp"
#include "gravlam/oscillator.hpp"

namespace gravlam {

/// Formats a double with 17 significant digits ('.' decimal separator,
/// locale-independent), enough to round-trip any value exactly.
inline std::string format_full(double value) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  if (result.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buffer, result.ptr);
}

/// Ensemble document: {seed, spectrum:{omega_min, omega_max, strain,
/// mode_count}, modes:[{omega, phase, direction:[x,y,z]}]}. Serialization is
/// deterministic, so equal ensembles dump to identical bytes.
inline nlohmann::ordered_json ensemble_to_json(const BackgroundEnsemble& ensemble) {
  nlohmann::ordered_json doc;
  doc["seed"] = ensemble.seed;
  doc["spectrum"] = {{"omega_min", ensemble.spectrum.omega_min},
                     {"omega_max", ensemble.spectrum.omega_max},
                     {"strain", ensemble.spectrum.strain},
                     {"mode_count", ensemble.spectrum.mode_count}};
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (const BackgroundMode& mode : ensemble.modes) {
    modes.push_back({{"omega", mode.omega()},
                     {"phase", mode.phase()},
                     {"direction", {mode.direction()[0], mode.direction()[1],
                                    mode.direction()[2]}}});
  }
  doc["modes"] = std::move(modes);
  return doc;
}

inline std::string ensemble_to_json_string(const BackgroundEnsemble& ensemble) {
  return ensemble_to_json(ensemble).dump();
}

/// Rebuilds an ensemble from its JSON document. riemann and the generating
/// perturbation are recomputed from omega/direction/strain; every mode is
/// re-validated on construction.
template <typename Json>
BackgroundEnsemble ensemble_from_json(const Json& doc) {
  BackgroundEnsemble ensemble;
  ensemble.seed = doc.at("seed").template get<std::uint64_t>();
  const auto& spectrum = doc.at("spectrum");
  ensemble.spectrum.omega_min = spectrum.at("omega_min").template get<double>();
  ensemble.spectrum.omega_max = spectrum.at("omega_max").template get<double>();
  ensemble.spectrum.strain = spectrum.at("strain").template get<double>();
  ensemble.spectrum.mode_count = spectrum.at("mode_count").template get<int>();
  ensemble.spectrum.validate();

  for (const auto& entry : doc.at("modes")) {
    const double omega = entry.at("omega").template get<double>();
    const double phase = entry.at("phase").template get<double>();
    const auto& dir = entry.at("direction");
    const std::array<double, 3> direction{dir.at(0).template get<double>(),
                                          dir.at(1).template get<double>(),
                                          dir.at(2).template get<double>()};
    const double k0 = omega / speed_of_light;
    ensemble.modes.emplace_back(
        k0 * k0, omega, phase, direction,
        detail::make_mode_source(omega, direction, ensemble.spectrum.strain));
  }
  return ensemble;
}

/// Trajectory CSV: header `t,ell,ell_dot`, one row per state, full
/// round-trip precision.
inline void write_trajectory_csv(std::ostream& out, std::span<const DeviationState> states) {
  out << "t,ell,ell_dot\n";
  for (const DeviationState& s : states) {
    out << format_full(s.t) << ',' << format_full(s.ell) << ',' << format_full(s.ell_dot)
        << '\n';
  }
}

/// Sweep CSV: `phi,S,S_stderr,m_ab,m_apb,m_abp,m_apbp,method,n_samples`.
inline void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
  out << "phi,S,S_stderr,m_ab,m_apb,m_abp,m_apbp,method,n_samples\n";
  for (const SweepPoint& p : points) {
    out << format_full(p.phi) << ',' << format_full(p.chsh.s) << ','
        << format_full(p.chsh.s_std_error) << ',' << format_full(p.chsh.m_ab.value) << ','
        << format_full(p.chsh.m_apb.value) << ',' << format_full(p.chsh.m_abp.value) << ','
        << format_full(p.chsh.m_apbp.value) << ',' << method_name(p.chsh.m_ab.method) << ','
        << p.chsh.m_ab.n_samples << '\n';
  }
}

/// Bound-report document with keys `s`, `s_stderr`, `classic_bound_satisfied`,
/// `refined_bound_satisfied`, `margin_classic`, `margin_refined`.
inline nlohmann::ordered_json bound_report_to_json(const BoundReport& report) {
  nlohmann::ordered_json doc;
  doc["s"] = report.s;
  doc["s_stderr"] = report.s_std_error;
  doc["classic_bound_satisfied"] = report.classic_bound_satisfied;
  doc["refined_bound_satisfied"] = report.refined_bound_satisfied;
  doc["margin_classic"] = report.margin_classic;
  doc["margin_refined"] = report.margin_refined;
  return doc;
}

}  // namespace gravlam
