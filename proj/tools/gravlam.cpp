// gravlam: reproducible experiment runner for the gravitational-background
// hidden-variable model. Subcommands: correlation, chsh, sweep, deviation,
// background. Every output embeds (seed, config echo, version) so any result
// can be regenerated bit-for-bit with the same binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gravlam/background.hpp"
#include "gravlam/correlation.hpp"
#include "gravlam/oscillator.hpp"
#include "gravlam/serialize.hpp"
#include "gravlam/version.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_io = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double value) { return gravlam::format_full(value); }

double to_radians(double value, bool degrees) {
  return degrees ? value * std::numbers::pi / 180.0 : value;
}

// ---------------------------------------------------------------------------
// estimator selection

enum class EstimatorKind { closed_form, quadrature, monte_carlo, sign_model };

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "closed-form") return EstimatorKind::closed_form;
  if (name == "quadrature") return EstimatorKind::quadrature;
  if (name == "monte-carlo") return EstimatorKind::monte_carlo;
  if (name == "sign-model") return EstimatorKind::sign_model;
  throw UsageError("--method must be one of closed-form, quadrature, monte-carlo, sign-model");
}

struct EstimatorOptions {
  EstimatorKind kind = EstimatorKind::closed_form;
  long long n = 1000000;
  int panels = 64;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const {
    if (kind == EstimatorKind::quadrature && (panels < 8 || panels % 2 != 0)) {
      throw UsageError("--panels must be an even integer >= 8");
    }
    if ((kind == EstimatorKind::monte_carlo || kind == EstimatorKind::sign_model) && n < 100) {
      throw UsageError("--n must be >= 100 for Monte Carlo estimators");
    }
    if (workers < 1) throw UsageError("--workers must be >= 1");
  }

  gravlam::CorrelationEstimate operator()(double theta) const {
    switch (kind) {
      case EstimatorKind::closed_form: return gravlam::correlation_closed_form(theta);
      case EstimatorKind::quadrature: return gravlam::correlation_quadrature(theta, panels);
      case EstimatorKind::monte_carlo:
        return gravlam::correlation_monte_carlo(theta, n, seed, workers);
      case EstimatorKind::sign_model:
        return gravlam::correlation_sign_model(theta, n, seed, workers);
    }
    throw std::logic_error("unreachable estimator kind");
  }
};

// ---------------------------------------------------------------------------
// output plumbing

struct OutputTarget {
  std::ofstream file;
  bool to_file = false;

  std::ostream& stream() { return to_file ? file : std::cout; }
};

OutputTarget open_output(const std::string& path) {
  OutputTarget target;
  if (!path.empty()) {
    target.file.open(path);
    if (!target.file) throw IoError("cannot open output file: " + path);
    target.to_file = true;
  }
  return target;
}

void write_meta_comments(std::ostream& out, const std::string& command,
                         const ordered_json& config) {
  out << "# gravlam " << gravlam::version << '\n';
  out << "# command: " << command << '\n';
  out << "# config: " << config.dump() << '\n';
}

ordered_json meta_object(const std::string& command, const ordered_json& config) {
  ordered_json meta;
  meta["tool"] = "gravlam";
  meta["version"] = gravlam::version;
  meta["command"] = command;
  meta["config"] = config;
  return meta;
}

ordered_json estimator_config(const EstimatorOptions& est, const std::string& method) {
  ordered_json config;
  config["method"] = method;
  config["n"] = est.n;
  config["panels"] = est.panels;
  config["seed"] = est.seed;
  config["workers"] = est.workers;
  return config;
}

std::string bound_verdict(bool satisfied) { return satisfied ? "satisfied" : "violated"; }

// ---------------------------------------------------------------------------
// correlation

struct CorrelationCmd {
  double theta = 0.0;
  std::string method = "closed-form";
  EstimatorOptions est;
  bool degrees = false;
  std::string format = "text";
  std::string out;
  std::string config;
};

int run_correlation(CorrelationCmd& cmd) {
  cmd.est.kind = parse_estimator(cmd.method);
  cmd.est.validate();
  const double theta = to_radians(cmd.theta, cmd.degrees);

  const auto estimate = cmd.est(theta);
  const double reference = gravlam::correlation_closed_form(theta).value;

  ordered_json config;
  config["theta"] = theta;
  config.update(estimator_config(cmd.est, cmd.method));
  config["format"] = cmd.format;

  auto target = open_output(cmd.out);
  std::ostream& out = target.stream();
  if (cmd.format == "json") {
    ordered_json doc;
    doc["meta"] = meta_object("correlation", config);
    doc["theta"] = theta;
    doc["value"] = estimate.value;
    doc["stderr"] = estimate.std_error;
    doc["closed_form_reference"] = reference;
    doc["method"] = gravlam::method_name(estimate.method);
    doc["n_samples"] = estimate.n_samples;
    out << doc.dump(2) << '\n';
  } else if (cmd.format == "csv") {
    write_meta_comments(out, "correlation", config);
    out << "theta,value,stderr,closed_form_reference,method,n_samples\n";
    out << fmt(theta) << ',' << fmt(estimate.value) << ',' << fmt(estimate.std_error) << ','
        << fmt(reference) << ',' << gravlam::method_name(estimate.method) << ','
        << estimate.n_samples << '\n';
  } else {
    write_meta_comments(out, "correlation", config);
    out << "theta = " << fmt(theta) << '\n';
    out << "method = " << cmd.method << '\n';
    out << "M = " << fmt(estimate.value) << '\n';
    out << "stderr = " << fmt(estimate.std_error) << '\n';
    out << "closed_form_reference = " << fmt(reference) << '\n';
    out << "n_samples = " << estimate.n_samples << '\n';
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// chsh

struct ChshCmd {
  double a = 0.0;
  double a_prime = -std::numbers::pi / 2.0;
  double b = -std::numbers::pi / 4.0;
  double b_prime = std::numbers::pi / 4.0;
  std::string method = "closed-form";
  EstimatorOptions est;
  bool degrees = false;
  std::string format = "text";
  std::string out;
  std::string config;
};

void write_correlation_json(ordered_json& parent, const char* key,
                            const gravlam::CorrelationEstimate& estimate) {
  ordered_json entry;
  entry["value"] = estimate.value;
  entry["stderr"] = estimate.std_error;
  entry["n_samples"] = estimate.n_samples;
  entry["method"] = gravlam::method_name(estimate.method);
  parent[key] = std::move(entry);
}

int run_chsh(ChshCmd& cmd) {
  cmd.est.kind = parse_estimator(cmd.method);
  cmd.est.validate();
  const gravlam::AnalyzerConfig analyzers(
      to_radians(cmd.a, cmd.degrees), to_radians(cmd.a_prime, cmd.degrees),
      to_radians(cmd.b, cmd.degrees), to_radians(cmd.b_prime, cmd.degrees));

  const auto result = gravlam::bell_s(analyzers, cmd.est);
  const auto report = gravlam::check_bounds(result);

  ordered_json config;
  config["a"] = analyzers.a();
  config["a-prime"] = analyzers.a_prime();
  config["b"] = analyzers.b();
  config["b-prime"] = analyzers.b_prime();
  config.update(estimator_config(cmd.est, cmd.method));
  config["format"] = cmd.format;

  auto target = open_output(cmd.out);
  std::ostream& out = target.stream();
  if (cmd.format == "json") {
    ordered_json doc;
    doc["meta"] = meta_object("chsh", config);
    doc.update(gravlam::bound_report_to_json(report));
    doc["experimental_agreement"] = report.within_experimental_bound;
    ordered_json correlations;
    write_correlation_json(correlations, "m_ab", result.m_ab);
    write_correlation_json(correlations, "m_apb", result.m_apb);
    write_correlation_json(correlations, "m_abp", result.m_abp);
    write_correlation_json(correlations, "m_apbp", result.m_apbp);
    doc["correlations"] = std::move(correlations);
    out << doc.dump(2) << '\n';
  } else if (cmd.format == "csv") {
    write_meta_comments(out, "chsh", config);
    out << "s,s_stderr,m_ab,m_apb,m_abp,m_apbp,"
           "classic_bound_satisfied,refined_bound_satisfied,margin_classic,margin_refined\n";
    out << fmt(result.s) << ',' << fmt(result.s_std_error) << ',' << fmt(result.m_ab.value)
        << ',' << fmt(result.m_apb.value) << ',' << fmt(result.m_abp.value) << ','
        << fmt(result.m_apbp.value) << ',' << (report.classic_bound_satisfied ? "true" : "false")
        << ',' << (report.refined_bound_satisfied ? "true" : "false") << ','
        << fmt(report.margin_classic) << ',' << fmt(report.margin_refined) << '\n';
  } else {
    write_meta_comments(out, "chsh", config);
    out << "m_ab = " << fmt(result.m_ab.value) << '\n';
    out << "m_apb = " << fmt(result.m_apb.value) << '\n';
    out << "m_abp = " << fmt(result.m_abp.value) << '\n';
    out << "m_apbp = " << fmt(result.m_apbp.value) << '\n';
    out << "S = " << fmt(result.s) << '\n';
    out << "S_stderr = " << fmt(result.s_std_error) << '\n';
    out << "classic_bound |S| <= 1 + 4*stderr: " << bound_verdict(report.classic_bound_satisfied)
        << " (margin = " << fmt(report.margin_classic) << ")\n";
    out << "refined_bound |S| <= sqrt(2) + 4*stderr: "
        << bound_verdict(report.refined_bound_satisfied)
        << " (margin = " << fmt(report.margin_refined) << ")\n";
    out << "experimental_reference |S| <= sqrt(2): "
        << (report.within_experimental_bound ? "within" : "exceeded") << '\n';
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepCmd {
  double phi_min = 0.0;
  double phi_max = std::numbers::pi / 2.0;
  int steps = 360;
  std::string method = "closed-form";
  EstimatorOptions est;
  bool degrees = false;
  std::string format = "csv";
  std::string out;
  std::string config;
};

int run_sweep(SweepCmd& cmd) {
  cmd.est.kind = parse_estimator(cmd.method);
  cmd.est.validate();
  const double lo = to_radians(cmd.phi_min, cmd.degrees);
  const double hi = to_radians(cmd.phi_max, cmd.degrees);
  if (lo > hi) throw UsageError("--phi-min must be <= --phi-max (empty or inverted range)");
  if (lo < hi && cmd.steps < 1) throw UsageError("--steps must be >= 1");

  const auto grid = gravlam::uniform_grid(lo, hi, cmd.steps);
  const auto points = gravlam::sweep_s(std::span<const double>(grid), cmd.est);

  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (std::abs(points[i].chsh.s) > std::abs(points[best].chsh.s)) best = i;
  }
  const auto& peak = points[best];

  ordered_json config;
  config["phi-min"] = lo;
  config["phi-max"] = hi;
  config["steps"] = cmd.steps;
  config.update(estimator_config(cmd.est, cmd.method));
  config["format"] = cmd.format;

  auto target = open_output(cmd.out);
  std::ostream& out = target.stream();
  if (cmd.format == "json") {
    ordered_json doc;
    doc["meta"] = meta_object("sweep", config);
    ordered_json rows = ordered_json::array();
    for (const auto& p : points) {
      rows.push_back({{"phi", p.phi},
                      {"S", p.chsh.s},
                      {"S_stderr", p.chsh.s_std_error},
                      {"m_ab", p.chsh.m_ab.value},
                      {"m_apb", p.chsh.m_apb.value},
                      {"m_abp", p.chsh.m_abp.value},
                      {"m_apbp", p.chsh.m_apbp.value},
                      {"method", gravlam::method_name(p.chsh.m_ab.method)},
                      {"n_samples", p.chsh.m_ab.n_samples}});
    }
    doc["rows"] = std::move(rows);
    doc["argmax"] = {{"phi", peak.phi}, {"S", peak.chsh.s}};
    out << doc.dump(2) << '\n';
  } else {
    write_meta_comments(out, "sweep", config);
    gravlam::write_sweep_csv(out, points);
  }

  // argmax row on stdout; as comment lines when sharing the stream with CSV,
  // omitted when the JSON document itself owns stdout (it carries argmax)
  if (target.to_file || cmd.format != "json") {
    const char* prefix = target.to_file ? "" : "# ";
    std::cout << prefix << "argmax_phi = " << fmt(peak.phi) << '\n';
    std::cout << prefix << "argmax_S = " << fmt(peak.chsh.s) << '\n';
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// deviation

struct DeviationCmd {
  double omega_min = 0.0;
  double omega_max = 0.0;
  double strain = 1e-6;
  int modes = 1;
  double ell0 = 1.0;
  double t_max = 0.0;
  double dt = 0.0;
  double mass = 9.1093837015e-31;  // electron, kg
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  std::string config;
};

int run_deviation(DeviationCmd& cmd) {
  if (!(cmd.omega_min > 0.0)) throw UsageError("--omega-min must be > 0");
  if (!(cmd.omega_max >= cmd.omega_min)) throw UsageError("--omega-max must be >= --omega-min");
  if (!(cmd.strain >= 0.0) || cmd.strain > gravlam::weak_field_max_strain) {
    throw UsageError("--strain must lie in [0, 1e-3]");
  }
  if (cmd.modes < 1) throw UsageError("--modes must be >= 1");
  if (!(cmd.ell0 > 0.0)) throw UsageError("--ell0 must be > 0");
  if (!(cmd.dt > 0.0)) throw UsageError("--dt must be > 0");
  if (cmd.omega_max * cmd.dt > gravlam::max_omega_dt) {
    throw UsageError("stability guard: --omega-max * --dt = " + fmt(cmd.omega_max * cmd.dt) +
                     " exceeds 0.1; reduce --dt");
  }
  if (!(cmd.t_max >= cmd.dt)) throw UsageError("--t-max must be >= --dt");
  if (!(cmd.mass > 0.0)) throw UsageError("--mass must be > 0");

  const gravlam::SpectrumConfig spectrum{cmd.omega_min, cmd.omega_max, cmd.strain, cmd.modes};
  const auto ensemble = gravlam::sample_ensemble(spectrum, cmd.seed);
  const int steps = std::max(1, static_cast<int>(std::llround(cmd.t_max / cmd.dt)));

  // integrate each mode's response and superpose the linear trajectories
  std::vector<gravlam::DeviationState> combined(static_cast<std::size_t>(steps) + 1);
  double energy_drift_max = 0.0;
  for (const auto& mode : ensemble.modes) {
    const double amplitude = cmd.ell0 * mode.strain();
    const gravlam::DeviationState initial{amplitude * std::cos(mode.phase()),
                                          -amplitude * mode.omega() * std::sin(mode.phase()),
                                          0.0};
    const auto trajectory = gravlam::integrate_deviation(initial, mode.omega(), cmd.dt, steps);
    const double e0 = gravlam::oscillator_energy(initial, mode.omega());
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
      const auto& s = trajectory.states()[i];
      combined[i].ell += s.ell;
      combined[i].ell_dot += s.ell_dot;
      combined[i].t = s.t;
      if (e0 > 0.0) {
        energy_drift_max = std::max(
            energy_drift_max, std::abs(gravlam::oscillator_energy(s, mode.omega()) - e0) / e0);
      }
    }
  }

  // closed-form cross-check of the superposed displacement
  double closed_form_deviation = 0.0;
  for (const auto& s : combined) {
    closed_form_deviation = std::max(
        closed_form_deviation,
        std::abs(s.ell - gravlam::superpose_background(ensemble, cmd.ell0, s.t)));
  }

  const auto& loudest = *std::max_element(
      ensemble.modes.begin(), ensemble.modes.end(),
      [](const auto& lhs, const auto& rhs) { return lhs.omega() < rhs.omega(); });
  const auto heisenberg = gravlam::heisenberg_diagnostic(loudest, cmd.mass, cmd.ell0);

  ordered_json config;
  config["omega-min"] = cmd.omega_min;
  config["omega-max"] = cmd.omega_max;
  config["strain"] = cmd.strain;
  config["modes"] = cmd.modes;
  config["ell0"] = cmd.ell0;
  config["t-max"] = cmd.t_max;
  config["dt"] = cmd.dt;
  config["mass"] = cmd.mass;
  config["seed"] = cmd.seed;
  config["format"] = cmd.format;

  auto target = open_output(cmd.out);
  std::ostream& out = target.stream();
  if (cmd.format == "json") {
    ordered_json doc;
    doc["meta"] = meta_object("deviation", config);
    ordered_json rows = ordered_json::array();
    for (const auto& s : combined) {
      rows.push_back({{"t", s.t}, {"ell", s.ell}, {"ell_dot", s.ell_dot}});
    }
    doc["trajectory"] = std::move(rows);
    doc["diagnostics"] = {{"energy_drift_max", energy_drift_max},
                          {"closed_form_max_abs_deviation", closed_form_deviation},
                          {"heisenberg_delta_x", heisenberg.delta_x},
                          {"heisenberg_delta_p", heisenberg.delta_p},
                          {"heisenberg_product_over_hbar", heisenberg.product_over_hbar}};
    out << doc.dump(2) << '\n';
  } else {
    write_meta_comments(out, "deviation", config);
    gravlam::write_trajectory_csv(out, combined);
  }

  // diagnostics on stdout; as comment lines when sharing the stream with CSV,
  // omitted when the JSON document itself owns stdout (it carries them)
  if (target.to_file || cmd.format != "json") {
    const char* prefix = target.to_file ? "" : "# ";
    std::cout << prefix << "energy_drift_max = " << fmt(energy_drift_max) << '\n';
    std::cout << prefix << "closed_form_max_abs_deviation = " << fmt(closed_form_deviation)
              << '\n';
    std::cout << prefix << "heisenberg_delta_x = " << fmt(heisenberg.delta_x) << '\n';
    std::cout << prefix << "heisenberg_delta_p = " << fmt(heisenberg.delta_p) << '\n';
    std::cout << prefix << "heisenberg_product_over_hbar = "
              << fmt(heisenberg.product_over_hbar) << '\n';
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// background

struct BackgroundCmd {
  double omega_min = 0.0;
  double omega_max = 0.0;
  double strain = 1e-6;
  int modes = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

int run_background(BackgroundCmd& cmd) {
  if (!(cmd.omega_min > 0.0)) throw UsageError("--omega-min must be > 0");
  if (!(cmd.omega_max >= cmd.omega_min)) throw UsageError("--omega-max must be >= --omega-min");
  if (!(cmd.strain >= 0.0) || cmd.strain > gravlam::weak_field_max_strain) {
    throw UsageError("--strain must lie in [0, 1e-3]");
  }
  if (cmd.modes < 1) throw UsageError("--modes must be >= 1");

  const gravlam::SpectrumConfig spectrum{cmd.omega_min, cmd.omega_max, cmd.strain, cmd.modes};
  const auto ensemble = gravlam::sample_ensemble(spectrum, cmd.seed);

  ordered_json config;
  config["omega-min"] = cmd.omega_min;
  config["omega-max"] = cmd.omega_max;
  config["strain"] = cmd.strain;
  config["modes"] = cmd.modes;
  config["seed"] = cmd.seed;

  ordered_json doc;
  doc["meta"] = meta_object("background", config);
  ordered_json ensemble_doc = gravlam::ensemble_to_json(ensemble);
  for (auto& [key, value] : ensemble_doc.items()) {
    doc[key] = std::move(value);
  }

  auto target = open_output(cmd.out);
  target.stream() << doc.dump() << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------------------
// app wiring

void add_estimator_options(CLI::App* cmd, std::string& method, EstimatorOptions& est) {
  cmd->add_option("--method", method,
                  "correlation estimator: closed-form | quadrature | monte-carlo | sign-model")
      ->capture_default_str();
  cmd->add_option("--n", est.n, "Monte Carlo sample count (dimensionless, >= 100)")
      ->capture_default_str();
  cmd->add_option("--panels", est.panels, "Simpson panel count (dimensionless, even, >= 8)")
      ->capture_default_str();
  cmd->add_option("--seed", est.seed, "RNG seed (64-bit unsigned)")
      ->envname("GRAVLAM_SEED")
      ->capture_default_str();
  cmd->add_option("--workers", est.workers,
                  "worker threads for deterministic Monte Carlo sharding (>= 1)")
      ->capture_default_str();
}

void add_format_options(CLI::App* cmd, std::string& format, std::string& out,
                        const std::string& default_format) {
  format = default_format;
  cmd->add_option("--format", format, "output format: text | csv | json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", out, "output file path (default: stdout)");
}

void add_config_option(CLI::App* cmd, std::string& config_path) {
  cmd->add_option("--config", config_path,
                  "JSON config file; keys are flag names, explicit flags win");
}

/// Merges a JSON config file into the argument list before parsing. Keys are
/// long flag names without dashes; a nested object whose key matches the
/// invoked subcommand scopes its entries to it. A key already present on the
/// command line is left alone, so explicit flags always win.
std::vector<std::string> merge_config_args(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw UsageError("config file must contain a JSON object");

  const std::string subcommand =
      (!args.empty() && !args.front().starts_with('-')) ? args.front() : "";
  const auto has_flag = [&args](const std::string& flag) {
    for (const auto& token : args) {
      if (token == flag || token.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  const auto append_entry = [&](const std::string& key, const nlohmann::json& value) {
    if (key == "config") return;
    if (value.is_object() || value.is_array()) {
      throw UsageError("config key '" + key + "' must be a scalar");
    }
    const std::string flag = "--" + key;
    if (has_flag(flag)) return;
    args.push_back(flag + "=" +
                   (value.is_string() ? value.get<std::string>() : value.dump()));
  };

  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) {
      if (key == subcommand) {
        for (const auto& [inner_key, inner_value] : value.items()) {
          append_entry(inner_key, inner_value);
        }
      }
      continue;
    }
    append_entry(key, value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gravitational-background hidden-variable model: correlations, Bell "
               "observable, deviation oscillators",
               "gravlam"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("gravlam ") + gravlam::version);

  CorrelationCmd correlation;
  auto* correlation_cmd =
      app.add_subcommand("correlation", "evaluate the correlation M(theta)");
  correlation_cmd->add_option("--theta", correlation.theta,
                              "analyzer separation angle (radians; degrees with --degrees)")
      ->required();
  add_estimator_options(correlation_cmd, correlation.method, correlation.est);
  correlation_cmd->add_flag("--degrees", correlation.degrees, "angles are in degrees");
  add_format_options(correlation_cmd, correlation.format, correlation.out, "text");
  add_config_option(correlation_cmd, correlation.config);

  ChshCmd chsh;
  auto* chsh_cmd = app.add_subcommand(
      "chsh", "evaluate the Bell observable S at four analyzer angles");
  chsh_cmd->add_option("--a", chsh.a, "analyzer angle a (radians)")->capture_default_str();
  chsh_cmd->add_option("--a-prime", chsh.a_prime, "analyzer angle a' (radians)")
      ->capture_default_str();
  chsh_cmd->add_option("--b", chsh.b, "analyzer angle b (radians)")->capture_default_str();
  chsh_cmd->add_option("--b-prime", chsh.b_prime, "analyzer angle b' (radians)")
      ->capture_default_str();
  add_estimator_options(chsh_cmd, chsh.method, chsh.est);
  chsh_cmd->add_flag("--degrees", chsh.degrees, "angles are in degrees");
  add_format_options(chsh_cmd, chsh.format, chsh.out, "text");
  add_config_option(chsh_cmd, chsh.config);

  SweepCmd sweep;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "sweep S over the analyzer family (0, -2*phi, -phi, phi)");
  sweep_cmd->add_option("--phi-min", sweep.phi_min, "sweep start (radians)")
      ->capture_default_str();
  sweep_cmd->add_option("--phi-max", sweep.phi_max, "sweep end (radians)")
      ->capture_default_str();
  sweep_cmd->add_option("--steps", sweep.steps, "number of grid intervals (>= 1)")
      ->capture_default_str();
  add_estimator_options(sweep_cmd, sweep.method, sweep.est);
  sweep_cmd->add_flag("--degrees", sweep.degrees, "angles are in degrees");
  add_format_options(sweep_cmd, sweep.format, sweep.out, "csv");
  add_config_option(sweep_cmd, sweep.config);

  DeviationCmd deviation;
  auto* deviation_cmd = app.add_subcommand(
      "deviation", "integrate the deviation oscillators of a sampled background");
  deviation_cmd->add_option("--omega-min", deviation.omega_min, "band start (rad/s)")
      ->required();
  deviation_cmd->add_option("--omega-max", deviation.omega_max, "band end (rad/s)")
      ->required();
  deviation_cmd->add_option("--strain", deviation.strain,
                            "per-mode strain (dimensionless, <= 1e-3)")
      ->capture_default_str();
  deviation_cmd->add_option("--modes", deviation.modes, "number of background modes (>= 1)")
      ->capture_default_str();
  deviation_cmd->add_option("--ell0", deviation.ell0, "initial pair separation (m)")
      ->capture_default_str();
  deviation_cmd->add_option("--t-max", deviation.t_max, "integration span (s)")->required();
  deviation_cmd->add_option("--dt", deviation.dt, "integration step (s)")->required();
  deviation_cmd->add_option("--mass", deviation.mass,
                            "particle mass for the uncertainty diagnostic (kg)")
      ->capture_default_str();
  deviation_cmd->add_option("--seed", deviation.seed, "RNG seed (64-bit unsigned)")
      ->envname("GRAVLAM_SEED")
      ->capture_default_str();
  add_format_options(deviation_cmd, deviation.format, deviation.out, "csv");
  add_config_option(deviation_cmd, deviation.config);

  BackgroundCmd background;
  auto* background_cmd =
      app.add_subcommand("background", "sample and dump a background ensemble as JSON");
  background_cmd->add_option("--omega-min", background.omega_min, "band start (rad/s)")
      ->required();
  background_cmd->add_option("--omega-max", background.omega_max, "band end (rad/s)")
      ->required();
  background_cmd->add_option("--strain", background.strain,
                             "per-mode strain (dimensionless, <= 1e-3)")
      ->capture_default_str();
  background_cmd->add_option("--modes", background.modes, "number of background modes (>= 1)")
      ->capture_default_str();
  background_cmd->add_option("--seed", background.seed, "RNG seed (64-bit unsigned)")
      ->envname("GRAVLAM_SEED")
      ->capture_default_str();
  background_cmd->add_option("--out", background.out, "output file path (default: stdout)");
  add_config_option(background_cmd, background.config);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config_args(std::move(args));
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  std::reverse(args.begin(), args.end());  // CLI11's vector parse pops from the back

  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (app.got_subcommand(correlation_cmd)) return run_correlation(correlation);
    if (app.got_subcommand(chsh_cmd)) return run_chsh(chsh);
    if (app.got_subcommand(sweep_cmd)) return run_sweep(sweep);
    if (app.got_subcommand(deviation_cmd)) return run_deviation(deviation);
    if (app.got_subcommand(background_cmd)) return run_background(background);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
