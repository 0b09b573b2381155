#pragma once

#include <array>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

// Shared helpers for the test suites. Oracles that check a specific module
// live next to its tests; everything here is generic plumbing.

namespace testsupport {

/// Independent uniform angle source for oracles: deliberately built on the
/// standard library engine so oracle draws never share code with the
/// library's generator.
class OracleAngles {
 public:
  explicit OracleAngles(unsigned long long seed) : engine_(seed) {}

  double angle() { return dist_(engine_) * 6.283185307179586; }
  double in(double lo, double hi) { return lo + (hi - lo) * dist_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> dist_{0.0, 1.0};
};

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Runs a shell command, capturing combined stdout/stderr and the exit code.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  const std::string wrapped = command + " 2>&1";
  FILE* pipe = ::popen(wrapped.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), got);
  }
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

/// Extracts the number following "<key> = " on its own line of a text report.
inline double parse_report_value(const std::string& report, const std::string& key) {
  const std::string needle = key + " = ";
  std::size_t pos = 0;
  while ((pos = report.find(needle, pos)) != std::string::npos) {
    const bool line_start = pos == 0 || report[pos - 1] == '\n';
    if (line_start) return std::stod(report.substr(pos + needle.size()));
    pos += needle.size();
  }
  throw std::runtime_error("report key not found: " + key);
}

}  // namespace testsupport
