#pragma once

// The four CLI commands. Each writes its artifacts under the output directory
// and returns what it measured so callers can test it without reparsing files.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rheoflame/frozen.hpp"
#include "rheoflame/huyghens.hpp"
#include "scenario.hpp"

namespace rheoflame::cli {

enum ExitCode { exit_pass = 0, exit_failed = 1, exit_usage = 2, exit_numerical = 3 };

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::size_t> rays;
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  std::optional<std::size_t> levels;
  std::optional<double> delta;
  std::optional<std::size_t> level_index;
};

/// Applies command-line overrides and revalidates.
void apply(Scenario& sc, const Overrides& o);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SimulateResult {
  WfNet net;
  std::vector<Frontal> frontals;
  std::vector<Check> diagnostics;
};

struct FreezeResult {
  FrozenReport report;
  bool pass = false;
};

struct DropletsResult {
  EnvelopeReport report;
  double source_t = 0.0;
  double delta = 0.0;
  bool pass = false;
};

struct VerifyResult {
  std::vector<Check> checks;
  bool pass = false;
};

std::filesystem::path output_dir(const Scenario& sc);

SimulateResult cmd_simulate(const Scenario& sc, std::ostream& log);
FreezeResult cmd_freeze(const Scenario& sc, std::ostream& log);

/// Droplets from the frontal of level `level_index` (1-based, default the
/// next-to-last level) lasting `delta` (default one level spacing).
DropletsResult cmd_droplets(const Scenario& sc, std::optional<std::size_t> level_index,
                            std::optional<double> delta, std::ostream& log);

VerifyResult cmd_verify(const Scenario& sc, std::ostream& log);

/// The s-derivative used by the diagnostics: spectral on closed nets,
/// 4th-order stencils on open ones.
SDerivative diagnostic_scheme(const WfNet& net);

}  // namespace rheoflame::cli
