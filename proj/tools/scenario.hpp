#pragma once

// Scenario files: a metric, an ignition, a time interval and run settings.

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "rheoflame/expr.hpp"
#include "rheoflame/spray.hpp"
#include "rheoflame/zermelo.hpp"

namespace rheoflame::cli {

/// Malformed, incomplete or invalid scenario. Maps to the usage exit code.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ZermeloSpec {
  std::string a, b, c1, c2, theta;
  Expr a_expr, b_expr, c1_expr, c2_expr, theta_expr;
};

struct Thresholds {
  double unit_speed = 1e-7;
  double orthogonality = 1e-4;
  double richards_residual = 1e-3;
  double richards_analytic = 1e-4;  // relative to the frontal diameter
  double closed_form = 1e-6;
  double frozen = 1e-3;
};

struct Scenario {
  enum class MetricKind { zermelo, euclidean, example84 };
  MetricKind kind = MetricKind::zermelo;
  ZermeloSpec zermelo;
  Ignition ignition;
  double t0 = 0.0;
  double T = 0.0;
  std::size_t rays = 256;
  std::size_t levels = 5;
  IntegratorOptions integrator;
  std::string output = "out";
  std::optional<Domain> domain;
  Thresholds thresholds;

  /// Region sampled by validation and exported grids: the explicit domain, or
  /// a box around the ignition that the front cannot leave by T.
  Domain region() const;

  std::shared_ptr<const MetricField> metric() const;
  std::optional<ZermeloData> zermelo_data() const;

  /// No coefficient mentions u or v.
  bool time_only() const;

  /// Frontal level times t0 + (T - t0) i / levels, i = 1..levels.
  std::vector<double> level_times() const;
};

Scenario parse_scenario(const std::string& json_text);

/// Reads, parses and validates a scenario; throws ScenarioError with the
/// offending field name.
Scenario load_scenario(const std::filesystem::path& path);

/// Checks invariants and runs the Zermelo validity check over region().
void validate_scenario(const Scenario& sc);

}  // namespace rheoflame::cli
