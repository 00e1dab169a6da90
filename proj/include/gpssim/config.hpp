#pragma once

/**
 * @file config.hpp
 * @brief JSON run configuration.
 *
 * Every physical quantity carries its unit in the key name (`*_ms`, `*_m`,
 * `*_kmh`, `*_s`, ...). Unknown keys are rejected. Sections that are absent
 * keep their built-in defaults, so an empty object is a valid config.
 * Errors are reported as ConfigError with a dotted field path such as
 * `deployment.v_max_kmh` or `scenarios.drive.clocks[1]`.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gpssim/ntp.hpp"
#include "gpssim/placement.hpp"
#include "gpssim/receiver.hpp"
#include "gpssim/scenario.hpp"

namespace gpssim::config {

inline constexpr const char* kConfigEnvVar = "GPSSIM_CONFIG";

struct StaticSpec {
  std::vector<scenario::ClockConfig> clocks = scenario::static_handover_configs();
  std::string receiver = "dedicated";
  std::size_t trials = 50;
};

struct TraversalSpec {
  scenario::PathScenario path = scenario::PathScenario::drive();
  std::string receiver = "dedicated";
  std::vector<scenario::ClockConfig> clocks = scenario::traversal_configs();
  std::size_t runs = 10;
};

struct SweepSpec {
  std::vector<TimeOffset> offsets = scenario::default_sweep_offsets();
  std::vector<std::string> receivers{"dedicated", "smartphone"};
  std::size_t trials = 5;
};

struct OutdoorSpec {
  std::string receiver = "dedicated";
  std::size_t trials = 20;
  double coverage_radius_m = 80.0;
};

using ScenarioSpec = std::variant<StaticSpec, TraversalSpec, SweepSpec, OutdoorSpec>;

struct DeploymentSpec {
  std::vector<double> simulator_positions_m{400.0, 900.0, 1400.0};
  double coverage_radius_m = 80.0;
  placement::Speed v_max = placement::Speed::from_kmh(110.0);
  /// Piecewise speed limits; empty means v_max everywhere.
  std::vector<placement::SpeedProfile::Segment> speed_segments;
  placement::TimingProfile timing = placement::TimingProfile::reference();
  /// Separation to size the radius for; defaults to the largest gap.
  std::optional<double> separation_m;
  std::vector<double> curve_radii_m{40.0, 60.0, 80.0, 100.0, 120.0};
  std::vector<double> curve_separations_m{300.0, 500.0, 700.0, 880.0};
  std::vector<double> curve_speeds_kmh;  ///< empty: 1..150 km/h in 1 km/h steps

  placement::SpeedProfile speed_profile() const;
};

struct Config {
  std::uint64_t seed = 1;
  ntp::SyncMatrixConfig ntp = ntp::SyncMatrixConfig::defaults();
  calibration::SimDelayModel sim_delay{};
  std::size_t calibration_samples = calibration::kDefaultSampleCount;
  std::optional<TimeOffset> calibration_correction;
  std::map<std::string, receiver::ReceiverProfile> receivers;
  DeploymentSpec deployment;
  scenario::ScenarioOptions options;
  std::map<std::string, ScenarioSpec> scenarios;

  /// Throws ConfigError for an unknown profile name.
  const receiver::ReceiverProfile& receiver(const std::string& name) const;
  /// Throws ConfigError for an unknown scenario name.
  const ScenarioSpec& scenario(const std::string& name) const;
};

/// Built-in defaults: both receiver profiles and the scenarios
/// static, drive, pedestrian, sweep and outdoor.
Config default_config();

/// Throws ConfigError on malformed JSON, type errors, unknown keys,
/// missing required keys or values that fail validation.
Config parse_config(std::string_view json_text);

/// Reads and parses a file. Throws ConfigError when it cannot be read.
Config load_config(const std::string& path);

}  // namespace gpssim::config
