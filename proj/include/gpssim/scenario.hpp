#pragma once

/**
 * @file scenario.hpp
 * @brief End-to-end experiments: clock-offset sweep, static handover,
 *        dynamic tunnel traversal and the outdoor live-sky comparison.
 *
 * Every run is single-threaded and a pure function of its inputs and seed.
 * Each trial draws its sky plot, simulator clocks and fix noise from
 * separately derived streams, so runs that differ only in clock
 * configuration see identical geometry and noise (paired seeds).
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpssim/delay_calibration.hpp"
#include "gpssim/ntp.hpp"
#include "gpssim/placement.hpp"
#include "gpssim/position_solver.hpp"
#include "gpssim/receiver.hpp"
#include "gpssim/stats.hpp"
#include "gpssim/time_offset.hpp"

namespace gpssim::scenario {

using solver::Vec3;

/// How the simulator clocks are synchronized.
struct ClockConfig {
  ntp::ServerType server = ntp::ServerType::Private;
  bool calibrated = true;

  std::string label() const;
  friend bool operator==(const ClockConfig&, const ClockConfig&) = default;
};

/// Public/raw, public/calibrated, private/raw, private/calibrated.
std::vector<ClockConfig> static_handover_configs();
/// Public/raw, private/raw, private/calibrated.
std::vector<ClockConfig> traversal_configs();

/// Parses "public/raw", "private/calibrated", ... Throws std::invalid_argument.
ClockConfig parse_clock_config(const std::string& text);

struct ClockModel {
  ntp::SyncMatrixConfig ntp = ntp::SyncMatrixConfig::defaults();
  ntp::Connection connection = ntp::Connection::Wireless;
  calibration::SimDelayModel sim_delay{};
  std::size_t calibration_samples = calibration::kDefaultSampleCount;
  /// Correction from an earlier calibration run; when unset each simulator
  /// is calibrated from its own samples.
  std::optional<TimeOffset> fixed_correction;
  /// NTP running time before the scenario clock starts.
  Duration ntp_warmup = Duration::from_s(1200);
};

/// Per-second clock chain of one simulator.
class ClockTrack {
 public:
  ClockTrack(std::vector<ClockChain> per_second, calibration::CalibrationResult calibration);

  /// Chain in effect at scenario time t (held for each whole second).
  const ClockChain& at(Duration t) const;
  TimeOffset error_at(Duration t) const { return compose_clock_error(at(t)); }
  const calibration::CalibrationResult& calibration() const { return calibration_; }
  std::size_t seconds() const { return chains_.size(); }

 private:
  std::vector<ClockChain> chains_;
  calibration::CalibrationResult calibration_;
};

/// Simulates the delay calibration, the NTP discipline and the operating
/// window of one simulator clock.
ClockTrack make_clock_track(const ClockModel& model, const ClockConfig& config, Duration window, const Rng& rng);

struct ScenarioOptions {
  Duration dt = Duration::from_ms(100);
  /// Per-axis horizontal sigma of live-sky fixes (2.234 m gives a 2.8 m mean).
  double live_sky_sigma_m = 2.234;
  solver::Geodetic origin{37.3795 * 3.14159265358979323846 / 180.0, 126.6669 * 3.14159265358979323846 / 180.0, 10.0};
  solver::SkyOptions sky{};
  ClockModel clocks{};
};

inline constexpr int kLiveSky = -1;

struct FixRecord {
  Duration time;
  Vec3 position;
  TimeOffset clock_bias;
  int source = kLiveSky;  ///< simulator index, or kLiveSky
  double horizontal_error_m = 0.0;
};

struct CoverageResult {
  std::size_t index = 0;
  std::optional<ErrorStats> stats;
  bool handover_success = false;
  Duration entry_time{};
  std::optional<Duration> first_fix_latency;
  /// Blockage the receiver had accumulated when it entered the coverage.
  Duration realized_blockage{};
  /// Time-to-fix the receiver latched on entry (reacquisition or acquisition).
  Duration latched_target{};
  /// Clock offset relative to the previously tracked source, at entry.
  TimeOffset entry_offset{};
};

struct ScenarioResult {
  std::string name;
  ClockConfig clock;
  std::uint64_t seed = 0;
  std::vector<FixRecord> fixes;
  std::vector<CoverageResult> coverages;
  std::vector<receiver::TransitionLogEntry> transitions;
};

// ---------------------------------------------------------------------------
// Timeline experiments

enum class SourceKind { LiveSky, Simulator, Blocked };

struct SignalSegment {
  Duration start;
  Duration end;
  SourceKind kind = SourceKind::Blocked;
  std::size_t simulator = 0;
};

/// Throws std::invalid_argument unless segments are non-empty, ordered,
/// non-overlapping and of positive length.
void validate_schedule(const std::vector<SignalSegment>& schedule);

/// Offsets from -250 ms to +250 ms in 50 ms steps.
std::vector<TimeOffset> default_sweep_offsets();

struct SweepRow {
  TimeOffset offset;
  double mean_reacq_s = 0.0;
  double reacq_stddev_s = 0.0;
  double mean_error_m = 0.0;
  double error_stddev_m = 0.0;
};

/// 60 s simulated / 60 s blocked / 60 s simulated with the given offset.
/// Throws std::invalid_argument when trials == 0.
std::vector<SweepRow> run_offset_sweep(const std::vector<TimeOffset>& offsets, const receiver::ReceiverProfile& receiver,
                                       std::size_t trials, std::uint64_t seed, const ScenarioOptions& options = {});

/// 30 s live sky / 30 s blocked / 20 s simulated. One coverage result
/// summarizes the simulated window.
ScenarioResult run_static_handover(const ClockConfig& clock, const receiver::ReceiverProfile& receiver,
                                   std::uint64_t seed, const ScenarioOptions& options = {});

struct HandoverSummary {
  ClockConfig clock;
  ErrorStats pooled;  ///< all simulated-window fixes of all trials
  std::size_t trials = 0;
};

/// Runs every config on the same `trials` derived seeds.
std::vector<HandoverSummary> run_static_handover_batch(const std::vector<ClockConfig>& configs,
                                                       const receiver::ReceiverProfile& receiver, std::size_t trials,
                                                       std::uint64_t seed, const ScenarioOptions& options = {});

// ---------------------------------------------------------------------------
// Path experiments

struct PathScenario {
  std::string name = "drive";
  double path_length_m = 1900.0;
  double tunnel_start_m = 150.0;
  double tunnel_end_m = 1750.0;
  std::vector<double> simulator_positions{400.0, 900.0, 1400.0};
  double coverage_radius_m = 80.0;
  placement::SpeedProfile speed = placement::SpeedProfile::constant(placement::Speed::from_kmh(110.0));
  receiver::ReceiverProfile receiver = receiver::ReceiverProfile::dedicated();
  /// Path direction in the local frame, degrees clockwise from north.
  double heading_deg = 90.0;
  /// Reject layouts that fail validate_deployment.
  bool strict = false;

  /// Three coverages, r = 80 m, d = 500 m, 110 km/h, dedicated receiver.
  static PathScenario drive();
  /// Three coverages 300 m apart walked at 1.4 m/s with a smartphone.
  static PathScenario pedestrian();

  /// Throws std::invalid_argument on inconsistent geometry.
  void validate() const;
  placement::TimingProfile timing() const;
};

/// Throws InfeasibleDeployment in strict mode when the layout fails
/// validation.
ScenarioResult run_dynamic_traversal(const PathScenario& path, const ClockConfig& clock, std::uint64_t seed,
                                     const ScenarioOptions& options = {});

struct TraversalSummary {
  ClockConfig clock;
  ErrorStats pooled;  ///< simulator fixes of all runs
  std::size_t runs = 0;
  /// Every coverage of every run produced a fix.
  bool all_handovers = false;
  /// Largest first-fix latency over all coverages of all runs.
  Duration worst_first_fix{};
  /// Full result of the first run, for per-coverage detail.
  ScenarioResult first_run;
};

/// Repeats the traversal with seeds derived from `seed`, the same seeds for
/// every config.
std::vector<TraversalSummary> run_dynamic_batch(const PathScenario& path, const std::vector<ClockConfig>& configs,
                                                std::size_t runs, std::uint64_t seed,
                                                const ScenarioOptions& options = {});

// ---------------------------------------------------------------------------

struct OutdoorComparison {
  ErrorStats live_sky;
  ErrorStats simulated;
  double coverage_radius_m = 80.0;
  /// Both average errors are below the coverage radius.
  bool serves_purpose = false;
};

/// Three test points, `trials` repetitions each, 5 s windows at the
/// receiver's fix rate; simulated fixes use the private/calibrated clock.
OutdoorComparison run_outdoor_comparison(std::uint64_t seed, const receiver::ReceiverProfile& receiver,
                                         std::size_t trials = 20, double coverage_radius_m = 80.0,
                                         const ScenarioOptions& options = {});

/// Horizontal error stats over all fixes attributed to simulators.
std::optional<ErrorStats> simulator_fix_stats(const ScenarioResult& result);

}  // namespace gpssim::scenario
