#pragma once

// Simulation-process delay of a GPS simulator: a slowly wandering delay
// observed once per second, averaged into a one-time correction.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "gpssim/random.hpp"
#include "gpssim/time_offset.hpp"

namespace gpssim::calibration {

inline constexpr std::size_t kDefaultSampleCount = 1800;  // 30 min at 1 Hz

struct SimDelayModel {
  Duration mean_delay = Duration::from_ms(20);
  /// Random-walk step sigma per one-second sample.
  Duration wander = Duration::from_us(5);
  /// Gaussian noise of the measurement rig.
  Duration measurement_noise = Duration::from_us(500);

  void validate() const;
};

/// The delay process itself. Each call to next() advances one second.
class SimDelayProcess {
 public:
  SimDelayProcess(SimDelayModel model, Rng rng);

  /// True delay for the current second, then advances the walk.
  Duration next_true();
  /// Measured delay for the current second (true + noise, clamped at 0),
  /// then advances the walk.
  Duration next_measured();

  Duration current_true() const;
  const SimDelayModel& model() const { return model_; }

 private:
  Duration step(bool measured);

  SimDelayModel model_;
  Rng rng_;
  double walk_ns_ = 0.0;
  bool first_ = true;
};

/// `count` one-per-second measurements. Throws std::invalid_argument when
/// count == 0.
std::vector<TimeOffset> measure_sim_delay(const SimDelayModel& model, std::size_t count, Rng& rng);

struct CalibrationResult {
  TimeOffset correction;   ///< sample mean, rounded to the nearest ns
  std::size_t sample_count = 0;
  Duration sample_stddev;  ///< unbiased (n - 1)
  Duration residual_bound; ///< max |sample - correction|
};

/// Throws EmptySampleSet for an empty span.
CalibrationResult calibrate(std::span<const TimeOffset> samples);

/// delta_sim -= correction; other components unchanged.
ClockChain apply_correction(ClockChain chain, const CalibrationResult& result);

/// CSV with header `timestamp_s,delay_ms`, one row per sample, timestamps
/// starting at 0 in 1 s steps.
void write_samples_csv(std::ostream& os, std::span<const TimeOffset> samples);

/// Reads the format written by write_samples_csv. The header is optional;
/// blank lines are skipped. Throws ConfigError("line N") on malformed rows
/// and EmptySampleSet when no rows are present.
std::vector<TimeOffset> read_samples_csv(std::istream& is);

}  // namespace gpssim::calibration
