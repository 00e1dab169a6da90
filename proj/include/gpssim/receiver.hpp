#pragma once

/**
 * @file receiver.hpp
 * @brief Aggregate GPS receiver channel-set state machine.
 *
 * All satellites of one simulator share availability and clock offset, so a
 * single channel set stands in for the per-satellite channels. Time is
 * quantized to the caller's step: a step of length dt covers the interval
 * [t, t + dt) during which the signal is either present or not.
 *
 *   TRACKING      --no signal-->                       BLOCKED
 *   BLOCKED       --signal, blocked <= t_max-->        REACQUISITION
 *   BLOCKED       --signal, blocked >  t_max-->        ACQUISITION
 *   (RE)ACQUISITION --target elapsed-->                TRACKING (first fix)
 *
 * The reacquisition target is latched at blockage exit from the clock
 * offset passed in that step; later offset changes do not move it.
 */

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpssim/time_offset.hpp"

namespace gpssim::receiver {

enum class Mode { Acquisition, Tracking, Reacquisition, Blocked };

std::string to_string(Mode m);

/// One knot of the |clock offset| -> reacquisition time map.
struct ReacqKnot {
  Duration offset;
  Duration reacq_time;
};

struct ReceiverProfile {
  std::string name = "custom";
  Duration t_reacq_base = Duration::from_ms(400);
  Duration t_max = Duration::from_s(135);
  Duration t_acq = Duration::from_s(30);
  /// Knots sorted by offset, starting at offset 0.
  std::vector<ReacqKnot> reacq_vs_offset;
  double pos_rate_hz = 10.0;
  /// 1-sigma pseudorange noise used when the receiver forms a fix.
  double pseudorange_noise_m = 1.0;

  /// Dedicated timing-grade receiver: 0.4 s base, flat to 50 ms, 2 s at 250 ms.
  static ReceiverProfile dedicated();
  /// Smartphone chipset: 4 s base, flat to 50 ms, 12 s at 250 ms.
  static ReceiverProfile smartphone();

  Duration fix_period() const;

  /// Throws std::invalid_argument on a broken profile (see invariants).
  void validate() const;
};

/// Piecewise-linear in |clock_offset|, clamped beyond the last knot.
Duration reacquisition_time(const ReceiverProfile& profile, TimeOffset clock_offset);

struct Fix {
  Duration time;
};

struct ReceiverState {
  Mode mode = Mode::Acquisition;
  Duration blockage_elapsed{};
  Duration mode_elapsed{};
  /// Latched time-to-fix of the current (re)acquisition.
  Duration target{};
  /// Has tracked at least once (search state cached).
  bool has_cache = false;
  Duration since_fix{};
  Duration time{};
  std::optional<Fix> last_fix;
  /// Set by step() when a fix is emitted during that step.
  bool fix_emitted = false;

  /// Cold start: acquiring with no cached search state.
  static ReceiverState cold(const ReceiverProfile& profile);
  /// Warm: already tracking (e.g. live sky before a handover).
  static ReceiverState tracking();
};

/// Advances one step. dt must be positive (std::invalid_argument otherwise).
/// When a fix is emitted it is stamped at the end of the step.
ReceiverState step(ReceiverState state, const ReceiverProfile& profile, bool signal_present, TimeOffset clock_offset,
                   Duration dt);

struct TransitionLogEntry {
  Duration time;
  Mode mode;
  bool signal;
  TimeOffset offset;
};

/// CSV `t,mode,signal,offset_ms`.
void write_transition_log_csv(std::ostream& os, std::span<const TransitionLogEntry> log);

}  // namespace gpssim::receiver
