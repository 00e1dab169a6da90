#include "gpssim/receiver.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gpssim::receiver {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Acquisition:
      return "ACQUISITION";
    case Mode::Tracking:
      return "TRACKING";
    case Mode::Reacquisition:
      return "REACQUISITION";
    case Mode::Blocked:
      return "BLOCKED";
  }
  return "UNKNOWN";
}

ReceiverProfile ReceiverProfile::dedicated() {
  ReceiverProfile p;
  p.name = "dedicated";
  p.t_reacq_base = Duration::from_ms(400);
  p.t_max = Duration::from_s(135);
  p.t_acq = Duration::from_s(30);
  p.reacq_vs_offset = {{Duration{}, Duration::from_ms(400)},
                       {Duration::from_ms(50), Duration::from_ms(400)},
                       {Duration::from_ms(250), Duration::from_s(2)}};
  p.pos_rate_hz = 10.0;
  p.pseudorange_noise_m = 1.8;
  return p;
}

ReceiverProfile ReceiverProfile::smartphone() {
  ReceiverProfile p;
  p.name = "smartphone";
  p.t_reacq_base = Duration::from_s(4);
  p.t_max = Duration::from_s(135);
  p.t_acq = Duration::from_s(30);
  p.reacq_vs_offset = {{Duration{}, Duration::from_s(4)},
                       {Duration::from_ms(50), Duration::from_s(4)},
                       {Duration::from_ms(250), Duration::from_s(12)}};
  p.pos_rate_hz = 1.0;
  p.pseudorange_noise_m = 6.0;
  return p;
}

Duration ReceiverProfile::fix_period() const { return Duration::from_seconds(1.0 / pos_rate_hz); }

void ReceiverProfile::validate() const {
  auto fail = [&](const std::string& what) { throw std::invalid_argument("receiver profile '" + name + "': " + what); };
  if (t_reacq_base <= Duration{}) fail("t_reacq_base must be positive");
  if (t_max <= Duration{}) fail("t_max must be positive");
  if (t_reacq_base > t_acq) fail("t_reacq_base must not exceed t_acq");
  if (!(pos_rate_hz > 0.0)) fail("pos_rate_hz must be positive");
  if (!(pseudorange_noise_m >= 0.0)) fail("pseudorange_noise_m must be >= 0");
  if (reacq_vs_offset.empty()) return;
  if (!reacq_vs_offset.front().offset.is_zero()) fail("first knot must be at offset 0");
  if (reacq_vs_offset.front().reacq_time != t_reacq_base) fail("map at offset 0 must equal t_reacq_base");
  for (std::size_t i = 1; i < reacq_vs_offset.size(); ++i) {
    if (reacq_vs_offset[i].offset <= reacq_vs_offset[i - 1].offset) fail("knot offsets must increase");
    if (reacq_vs_offset[i].reacq_time < reacq_vs_offset[i - 1].reacq_time) fail("map must be non-decreasing");
  }
  // Flat inside the 50 ms requirement (1% tolerance).
  const Duration at50 = reacquisition_time(*this, TimeOffset::from_ms(50));
  if (static_cast<double>((at50 - t_reacq_base).ns()) > 0.01 * static_cast<double>(t_reacq_base.ns())) {
    fail("map must be flat on [0, 50 ms]");
  }
}

Duration reacquisition_time(const ReceiverProfile& profile, TimeOffset clock_offset) {
  const auto& knots = profile.reacq_vs_offset;
  if (knots.empty()) return profile.t_reacq_base;
  const Duration x = clock_offset.abs();
  if (x <= knots.front().offset) return knots.front().reacq_time;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (x <= knots[i].offset) {
      const auto& a = knots[i - 1];
      const auto& b = knots[i];
      const double f = static_cast<double>((x - a.offset).ns()) / static_cast<double>((b.offset - a.offset).ns());
      const double ns = static_cast<double>(a.reacq_time.ns()) + f * static_cast<double>((b.reacq_time - a.reacq_time).ns());
      return Duration::from_ns(std::llround(ns));
    }
  }
  return knots.back().reacq_time;
}

ReceiverState ReceiverState::cold(const ReceiverProfile& profile) {
  ReceiverState s;
  s.mode = Mode::Acquisition;
  s.target = profile.t_acq;
  return s;
}

ReceiverState ReceiverState::tracking() {
  ReceiverState s;
  s.mode = Mode::Tracking;
  s.has_cache = true;
  return s;
}

ReceiverState step(ReceiverState s, const ReceiverProfile& profile, bool signal_present, TimeOffset clock_offset,
                   Duration dt) {
  if (dt <= Duration{}) throw std::invalid_argument("receiver step dt must be positive");
  s.fix_emitted = false;
  s.time += dt;

  auto emit = [&] {
    s.fix_emitted = true;
    s.last_fix = Fix{s.time};
  };

  if (!signal_present) {
    if (s.mode == Mode::Blocked) {
      s.blockage_elapsed += dt;
    } else {
      s.mode = Mode::Blocked;
      s.blockage_elapsed = dt;
      s.mode_elapsed = Duration{};
    }
    return s;
  }

  switch (s.mode) {
    case Mode::Blocked:
      if (s.has_cache && s.blockage_elapsed <= profile.t_max) {
        s.mode = Mode::Reacquisition;
        s.target = reacquisition_time(profile, clock_offset);
      } else {
        s.mode = Mode::Acquisition;
        s.target = profile.t_acq;
      }
      s.blockage_elapsed = Duration{};
      s.mode_elapsed = dt;
      break;
    case Mode::Acquisition:
    case Mode::Reacquisition:
      s.mode_elapsed += dt;
      break;
    case Mode::Tracking:
      s.mode_elapsed += dt;
      s.since_fix += dt;
      if (s.since_fix >= profile.fix_period()) {
        s.since_fix -= profile.fix_period();
        emit();
      }
      return s;
  }

  if (s.mode_elapsed >= s.target) {
    s.mode = Mode::Tracking;
    s.has_cache = true;
    s.mode_elapsed = Duration{};
    s.since_fix = Duration{};
    emit();
  }
  return s;
}

void write_transition_log_csv(std::ostream& os, std::span<const TransitionLogEntry> log) {
  os << "t,mode,signal,offset_ms\n";
  for (const auto& e : log) {
    os << e.time.seconds() << ',' << to_string(e.mode) << ',' << (e.signal ? 1 : 0) << ',' << e.offset.millis() << '\n';
  }
}

}  // namespace gpssim::receiver
