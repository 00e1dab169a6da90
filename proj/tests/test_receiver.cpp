#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gpssim/random.hpp"
#include "gpssim/receiver.hpp"

using namespace gpssim;
using namespace gpssim::receiver;

namespace {

const Duration kDt = Duration::from_ms(100);

struct Outcome {
  Mode mode_on_entry;
  Duration target;
  Duration latency;  ///< from the first step with signal to the first fix
};

/// Tracking, then `blocked` without signal, then signal with `offset` until a fix.
Outcome run_blockage(const ReceiverProfile& p, Duration blocked, TimeOffset offset, Duration dt = kDt) {
  ReceiverState s = ReceiverState::tracking();
  for (Duration t{}; t < blocked; t += dt) s = step(s, p, false, {}, dt);
  const Duration start = s.time;
  s = step(s, p, true, offset, dt);
  Outcome o{s.mode, s.target, {}};
  while (!s.fix_emitted) s = step(s, p, true, offset, dt);
  o.latency = s.last_fix->time - start;
  return o;
}

Duration quantized(Duration target, Duration dt) {
  const std::int64_t n = (target.ns() + dt.ns() - 1) / dt.ns();
  return dt * std::max<std::int64_t>(n, 1);
}

}  // namespace

TEST_CASE("60 s blockage reacquires at the base time") {
  const auto p = ReceiverProfile::dedicated();
  const Outcome o = run_blockage(p, Duration::from_s(60), TimeOffset{});
  CHECK(o.target == p.t_reacq_base);
  CHECK(o.latency == quantized(p.t_reacq_base, kDt));
  CHECK(o.latency <= Duration::from_ms(500));
}

TEST_CASE("200 s blockage falls back to acquisition") {
  const auto p = ReceiverProfile::dedicated();
  const Outcome o = run_blockage(p, Duration::from_s(200), TimeOffset{});
  CHECK(o.mode_on_entry == Mode::Acquisition);
  CHECK(o.target == Duration::from_s(30));
  CHECK(o.latency == Duration::from_s(30));
}

TEST_CASE("t_max boundary is inclusive") {
  const auto p = ReceiverProfile::dedicated();
  CHECK(run_blockage(p, Duration::from_s(135), TimeOffset{}).target == p.t_reacq_base);
  CHECK(run_blockage(p, Duration::from_ms(135100), TimeOffset{}).target == p.t_acq);
}

TEST_CASE("large offsets slow reacquisition, symmetrically") {
  for (const auto& p : {ReceiverProfile::dedicated(), ReceiverProfile::smartphone()}) {
    const auto plus = run_blockage(p, Duration::from_s(60), TimeOffset::from_ms(250));
    const auto minus = run_blockage(p, Duration::from_s(60), TimeOffset::from_ms(-250));
    CHECK(plus.target > p.t_reacq_base);
    CHECK(plus.target == minus.target);
    CHECK(plus.latency == minus.latency);
  }
}

TEST_CASE("reacquisition map: knots, interpolation, clamping") {
  const auto d = ReceiverProfile::dedicated();
  CHECK(reacquisition_time(d, TimeOffset{}) == Duration::from_ms(400));
  CHECK(reacquisition_time(d, TimeOffset::from_ms(50)) == Duration::from_ms(400));
  CHECK(reacquisition_time(d, TimeOffset::from_ms(250)) == Duration::from_s(2));
  // Linear between (50 ms, 0.4 s) and (250 ms, 2 s).
  CHECK(reacquisition_time(d, TimeOffset::from_ms(150)) == Duration::from_ms(1200));
  CHECK(reacquisition_time(d, TimeOffset::from_ms(-150)) == Duration::from_ms(1200));
  CHECK(reacquisition_time(d, TimeOffset::from_ms(900)) == Duration::from_s(2));

  const auto s = ReceiverProfile::smartphone();
  CHECK(s.t_reacq_base == Duration::from_s(4));
  CHECK(reacquisition_time(s, TimeOffset::from_ms(30)) == Duration::from_s(4));
  CHECK(reacquisition_time(s, TimeOffset::from_ms(250)) == Duration::from_s(12));

  ReceiverProfile empty = d;
  empty.reacq_vs_offset.clear();
  CHECK(reacquisition_time(empty, TimeOffset::from_ms(200)) == d.t_reacq_base);
}

TEST_CASE("property: latency equals the latched target rounded up to the step") {
  Rng rng(21);
  const auto p = ReceiverProfile::dedicated();
  for (int i = 0; i < 200; ++i) {
    const TimeOffset offset = TimeOffset::from_millis(rng.uniform(-300, 300));
    const Duration dt = Duration::from_ms(static_cast<std::int64_t>(rng.uniform(10, 250)));
    const Duration blocked = Duration::from_s(static_cast<std::int64_t>(rng.uniform(1, 100)));
    const Outcome o = run_blockage(p, blocked, offset, dt);
    CHECK(o.target == reacquisition_time(p, offset));
    CHECK(o.latency == quantized(o.target, dt));
  }
}

TEST_CASE("property: fixes only come out of TRACKING") {
  Rng rng(22);
  for (const auto& p : {ReceiverProfile::dedicated(), ReceiverProfile::smartphone()}) {
    ReceiverState s = ReceiverState::cold(p);
    bool signal = true;
    for (int i = 0; i < 20000; ++i) {
      if (rng.uniform() < 0.01) signal = !signal;
      s = step(s, p, signal, TimeOffset::from_millis(rng.uniform(-100, 100)), kDt);
      if (s.fix_emitted) CHECK(s.mode == Mode::Tracking);
      if (!signal) CHECK(s.mode == Mode::Blocked);
    }
  }
}

TEST_CASE("latched target does not follow later offset changes") {
  const auto p = ReceiverProfile::dedicated();
  ReceiverState s = ReceiverState::tracking();
  s = step(s, p, false, {}, kDt);
  s = step(s, p, true, TimeOffset::from_ms(250), kDt);
  CHECK(s.target == Duration::from_s(2));
  s = step(s, p, true, TimeOffset{}, kDt);
  CHECK(s.target == Duration::from_s(2));
}

TEST_CASE("cold start acquires in t_acq, then fixes at the configured rate") {
  const auto p = ReceiverProfile::dedicated();
  ReceiverState s = ReceiverState::cold(p);
  int fixes = 0;
  Duration first{};
  for (int i = 0; i < 310; ++i) {
    s = step(s, p, true, {}, kDt);
    if (s.fix_emitted && fixes++ == 0) first = s.time;
  }
  CHECK(first == Duration::from_s(30));
  CHECK(fixes == 11);  // first fix at 30 s, then one per 100 ms up to 31 s
}

TEST_CASE("profile validation") {
  CHECK_NOTHROW(ReceiverProfile::dedicated().validate());
  CHECK_NOTHROW(ReceiverProfile::smartphone().validate());
  auto p = ReceiverProfile::dedicated();
  p.reacq_vs_offset[1].reacq_time = Duration::from_s(1);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ReceiverProfile::dedicated();
  p.pos_rate_hz = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(step(ReceiverState::tracking(), ReceiverProfile::dedicated(), true, {}, Duration{}),
                  std::invalid_argument);
}

TEST_CASE("transition log CSV") {
  std::ostringstream os;
  const TransitionLogEntry e{Duration::from_ms(1500), Mode::Reacquisition, true, TimeOffset::from_ms(3)};
  write_transition_log_csv(os, std::span<const TransitionLogEntry>(&e, 1));
  CHECK(os.str() == "t,mode,signal,offset_ms\n1.5,REACQUISITION,1,3\n");
}
