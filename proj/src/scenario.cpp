#include "gpssim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gpssim/error.hpp"

namespace gpssim::scenario {

using receiver::Mode;
using receiver::ReceiverProfile;
using receiver::ReceiverState;

std::string ClockConfig::label() const {
  return ntp::to_string(server) + (calibrated ? "/calibrated" : "/raw");
}

std::vector<ClockConfig> static_handover_configs() {
  return {{ntp::ServerType::Public, false},
          {ntp::ServerType::Public, true},
          {ntp::ServerType::Private, false},
          {ntp::ServerType::Private, true}};
}

std::vector<ClockConfig> traversal_configs() {
  return {{ntp::ServerType::Public, false}, {ntp::ServerType::Private, false}, {ntp::ServerType::Private, true}};
}

ClockConfig parse_clock_config(const std::string& text) {
  for (const auto& c : static_handover_configs()) {
    if (c.label() == text) return c;
  }
  throw std::invalid_argument("unknown clock configuration '" + text +
                              "' (expected public|private followed by /raw or /calibrated)");
}

// ---------------------------------------------------------------------------

ClockTrack::ClockTrack(std::vector<ClockChain> per_second, calibration::CalibrationResult calibration)
    : chains_(std::move(per_second)), calibration_(calibration) {
  if (chains_.empty()) throw std::invalid_argument("clock track needs at least one second");
}

const ClockChain& ClockTrack::at(Duration t) const {
  const std::int64_t s = std::max<std::int64_t>(0, t.ns() / 1'000'000'000);
  return chains_[std::min<std::size_t>(static_cast<std::size_t>(s), chains_.size() - 1)];
}

namespace {

std::size_t whole_seconds_ceil(Duration d) {
  const std::int64_t ns = d.ns();
  if (ns <= 0) return 0;
  return static_cast<std::size_t>((ns + 999'999'999) / 1'000'000'000);
}

}  // namespace

ClockTrack make_clock_track(const ClockModel& model, const ClockConfig& config, Duration window, const Rng& rng) {
  if (model.calibration_samples == 0) throw std::invalid_argument("calibration needs at least one sample");
  model.sim_delay.validate();

  // The delay process runs continuously: calibration, then NTP warm-up, then
  // the scenario window.
  calibration::SimDelayProcess delay(model.sim_delay, rng.child("sim-delay"));
  std::vector<TimeOffset> samples;
  samples.reserve(model.calibration_samples);
  for (std::size_t i = 0; i < model.calibration_samples; ++i) samples.push_back(delay.next_measured());
  calibration::CalibrationResult cal = calibration::calibrate(samples);
  if (model.fixed_correction) cal.correction = *model.fixed_correction;

  const std::size_t warmup_s = whole_seconds_ceil(model.ntp_warmup);
  const std::size_t window_s = whole_seconds_ceil(window) + 1;
  for (std::size_t i = 0; i < warmup_s; ++i) delay.next_true();

  const ntp::Topology topo = ntp::make_topology(model.ntp, model.connection, config.server);
  Rng ntp_rng = rng.child("ntp");
  const ntp::SyncTrajectory traj =
      ntp::simulate_topology(topo, Duration::from_s(static_cast<std::int64_t>(warmup_s + window_s)), ntp_rng);
  const TimeOffset ref = topo.root.clock_offset_truth;

  std::vector<ClockChain> chains;
  chains.reserve(window_s);
  for (std::size_t s = 0; s < window_s; ++s) {
    ClockChain c;
    c.delta_sim = delay.next_true();
    if (config.calibrated) c.delta_sim -= cal.correction;
    const std::size_t idx = std::min(warmup_s + s, traj.client.size() - 1);
    c.delta_ntp = traj.client[idx].offset_truth - ref;
    c.delta_ref = ref;
    chains.push_back(c);
  }
  return ClockTrack(std::move(chains), cal);
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kNoSignal = -2;

/// Fix formed from a simulator whose time scale is off by epsilon, with
/// independent pseudorange noise.
solver::PvtSolution simulated_fix(const solver::SatGeometry& sky, const Vec3& intended, TimeOffset epsilon,
                                  double sigma_m, Rng& rng) {
  const solver::SatGeometry emitted = solver::advance_geometry(sky, epsilon);
  std::vector<double> pr = solver::predicted_pseudoranges(emitted, intended);
  for (double& p : pr) p += rng.normal(0.0, sigma_m);
  return solver::solve_position(pr, sky, intended);
}

Vec3 live_sky_fix(const Vec3& truth, double sigma_axis_m, Rng& rng) {
  const double e = rng.normal(0.0, sigma_axis_m);
  const double n = rng.normal(0.0, sigma_axis_m);
  return truth + solver::enu_to_ecef_offset(truth, Vec3(e, n, 0.0));
}

/// Drives the receiver over a sequence of (source, epsilon) steps and
/// collects fixes, per-coverage results and the transition log.
class Runner {
 public:
  Runner(const ReceiverProfile& profile, ReceiverState initial, std::size_t coverages, Duration dt,
         ScenarioResult& out)
      : profile_(profile), state_(initial), dt_(dt), out_(out) {
    out_.coverages.resize(coverages);
    for (std::size_t i = 0; i < coverages; ++i) out_.coverages[i].index = i;
    if (state_.mode == Mode::Tracking) tracked_ = kLiveSky;
  }

  /// One step starting at now(). Returns true when a fix is emitted.
  /// `source` is kNoSignal, kLiveSky or a simulator index.
  bool advance(int source, TimeOffset source_epsilon) {
    const Duration t0 = state_.time;
    // Switching sources without a gap still breaks lock for one step.
    bool present = source != kNoSignal;
    if (present && state_.mode == Mode::Tracking && source != tracked_) present = false;

    const TimeOffset rel = present ? source_epsilon - tracked_epsilon_ : TimeOffset{};
    const Duration blocked_before = state_.blockage_elapsed;
    const Mode mode_before = state_.mode;

    if (source >= 0 && source != previous_source_) {
      auto& cov = out_.coverages.at(static_cast<std::size_t>(source));
      cov.entry_time = t0;
      cov.entry_offset = rel;
      cov.realized_blockage = blocked_before;
      entering_ = source;
    }

    state_ = receiver::step(state_, profile_, present, rel, dt_);

    if (present && entering_ == source && source >= 0) {
      auto& cov = out_.coverages[static_cast<std::size_t>(source)];
      cov.latched_target = state_.mode == Mode::Tracking && mode_before == Mode::Tracking ? Duration{} : state_.target;
      entering_ = kNoSignal;
    }
    if (state_.mode == Mode::Tracking && present) {
      tracked_ = source;
      tracked_epsilon_ = source_epsilon;
    }
    if (state_.mode != logged_mode_ || present != logged_signal_ || out_.transitions.empty()) {
      out_.transitions.push_back({state_.time, state_.mode, present, rel});
      logged_mode_ = state_.mode;
      logged_signal_ = present;
    }
    previous_source_ = source;

    if (!(state_.fix_emitted && present)) return false;
    if (source >= 0) {
      auto& cov = out_.coverages[static_cast<std::size_t>(source)];
      if (!cov.handover_success) {
        cov.handover_success = true;
        cov.first_fix_latency = state_.time - cov.entry_time;
      }
    }
    return true;
  }

  Duration now() const { return state_.time; }

 private:
  const ReceiverProfile& profile_;
  ReceiverState state_;
  Duration dt_;
  ScenarioResult& out_;
  int tracked_ = kNoSignal;
  TimeOffset tracked_epsilon_{};
  int previous_source_ = kNoSignal;
  int entering_ = kNoSignal;
  Mode logged_mode_ = Mode::Acquisition;
  bool logged_signal_ = false;
};

void finish_coverage_stats(ScenarioResult& result) {
  for (auto& cov : result.coverages) {
    std::vector<double> errs;
    for (const auto& f : result.fixes) {
      if (f.source == static_cast<int>(cov.index)) errs.push_back(f.horizontal_error_m);
    }
    if (!errs.empty()) cov.stats = compute_error_stats(errs);
  }
}

std::size_t step_count(Duration span, Duration dt) {
  return static_cast<std::size_t>(span.ns() / dt.ns());
}

void require_dt(Duration dt) {
  if (dt <= Duration{}) throw std::invalid_argument("scenario step must be positive");
}

}  // namespace

void validate_schedule(const std::vector<SignalSegment>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i].end <= schedule[i].start) throw std::invalid_argument("schedule segment of non-positive length");
    if (i > 0 && schedule[i].start < schedule[i - 1].end) throw std::invalid_argument("schedule segments overlap");
  }
}

namespace {

/// Runs a schedule against one sky. `epsilon_of(sim, t)` gives each
/// simulator's clock error.
template <typename EpsilonFn>
ScenarioResult run_schedule(const std::vector<SignalSegment>& schedule, const ReceiverProfile& profile,
                            ReceiverState initial, const solver::SatGeometry& sky, const Vec3& position,
                            EpsilonFn&& epsilon_of, std::size_t simulators, Rng& noise,
                            const ScenarioOptions& options) {
  validate_schedule(schedule);
  require_dt(options.dt);
  ScenarioResult out;
  initial.time = schedule.front().start;
  Runner runner(profile, initial, simulators, options.dt, out);

  for (const auto& seg : schedule) {
    const std::size_t n = step_count(seg.end - seg.start, options.dt);
    for (std::size_t i = 0; i < n; ++i) {
      const Duration t = runner.now();
      int source = kNoSignal;
      TimeOffset eps{};
      if (seg.kind == SourceKind::LiveSky) {
        source = kLiveSky;
      } else if (seg.kind == SourceKind::Simulator) {
        source = static_cast<int>(seg.simulator);
        eps = epsilon_of(seg.simulator, t);
      }
      if (!runner.advance(source, eps)) continue;

      FixRecord f;
      f.time = runner.now();
      f.source = source;
      if (source == kLiveSky) {
        f.position = live_sky_fix(position, options.live_sky_sigma_m, noise);
      } else {
        const auto sol = simulated_fix(sky, position, eps, profile.pseudorange_noise_m, noise);
        f.position = sol.position;
        f.clock_bias = sol.clock_bias;
      }
      f.horizontal_error_m = solver::horizontal_error(f.position, position);
      out.fixes.push_back(f);
    }
  }
  finish_coverage_stats(out);
  return out;
}

}  // namespace

std::vector<TimeOffset> default_sweep_offsets() {
  std::vector<TimeOffset> v;
  for (int ms = -250; ms <= 250; ms += 50) v.push_back(TimeOffset::from_ms(ms));
  return v;
}

std::vector<SweepRow> run_offset_sweep(const std::vector<TimeOffset>& offsets, const ReceiverProfile& receiver,
                                       std::size_t trials, std::uint64_t seed, const ScenarioOptions& options) {
  if (trials == 0) throw std::invalid_argument("offset sweep needs at least one trial");
  receiver.validate();
  const Rng root(seed);
  const Vec3 position = solver::geodetic_to_ecef(options.origin);
  const Duration minute = Duration::from_s(60);
  // Before the blockage the simulator runs as simulator 0 (synchronized),
  // afterwards as simulator 1 with the swept offset.
  const std::vector<SignalSegment> schedule{{Duration{}, minute, SourceKind::Simulator, 0},
                                            {minute, minute * 2, SourceKind::Blocked, 0},
                                            {minute * 2, minute * 3, SourceKind::Simulator, 1}};

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const TimeOffset offset = offsets[k];
    std::vector<double> reacq;
    std::vector<double> errors;
    double mean_sum = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      const Rng trial_rng = root.child("trial", trial);
      Rng sky_rng = trial_rng.child("sky");
      Rng noise = trial_rng.child("fix-noise", k);
      const solver::SatGeometry sky = solver::generate_sky(position, sky_rng, options.sky);
      auto eps = [&](std::size_t sim, Duration) { return sim == 1 ? offset : TimeOffset{}; };
      const ScenarioResult r = run_schedule(schedule, receiver, ReceiverState::cold(receiver), sky, position, eps, 2,
                                            noise, options);
      const auto& cov = r.coverages[1];
      if (!cov.first_fix_latency || !cov.stats) continue;
      reacq.push_back(cov.first_fix_latency->seconds());
      mean_sum += cov.stats->average;
      for (const auto& f : r.fixes) {
        if (f.source == 1) errors.push_back(f.horizontal_error_m);
      }
    }
    SweepRow row;
    row.offset = offset;
    if (!reacq.empty()) {
      const ErrorStats rs = compute_error_stats(reacq);
      row.mean_reacq_s = rs.average;
      row.reacq_stddev_s = rs.stddev;
      row.mean_error_m = mean_sum / static_cast<double>(reacq.size());
      row.error_stddev_m = compute_error_stats(errors).stddev;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

ScenarioResult static_handover_trial(const ClockConfig& clock, const ReceiverProfile& receiver, const Rng& trial_rng,
                                     const ScenarioOptions& options) {
  const Vec3 position = solver::geodetic_to_ecef(options.origin);
  const Duration live = Duration::from_s(30);
  const Duration blocked = Duration::from_s(30);
  const Duration sim = Duration::from_s(20);
  const std::vector<SignalSegment> schedule{{Duration{}, live, SourceKind::LiveSky, 0},
                                            {live, live + blocked, SourceKind::Blocked, 0},
                                            {live + blocked, live + blocked + sim, SourceKind::Simulator, 0}};
  Rng sky_rng = trial_rng.child("sky");
  Rng noise = trial_rng.child("fix-noise");
  const solver::SatGeometry sky = solver::generate_sky(position, sky_rng, options.sky);
  const ClockTrack track = make_clock_track(options.clocks, clock, live + blocked + sim, trial_rng.child("clock", 0));
  auto eps = [&](std::size_t, Duration t) { return track.error_at(t); };
  ScenarioResult r =
      run_schedule(schedule, receiver, ReceiverState::tracking(), sky, position, eps, 1, noise, options);
  r.name = "static";
  r.clock = clock;
  return r;
}

}  // namespace

ScenarioResult run_static_handover(const ClockConfig& clock, const ReceiverProfile& receiver, std::uint64_t seed,
                                   const ScenarioOptions& options) {
  receiver.validate();
  ScenarioResult r = static_handover_trial(clock, receiver, Rng(seed).child("trial", 0), options);
  r.seed = seed;
  return r;
}

std::vector<HandoverSummary> run_static_handover_batch(const std::vector<ClockConfig>& configs,
                                                       const ReceiverProfile& receiver, std::size_t trials,
                                                       std::uint64_t seed, const ScenarioOptions& options) {
  if (trials == 0) throw std::invalid_argument("handover batch needs at least one trial");
  receiver.validate();
  const Rng root(seed);
  std::vector<HandoverSummary> out;
  for (const auto& clock : configs) {
    std::vector<double> errors;
    for (std::size_t i = 0; i < trials; ++i) {
      const ScenarioResult r = static_handover_trial(clock, receiver, root.child("trial", i), options);
      for (const auto& f : r.fixes) {
        if (f.source == 0) errors.push_back(f.horizontal_error_m);
      }
    }
    out.push_back(HandoverSummary{clock, compute_error_stats(errors), trials});
  }
  return out;
}

// ---------------------------------------------------------------------------

PathScenario PathScenario::drive() { return PathScenario{}; }

PathScenario PathScenario::pedestrian() {
  PathScenario p;
  p.name = "pedestrian";
  p.path_length_m = 1000.0;
  p.tunnel_start_m = 100.0;
  p.tunnel_end_m = 900.0;
  p.simulator_positions = {200.0, 500.0, 800.0};
  p.coverage_radius_m = 80.0;
  p.speed = placement::SpeedProfile::constant(placement::Speed::from_mps(1.4));
  p.receiver = receiver::ReceiverProfile::smartphone();
  return p;
}

placement::TimingProfile PathScenario::timing() const {
  return placement::TimingProfile{receiver.t_reacq_base.seconds(), receiver.t_max.seconds(), receiver.t_acq.seconds()};
}

void PathScenario::validate() const {
  receiver.validate();
  if (simulator_positions.empty()) throw std::invalid_argument("path scenario needs at least one simulator");
  if (coverage_radius_m <= 0.0) throw std::invalid_argument("coverage radius must be positive");
  if (!std::is_sorted(simulator_positions.begin(), simulator_positions.end())) {
    throw std::invalid_argument("simulator positions must be sorted along the path");
  }
  for (std::size_t i = 1; i < simulator_positions.size(); ++i) {
    if (simulator_positions[i] - simulator_positions[i - 1] < 2.0 * coverage_radius_m) {
      throw OverlappingCoverage("coverages " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap");
    }
  }
  if (!(0.0 <= tunnel_start_m && tunnel_start_m < tunnel_end_m && tunnel_end_m <= path_length_m)) {
    throw std::invalid_argument("tunnel must lie inside the path");
  }
  if (simulator_positions.front() - coverage_radius_m <= tunnel_start_m ||
      simulator_positions.back() + coverage_radius_m >= tunnel_end_m) {
    throw std::invalid_argument("coverages must lie strictly inside the tunnel");
  }
  if (speed.segments().empty()) throw std::invalid_argument("speed profile is empty");
  for (const auto& seg : speed.segments()) {
    if (seg.speed.mps() <= 0.0) throw ZeroSpeed("path speed must be positive");
  }
}

ScenarioResult run_dynamic_traversal(const PathScenario& path, const ClockConfig& clock, std::uint64_t seed,
                                     const ScenarioOptions& options) {
  path.validate();
  require_dt(options.dt);
  if (path.strict) {
    const auto report = placement::validate_deployment(path.simulator_positions, path.coverage_radius_m, path.speed,
                                                       path.timing());
    if (!report.ok) throw InfeasibleDeployment("layout cannot guarantee handover at the posted speeds");
  }

  const Rng root = Rng(seed).child("trial", 0);
  Rng sky_rng = root.child("sky");
  Rng noise = root.child("fix-noise");
  const Vec3 origin = solver::geodetic_to_ecef(options.origin);
  const double heading = path.heading_deg * std::numbers::pi / 180.0;
  const Vec3 dir(std::sin(heading), std::cos(heading), 0.0);
  auto point_at = [&](double s) { return origin + solver::enu_to_ecef_offset(origin, dir * s); };

  const solver::SatGeometry sky = solver::generate_sky(origin, sky_rng, options.sky);

  // Upper bound on travel time for the clock tracks.
  double travel_s = 0.0;
  {
    double s = 0.0;
    while (s < path.path_length_m) {
      s += path.speed.at(s).mps() * options.dt.seconds();
      travel_s += options.dt.seconds();
    }
  }
  const Duration window = Duration::from_seconds(travel_s) + Duration::from_s(1);
  std::vector<ClockTrack> tracks;
  std::vector<Vec3> intended;
  for (std::size_t k = 0; k < path.simulator_positions.size(); ++k) {
    tracks.push_back(make_clock_track(options.clocks, clock, window, root.child("clock", k)));
    intended.push_back(point_at(path.simulator_positions[k]));
  }

  ScenarioResult out;
  out.name = path.name;
  out.clock = clock;
  out.seed = seed;
  // Driving in from outside, already tracking the live sky.
  Runner runner(path.receiver, ReceiverState::tracking(), path.simulator_positions.size(), options.dt, out);

  const double r = path.coverage_radius_m;
  double s = 0.0;
  while (s < path.path_length_m) {
    const Duration t = runner.now();
    int source = kNoSignal;
    TimeOffset eps{};
    if (s < path.tunnel_start_m || s > path.tunnel_end_m) {
      source = kLiveSky;
    } else {
      for (std::size_t k = 0; k < path.simulator_positions.size(); ++k) {
        if (std::abs(s - path.simulator_positions[k]) <= r) {
          source = static_cast<int>(k);
          eps = tracks[k].error_at(t);
          break;
        }
      }
    }
    const Vec3 truth = point_at(s);
    if (runner.advance(source, eps)) {
      FixRecord f;
      f.time = runner.now();
      f.source = source;
      if (source == kLiveSky) {
        f.position = live_sky_fix(truth, options.live_sky_sigma_m, noise);
        f.horizontal_error_m = solver::horizontal_error(f.position, truth);
      } else {
        const auto& target = intended[static_cast<std::size_t>(source)];
        const auto sol = simulated_fix(sky, target, eps, path.receiver.pseudorange_noise_m, noise);
        f.position = sol.position;
        f.clock_bias = sol.clock_bias;
        f.horizontal_error_m = solver::horizontal_error(f.position, target);
      }
      out.fixes.push_back(f);
    }
    s += path.speed.at(s).mps() * options.dt.seconds();
  }
  finish_coverage_stats(out);
  return out;
}

std::vector<TraversalSummary> run_dynamic_batch(const PathScenario& path, const std::vector<ClockConfig>& configs,
                                                std::size_t runs, std::uint64_t seed,
                                                const ScenarioOptions& options) {
  if (runs == 0) throw std::invalid_argument("traversal batch needs at least one run");
  std::vector<TraversalSummary> out;
  for (const auto& clock : configs) {
    TraversalSummary sum{clock, {}, runs, true, {}, {}};
    std::vector<double> errors;
    for (std::size_t i = 0; i < runs; ++i) {
      const ScenarioResult r = run_dynamic_traversal(path, clock, derive_seed(seed, "run", i), options);
      for (const auto& f : r.fixes) {
        if (f.source >= 0) errors.push_back(f.horizontal_error_m);
      }
      for (const auto& c : r.coverages) {
        sum.all_handovers = sum.all_handovers && c.handover_success;
        if (c.first_fix_latency) sum.worst_first_fix = max(sum.worst_first_fix, *c.first_fix_latency);
      }
      if (i == 0) sum.first_run = r;
    }
    if (errors.empty()) throw EmptyFixSet("no simulator fixes in any traversal run");
    sum.pooled = compute_error_stats(errors);
    out.push_back(sum);
  }
  return out;
}

// ---------------------------------------------------------------------------

OutdoorComparison run_outdoor_comparison(std::uint64_t seed, const ReceiverProfile& receiver, std::size_t trials,
                                         double coverage_radius_m, const ScenarioOptions& options) {
  if (trials == 0) throw std::invalid_argument("outdoor comparison needs at least one trial");
  receiver.validate();
  const Rng root(seed);
  const Vec3 origin = solver::geodetic_to_ecef(options.origin);
  // Three test points a few hundred meters apart.
  const Vec3 offsets[] = {Vec3(0.0, 0.0, 0.0), Vec3(250.0, 120.0, 0.0), Vec3(-180.0, 300.0, 0.0)};
  const Duration window = Duration::from_s(5);
  const std::size_t fixes_per_window =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window.seconds() * receiver.pos_rate_hz)));
  const ClockConfig clock{ntp::ServerType::Private, true};

  std::vector<double> live;
  std::vector<double> sim;
  for (std::size_t p = 0; p < std::size(offsets); ++p) {
    const Vec3 point = origin + solver::enu_to_ecef_offset(origin, offsets[p]);
    for (std::size_t i = 0; i < trials; ++i) {
      const Rng trial_rng = root.child("point", p).child("trial", i);
      Rng sky_rng = trial_rng.child("sky");
      Rng noise = trial_rng.child("fix-noise");
      const solver::SatGeometry sky = solver::generate_sky(point, sky_rng, options.sky);
      const ClockTrack track = make_clock_track(options.clocks, clock, window, trial_rng.child("clock", 0));
      for (std::size_t j = 0; j < fixes_per_window; ++j) {
        const Duration t = Duration::from_seconds(static_cast<double>(j) / receiver.pos_rate_hz);
        live.push_back(solver::horizontal_error(live_sky_fix(point, options.live_sky_sigma_m, noise), point));
        const auto sol = simulated_fix(sky, point, track.error_at(t), receiver.pseudorange_noise_m, noise);
        sim.push_back(solver::horizontal_error(sol.position, point));
      }
    }
  }
  OutdoorComparison c;
  c.live_sky = compute_error_stats(live);
  c.simulated = compute_error_stats(sim);
  c.coverage_radius_m = coverage_radius_m;
  c.serves_purpose = c.live_sky.average < coverage_radius_m && c.simulated.average < coverage_radius_m;
  return c;
}

std::optional<ErrorStats> simulator_fix_stats(const ScenarioResult& result) {
  std::vector<double> errs;
  for (const auto& f : result.fixes) {
    if (f.source >= 0) errs.push_back(f.horizontal_error_m);
  }
  if (errs.empty()) return std::nullopt;
  return compute_error_stats(errs);
}

}  // namespace gpssim::scenario
