#include "gpssim/ntp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gpssim/error.hpp"

namespace gpssim::ntp {
namespace {

Duration jitter_sample(const Jitter& j, Rng& rng) {
  if (j.median <= Duration{}) return Duration{};
  return Duration::from_ns(std::llround(rng.lognormal(static_cast<double>(j.median.ns()), j.sigma)));
}

Duration clamp_non_negative(TimeOffset t) { return t < TimeOffset{} ? TimeOffset{} : t; }

void require_synchronized(const NtpNode& node, const char* what) {
  if (!node.synchronized()) {
    throw ServerUnsynchronized(std::string(what) + " is at stratum " + std::to_string(node.stratum) +
                               " and considered unsynchronized");
  }
}

void validate_chain(const NtpNode& root, std::span<const ChainHop> chain) {
  require_synchronized(root, "root server");
  int previous = root.stratum;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& node = chain[i].node;
    if (node.stratum <= previous) {
      throw ChainBroken("chain node " + std::to_string(i) + " has stratum " + std::to_string(node.stratum) +
                        ", not above its upstream stratum " + std::to_string(previous));
    }
    require_synchronized(node, "chain node");
    previous = node.stratum;
  }
}

}  // namespace

LinkDelays LinkModel::sample(Rng& rng) const {
  const Duration up_jitter = jitter_sample(jitter_up, rng);
  const Duration down_jitter = jitter_sample(jitter_down, rng);
  return LinkDelays{clamp_non_negative(base_delay_up + asymmetry_bias + up_jitter),
                    clamp_non_negative(base_delay_down + down_jitter)};
}

LinkDelays sample_path(std::span<const LinkModel> path, Rng& rng) {
  LinkDelays total{};
  for (const auto& link : path) {
    const auto d = link.sample(rng);
    total.up += d.up;
    total.down += d.down;
  }
  return total;
}

OffsetEstimate ntp_exchange(TimeOffset client_offset, const NtpNode& server, std::span<const LinkModel> path,
                            Rng& rng, Duration now) {
  require_synchronized(server, "server");
  const LinkDelays d = sample_path(path, rng);

  const TimeOffset t1 = now + client_offset;
  const TimeOffset t2 = now + d.up + server.clock_offset_truth;
  const TimeOffset t3 = t2;
  const TimeOffset t4 = now + d.up + d.down + client_offset;

  OffsetEstimate est;
  est.offset = ((t2 - t1) + (t3 - t4)) / 2;
  est.round_trip_delay = (t4 - t1) - (t3 - t2);
  est.timestamp = now;
  est.server_error_bound = server.advertised_error;
  return est;
}

ChainSyncResult sync_through_chain(const NtpNode& root, std::span<const ChainHop> chain,
                                   std::span<const LinkModel> client_path, Rng& rng, TimeOffset client_offset) {
  validate_chain(root, chain);

  ChainSyncResult result;
  result.hop_errors.push_back(root.clock_offset_truth);

  NtpNode upstream = root;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& hop = chain[i];
    Rng hop_rng = rng.child("chain-hop", i);
    const OffsetEstimate est = ntp_exchange(hop.node.clock_offset_truth, upstream, hop.link, hop_rng);
    const TimeOffset disciplined = hop.node.clock_offset_truth + est.offset;
    result.hop_errors.push_back(disciplined - upstream.clock_offset_truth);
    result.server_offsets.push_back(disciplined);

    NtpNode next = hop.node;
    next.clock_offset_truth = disciplined;
    next.advertised_error = est.error_bound();
    upstream = next;
  }

  Rng client_rng = rng.child("chain-client");
  result.client_estimate = ntp_exchange(client_offset, upstream, client_path, client_rng);
  result.total_error = result.client_estimate.offset + client_offset;
  result.hop_errors.push_back(result.total_error - upstream.clock_offset_truth);
  return result;
}

// ---------------------------------------------------------------------------

DisciplinedClock::DisciplinedClock(DisciplineConfig config, TimeOffset initial_offset, double frequency_error_ppm)
    : config_(config),
      frequency_error_ppm_(frequency_error_ppm),
      offset_(initial_offset),
      bound_(config.initial_error_bound) {
  if (config_.poll_interval <= Duration{}) throw std::invalid_argument("poll interval must be positive");
  if (config_.filter_length == 0) throw std::invalid_argument("filter length must be at least 1");
  if (!(config_.gain > 0.0 && config_.gain <= 1.0)) throw std::invalid_argument("gain must be in (0, 1]");
  refresh_bound();
}

Duration DisciplinedClock::drift_allowance(Duration age) const {
  const double ns = config_.drift_bound_ppm * 1e-6 * static_cast<double>(age.ns());
  return Duration::from_ns(static_cast<std::int64_t>(std::ceil(ns)) + 1);
}

Duration DisciplinedClock::sample_distance(const Sample& s) const {
  return s.estimate.round_trip_delay / 2 + drift_allowance(now_ - s.estimate.timestamp);
}

TimeOffset DisciplinedClock::filtered_offset() const {
  if (!selected_) return TimeOffset{};
  const Sample& s = history_[*selected_];
  return s.estimate.implied_client_offset() + (adjustment_ - s.adjustment_at);
}

void DisciplinedClock::update(const OffsetEstimate& estimate) {
  history_.push_back(Sample{estimate, adjustment_});
  if (history_.size() > config_.filter_length) history_.pop_front();

  std::size_t best = 0;
  for (std::size_t i = 1; i < history_.size(); ++i) {
    // Ties go to the newer sample.
    if (sample_distance(history_[i]) <= sample_distance(history_[best])) best = i;
  }
  selected_ = best;

  const double limit = config_.max_slew_ppm * 1e-6 * static_cast<double>(config_.poll_interval.ns());
  double correction = -config_.gain * static_cast<double>(filtered_offset().ns());
  correction = std::clamp(correction, -limit, limit);
  slew_remaining_ = TimeOffset::from_ns(std::llround(correction));
  slew_rate_ = static_cast<double>(slew_remaining_.ns()) / static_cast<double>(config_.poll_interval.ns());
  refresh_bound();
}

void DisciplinedClock::advance(Duration dt) {
  if (dt <= Duration{}) throw std::invalid_argument("dt must be positive");

  if (!slew_remaining_.is_zero()) {
    TimeOffset step = TimeOffset::from_ns(std::llround(slew_rate_ * static_cast<double>(dt.ns())));
    const bool overshoot = step.abs() >= slew_remaining_.abs() || (step.ns() > 0) != (slew_remaining_.ns() > 0);
    if (overshoot) step = slew_remaining_;
    offset_ += step;
    adjustment_ += step;
    slew_remaining_ -= step;
  }

  drift_residue_ += frequency_error_ppm_ * 1e-6 * static_cast<double>(dt.ns());
  const double whole = std::trunc(drift_residue_);
  if (whole != 0.0) {
    offset_ += TimeOffset::from_ns(static_cast<std::int64_t>(whole));
    drift_residue_ -= whole;
  }

  now_ += dt;
  refresh_bound();
}

void DisciplinedClock::refresh_bound() {
  if (!selected_) {
    bound_ = config_.initial_error_bound + drift_allowance(now_);
    return;
  }
  const Sample& s = history_[*selected_];
  const Duration sample_bound = s.estimate.error_bound() + drift_allowance(now_ - s.estimate.timestamp);
  bound_ = max(config_.error_floor, filtered_offset().abs() + sample_bound);
}

std::vector<ClockReport> discipline(DisciplinedClock& clock, const EstimateSource& source, std::size_t steps,
                                    Duration tick) {
  std::vector<ClockReport> out;
  out.reserve(steps);
  const Duration poll = clock.poll_interval();
  for (std::size_t i = 0; i < steps; ++i) {
    if ((clock.now() % poll).is_zero()) clock.update(source(clock));
    clock.advance(tick);
    out.push_back({clock.now(), clock.current_offset_truth(), clock.estimated_max_error()});
  }
  return out;
}

// ---------------------------------------------------------------------------

SyncTrajectory simulate_topology(const Topology& topology, Duration duration, Rng& rng) {
  validate_chain(topology.root, topology.chain);
  const auto& dc = topology.discipline;
  const double wander_ppm = static_cast<double>(topology.server_wander_step.ns()) * 1e-3;
  if (std::abs(topology.client_frequency_ppm) > dc.drift_bound_ppm ||
      std::abs(topology.server_frequency_ppm) + wander_ppm > dc.drift_bound_ppm) {
    throw std::invalid_argument("clock drift exceeds the discipline drift bound");
  }
  if (topology.client_initial_offset.abs() > dc.initial_error_bound) {
    throw std::invalid_argument("initial client offset exceeds the initial error bound");
  }

  const Duration tick = Duration::from_s(1);
  const Duration poll = dc.poll_interval;

  std::vector<DisciplinedClock> servers;
  servers.reserve(topology.chain.size());
  for (std::size_t i = 0; i < topology.chain.size(); ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    servers.emplace_back(dc, topology.chain[i].node.clock_offset_truth, sign * topology.server_frequency_ppm);
  }
  DisciplinedClock client(dc, topology.client_initial_offset, topology.client_frequency_ppm);

  std::vector<Rng> hop_rngs;
  std::vector<Rng> wander_rngs;
  for (std::size_t i = 0; i < topology.chain.size(); ++i) {
    hop_rngs.push_back(rng.child("hop-link", i));
    wander_rngs.push_back(rng.child("hop-wander", i));
  }
  Rng client_rng = rng.child("client-link");

  auto server_view = [&](std::size_t index) {
    // index == 0 is the root; index k > 0 is secondary k - 1.
    if (index == 0) return topology.root;
    NtpNode n = topology.chain[index - 1].node;
    n.clock_offset_truth = servers[index - 1].current_offset_truth();
    n.advertised_error = servers[index - 1].estimated_max_error();
    return n;
  };

  SyncTrajectory traj;
  const auto steps = static_cast<std::size_t>(duration / tick);
  traj.client.reserve(steps);
  const double w = static_cast<double>(topology.server_wander_step.ns());

  for (std::size_t step = 0; step < steps; ++step) {
    const Duration now = tick * static_cast<std::int64_t>(step);
    if ((now % poll).is_zero()) {
      for (std::size_t k = 0; k < servers.size(); ++k) {
        const NtpNode upstream = server_view(k);
        const LinkModel& link = topology.chain[k].link;
        servers[k].update(ntp_exchange(servers[k].current_offset_truth(), upstream, link, hop_rngs[k], now));
      }
      client.update(ntp_exchange(client.current_offset_truth(), server_view(servers.size()), topology.client_path,
                                 client_rng, now));
    }

    for (std::size_t k = 0; k < servers.size(); ++k) {
      servers[k].advance(tick);
      if (w > 0.0) {
        // Uniform step, rounded toward zero so |step| <= w.
        servers[k].perturb(TimeOffset::from_ns(static_cast<std::int64_t>(wander_rngs[k].uniform(-w, w))));
      }
      ++traj.checked_points;
      if (servers[k].current_offset_truth().abs() > servers[k].estimated_max_error()) ++traj.bound_violations;
    }
    client.advance(tick);
    ++traj.checked_points;
    if (client.current_offset_truth().abs() > client.estimated_max_error()) ++traj.bound_violations;
    traj.client.push_back({client.now(), client.current_offset_truth(), client.estimated_max_error()});
  }
  return traj;
}

// ---------------------------------------------------------------------------

std::string to_string(Connection c) { return c == Connection::Wired ? "wired" : "wireless"; }
std::string to_string(ServerType s) { return s == ServerType::Public ? "public" : "private"; }

SyncMatrixConfig SyncMatrixConfig::defaults() {
  using D = Duration;
  SyncMatrixConfig c;
  c.wired_access = LinkModel{D::from_us(550), D::from_us(550), Jitter{D::from_us(60), 0.8}, Jitter{D::from_us(60), 0.8},
                             D{}};
  c.wireless_access = LinkModel{D::from_ms(19), D::from_ms(17), Jitter{D::from_ms(3), 0.7},
                                Jitter{D::from_ms(2), 0.7}, D{}};
  c.public_path_wired =
      LinkModel{D::from_ms(5), D::from_ms(3), Jitter{D::from_ms(1), 0.8}, Jitter{D::from_ms(1), 0.8}, D{}};
  c.public_path_wireless =
      LinkModel{D::from_ms(75), D::from_ms(8), Jitter{D::from_ms(4), 0.8}, Jitter{D::from_ms(3), 0.8}, D{}};
  c.public_hop = LinkModel{D::from_ms(4), D::from_ms(3), Jitter{D::from_ms(1), 0.8}, Jitter{D::from_ms(1), 0.8}, D{}};
  return c;
}

Topology make_topology(const SyncMatrixConfig& config, Connection connection, ServerType server) {
  Topology t;
  t.root.stratum = 1;
  t.root.clock_offset_truth = config.reference_error;
  t.root.advertised_error = config.reference_error.abs();
  t.discipline = config.discipline;
  t.client_initial_offset = config.client_initial_offset;
  t.client_frequency_ppm = config.client_frequency_ppm;
  t.server_frequency_ppm = config.server_frequency_ppm;

  const LinkModel& access = connection == Connection::Wired ? config.wired_access : config.wireless_access;
  t.client_path.push_back(access);
  if (server == ServerType::Public) {
    t.client_path.push_back(connection == Connection::Wired ? config.public_path_wired : config.public_path_wireless);
    for (int i = 0; i < config.public_chain_depth; ++i) {
      NtpNode node;
      node.stratum = 2 + i;
      node.uplink = config.public_hop;
      t.chain.push_back(ChainHop{node, config.public_hop});
    }
    t.server_wander_step = config.public_wander_step;
  }
  return t;
}

std::vector<SyncComparisonRow> run_sync_comparison(const SyncMatrixConfig& config, std::uint64_t seed) {
  const Rng root(seed);
  std::vector<SyncComparisonRow> rows;
  const std::pair<Connection, ServerType> cells[] = {{Connection::Wired, ServerType::Public},
                                                     {Connection::Wired, ServerType::Private},
                                                     {Connection::Wireless, ServerType::Public},
                                                     {Connection::Wireless, ServerType::Private}};
  for (std::size_t i = 0; i < std::size(cells); ++i) {
    const auto [conn, type] = cells[i];
    Rng rng = root.child("sync-cell", i);
    const SyncTrajectory traj = simulate_topology(make_topology(config, conn, type), config.duration, rng);

    SyncComparisonRow row{conn, type, Duration{}, TimeOffset{}, Duration{}, traj.bound_violations};
    std::int64_t count = 0;
    std::int64_t sum = 0;
    for (const auto& r : traj.client) {
      if (r.time <= config.warmup) continue;
      row.est_max_ntp_error = max(row.est_max_ntp_error, r.estimated_max_error);
      row.max_abs_truth = max(row.max_abs_truth, r.offset_truth.abs());
      sum += r.offset_truth.ns();
      ++count;
    }
    if (count > 0) row.mean_truth_offset = TimeOffset::from_ns(static_cast<std::int64_t>(sum / count));
    rows.push_back(row);
  }
  return rows;
}

std::string sync_comparison_csv(std::span<const SyncComparisonRow> rows) {
  std::ostringstream os;
  os << "connection_type,server_type,est_max_ntp_error_ms\n";
  os.setf(std::ios::fixed);
  os.precision(3);
  for (const auto& r : rows) {
    os << to_string(r.connection) << ',' << to_string(r.server) << ',' << r.est_max_ntp_error.millis() << '\n';
  }
  return os.str();
}

}  // namespace gpssim::ntp
