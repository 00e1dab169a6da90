#pragma once

/**
 * @file ntp.hpp
 * @brief Simulated NTP synchronization between a reference server and a
 *        GPS simulator host, including secondary-server chains.
 *
 * Sign conventions: a clock's offset is (clock reading - reference time).
 * An exchange yields the four-timestamp correction
 *
 *     offset = ((T2 - T1) + (T3 - T4)) / 2
 *     delay  = (T4 - T1) - (T3 - T2)
 *
 * i.e. the amount to add to the client clock. For a perfect server and a
 * symmetric path this equals the negated client offset. Its error relative
 * to that ideal is server_offset + (up - down) / 2.
 */

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpssim/random.hpp"
#include "gpssim/time_offset.hpp"

namespace gpssim::ntp {

inline constexpr int kUnsynchronizedStratum = 16;

/// One-way delay jitter, log-normal with the given median and log-sigma.
/// A zero median disables jitter.
struct Jitter {
  Duration median{};
  double sigma = 0.0;
};

struct LinkDelays {
  Duration up;    ///< client -> server
  Duration down;  ///< server -> client
  Duration round_trip() const { return up + down; }
};

struct LinkModel {
  Duration base_delay_up{};
  Duration base_delay_down{};
  Jitter jitter_up{};
  Jitter jitter_down{};
  TimeOffset asymmetry_bias{};  ///< added to the uplink delay

  static LinkModel symmetric(Duration one_way) { return LinkModel{one_way, one_way, {}, {}, {}}; }
  static LinkModel fixed(Duration up, Duration down) { return LinkModel{up, down, {}, {}, {}}; }

  /// Draws one exchange's delays. Both are clamped at zero.
  LinkDelays sample(Rng& rng) const;
};

/// Delays of links traversed in series are summed per direction.
LinkDelays sample_path(std::span<const LinkModel> path, Rng& rng);

struct NtpNode {
  int stratum = 1;
  TimeOffset clock_offset_truth{};
  /// Error bound the node advertises to its clients (root dispersion).
  Duration advertised_error{};
  std::optional<LinkModel> uplink;

  bool synchronized() const { return stratum < kUnsynchronizedStratum; }
};

struct OffsetEstimate {
  TimeOffset offset{};            ///< correction to add to the client clock
  Duration round_trip_delay{};
  Duration timestamp{};           ///< simulation time of the exchange
  Duration server_error_bound{};  ///< server's advertised bound at that time

  /// The client offset this estimate implies, trusting the server.
  TimeOffset implied_client_offset() const { return -offset; }

  /// Worst-case |implied - true| given non-negative one-way delays.
  /// Includes 1 ns for the truncating halving.
  Duration error_bound() const {
    return (round_trip_delay + Duration::from_ns(1)) / 2 + server_error_bound + Duration::from_ns(1);
  }
};

/// Four-timestamp exchange between a client whose clock reads
/// `client_offset` ahead of reference and `server`.
/// Throws ServerUnsynchronized when server.stratum >= 16.
OffsetEstimate ntp_exchange(TimeOffset client_offset, const NtpNode& server, std::span<const LinkModel> path,
                            Rng& rng, Duration now = {});

inline OffsetEstimate ntp_exchange(TimeOffset client_offset, const NtpNode& server, const LinkModel& link, Rng& rng,
                                   Duration now = {}) {
  return ntp_exchange(client_offset, server, std::span<const LinkModel>(&link, 1), rng, now);
}

struct ChainHop {
  NtpNode node;
  LinkModel link;  ///< path from this node up to the previous one
};

struct ChainSyncResult {
  OffsetEstimate client_estimate;
  /// Error contributed at each hop (root truth first, then each secondary,
  /// then the client exchange). Sums to total_error.
  std::vector<TimeOffset> hop_errors;
  /// Correction error of the client estimate relative to reference time.
  TimeOffset total_error;
  /// Offsets of the secondary servers after being disciplined.
  std::vector<TimeOffset> server_offsets;
};

/// Synchronizes each secondary from its upstream in a single pass and then
/// takes the client's estimate from the last server. Throws ChainBroken when
/// strata are not strictly increasing or ServerUnsynchronized when a node is
/// at stratum 16.
ChainSyncResult sync_through_chain(const NtpNode& root, std::span<const ChainHop> chain,
                                   std::span<const LinkModel> client_path, Rng& rng,
                                   TimeOffset client_offset = {});

inline ChainSyncResult sync_through_chain(const NtpNode& root, std::span<const ChainHop> chain,
                                          const LinkModel& client_link, Rng& rng, TimeOffset client_offset = {}) {
  return sync_through_chain(root, chain, std::span<const LinkModel>(&client_link, 1), rng, client_offset);
}

// ---------------------------------------------------------------------------
// Clock discipline

struct DisciplineConfig {
  Duration poll_interval = Duration::from_s(16);
  /// Fraction of the filtered offset corrected per poll.
  double gain = 0.5;
  /// Slew-rate limit of the steering, parts per million.
  double max_slew_ppm = 500.0;
  /// Assumed worst-case frequency error plus wander, used to grow the bound
  /// between measurements. Must cover the true drift for an honest bound.
  double drift_bound_ppm = 5.0;
  /// Samples retained by the minimum-distance clock filter.
  std::size_t filter_length = 8;
  Duration error_floor = Duration::from_us(1);
  Duration initial_error_bound = Duration::from_s(1);
};

/// Simulated client clock steered toward offset estimates.
///
/// Each poll stores the estimate, selects the retained sample with the
/// smallest distance (half delay plus aged dispersion), and slews a fraction
/// of its offset out over the next poll interval. The maximum-error estimate
/// is |remaining filtered offset| + sample error bound + drift since the
/// sample, so it bounds the true offset whenever the server's advertised
/// bound does and the true drift stays below drift_bound_ppm.
class DisciplinedClock {
 public:
  struct Sample {
    OffsetEstimate estimate;
    Duration adjustment_at;  ///< cumulative adjustment when measured
  };

  explicit DisciplinedClock(DisciplineConfig config = {}, TimeOffset initial_offset = {},
                            double frequency_error_ppm = 0.0);

  const DisciplineConfig& config() const { return config_; }
  TimeOffset current_offset_truth() const { return offset_; }
  Duration estimated_max_error() const { return bound_; }
  Duration poll_interval() const { return config_.poll_interval; }
  Duration now() const { return now_; }
  const std::deque<Sample>& history() const { return history_; }
  /// Filtered estimate of the current offset (zero before the first poll).
  TimeOffset filtered_offset() const;

  /// Feeds one exchange taken at now().
  void update(const OffsetEstimate& estimate);

  /// Advances the clock by dt: applies slewing and drift, refreshes the bound.
  void advance(Duration dt);

  /// Externally imposed offset change not seen by the discipline (wander).
  /// The caller is responsible for keeping it inside drift_bound_ppm.
  void perturb(TimeOffset delta) { offset_ += delta; }

 private:
  void refresh_bound();
  Duration sample_distance(const Sample& s) const;
  Duration drift_allowance(Duration age) const;

  DisciplineConfig config_;
  double frequency_error_ppm_;
  TimeOffset offset_;
  Duration now_{};
  Duration bound_;
  TimeOffset adjustment_{};  ///< cumulative correction applied so far
  TimeOffset slew_remaining_{};
  double slew_rate_ = 0.0;  ///< ns of correction per ns of time
  double drift_residue_ = 0.0;
  std::deque<Sample> history_;
  std::optional<std::size_t> selected_;
};

struct ClockReport {
  Duration time;
  TimeOffset offset_truth;
  Duration estimated_max_error;
};

/// Produces the estimate for the clock's current state at a poll instant.
using EstimateSource = std::function<OffsetEstimate(const DisciplinedClock&)>;

/// Runs the discipline loop for `steps` ticks of `tick`, polling `source`
/// every poll interval (including t = 0). Returns one report per tick,
/// taken after the tick's update.
std::vector<ClockReport> discipline(DisciplinedClock& clock, const EstimateSource& source, std::size_t steps,
                                    Duration tick = Duration::from_s(1));

// ---------------------------------------------------------------------------
// Network simulation

struct Topology {
  NtpNode root;  ///< stratum-1 server; clock_offset_truth plays the reference error
  std::vector<ChainHop> chain;
  std::vector<LinkModel> client_path;
  /// Secondary-server wander: each second the offset moves by a uniform
  /// step in [-w, w].
  Duration server_wander_step{};
  DisciplineConfig discipline{};
  TimeOffset client_initial_offset{};
  double client_frequency_ppm = 0.0;
  double server_frequency_ppm = 0.0;
};

struct SyncTrajectory {
  std::vector<ClockReport> client;
  /// Number of (node, tick) pairs where |truth| exceeded the bound.
  std::size_t bound_violations = 0;
  std::size_t checked_points = 0;
};

/// Simulates the topology at 1 s ticks for `duration`. Each secondary polls
/// its upstream and the client polls the last server. Throws ChainBroken or
/// ServerUnsynchronized for invalid topologies.
SyncTrajectory simulate_topology(const Topology& topology, Duration duration, Rng& rng);

// ---------------------------------------------------------------------------
// Connection/server comparison matrix

enum class Connection { Wired, Wireless };
enum class ServerType { Public, Private };

std::string to_string(Connection c);
std::string to_string(ServerType s);

struct SyncMatrixConfig {
  LinkModel wired_access;
  LinkModel wireless_access;
  /// Extra path from each access network to a public pool server.
  LinkModel public_path_wired;
  LinkModel public_path_wireless;
  /// Path between successive public servers.
  LinkModel public_hop;
  int public_chain_depth = 2;
  Duration public_wander_step = Duration::from_ns(500);
  Duration reference_error = Duration::from_ns(200);
  DisciplineConfig discipline;
  double client_frequency_ppm = 1.0;
  double server_frequency_ppm = 0.5;
  TimeOffset client_initial_offset = TimeOffset::from_ms(100);
  Duration duration = Duration::from_s(7200);
  Duration warmup = Duration::from_s(600);

  /// Defaults tuned so the four cells land near 1 / 15 / 20 / 75 ms.
  static SyncMatrixConfig defaults();
};

/// Builds the topology of one matrix cell.
Topology make_topology(const SyncMatrixConfig& config, Connection connection, ServerType server);

struct SyncComparisonRow {
  Connection connection;
  ServerType server;
  Duration est_max_ntp_error;   ///< maximum bound after warm-up
  TimeOffset mean_truth_offset; ///< mean true offset after warm-up
  Duration max_abs_truth;       ///< maximum |true offset| after warm-up
  std::size_t bound_violations;
};

/// Runs the four cells (wired/wireless x public/private), each with its own
/// derived stream.
std::vector<SyncComparisonRow> run_sync_comparison(const SyncMatrixConfig& config, std::uint64_t seed);

/// CSV with header connection_type,server_type,est_max_ntp_error_ms.
std::string sync_comparison_csv(std::span<const SyncComparisonRow> rows);

}  // namespace gpssim::ntp
