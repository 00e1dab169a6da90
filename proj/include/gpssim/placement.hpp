#pragma once

/**
 * @file placement.hpp
 * @brief Coverage radius / separation constraints for simulators deployed
 *        along a tunnel, and validation of concrete layouts.
 *
 * A receiver moving at speed v spends t_rcp = 2r/v inside a coverage of
 * radius r and t_blk = (d - 2r)/v in the gap to the next one (centers d
 * apart). It gets a position update in a coverage when
 *
 *   t_reacq <= t_rcp   and   (t_blk <= t_max  or  v <= 2r / t_acq).
 *
 * Requiring this for every speed up to v_max gives
 *
 *   r >= v_max t_reacq / 2,      d <= 2r (1 + t_max / t_acq).
 *
 * All comparisons are inclusive.
 */

#include <string>
#include <vector>

namespace gpssim::placement {

/// Speed with explicit units; km/h converts by exactly 1000/3600.
class Speed {
 public:
  constexpr Speed() = default;
  static constexpr Speed from_mps(double mps) { return Speed(mps); }
  static constexpr Speed from_kmh(double kmh) { return Speed(kmh * 1000.0 / 3600.0); }
  constexpr double mps() const { return mps_; }
  constexpr double kmh() const { return mps_ * 3600.0 / 1000.0; }
  friend constexpr auto operator<=>(Speed, Speed) = default;

 private:
  constexpr explicit Speed(double mps) : mps_(mps) {}
  double mps_ = 0.0;
};

/// Receiver timing characteristics, seconds.
struct TimingProfile {
  double t_reacq = 5.0;
  double t_max = 135.0;
  double t_acq = 30.0;

  /// Smartphone-in-a-car case: 5 s reacquisition (with margin), 135 s, 30 s.
  static TimingProfile reference() { return {}; }
  /// Throws std::invalid_argument unless all positive and t_reacq <= t_acq.
  void validate() const;
};

struct DeploymentGeometry {
  double r = 80.0;
  double d = 500.0;
  Speed v_max = Speed::from_kmh(110.0);
  /// Throws std::invalid_argument for r <= 0 or v_max <= 0, and
  /// OverlappingCoverage for d < 2r.
  void validate() const;
};

/// 2r / v. Throws ZeroSpeed for v <= 0.
double reception_time(double r, Speed v);

/// v_max t_reacq / 2.
double min_coverage_radius(Speed v_max, double t_reacq);

/// (d - 2r) / v. Throws OverlappingCoverage for d < 2r, ZeroSpeed for v <= 0.
double blockage_time(double d, double r, Speed v);

/// 2r / t_acq: fastest speed at which a cold acquisition still completes
/// inside one coverage.
Speed slow_path_speed(double r, const TimingProfile& profile);

/// 2r (1 + t_max / t_acq).
double max_separation(double r, const TimingProfile& profile);

/// d / (2 (1 + t_max / t_acq)): the radius the separation alone demands.
double separation_bound_radius(double d, const TimingProfile& profile);

/// max(separation_bound_radius(d), min_coverage_radius(v_max)).
double min_radius_for_separation(double d, const TimingProfile& profile, Speed v_max);

struct UpdateCheck {
  bool ok = false;
  bool reception_ok = false;  ///< t_reacq <= t_rcp
  bool blockage_ok = false;   ///< t_blk <= t_max
  bool slow_path_ok = false;  ///< v <= 2r / t_acq
  std::string reason;         ///< empty when ok
};

/// Whether a receiver at speed v gets a fix in each coverage.
UpdateCheck can_update(Speed v, const DeploymentGeometry& geom, const TimingProfile& profile);

// ---------------------------------------------------------------------------
// Layout validation along a 1-D path coordinate

/// Piecewise-constant speed limit over the path coordinate s (meters).
class SpeedProfile {
 public:
  struct Segment {
    double start_m;
    Speed speed;
  };

  SpeedProfile() = default;
  static SpeedProfile constant(Speed v) { return SpeedProfile({{0.0, v}}); }
  /// Segments sorted by start; the first covers everything before its start too.
  explicit SpeedProfile(std::vector<Segment> segments);

  Speed at(double s) const;
  /// Highest limit over [a, b].
  Speed max_over(double a, double b) const;
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  std::vector<Segment> segments_;
};

struct CoverageCheck {
  std::size_t index = 0;
  double center_m = 0.0;
  Speed v_limit;
  double min_reception_time = 0.0;
  bool ok = false;
  std::string reason;
  double suggested_min_r = 0.0;
};

struct GapCheck {
  std::size_t index = 0;  ///< gap between coverage index and index + 1
  double separation_m = 0.0;
  Speed v_limit;
  bool ok = false;
  std::string reason;
  /// A failing speed when !ok (inside the window (2r/t_acq, (d-2r)/t_max)).
  Speed worst_speed;
  double max_separation_m = 0.0;
  double suggested_min_r = 0.0;
};

struct ValidationReport {
  bool ok = false;
  double r = 0.0;
  std::vector<CoverageCheck> coverages;
  std::vector<GapCheck> gaps;
};

/// Checks a layout for every speed up to the local limit. Coverage i spans
/// [x_i - r, x_i + r]. Throws std::invalid_argument for unsorted positions
/// or r <= 0 and OverlappingCoverage when adjacent centers are closer than 2r.
ValidationReport validate_deployment(const std::vector<double>& simulator_positions, double r,
                                     const SpeedProfile& speed_profile, const TimingProfile& profile);

// ---------------------------------------------------------------------------
// Curve data for reception/blockage-time plots

struct CurvePoint {
  double v_kmh;
  double parameter_m;  ///< r for reception curves, d for blockage curves
  double time_s;
  bool feasible;
};

/// t_rcp vs v for each radius; feasible when t_rcp >= t_reacq.
std::vector<CurvePoint> reception_curves(const std::vector<double>& radii, const std::vector<double>& speeds_kmh,
                                         const TimingProfile& profile);

/// t_blk vs v for each separation at radius r; feasible when the blockage
/// condition holds.
std::vector<CurvePoint> blockage_curves(double r, const std::vector<double>& separations,
                                        const std::vector<double>& speeds_kmh, const TimingProfile& profile);

}  // namespace gpssim::placement
