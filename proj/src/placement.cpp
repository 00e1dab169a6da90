#include "gpssim/placement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gpssim/error.hpp"

namespace gpssim::placement {
namespace {

// Inclusive comparison with slack for the last few bits of rounding, so that
// e.g. 19.2 km/h compares equal to 2 * 80 m / 30 s.
bool leq(double a, double b) { return a <= b + 1e-12 * std::max(std::abs(a), std::abs(b)); }

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

}  // namespace

void TimingProfile::validate() const {
  if (!(t_reacq > 0.0 && t_max > 0.0 && t_acq > 0.0)) {
    throw std::invalid_argument("timing profile values must be positive");
  }
  if (t_reacq > t_acq) throw std::invalid_argument("t_reacq must not exceed t_acq");
}

void DeploymentGeometry::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("coverage radius must be positive");
  if (!(v_max.mps() > 0.0)) throw std::invalid_argument("speed limit must be positive");
  if (d < 2.0 * r) throw OverlappingCoverage("separation " + fmt(d) + " m is below 2r = " + fmt(2.0 * r) + " m");
}

double reception_time(double r, Speed v) {
  if (!(v.mps() > 0.0)) throw ZeroSpeed("reception time needs a positive speed");
  return 2.0 * r / v.mps();
}

double min_coverage_radius(Speed v_max, double t_reacq) { return v_max.mps() * t_reacq / 2.0; }

double blockage_time(double d, double r, Speed v) {
  if (d < 2.0 * r) throw OverlappingCoverage("separation " + fmt(d) + " m is below 2r = " + fmt(2.0 * r) + " m");
  if (!(v.mps() > 0.0)) throw ZeroSpeed("blockage time needs a positive speed");
  return (d - 2.0 * r) / v.mps();
}

Speed slow_path_speed(double r, const TimingProfile& profile) { return Speed::from_mps(2.0 * r / profile.t_acq); }

double max_separation(double r, const TimingProfile& profile) {
  return 2.0 * r * (1.0 + profile.t_max / profile.t_acq);
}

double separation_bound_radius(double d, const TimingProfile& profile) {
  return d / (2.0 * (1.0 + profile.t_max / profile.t_acq));
}

double min_radius_for_separation(double d, const TimingProfile& profile, Speed v_max) {
  return std::max(separation_bound_radius(d, profile), min_coverage_radius(v_max, profile.t_reacq));
}

UpdateCheck can_update(Speed v, const DeploymentGeometry& geom, const TimingProfile& profile) {
  UpdateCheck c;
  const double t_rcp = reception_time(geom.r, v);
  const double t_blk = blockage_time(geom.d, geom.r, v);
  c.reception_ok = leq(profile.t_reacq, t_rcp);
  c.blockage_ok = leq(t_blk, profile.t_max);
  c.slow_path_ok = leq(v.mps(), slow_path_speed(geom.r, profile).mps());
  c.ok = c.reception_ok && (c.blockage_ok || c.slow_path_ok);

  std::string reason;
  if (!c.reception_ok) reason = "t_reacq > t_rcp";
  if (!(c.blockage_ok || c.slow_path_ok)) {
    if (!reason.empty()) reason += "; ";
    reason += "t_blk > t_max and v > 2r/t_acq";
  }
  c.reason = reason;
  return c;
}

// ---------------------------------------------------------------------------

SpeedProfile::SpeedProfile(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("speed profile needs at least one segment");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!(segments_[i].speed.mps() > 0.0)) throw ZeroSpeed("speed profile segments must have positive speed");
    if (i > 0 && segments_[i].start_m <= segments_[i - 1].start_m) {
      throw std::invalid_argument("speed profile segments must be sorted by start");
    }
  }
}

Speed SpeedProfile::at(double s) const {
  if (segments_.empty()) throw std::logic_error("empty speed profile");
  Speed v = segments_.front().speed;
  for (const auto& seg : segments_) {
    if (seg.start_m <= s) v = seg.speed;
  }
  return v;
}

Speed SpeedProfile::max_over(double a, double b) const {
  Speed v = at(a);
  for (const auto& seg : segments_) {
    if (seg.start_m > a && seg.start_m <= b) v = std::max(v, seg.speed);
  }
  return v;
}

ValidationReport validate_deployment(const std::vector<double>& positions, double r, const SpeedProfile& speed_profile,
                                     const TimingProfile& profile) {
  profile.validate();
  if (!(r > 0.0)) throw std::invalid_argument("coverage radius must be positive");
  if (!std::is_sorted(positions.begin(), positions.end())) {
    throw std::invalid_argument("simulator positions must be sorted");
  }
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (positions[i] - positions[i - 1] < 2.0 * r) {
      throw OverlappingCoverage("coverages " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap");
    }
  }

  ValidationReport report;
  report.r = r;
  report.ok = true;

  for (std::size_t i = 0; i < positions.size(); ++i) {
    CoverageCheck c;
    c.index = i;
    c.center_m = positions[i];
    c.v_limit = speed_profile.max_over(positions[i] - r, positions[i] + r);
    c.min_reception_time = reception_time(r, c.v_limit);
    c.ok = leq(profile.t_reacq, c.min_reception_time);
    c.suggested_min_r = min_coverage_radius(c.v_limit, profile.t_reacq);
    if (!c.ok) {
      c.reason = "t_reacq > t_rcp at " + fmt(c.v_limit.kmh(), 1) + " km/h (needs r >= " + fmt(c.suggested_min_r) + " m)";
      report.ok = false;
    }
    report.coverages.push_back(c);
  }

  const double slow = slow_path_speed(r, profile).mps();
  for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
    GapCheck g;
    g.index = i;
    g.separation_m = positions[i + 1] - positions[i];
    g.v_limit = speed_profile.max_over(positions[i] - r, positions[i + 1] + r);
    g.max_separation_m = max_separation(r, profile);
    g.suggested_min_r = min_radius_for_separation(g.separation_m, profile, g.v_limit);

    // Failing speeds: v > 2r/t_acq and (d - 2r)/v > t_max, capped by the limit.
    const double v_hi = std::min(g.v_limit.mps(), (g.separation_m - 2.0 * r) / profile.t_max);
    g.ok = leq(g.separation_m, g.max_separation_m) || leq(g.v_limit.mps(), slow) || leq(v_hi, slow);
    if (!g.ok) {
      g.worst_speed = Speed::from_mps(0.5 * (slow + v_hi));
      g.reason = "t_blk > t_max and v > 2r/t_acq";
      report.ok = false;
    }
    report.gaps.push_back(g);
  }
  return report;
}

// ---------------------------------------------------------------------------

std::vector<CurvePoint> reception_curves(const std::vector<double>& radii, const std::vector<double>& speeds_kmh,
                                         const TimingProfile& profile) {
  std::vector<CurvePoint> out;
  for (double r : radii) {
    for (double v : speeds_kmh) {
      const double t = reception_time(r, Speed::from_kmh(v));
      out.push_back({v, r, t, leq(profile.t_reacq, t)});
    }
  }
  return out;
}

std::vector<CurvePoint> blockage_curves(double r, const std::vector<double>& separations,
                                        const std::vector<double>& speeds_kmh, const TimingProfile& profile) {
  std::vector<CurvePoint> out;
  for (double d : separations) {
    for (double v : speeds_kmh) {
      const Speed speed = Speed::from_kmh(v);
      const double t = blockage_time(d, r, speed);
      const bool ok = leq(t, profile.t_max) || leq(speed.mps(), slow_path_speed(r, profile).mps());
      out.push_back({v, d, t, ok});
    }
  }
  return out;
}

}  // namespace gpssim::placement
