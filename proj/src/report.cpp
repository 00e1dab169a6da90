#include "gpssim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace gpssim::report {

using ojson = nlohmann::ordered_json;

namespace {

double r6(double x) {
  const double v = std::round(x * 1e6) / 1e6;
  return v == 0.0 ? 0.0 : v;  // no "-0.0"
}

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ojson stats_json(const ErrorStats& s) {
  return ojson{{"count", s.count},
               {"average_m", r6(s.average)},
               {"stddev_m", r6(s.stddev)},
               {"sample_stddev_m", r6(s.sample_stddev)},
               {"rms_m", r6(s.rms)},
               {"p95_m", r6(s.p95)},
               {"max_m", r6(s.max)}};
}

ojson timing_json(const placement::TimingProfile& t) {
  return ojson{{"t_reacq_s", r6(t.t_reacq)}, {"t_max_s", r6(t.t_max)}, {"t_acq_s", r6(t.t_acq)}};
}

}  // namespace

// ---------------------------------------------------------------------------

PlanReport build_plan(const config::DeploymentSpec& d) {
  d.timing.validate();
  PlanReport p;
  p.timing = d.timing;
  p.v_max = d.v_max;
  p.coverage_radius_m = d.coverage_radius_m;
  const auto& pos = d.simulator_positions_m;
  if (d.separation_m) {
    p.separation_m = *d.separation_m;
  } else if (pos.size() >= 2) {
    for (std::size_t i = 1; i < pos.size(); ++i) p.separation_m = std::max(p.separation_m, pos[i] - pos[i - 1]);
  } else {
    p.separation_m = placement::max_separation(d.coverage_radius_m, d.timing);
  }
  p.min_coverage_radius_m = placement::min_coverage_radius(d.v_max, d.timing.t_reacq);
  p.max_separation_m = placement::max_separation(d.coverage_radius_m, d.timing);
  p.slow_path_speed = placement::slow_path_speed(d.coverage_radius_m, d.timing);
  p.separation_bound_radius_m = placement::separation_bound_radius(p.separation_m, d.timing);
  p.combined_min_radius_m = placement::min_radius_for_separation(p.separation_m, d.timing, d.v_max);
  p.validation = placement::validate_deployment(pos, d.coverage_radius_m, d.speed_profile(), d.timing);

  std::vector<double> speeds = d.curve_speeds_kmh;
  if (speeds.empty()) {
    for (int v = 1; v <= 150; ++v) speeds.push_back(v);
  }
  p.reception = placement::reception_curves(d.curve_radii_m, speeds, d.timing);
  p.blockage = placement::blockage_curves(d.coverage_radius_m, d.curve_separations_m, speeds, d.timing);
  return p;
}

std::string plan_json(const PlanReport& p) {
  ojson cov = ojson::array();
  for (const auto& c : p.validation.coverages) {
    cov.push_back(ojson{{"index", c.index},
                        {"center_m", r6(c.center_m)},
                        {"v_limit_kmh", r6(c.v_limit.kmh())},
                        {"min_reception_time_s", r6(c.min_reception_time)},
                        {"ok", c.ok},
                        {"reason", c.reason},
                        {"suggested_min_r_m", r6(c.suggested_min_r)}});
  }
  ojson gaps = ojson::array();
  for (const auto& g : p.validation.gaps) {
    ojson gj{{"index", g.index},
             {"separation_m", r6(g.separation_m)},
             {"v_limit_kmh", r6(g.v_limit.kmh())},
             {"ok", g.ok},
             {"reason", g.reason},
             {"max_separation_m", r6(g.max_separation_m)},
             {"suggested_min_r_m", r6(g.suggested_min_r)}};
    if (!g.ok) gj["worst_speed_kmh"] = r6(g.worst_speed.kmh());
    gaps.push_back(gj);
  }
  ojson j;
  j["plan"] = ojson{{"timing", timing_json(p.timing)},
                    {"v_max_kmh", r6(p.v_max.kmh())},
                    {"coverage_radius_m", r6(p.coverage_radius_m)},
                    {"separation_m", r6(p.separation_m)},
                    {"min_coverage_radius_m", r6(p.min_coverage_radius_m)},
                    {"max_separation_m", r6(p.max_separation_m)},
                    {"slow_path_speed_kmh", r6(p.slow_path_speed.kmh())},
                    {"slow_path_speed_mps", r6(p.slow_path_speed.mps())},
                    {"separation_bound_radius_m", r6(p.separation_bound_radius_m)},
                    {"combined_min_radius_m", r6(p.combined_min_radius_m)},
                    {"feasible", p.validation.ok},
                    {"coverages", cov},
                    {"gaps", gaps}};
  return dump(j);
}

std::string plan_csv(const PlanReport& p) {
  std::ostringstream os;
  os << "quantity,value,unit\n";
  auto row = [&](const char* q, double v, const char* unit) { os << q << ',' << fixed(v, 1) << ',' << unit << '\n'; };
  row("v_max", p.v_max.kmh(), "km/h");
  row("coverage_radius", p.coverage_radius_m, "m");
  row("separation", p.separation_m, "m");
  row("min_coverage_radius", p.min_coverage_radius_m, "m");
  row("max_separation", p.max_separation_m, "m");
  row("slow_path_speed", p.slow_path_speed.kmh(), "km/h");
  row("separation_bound_radius", p.separation_bound_radius_m, "m");
  row("combined_min_radius", p.combined_min_radius_m, "m");
  os << "feasible," << (p.validation.ok ? "true" : "false") << ",\n";
  return os.str();
}

std::string curves_csv(std::span<const placement::CurvePoint> points, const std::string& parameter) {
  std::ostringstream os;
  os << "v_kmh," << parameter << "_m,time_s,feasible\n";
  for (const auto& c : points) {
    os << fixed(c.v_kmh, 3) << ',' << fixed(c.parameter_m, 3) << ',' << fixed(c.time_s, 6) << ','
       << (c.feasible ? 1 : 0) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

std::string static_json(const std::string& name, std::uint64_t seed, std::span<const scenario::HandoverSummary> rows) {
  ojson configs = ojson::array();
  for (const auto& r : rows) {
    configs.push_back(ojson{{"clock", r.clock.label()},
                            {"trials", r.trials},
                            {"max_position_error_m", r6(r.pooled.max)},
                            {"p95_position_error_m", r6(r.pooled.p95)},
                            {"stats", stats_json(r.pooled)}});
  }
  ojson j{{"scenario", name}, {"type", "static"}, {"seed", seed}, {"results", configs}};
  return dump(j);
}

std::string static_csv(std::span<const scenario::HandoverSummary> rows) {
  std::ostringstream os;
  os << "clock,trials,fixes,max_m,p95_m,average_m\n";
  for (const auto& r : rows) {
    os << r.clock.label() << ',' << r.trials << ',' << r.pooled.count << ',' << fixed(r.pooled.max, 3) << ','
       << fixed(r.pooled.p95, 3) << ',' << fixed(r.pooled.average, 3) << '\n';
  }
  return os.str();
}

std::string traversal_json(const std::string& name, std::uint64_t seed,
                           std::span<const scenario::TraversalSummary> rows) {
  ojson configs = ojson::array();
  for (const auto& r : rows) {
    ojson cov = ojson::array();
    for (const auto& c : r.first_run.coverages) {
      ojson cj{{"index", c.index},
               {"handover_success", c.handover_success},
               {"entry_time_s", r6(c.entry_time.seconds())},
               {"entry_offset_ms", r6(c.entry_offset.millis())},
               {"realized_blockage_s", r6(c.realized_blockage.seconds())},
               {"latched_target_s", r6(c.latched_target.seconds())}};
      cj["first_fix_latency_s"] = c.first_fix_latency ? ojson(r6(c.first_fix_latency->seconds())) : ojson(nullptr);
      cj["stats"] = c.stats ? stats_json(*c.stats) : ojson(nullptr);
      cov.push_back(cj);
    }
    configs.push_back(ojson{{"clock", r.clock.label()},
                            {"runs", r.runs},
                            {"all_handovers", r.all_handovers},
                            {"worst_first_fix_s", r6(r.worst_first_fix.seconds())},
                            {"stats", stats_json(r.pooled)},
                            {"first_run_coverages", cov}});
  }
  ojson j{{"scenario", name}, {"type", "traversal"}, {"seed", seed}, {"results", configs}};
  return dump(j);
}

std::string traversal_csv(std::span<const scenario::TraversalSummary> rows) {
  std::ostringstream os;
  os << "clock,runs,fixes,average_m,stddev_m,rms_m,all_handovers,worst_first_fix_s\n";
  for (const auto& r : rows) {
    os << r.clock.label() << ',' << r.runs << ',' << r.pooled.count << ',' << fixed(r.pooled.average, 3) << ','
       << fixed(r.pooled.stddev, 3) << ',' << fixed(r.pooled.rms, 3) << ',' << (r.all_handovers ? "true" : "false")
       << ',' << fixed(r.worst_first_fix.seconds(), 3) << '\n';
  }
  return os.str();
}

std::string fixes_csv(const scenario::ScenarioResult& result, const solver::Vec3& origin) {
  const Eigen::Matrix3d rot = solver::ecef_to_enu_rotation(origin);
  std::ostringstream os;
  os << "t_s,source,east_m,north_m,horizontal_error_m,clock_bias_ms\n";
  for (const auto& f : result.fixes) {
    const solver::Vec3 enu = rot * (f.position - origin);
    os << fixed(f.time.seconds(), 3) << ',' << (f.source == scenario::kLiveSky ? std::string("live") : std::to_string(f.source))
       << ',' << fixed(enu.x(), 3) << ',' << fixed(enu.y(), 3) << ',' << fixed(f.horizontal_error_m, 3) << ','
       << fixed(f.clock_bias.millis(), 6) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

std::string sweep_json(const std::string& name, std::uint64_t seed, std::span<const SweepTable> tables) {
  ojson t = ojson::array();
  for (const auto& tab : tables) {
    ojson rows = ojson::array();
    for (const auto& r : tab.rows) {
      rows.push_back(ojson{{"offset_ms", r6(r.offset.millis())},
                           {"mean_reacq_s", r6(r.mean_reacq_s)},
                           {"reacq_stddev_s", r6(r.reacq_stddev_s)},
                           {"mean_error_m", r6(r.mean_error_m)},
                           {"error_stddev_m", r6(r.error_stddev_m)}});
    }
    t.push_back(ojson{{"receiver", tab.receiver}, {"rows", rows}});
  }
  ojson j{{"scenario", name}, {"type", "sweep"}, {"seed", seed}, {"tables", t}};
  return dump(j);
}

std::string sweep_csv(std::span<const SweepTable> tables) {
  std::ostringstream os;
  os << "receiver,offset_ms,mean_reacq_s,reacq_stddev_s,mean_error_m,error_stddev_m\n";
  for (const auto& tab : tables) {
    for (const auto& r : tab.rows) {
      os << tab.receiver << ',' << fixed(r.offset.millis(), 3) << ',' << fixed(r.mean_reacq_s, 3) << ','
         << fixed(r.reacq_stddev_s, 3) << ',' << fixed(r.mean_error_m, 3) << ',' << fixed(r.error_stddev_m, 3) << '\n';
    }
  }
  return os.str();
}

std::string outdoor_json(const std::string& name, std::uint64_t seed, const scenario::OutdoorComparison& c) {
  ojson j{{"scenario", name},
          {"type", "outdoor"},
          {"seed", seed},
          {"live_sky", stats_json(c.live_sky)},
          {"simulated", stats_json(c.simulated)},
          {"coverage_radius_m", r6(c.coverage_radius_m)},
          {"serves_purpose", c.serves_purpose}};
  return dump(j);
}

std::string outdoor_csv(const scenario::OutdoorComparison& c) {
  std::ostringstream os;
  os << "signal,average_m,stddev_m,rms_m\n";
  os << "live_sky," << fixed(c.live_sky.average, 3) << ',' << fixed(c.live_sky.stddev, 3) << ','
     << fixed(c.live_sky.rms, 3) << '\n';
  os << "simulated," << fixed(c.simulated.average, 3) << ',' << fixed(c.simulated.stddev, 3) << ','
     << fixed(c.simulated.rms, 3) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

std::string calibration_json(const calibration::CalibrationResult& r) {
  ojson j;
  j["calibration"] = ojson{{"correction_ms", r6(r.correction.millis())},
                           {"sample_count", r.sample_count},
                           {"sample_stddev_ms", r6(r.sample_stddev.millis())},
                           {"residual_bound_ms", r6(r.residual_bound.millis())}};
  return dump(j);
}

std::string calibration_csv(const calibration::CalibrationResult& r) {
  std::ostringstream os;
  os << "correction_ms,sample_count,sample_stddev_ms,residual_bound_ms\n";
  os << fixed(r.correction.millis(), 6) << ',' << r.sample_count << ',' << fixed(r.sample_stddev.millis(), 6) << ','
     << fixed(r.residual_bound.millis(), 6) << '\n';
  return os.str();
}

std::string sync_json(std::uint64_t seed, std::span<const ntp::SyncComparisonRow> rows) {
  ojson cells = ojson::array();
  for (const auto& r : rows) {
    cells.push_back(ojson{{"connection_type", ntp::to_string(r.connection)},
                          {"server_type", ntp::to_string(r.server)},
                          {"est_max_ntp_error_ms", r6(r.est_max_ntp_error.millis())},
                          {"mean_true_offset_ms", r6(r.mean_truth_offset.millis())},
                          {"max_abs_true_offset_ms", r6(r.max_abs_truth.millis())},
                          {"bound_violations", r.bound_violations}});
  }
  ojson j{{"seed", seed}, {"cells", cells}};
  return dump(j);
}

}  // namespace gpssim::report
