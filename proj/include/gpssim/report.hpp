#pragma once

/**
 * @file report.hpp
 * @brief JSON and CSV rendering of run results.
 *
 * Output is a pure function of the input values: fixed key order, fixed
 * decimal places in CSV, and JSON numbers rounded to 1e-6 so reruns are
 * byte-identical.
 */

#include <span>
#include <string>
#include <vector>

#include "gpssim/config.hpp"
#include "gpssim/delay_calibration.hpp"
#include "gpssim/ntp.hpp"
#include "gpssim/placement.hpp"
#include "gpssim/scenario.hpp"

namespace gpssim::report {

struct PlanReport {
  placement::TimingProfile timing;
  placement::Speed v_max;
  double coverage_radius_m = 0.0;
  double separation_m = 0.0;
  double min_coverage_radius_m = 0.0;     ///< v_max t_reacq / 2
  double max_separation_m = 0.0;          ///< at the configured radius
  placement::Speed slow_path_speed;       ///< 2r / t_acq
  double separation_bound_radius_m = 0.0; ///< for separation_m
  double combined_min_radius_m = 0.0;
  placement::ValidationReport validation;
  std::vector<placement::CurvePoint> reception;
  std::vector<placement::CurvePoint> blockage;
};

/// Throws OverlappingCoverage / std::invalid_argument for broken layouts.
PlanReport build_plan(const config::DeploymentSpec& deployment);

std::string plan_json(const PlanReport& plan);
/// quantity,value,unit rows.
std::string plan_csv(const PlanReport& plan);
/// v_kmh,parameter_m,time_s,feasible rows; `parameter` names the second column.
std::string curves_csv(std::span<const placement::CurvePoint> points, const std::string& parameter);

std::string static_json(const std::string& name, std::uint64_t seed,
                        std::span<const scenario::HandoverSummary> rows);
/// clock,trials,fixes,max_m,p95_m,average_m rows.
std::string static_csv(std::span<const scenario::HandoverSummary> rows);

std::string traversal_json(const std::string& name, std::uint64_t seed,
                           std::span<const scenario::TraversalSummary> rows);
/// clock,runs,fixes,average_m,stddev_m,rms_m,all_handovers,worst_first_fix_s rows.
std::string traversal_csv(std::span<const scenario::TraversalSummary> rows);
/// One row per fix, east/north relative to `origin`.
std::string fixes_csv(const scenario::ScenarioResult& result, const solver::Vec3& origin);

struct SweepTable {
  std::string receiver;
  std::vector<scenario::SweepRow> rows;
};

std::string sweep_json(const std::string& name, std::uint64_t seed, std::span<const SweepTable> tables);
/// receiver,offset_ms,mean_reacq_s,reacq_stddev_s,mean_error_m,error_stddev_m rows.
std::string sweep_csv(std::span<const SweepTable> tables);

std::string outdoor_json(const std::string& name, std::uint64_t seed, const scenario::OutdoorComparison& c);
/// signal,average_m,stddev_m,rms_m rows.
std::string outdoor_csv(const scenario::OutdoorComparison& c);

/// Shaped as a `calibration` config section, so it can be fed back in.
std::string calibration_json(const calibration::CalibrationResult& result);
std::string calibration_csv(const calibration::CalibrationResult& result);

std::string sync_json(std::uint64_t seed, std::span<const ntp::SyncComparisonRow> rows);

}  // namespace gpssim::report
