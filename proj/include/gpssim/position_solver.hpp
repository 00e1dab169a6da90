#pragma once

/**
 * @file position_solver.hpp
 * @brief Gauss-Newton pseudorange positioning in an earth-fixed frame and
 *        the mapping from simulator clock error to user position error.
 *
 * Ranges are straight-line distances; there are no atmospheric terms. A
 * simulator whose clock is off by epsilon emits signals as if every
 * satellite had moved by velocity * epsilon, while the receiver still
 * computes satellite positions for the unshifted time. The common part of
 * the resulting range change goes into the clock bias; the rest moves the
 * position.
 */

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gpssim/random.hpp"
#include "gpssim/time_offset.hpp"

namespace gpssim::solver {

using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct SatState {
  Vec3 position;  ///< m, earth-fixed
  Vec3 velocity;  ///< m/s, earth-fixed
};

struct SatGeometry {
  std::vector<SatState> satellites;
};

struct PvtSolution {
  Vec3 position;
  TimeOffset clock_bias;
  double clock_bias_m = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  double step_tolerance_m = 1e-4;
  int max_iterations = 20;
};

/// Line-of-sight unit vectors (receiver -> satellite) and ranges at `position`.
Eigen::MatrixXd geometry_matrix(const SatGeometry& geometry, const Vec3& position);

/// Straight-line ranges from `position` to each satellite, plus `bias_m`.
std::vector<double> predicted_pseudoranges(const SatGeometry& geometry, const Vec3& position, double bias_m = 0.0);

/// Jacobian of predicted_pseudoranges w.r.t. (x, y, z, bias_m).
Eigen::MatrixXd range_jacobian(const SatGeometry& geometry, const Vec3& position);

/// Throws SingularGeometry (< 4 satellites or rank-deficient geometry) or
/// NoConvergence.
PvtSolution solve_position(std::span<const double> pseudoranges, const SatGeometry& geometry,
                           const Vec3& initial_guess = Vec3::Zero(), const SolverOptions& options = {});

struct ClockInducedError {
  Vec3 error_vector;
  double magnitude = 0.0;
};

/// Satellite states advanced by epsilon (position += velocity * epsilon).
SatGeometry advance_geometry(const SatGeometry& geometry, TimeOffset epsilon);

ClockInducedError position_error_from_clock_offset(const SatGeometry& geometry, TimeOffset epsilon,
                                                   const Vec3& true_position);

struct Dop {
  double gdop = 0.0;
  double pdop = 0.0;
  double hdop = 0.0;
  double vdop = 0.0;
};

/// Throws SingularGeometry.
Dop dilution_of_precision(const SatGeometry& geometry, const Vec3& position);

// ---------------------------------------------------------------------------
// Geodesy (WGS-84)

struct Geodetic {
  double lat_rad = 0.0;
  double lon_rad = 0.0;
  double height_m = 0.0;
};

Vec3 geodetic_to_ecef(const Geodetic& g);
Geodetic ecef_to_geodetic(const Vec3& ecef);
/// Rows are the east, north, up unit vectors at `origin`.
Eigen::Matrix3d ecef_to_enu_rotation(const Vec3& origin);
Vec3 enu_to_ecef_offset(const Vec3& origin, const Vec3& enu);
/// East/north distance between two earth-fixed points, in the local frame of `reference`.
double horizontal_error(const Vec3& position, const Vec3& reference);

// ---------------------------------------------------------------------------
// Synthetic sky plots

struct SkyOptions {
  int satellites = 8;
  double orbit_radius_m = 26'560'000.0;
  double speed_mps = 3'900.0;
  double elevation_mask_deg = 10.0;
  /// Geometries with a larger PDOP are redrawn.
  double max_pdop = 3.0;
};

/// Random satellites above the mask as seen from `user`. Velocity directions
/// are random within the plane perpendicular to each satellite's radius
/// vector (circular orbits of random inclination).
SatGeometry generate_sky(const Vec3& user, Rng& rng, const SkyOptions& options = {});

}  // namespace gpssim::solver
