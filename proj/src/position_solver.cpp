#include "gpssim/position_solver.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gpssim/error.hpp"

namespace gpssim::solver {
namespace {

constexpr double kWgs84A = 6'378'137.0;
constexpr double kWgs84F = 1.0 / 298.257223563;
constexpr double kWgs84E2 = kWgs84F * (2.0 - kWgs84F);

// Relative singular-value threshold below which the geometry is rank deficient.
constexpr double kRankTolerance = 1e-9;

void require_solvable(const Eigen::MatrixXd& h) {
  if (h.rows() < 4) throw SingularGeometry("at least 4 satellites are required");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(sv.size() - 1) / sv(0) < kRankTolerance) {
    throw SingularGeometry("satellite geometry is rank deficient");
  }
}

}  // namespace

Eigen::MatrixXd geometry_matrix(const SatGeometry& geometry, const Vec3& position) {
  const auto n = static_cast<Eigen::Index>(geometry.satellites.size());
  Eigen::MatrixXd h(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 los = geometry.satellites[i].position - position;
    const double range = los.norm();
    h.block<1, 3>(i, 0) = (los / range).transpose();
    h(i, 3) = 1.0;
  }
  return h;
}

std::vector<double> predicted_pseudoranges(const SatGeometry& geometry, const Vec3& position, double bias_m) {
  std::vector<double> out;
  out.reserve(geometry.satellites.size());
  for (const auto& sat : geometry.satellites) out.push_back((sat.position - position).norm() + bias_m);
  return out;
}

Eigen::MatrixXd range_jacobian(const SatGeometry& geometry, const Vec3& position) {
  Eigen::MatrixXd j = geometry_matrix(geometry, position);
  j.leftCols<3>() *= -1.0;
  return j;
}

PvtSolution solve_position(std::span<const double> pseudoranges, const SatGeometry& geometry,
                           const Vec3& initial_guess, const SolverOptions& options) {
  const auto n = static_cast<Eigen::Index>(geometry.satellites.size());
  if (static_cast<Eigen::Index>(pseudoranges.size()) != n) {
    throw std::invalid_argument("pseudorange count does not match satellite count");
  }
  if (n < 4) throw SingularGeometry("at least 4 satellites are required");

  Eigen::Vector4d x;
  x << initial_guess, 0.0;
  Eigen::VectorXd residual(n);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const Vec3 p = x.head<3>();
    const Eigen::MatrixXd j = range_jacobian(geometry, p);
    require_solvable(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      residual(i) = pseudoranges[static_cast<std::size_t>(i)] - ((geometry.satellites[i].position - p).norm() + x(3));
    }
    const Eigen::Vector4d dx = j.colPivHouseholderQr().solve(residual);
    x += dx;
    if (dx.head<3>().norm() < options.step_tolerance_m) {
      const Vec3 pf = x.head<3>();
      for (Eigen::Index i = 0; i < n; ++i) {
        residual(i) = pseudoranges[static_cast<std::size_t>(i)] - ((geometry.satellites[i].position - pf).norm() + x(3));
      }
      PvtSolution s;
      s.position = pf;
      s.clock_bias_m = x(3);
      s.clock_bias = TimeOffset::from_seconds(x(3) / kSpeedOfLight);
      s.residual_norm = residual.norm();
      s.iterations = iter;
      return s;
    }
  }
  throw NoConvergence("position solution did not converge in " + std::to_string(options.max_iterations) +
                      " iterations");
}

SatGeometry advance_geometry(const SatGeometry& geometry, TimeOffset epsilon) {
  SatGeometry out = geometry;
  const double dt = epsilon.seconds();
  for (auto& sat : out.satellites) sat.position += sat.velocity * dt;
  return out;
}

ClockInducedError position_error_from_clock_offset(const SatGeometry& geometry, TimeOffset epsilon,
                                                   const Vec3& true_position) {
  const SatGeometry emitted = advance_geometry(geometry, epsilon);
  const std::vector<double> pr = predicted_pseudoranges(emitted, true_position);
  const PvtSolution sol = solve_position(pr, geometry, true_position);
  ClockInducedError e;
  e.error_vector = sol.position - true_position;
  e.magnitude = e.error_vector.norm();
  return e;
}

Dop dilution_of_precision(const SatGeometry& geometry, const Vec3& position) {
  Eigen::MatrixXd h = geometry_matrix(geometry, position);
  require_solvable(h);
  // Rotate the line-of-sight columns into east/north/up.
  const Eigen::Matrix3d r = ecef_to_enu_rotation(position);
  h.leftCols<3>() = (h.leftCols<3>() * r.transpose()).eval();
  const Eigen::Matrix4d q = (h.transpose() * h).inverse();
  Dop d;
  d.gdop = std::sqrt(q.trace());
  d.pdop = std::sqrt(q(0, 0) + q(1, 1) + q(2, 2));
  d.hdop = std::sqrt(q(0, 0) + q(1, 1));
  d.vdop = std::sqrt(q(2, 2));
  return d;
}

// ---------------------------------------------------------------------------

Vec3 geodetic_to_ecef(const Geodetic& g) {
  const double s = std::sin(g.lat_rad);
  const double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * s * s);
  const double c = std::cos(g.lat_rad);
  return {(n + g.height_m) * c * std::cos(g.lon_rad), (n + g.height_m) * c * std::sin(g.lon_rad),
          (n * (1.0 - kWgs84E2) + g.height_m) * s};
}

Geodetic ecef_to_geodetic(const Vec3& p) {
  const double lon = std::atan2(p.y(), p.x());
  const double rho = std::hypot(p.x(), p.y());
  double lat = std::atan2(p.z(), rho * (1.0 - kWgs84E2));
  double h = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double s = std::sin(lat);
    const double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * s * s);
    h = rho / std::cos(lat) - n;
    lat = std::atan2(p.z(), rho * (1.0 - kWgs84E2 * n / (n + h)));
  }
  return {lat, lon, h};
}

Eigen::Matrix3d ecef_to_enu_rotation(const Vec3& origin) {
  const Geodetic g = ecef_to_geodetic(origin);
  const double sl = std::sin(g.lat_rad), cl = std::cos(g.lat_rad);
  const double so = std::sin(g.lon_rad), co = std::cos(g.lon_rad);
  Eigen::Matrix3d r;
  r << -so, co, 0.0,            //
      -sl * co, -sl * so, cl,   //
      cl * co, cl * so, sl;
  return r;
}

Vec3 enu_to_ecef_offset(const Vec3& origin, const Vec3& enu) {
  return ecef_to_enu_rotation(origin).transpose() * enu;
}

double horizontal_error(const Vec3& position, const Vec3& reference) {
  const Vec3 enu = ecef_to_enu_rotation(reference) * (position - reference);
  return std::hypot(enu.x(), enu.y());
}

// ---------------------------------------------------------------------------

SatGeometry generate_sky(const Vec3& user, Rng& rng, const SkyOptions& options) {
  if (options.satellites < 4) throw std::invalid_argument("a sky plot needs at least 4 satellites");
  const Eigen::Matrix3d enu_to_ecef = ecef_to_enu_rotation(user).transpose();
  const double mask = options.elevation_mask_deg * std::numbers::pi / 180.0;

  for (int attempt = 0; attempt < 1000; ++attempt) {
    SatGeometry g;
    for (int i = 0; i < options.satellites; ++i) {
      const double az = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double el = rng.uniform(mask, std::numbers::pi / 2.0);
      const Vec3 los_enu(std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el));
      const Vec3 u = enu_to_ecef * los_enu;
      // |user + t u| = R, t > 0.
      const double b = user.dot(u);
      const double c = user.squaredNorm() - options.orbit_radius_m * options.orbit_radius_m;
      const double t = -b + std::sqrt(b * b - c);
      const Vec3 pos = user + t * u;

      const Vec3 radial = pos.normalized();
      const Vec3 helper = std::abs(radial.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
      const Vec3 e1 = radial.cross(helper).normalized();
      const Vec3 e2 = radial.cross(e1);
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const Vec3 vel = options.speed_mps * (std::cos(phi) * e1 + std::sin(phi) * e2);
      g.satellites.push_back({pos, vel});
    }
    try {
      if (dilution_of_precision(g, user).pdop <= options.max_pdop) return g;
    } catch (const SingularGeometry&) {
    }
  }
  throw SingularGeometry("could not draw a sky plot within the PDOP limit");
}

}  // namespace gpssim::solver
