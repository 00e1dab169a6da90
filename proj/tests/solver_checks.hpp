#pragma once

// Solver property checks shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gpssim/position_solver.hpp"

namespace checks {

using gpssim::Rng;
using gpssim::TimeOffset;
using namespace gpssim::solver;

inline Vec3 user_position() {
  return geodetic_to_ecef({37.3795 * std::numbers::pi / 180.0, 126.6669 * std::numbers::pi / 180.0, 10.0});
}

/// Sky i of the seeded family used by the property checks.
inline SatGeometry sky(std::uint64_t seed, std::size_t i, SkyOptions options = {}) {
  Rng rng = Rng(seed).child("geometry", i);
  return generate_sky(user_position(), rng, options);
}

/// Position difference between solving ranges with and without a common bias.
inline double bias_invariance_m(const SatGeometry& g, const Vec3& user, double bias_m, Rng& rng) {
  std::vector<double> pr = predicted_pseudoranges(g, user);
  for (double& p : pr) p += rng.normal(0.0, 3.0);
  std::vector<double> biased = pr;
  for (double& p : biased) p += bias_m;
  const PvtSolution a = solve_position(pr, g, user);
  const PvtSolution b = solve_position(biased, g, user);
  return (a.position - b.position).norm();
}

/// Relative Frobenius distance between the analytic Jacobian and central
/// differences of the predicted pseudoranges.
inline double jacobian_fd_error(const SatGeometry& g, const Vec3& at) {
  const Eigen::MatrixXd j = range_jacobian(g, at);
  Eigen::MatrixXd fd(j.rows(), 4);
  const double h = 1.0;
  for (int k = 0; k < 4; ++k) {
    Vec3 plus = at;
    Vec3 minus = at;
    double bias_plus = 0.0;
    double bias_minus = 0.0;
    if (k < 3) {
      plus(k) += h;
      minus(k) -= h;
    } else {
      bias_plus = h;
      bias_minus = -h;
    }
    const auto a = predicted_pseudoranges(g, plus, bias_plus);
    const auto b = predicted_pseudoranges(g, minus, bias_minus);
    for (Eigen::Index i = 0; i < j.rows(); ++i) fd(i, k) = (a[i] - b[i]) / (2.0 * h);
  }
  return (j - fd).norm() / j.norm();
}

/// Clock-induced error with all satellite velocities zeroed.
inline double zero_velocity_error_m(SatGeometry g, const Vec3& user, TimeOffset eps) {
  for (auto& s : g.satellites) s.velocity.setZero();
  return position_error_from_clock_offset(g, eps, user).magnitude;
}

struct SolverSummary {
  double worst_bias_invariance_m = 0.0;
  double worst_jacobian_rel = 0.0;
  double worst_zero_velocity_m = 0.0;
};

inline SolverSummary run_solver_properties(std::uint64_t seed, std::size_t geometries) {
  SolverSummary s;
  const Vec3 user = user_position();
  for (std::size_t i = 0; i < geometries; ++i) {
    const SatGeometry g = sky(seed, i);
    Rng rng = Rng(seed).child("noise", i);
    const double bias = rng.uniform(-3e5, 3e5);
    s.worst_bias_invariance_m = std::max(s.worst_bias_invariance_m, bias_invariance_m(g, user, bias, rng));
    const Vec3 probe = user + Vec3(rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-500, 500));
    s.worst_jacobian_rel = std::max(s.worst_jacobian_rel, jacobian_fd_error(g, probe));
    s.worst_zero_velocity_m =
        std::max(s.worst_zero_velocity_m, zero_velocity_error_m(g, user, TimeOffset::from_ms(50)));
  }
  return s;
}

}  // namespace checks
