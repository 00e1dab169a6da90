#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpssim/error.hpp"
#include "gpssim/position_solver.hpp"
#include "solver_checks.hpp"

using namespace gpssim;
using namespace gpssim::solver;

namespace {

// Linearized least-squares error for satellites shifted by v * eps,
// solved at the true position with the unshifted geometry.
Vec3 linear_oracle(const SatGeometry& g, TimeOffset eps, const Vec3& user) {
  const auto n = static_cast<Eigen::Index>(g.satellites.size());
  Eigen::MatrixXd h(n, 4);
  Eigen::VectorXd dr(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = g.satellites[i];
    const Vec3 los = s.position - user;
    h.block<1, 3>(i, 0) = -(los.normalized()).transpose();
    h(i, 3) = 1.0;
    dr(i) = (s.position + s.velocity * eps.seconds() - user).norm() - los.norm();
  }
  const Eigen::Vector4d x = (h.transpose() * h).ldlt().solve(h.transpose() * dr);
  return x.head<3>();
}

SatGeometry tetrahedron(const Vec3& user) {
  const Eigen::Matrix3d to_ecef = ecef_to_enu_rotation(user).transpose();
  const double down = -1.0 / 3.0;
  const double side = std::sqrt(8.0) / 3.0;
  const Vec3 dirs[] = {
      {0, 0, 1},
      {side, 0, down},
      {side * std::cos(2 * std::numbers::pi / 3), side * std::sin(2 * std::numbers::pi / 3), down},
      {side * std::cos(4 * std::numbers::pi / 3), side * std::sin(4 * std::numbers::pi / 3), down},
  };
  SatGeometry g;
  for (const auto& d : dirs) g.satellites.push_back({user + 2e7 * (to_ecef * d), Vec3::Zero()});
  return g;
}

}  // namespace

TEST_CASE("noiseless ranges solve back to the true position and bias") {
  const Vec3 user = checks::user_position();
  for (std::size_t i = 0; i < 20; ++i) {
    const SatGeometry g = checks::sky(5, i);
    const double c = 1234.5 * static_cast<double>(i);
    const auto pr = predicted_pseudoranges(g, user, c);
    const PvtSolution s = solve_position(pr, g);  // from the earth's center
    CHECK((s.position - user).norm() < 1e-3);
    CHECK(std::abs(s.clock_bias_m - c) < 1e-3);
    CHECK(std::abs(static_cast<double>(s.clock_bias.ns()) - c / kSpeedOfLight * 1e9) <= 1.0);
    CHECK(s.residual_norm < 1e-3);
  }
}

TEST_CASE("property: common bias does not move the position (100 geometries)") {
  const auto s = checks::run_solver_properties(77, 100);
  CHECK(s.worst_bias_invariance_m <= 1e-6);
  CHECK(s.worst_jacobian_rel <= 1e-6);
  CHECK(s.worst_zero_velocity_m <= 1e-6);
}

TEST_CASE("50 ms clock error matches the linearized oracle") {
  const Vec3 user = checks::user_position();
  for (std::size_t i = 0; i < 20; ++i) {
    const SatGeometry g = checks::sky(8, i);
    const auto e = position_error_from_clock_offset(g, TimeOffset::from_ms(50), user);
    const Vec3 oracle = linear_oracle(g, TimeOffset::from_ms(50), user);
    CHECK(e.magnitude == doctest::Approx(oracle.norm()).epsilon(0.01));
    CHECK((e.error_vector - oracle).norm() <= 0.01 * oracle.norm() + 1e-3);
    CHECK(e.magnitude > 1.0);
  }
}

TEST_CASE("property: clock-induced error is sign-symmetric and grows with |eps|") {
  const Vec3 user = checks::user_position();
  for (std::size_t i = 0; i < 30; ++i) {
    const SatGeometry g = checks::sky(9, i);
    double previous = -1.0;
    for (int ms = 0; ms <= 250; ms += 50) {
      const double plus = position_error_from_clock_offset(g, TimeOffset::from_ms(ms), user).magnitude;
      const double minus = position_error_from_clock_offset(g, TimeOffset::from_ms(-ms), user).magnitude;
      CHECK(std::abs(plus - minus) <= 0.05 * std::max(plus, 1e-6) + 1e-6);
      CHECK(plus >= previous);
      previous = plus;
    }
  }
}

TEST_CASE("regular tetrahedron DOP has a closed form") {
  const Vec3 user = checks::user_position();
  const Dop d = dilution_of_precision(tetrahedron(user), user);
  // H^T H = diag(4/3, 4/3, 4/3, 4), so Q = diag(3/4, 3/4, 3/4, 1/4).
  CHECK(d.pdop == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(d.gdop == doctest::Approx(std::sqrt(2.5)).epsilon(1e-6));
  CHECK(d.hdop == doctest::Approx(std::sqrt(1.5)).epsilon(1e-6));
  CHECK(d.vdop == doctest::Approx(std::sqrt(0.75)).epsilon(1e-6));
}

TEST_CASE("degenerate geometry is rejected") {
  const Vec3 user = checks::user_position();
  SatGeometry g = tetrahedron(user);
  g.satellites[3] = g.satellites[2];
  CHECK_THROWS_AS(dilution_of_precision(g, user), SingularGeometry);
  CHECK_THROWS_AS(solve_position(predicted_pseudoranges(g, user), g, user), SingularGeometry);
  g.satellites.pop_back();
  CHECK_THROWS_AS(solve_position(predicted_pseudoranges(g, user), g, user), SingularGeometry);
  const std::vector<double> wrong(2, 0.0);
  CHECK_THROWS_AS(solve_position(wrong, tetrahedron(user), user), std::invalid_argument);
}

TEST_CASE("property: an extra satellite never increases GDOP") {
  const Vec3 user = checks::user_position();
  for (std::size_t i = 0; i < 100; ++i) {
    const SatGeometry g = checks::sky(10, i);
    SatGeometry four;
    four.satellites.assign(g.satellites.begin(), g.satellites.begin() + 4);
    SatGeometry five = four;
    five.satellites.push_back(g.satellites[4]);
    double g4 = 0.0;
    try {
      g4 = dilution_of_precision(four, user).gdop;
    } catch (const SingularGeometry&) {
      continue;
    }
    CHECK(dilution_of_precision(five, user).gdop <= g4 * (1.0 + 1e-12));
  }
}

TEST_CASE("Monte Carlo: noise maps to position through PDOP") {
  const Vec3 user = checks::user_position();
  const SatGeometry g = checks::sky(11, 0);
  const double sigma = 2.0;
  const double pdop = dilution_of_precision(g, user).pdop;
  Rng rng(12);
  double sum_sq = 0.0;
  int inside = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    auto pr = predicted_pseudoranges(g, user);
    for (double& p : pr) p += rng.normal(0.0, sigma);
    const double e = (solve_position(pr, g, user).position - user).norm();
    sum_sq += e * e;
    if (e <= 3.0 * pdop * sigma) ++inside;
  }
  CHECK(std::sqrt(sum_sq / trials) == doctest::Approx(pdop * sigma).epsilon(0.05));
  CHECK(inside >= static_cast<int>(0.99 * trials));
}

TEST_CASE("geodetic and ENU round trips") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Geodetic g{rng.uniform(-1.5, 1.5), rng.uniform(-3.1, 3.1), rng.uniform(-100, 10000)};
    const Geodetic back = ecef_to_geodetic(geodetic_to_ecef(g));
    CHECK(back.lat_rad == doctest::Approx(g.lat_rad).epsilon(1e-12).scale(1.0));
    CHECK(back.lon_rad == doctest::Approx(g.lon_rad).epsilon(1e-12).scale(1.0));
    CHECK(back.height_m == doctest::Approx(g.height_m).epsilon(1e-6).scale(1.0));

    const Vec3 origin = geodetic_to_ecef(g);
    const Vec3 enu(rng.uniform(-1000, 1000), rng.uniform(-1000, 1000), rng.uniform(-50, 50));
    const Vec3 offset = enu_to_ecef_offset(origin, enu);
    CHECK((ecef_to_enu_rotation(origin) * offset - enu).norm() < 1e-6);
    CHECK(horizontal_error(origin + offset, origin) == doctest::Approx(std::hypot(enu.x(), enu.y())));
  }
  const Vec3 equator = geodetic_to_ecef({0.0, 0.0, 0.0});
  CHECK(equator.x() == doctest::Approx(6378137.0));
}

TEST_CASE("sky plots honour the mask and the PDOP cap") {
  const Vec3 user = checks::user_position();
  const Eigen::Matrix3d r = ecef_to_enu_rotation(user);
  for (std::size_t i = 0; i < 50; ++i) {
    const SatGeometry g = checks::sky(14, i);
    CHECK(g.satellites.size() == 8);
    CHECK(dilution_of_precision(g, user).pdop <= 3.0);
    for (const auto& s : g.satellites) {
      const Vec3 los = r * (s.position - user).normalized();
      CHECK(std::asin(los.z()) >= 10.0 * std::numbers::pi / 180.0 - 1e-9);
      CHECK(s.position.norm() == doctest::Approx(26'560'000.0));
      CHECK(std::abs(s.velocity.dot(s.position.normalized())) < 1e-6);
      CHECK(s.velocity.norm() == doctest::Approx(3900.0));
    }
  }
  Rng rng(1);
  SkyOptions three;
  three.satellites = 3;
  CHECK_THROWS_AS(generate_sky(user, rng, three), std::invalid_argument);
}
