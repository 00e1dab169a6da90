#include <doctest.h>

#include <string>

#include "gpssim/config.hpp"
#include "gpssim/error.hpp"
#include "gpssim/report.hpp"

using namespace gpssim;

namespace {

std::string error_of(const std::string& text) {
  try {
    config::parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("empty config equals the defaults") {
  const auto c = config::parse_config("{}");
  const auto d = config::default_config();
  CHECK(c.seed == d.seed);
  CHECK(c.scenarios.size() == 5);
  for (const char* name : {"static", "drive", "pedestrian", "sweep", "outdoor"}) CHECK(c.scenarios.count(name) == 1);
  CHECK(c.receiver("dedicated").t_reacq_base == Duration::from_ms(400));
  CHECK_THROWS_AS(c.receiver("nope"), ConfigError);
  CHECK_THROWS_AS(c.scenario("nope"), ConfigError);
}

TEST_CASE("errors carry a field path") {
  CHECK(error_of(R"({"bogus": 1})") == "bogus: unknown key");
  CHECK(contains(error_of(R"({"deployment": {"simulator_positions_m": [0], "coverage_radius_m": 80}})"),
                 "deployment.v_max_kmh: required key is missing"));
  CHECK(contains(error_of(R"({"ntp": {"wired_access": {"delay_up_ms": "x"}}})"), "ntp.wired_access.delay_up_ms"));
  CHECK(contains(error_of(R"({"scenarios": {"s": {"type": "static", "clocks": ["private/fast"]}}})"),
                 "scenarios.s.clocks"));
  CHECK(contains(error_of(R"({"scenarios": {"s": {"type": "oops"}}})"), "scenarios.s.type"));
  CHECK(contains(error_of(R"({"scenarios": {"s": {"type": "static", "receiver": "ghost"}}})"),
                 "scenarios.s.receiver"));
  CHECK(contains(error_of("{not json"), "malformed JSON"));
}

TEST_CASE("sections override individual fields") {
  const auto c = config::parse_config(R"({
    "seed": 42,
    "ntp": {"wireless_access": {"delay_up_ms": 25}, "discipline": {"gain": 0.25}},
    "calibration": {"sample_count": 60, "mean_delay_ms": 12, "correction_ms": 11.5},
    "receivers": {"slow": {"t_reacq_base_s": 2, "pos_rate_hz": 2}},
    "deployment": {"simulator_positions_m": [0, 600], "coverage_radius_m": 90, "v_max_kmh": 80},
    "scenario_options": {"dt_ms": 50, "sky": {"satellites": 6}},
    "scenarios": {"walk": {"type": "traversal", "preset": "pedestrian", "runs": 2, "speed_kmh": 4}}
  })");
  CHECK(c.seed == 42);
  CHECK(c.ntp.wireless_access.base_delay_up == Duration::from_ms(25));
  CHECK(c.ntp.wireless_access.base_delay_down == Duration::from_ms(17));
  CHECK(c.ntp.discipline.gain == 0.25);
  CHECK(c.options.clocks.ntp.discipline.gain == 0.25);
  CHECK(c.calibration_samples == 60);
  CHECK(c.options.clocks.fixed_correction == TimeOffset::from_millis(11.5));
  CHECK(c.receiver("slow").t_reacq_base == Duration::from_s(2));
  CHECK(c.deployment.coverage_radius_m == 90.0);
  CHECK(c.deployment.v_max.kmh() == doctest::Approx(80.0));
  CHECK(c.options.dt == Duration::from_ms(50));
  CHECK(c.options.sky.satellites == 6);
  const auto& walk = std::get<config::TraversalSpec>(c.scenario("walk"));
  CHECK(walk.runs == 2);
  CHECK(walk.path.receiver.name == "smartphone");
  CHECK(walk.path.speed.at(0).kmh() == doctest::Approx(4.0));
}

TEST_CASE("plan report carries the sizing bounds") {
  const auto plan = report::build_plan(config::default_config().deployment);
  CHECK(plan.min_coverage_radius_m == doctest::Approx(76.388889).epsilon(1e-6));
  CHECK(plan.max_separation_m == 880.0);
  CHECK(plan.slow_path_speed.kmh() == doctest::Approx(19.2));
  CHECK(plan.separation_m == 500.0);
  CHECK(plan.separation_bound_radius_m == doctest::Approx(500.0 / 11.0));
  CHECK(plan.combined_min_radius_m == doctest::Approx(76.388889).epsilon(1e-6));
  CHECK(plan.validation.ok);

  const std::string csv = report::plan_csv(plan);
  CHECK(contains(csv, "76.4"));
  CHECK(contains(csv, "880.0"));
  CHECK(contains(csv, "45.5"));
  CHECK(contains(csv, "19.2"));
  const std::string js = report::plan_json(plan);
  CHECK(js == report::plan_json(report::build_plan(config::default_config().deployment)));
}

TEST_CASE("calibration JSON feeds back into the config parser") {
  calibration::CalibrationResult r;
  r.correction = TimeOffset::from_ns(20'123'456);
  r.sample_count = 1800;
  r.sample_stddev = TimeOffset::from_us(510);
  r.residual_bound = TimeOffset::from_ms(2);
  const auto c = config::parse_config(report::calibration_json(r));
  REQUIRE(c.calibration_correction);
  CHECK(*c.calibration_correction == r.correction);
  CHECK(c.calibration_samples == 1800);
}
