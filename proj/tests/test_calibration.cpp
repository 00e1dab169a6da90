#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "gpssim/delay_calibration.hpp"
#include "gpssim/error.hpp"

using namespace gpssim;
using namespace gpssim::calibration;

namespace {

std::vector<TimeOffset> ms_samples(std::initializer_list<double> ms) {
  std::vector<TimeOffset> v;
  for (double x : ms) v.push_back(TimeOffset::from_millis(x));
  return v;
}

// Two-pass unbiased standard deviation, ns.
double oracle_stddev(const std::vector<TimeOffset>& v) {
  double m = 0;
  for (auto s : v) m += static_cast<double>(s.ns());
  m /= static_cast<double>(v.size());
  double acc = 0;
  for (auto s : v) acc += (static_cast<double>(s.ns()) - m) * (static_cast<double>(s.ns()) - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("default campaign is 1800 one-second samples") {
  Rng rng(1);
  const auto samples = measure_sim_delay(SimDelayModel{}, kDefaultSampleCount, rng);
  CHECK(kDefaultSampleCount == 1800);
  CHECK(samples.size() == 1800);
  const auto r = calibrate(samples);
  CHECK(r.sample_count == 1800);
  CHECK(r.correction.millis() == doctest::Approx(20.0).epsilon(0.01));
}

TEST_CASE("constant delay gives identical samples and zero spread") {
  SimDelayModel m;
  m.mean_delay = Duration::from_ms(37);
  m.wander = Duration{};
  m.measurement_noise = Duration{};
  Rng rng(2);
  const auto samples = measure_sim_delay(m, 100, rng);
  for (auto s : samples) CHECK(s == Duration::from_ms(37));
  const auto r = calibrate(samples);
  CHECK(r.correction == Duration::from_ms(37));
  CHECK(r.sample_stddev.is_zero());
  CHECK(r.residual_bound.is_zero());
}

TEST_CASE("sample stddev matches an independent two-pass computation") {
  Rng rng(3);
  const auto samples = measure_sim_delay(SimDelayModel{}, 1800, rng);
  const auto r = calibrate(samples);
  CHECK(static_cast<double>(r.sample_stddev.ns()) == doctest::Approx(oracle_stddev(samples)).epsilon(1e-3));

  Rng again(3);
  const auto rerun = calibrate(measure_sim_delay(SimDelayModel{}, 1800, again));
  CHECK(rerun.sample_stddev == r.sample_stddev);
  CHECK(rerun.correction == r.correction);
}

TEST_CASE("{99, 100, 101} ms") {
  const auto r = calibrate(ms_samples({99, 100, 101}));
  CHECK(r.correction == TimeOffset::from_ms(100));
  CHECK(r.sample_stddev == TimeOffset::from_ms(1));
  CHECK(r.residual_bound == TimeOffset::from_ms(1));
  CHECK(r.sample_count == 3);
}

TEST_CASE("single sample has zero stddev; empty set throws") {
  const auto r = calibrate(ms_samples({12.5}));
  CHECK(r.correction == TimeOffset::from_millis(12.5));
  CHECK(r.sample_stddev.is_zero());
  CHECK_THROWS_AS(calibrate(std::vector<TimeOffset>{}), EmptySampleSet);
  Rng rng(1);
  CHECK_THROWS_AS(measure_sim_delay(SimDelayModel{}, 0, rng), std::invalid_argument);
}

TEST_CASE("property: calibration is shift-equivariant") {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    std::vector<TimeOffset> v;
    for (int k = 0; k < 30; ++k) v.push_back(TimeOffset::from_ns(static_cast<std::int64_t>(rng.uniform(0, 5e7))));
    const TimeOffset c = TimeOffset::from_ns(static_cast<std::int64_t>(rng.uniform(-1e7, 1e7)));
    std::vector<TimeOffset> shifted;
    for (auto s : v) shifted.push_back(s + c);
    const auto a = calibrate(v);
    const auto b = calibrate(shifted);
    CHECK(b.correction == a.correction + c);
    CHECK(b.sample_stddev == a.sample_stddev);
    CHECK(b.residual_bound == a.residual_bound);
  }
}

TEST_CASE("correction only touches the simulation delay") {
  const ClockChain c{TimeOffset::from_ms(20), TimeOffset::from_ms(3), TimeOffset::from_ns(200)};
  CalibrationResult r;
  r.correction = TimeOffset::from_ms(19);
  const ClockChain out = apply_correction(c, r);
  CHECK(out.delta_sim == TimeOffset::from_ms(1));
  CHECK(out.delta_ntp == c.delta_ntp);
  CHECK(out.delta_ref == c.delta_ref);
}

TEST_CASE("residual delay stays bounded for an hour after calibration") {
  const SimDelayModel m{};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimDelayProcess p(m, Rng(seed));
    std::vector<TimeOffset> samples;
    for (int i = 0; i < 1800; ++i) samples.push_back(p.next_measured());
    const auto r = calibrate(samples);
    // Oracle: walk spread after N steps plus the error of the mean.
    const double walk = static_cast<double>(m.wander.ns()) * std::sqrt(1800.0 + 3600.0);
    const double mean_err = static_cast<double>(m.measurement_noise.ns()) / std::sqrt(1800.0);
    const double limit = 6.0 * (walk + mean_err);
    for (int t = 0; t < 3600; ++t) {
      const double residual = static_cast<double>((p.next_true() - r.correction).ns());
      CHECK(std::abs(residual) <= limit);
    }
  }
}

TEST_CASE("CSV round trip and malformed input") {
  Rng rng(6);
  const auto samples = measure_sim_delay(SimDelayModel{}, 50, rng);
  std::stringstream ss;
  write_samples_csv(ss, samples);
  CHECK(ss.str().rfind("timestamp_s,delay_ms\n0,", 0) == 0);
  const auto back = read_samples_csv(ss);
  CHECK(back == samples);

  std::istringstream neg("0,-0.000500\n");
  CHECK(read_samples_csv(neg).front() == TimeOffset::from_us(-1) / 2);

  std::istringstream empty("timestamp_s,delay_ms\n\n");
  CHECK_THROWS_AS(read_samples_csv(empty), EmptySampleSet);
  std::istringstream bad("timestamp_s,delay_ms\n0,abc\n");
  CHECK_THROWS_AS(read_samples_csv(bad), ConfigError);
  std::istringstream nocomma("1 2\n");
  CHECK_THROWS_AS(read_samples_csv(nocomma), ConfigError);
}

TEST_CASE("negative model parameters are rejected") {
  SimDelayModel m;
  m.wander = Duration::from_ns(-1);
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}
