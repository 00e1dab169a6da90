#include "gpssim/delay_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gpssim/error.hpp"

namespace gpssim::calibration {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void SimDelayModel::validate() const {
  if (mean_delay < Duration{}) throw std::invalid_argument("mean_delay must be >= 0");
  if (wander < Duration{}) throw std::invalid_argument("wander must be >= 0");
  if (measurement_noise < Duration{}) throw std::invalid_argument("measurement_noise must be >= 0");
}

SimDelayProcess::SimDelayProcess(SimDelayModel model, Rng rng) : model_(model), rng_(std::move(rng)) {
  model_.validate();
}

Duration SimDelayProcess::current_true() const {
  const auto ns = static_cast<double>(model_.mean_delay.ns()) + walk_ns_;
  return Duration::from_ns(std::max<std::int64_t>(0, std::llround(ns)));
}

Duration SimDelayProcess::step(bool measured) {
  if (!first_) walk_ns_ += rng_.normal(0.0, static_cast<double>(model_.wander.ns()));
  first_ = false;
  double ns = static_cast<double>(model_.mean_delay.ns()) + walk_ns_;
  if (measured) ns += rng_.normal(0.0, static_cast<double>(model_.measurement_noise.ns()));
  return Duration::from_ns(std::max<std::int64_t>(0, std::llround(ns)));
}

Duration SimDelayProcess::next_true() { return step(false); }
Duration SimDelayProcess::next_measured() { return step(true); }

std::vector<TimeOffset> measure_sim_delay(const SimDelayModel& model, std::size_t count, Rng& rng) {
  if (count == 0) throw std::invalid_argument("sample count must be >= 1");
  SimDelayProcess process(model, rng.child("sim-delay"));
  std::vector<TimeOffset> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(process.next_measured());
  return out;
}

CalibrationResult calibrate(std::span<const TimeOffset> samples) {
  if (samples.empty()) throw EmptySampleSet("calibration needs at least one sample");
  const auto n = static_cast<std::int64_t>(samples.size());

  std::int64_t sum = 0;
  for (auto s : samples) sum += s.ns();
  const TimeOffset mean = TimeOffset::from_ns(floor_div(2 * sum + n, 2 * n));

  long double dev_sum = 0;
  long double dev_sq = 0;
  Duration residual{};
  for (auto s : samples) {
    const TimeOffset dev = s - mean;
    dev_sum += static_cast<long double>(dev.ns());
    dev_sq += static_cast<long double>(dev.ns()) * static_cast<long double>(dev.ns());
    residual = max(residual, dev.abs());
  }
  long double var = 0;
  if (n > 1) var = (dev_sq - dev_sum * dev_sum / n) / (n - 1);
  if (var < 0) var = 0;

  CalibrationResult r;
  r.correction = mean;
  r.sample_count = samples.size();
  r.sample_stddev = Duration::from_ns(std::llround(std::sqrt(static_cast<double>(var))));
  r.residual_bound = residual;
  return r;
}

ClockChain apply_correction(ClockChain chain, const CalibrationResult& result) {
  chain.delta_sim -= result.correction;
  return chain;
}

void write_samples_csv(std::ostream& os, std::span<const TimeOffset> samples) {
  os << "timestamp_s,delay_ms\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::int64_t ns = samples[i].ns();
    const std::int64_t whole = ns / 1'000'000;
    std::int64_t frac = ns % 1'000'000;
    os << i << ',';
    if (ns < 0) os << '-';
    if (frac < 0) frac = -frac;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frac));
    os << (whole < 0 ? -whole : whole) << '.' << buf << '\n';
  }
}

std::vector<TimeOffset> read_samples_csv(std::istream& is) {
  std::vector<TimeOffset> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("timestamp", 0) == 0) continue;

    const auto comma = line.find(',');
    const std::string where = "line " + std::to_string(line_no);
    if (comma == std::string::npos) throw ConfigError(where, "expected `timestamp_s,delay_ms`");
    const std::string ts = trim(line.substr(0, comma));
    const std::string value = trim(line.substr(comma + 1));
    try {
      std::size_t used = 0;
      (void)std::stod(ts, &used);
      if (used != ts.size()) throw std::invalid_argument("timestamp");
      const double ms = std::stod(value, &used);
      if (used != value.size() || !std::isfinite(ms)) throw std::invalid_argument("delay");
      out.push_back(TimeOffset::from_millis(ms));
    } catch (const std::exception&) {
      throw ConfigError(where, "malformed number in `" + line + "`");
    }
  }
  if (out.empty()) throw EmptySampleSet("no samples in CSV input");
  return out;
}

}  // namespace gpssim::calibration
