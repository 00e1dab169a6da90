#include "gpssim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

#include "gpssim/error.hpp"

namespace gpssim::config {

using json = nlohmann::json;

placement::SpeedProfile DeploymentSpec::speed_profile() const {
  if (speed_segments.empty()) return placement::SpeedProfile::constant(v_max);
  return placement::SpeedProfile(speed_segments);
}

const receiver::ReceiverProfile& Config::receiver(const std::string& name) const {
  auto it = receivers.find(name);
  if (it == receivers.end()) throw ConfigError("receivers", "no receiver profile named '" + name + "'");
  return it->second;
}

const ScenarioSpec& Config::scenario(const std::string& name) const {
  auto it = scenarios.find(name);
  if (it == scenarios.end()) throw ConfigError("scenarios", "no scenario named '" + name + "'");
  return it->second;
}

Config default_config() {
  Config c;
  c.receivers.emplace("dedicated", receiver::ReceiverProfile::dedicated());
  c.receivers.emplace("smartphone", receiver::ReceiverProfile::smartphone());
  c.scenarios.emplace("static", StaticSpec{});
  c.scenarios.emplace("drive", TraversalSpec{});
  TraversalSpec walk;
  walk.path = scenario::PathScenario::pedestrian();
  walk.receiver = "smartphone";
  walk.clocks = {{ntp::ServerType::Private, true}};
  walk.runs = 3;
  c.scenarios.emplace("pedestrian", walk);
  c.scenarios.emplace("sweep", SweepSpec{});
  c.scenarios.emplace("outdoor", OutdoorSpec{});
  return c;
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

/// A JSON object being consumed: records which keys were read so the
/// leftovers can be rejected.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) throw ConfigError(join(path_, key), "required key is missing");
    return *v;
  }

  bool number(const std::string& key, double& out) {
    const json* v = find(key);
    if (!v) return false;
    out = as_number(*v, join(path_, key));
    return true;
  }

  template <typename Int>
  bool count(const std::string& key, Int& out) {
    const json* v = find(key);
    if (!v) return false;
    out = static_cast<Int>(as_count(*v, join(path_, key)));
    return true;
  }

  bool string(const std::string& key, std::string& out) {
    const json* v = find(key);
    if (!v) return false;
    if (!v->is_string()) throw ConfigError(join(path_, key), "expected a string");
    out = v->get<std::string>();
    return true;
  }

  bool boolean(const std::string& key, bool& out) {
    const json* v = find(key);
    if (!v) return false;
    if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
    out = v->get<bool>();
    return true;
  }

  bool numbers(const std::string& key, std::vector<double>& out) {
    const json* v = find(key);
    if (!v) return false;
    const std::string p = join(path_, key);
    if (!v->is_array()) throw ConfigError(p, "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_number((*v)[i], index_path(p, i)));
    return true;
  }

  bool millis(const std::string& key, Duration& out) {
    double ms = 0.0;
    if (!number(key, ms)) return false;
    out = Duration::from_millis(ms);
    return true;
  }

  bool seconds(const std::string& key, Duration& out) {
    double s = 0.0;
    if (!number(key, s)) return false;
    out = Duration::from_seconds(s);
    return true;
  }

  bool micros(const std::string& key, Duration& out) {
    double us = 0.0;
    if (!number(key, us)) return false;
    out = Duration::from_ns(static_cast<std::int64_t>(std::llround(us * 1e3)));
    return true;
  }

  bool nanos(const std::string& key, Duration& out) {
    double ns = 0.0;
    if (!number(key, ns)) return false;
    out = Duration::from_ns(static_cast<std::int64_t>(std::llround(ns)));
    return true;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
    return d;
  }

  static std::uint64_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

/// Runs `fn` and rethrows validation failures as ConfigError at `path`.
template <typename Fn>
void validated(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void parse_link(const json& j, const std::string& path, ntp::LinkModel& link) {
  Obj o(j, path);
  o.millis("delay_up_ms", link.base_delay_up);
  o.millis("delay_down_ms", link.base_delay_down);
  o.millis("jitter_up_median_ms", link.jitter_up.median);
  o.number("jitter_up_sigma", link.jitter_up.sigma);
  o.millis("jitter_down_median_ms", link.jitter_down.median);
  o.number("jitter_down_sigma", link.jitter_down.sigma);
  o.millis("asymmetry_bias_ms", link.asymmetry_bias);
  o.finish();
  if (link.base_delay_up < Duration{} || link.base_delay_down < Duration{}) {
    throw ConfigError(path, "link delays must be non-negative");
  }
  if (link.jitter_up.sigma < 0.0 || link.jitter_down.sigma < 0.0) {
    throw ConfigError(path, "jitter sigma must be non-negative");
  }
}

ntp::Connection parse_connection(const std::string& s, const std::string& path) {
  if (s == "wired") return ntp::Connection::Wired;
  if (s == "wireless") return ntp::Connection::Wireless;
  throw ConfigError(path, "expected \"wired\" or \"wireless\"");
}

void parse_ntp(const json& j, Config& c) {
  Obj o(j, "ntp");
  auto& n = c.ntp;
  for (auto [key, link] : {std::pair<const char*, ntp::LinkModel*>{"wired_access", &n.wired_access},
                           {"wireless_access", &n.wireless_access},
                           {"public_path_wired", &n.public_path_wired},
                           {"public_path_wireless", &n.public_path_wireless},
                           {"public_hop", &n.public_hop}}) {
    if (const json* v = o.find(key)) parse_link(*v, join("ntp", key), *link);
  }
  o.count("public_chain_depth", n.public_chain_depth);
  o.nanos("public_wander_step_ns", n.public_wander_step);
  o.nanos("reference_error_ns", n.reference_error);
  o.number("client_frequency_ppm", n.client_frequency_ppm);
  o.number("server_frequency_ppm", n.server_frequency_ppm);
  o.millis("client_initial_offset_ms", n.client_initial_offset);
  o.seconds("duration_s", n.duration);
  o.seconds("warmup_s", n.warmup);
  std::string conn;
  if (o.string("simulator_connection", conn)) {
    c.options.clocks.connection = parse_connection(conn, "ntp.simulator_connection");
  }
  if (const json* d = o.find("discipline")) {
    Obj dz(*d, "ntp.discipline");
    auto& dc = n.discipline;
    dz.seconds("poll_interval_s", dc.poll_interval);
    dz.number("gain", dc.gain);
    dz.number("max_slew_ppm", dc.max_slew_ppm);
    dz.number("drift_bound_ppm", dc.drift_bound_ppm);
    dz.count("filter_length", dc.filter_length);
    dz.micros("error_floor_us", dc.error_floor);
    dz.millis("initial_error_bound_ms", dc.initial_error_bound);
    dz.finish();
    if (dc.poll_interval <= Duration{}) throw ConfigError("ntp.discipline.poll_interval_s", "must be positive");
    if (!(dc.gain > 0.0 && dc.gain <= 1.0)) throw ConfigError("ntp.discipline.gain", "must be in (0, 1]");
    if (dc.filter_length == 0) throw ConfigError("ntp.discipline.filter_length", "must be at least 1");
  }
  o.finish();
  if (n.duration <= n.warmup) throw ConfigError("ntp.duration_s", "must exceed warmup_s");
}

void parse_calibration(const json& j, Config& c) {
  Obj o(j, "calibration");
  o.count("sample_count", c.calibration_samples);
  o.millis("mean_delay_ms", c.sim_delay.mean_delay);
  o.micros("wander_us", c.sim_delay.wander);
  o.millis("measurement_noise_ms", c.sim_delay.measurement_noise);
  double ms = 0.0;
  if (o.number("correction_ms", ms)) c.calibration_correction = TimeOffset::from_millis(ms);
  // Written by `calibrate` next to the correction; informational only.
  o.number("sample_stddev_ms", ms);
  o.number("residual_bound_ms", ms);
  o.finish();
  if (c.calibration_samples == 0) throw ConfigError("calibration.sample_count", "must be at least 1");
  validated("calibration", [&] { c.sim_delay.validate(); });
}

void parse_receiver(const json& j, const std::string& path, receiver::ReceiverProfile& p) {
  Obj o(j, path);
  o.seconds("t_reacq_base_s", p.t_reacq_base);
  o.seconds("t_max_s", p.t_max);
  o.seconds("t_acq_s", p.t_acq);
  if (const json* knots = o.find("reacq_knots")) {
    const std::string kp = join(path, "reacq_knots");
    if (!knots->is_array()) throw ConfigError(kp, "expected an array of knots");
    p.reacq_vs_offset.clear();
    for (std::size_t i = 0; i < knots->size(); ++i) {
      Obj k((*knots)[i], index_path(kp, i));
      receiver::ReacqKnot knot{};
      double v = 0.0;
      v = Obj::as_number(k.require("offset_ms"), join(k.path(), "offset_ms"));
      knot.offset = Duration::from_millis(v);
      v = Obj::as_number(k.require("reacq_s"), join(k.path(), "reacq_s"));
      knot.reacq_time = Duration::from_seconds(v);
      k.finish();
      p.reacq_vs_offset.push_back(knot);
    }
  } else if (o.has("t_reacq_base_s")) {
    // Base given without a curve: keep the default shape, rescaled.
    const double scale = p.t_reacq_base.seconds() / p.reacq_vs_offset.front().reacq_time.seconds();
    for (auto& k : p.reacq_vs_offset) k.reacq_time = Duration::from_seconds(k.reacq_time.seconds() * scale);
  }
  o.number("pos_rate_hz", p.pos_rate_hz);
  o.number("pseudorange_noise_m", p.pseudorange_noise_m);
  o.finish();
  validated(path, [&] { p.validate(); });
}

void parse_receivers(const json& j, Config& c) {
  if (!j.is_object()) throw ConfigError("receivers", "expected an object of named profiles");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = join("receivers", it.key());
    receiver::ReceiverProfile p = it.key() == "smartphone" ? receiver::ReceiverProfile::smartphone()
                                                           : receiver::ReceiverProfile::dedicated();
    p.name = it.key();
    parse_receiver(it.value(), path, p);
    c.receivers[it.key()] = p;
  }
}

std::vector<placement::SpeedProfile::Segment> parse_segments(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of segments");
  std::vector<placement::SpeedProfile::Segment> segs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Obj s(j[i], index_path(path, i));
    const double start = Obj::as_number(s.require("start_m"), join(s.path(), "start_m"));
    const double kmh = Obj::as_number(s.require("v_kmh"), join(s.path(), "v_kmh"));
    s.finish();
    if (!(kmh > 0.0)) throw ConfigError(join(s.path(), "v_kmh"), "must be positive");
    segs.push_back({start, placement::Speed::from_kmh(kmh)});
  }
  validated(path, [&] { placement::SpeedProfile check(segs); });
  return segs;
}

void parse_deployment(const json& j, Config& c) {
  Obj o(j, "deployment");
  auto& d = c.deployment;
  std::vector<double> pos;
  const std::string pp = "deployment.simulator_positions_m";
  const json& pj = o.require("simulator_positions_m");
  if (!pj.is_array() || pj.empty()) throw ConfigError(pp, "expected a non-empty array of numbers");
  for (std::size_t i = 0; i < pj.size(); ++i) pos.push_back(Obj::as_number(pj[i], index_path(pp, i)));
  d.simulator_positions_m = pos;
  d.coverage_radius_m = Obj::as_number(o.require("coverage_radius_m"), "deployment.coverage_radius_m");
  const double kmh = Obj::as_number(o.require("v_max_kmh"), "deployment.v_max_kmh");
  if (!(kmh > 0.0)) throw ConfigError("deployment.v_max_kmh", "must be positive");
  d.v_max = placement::Speed::from_kmh(kmh);
  if (const json* s = o.find("speed_segments")) d.speed_segments = parse_segments(*s, "deployment.speed_segments");
  if (const json* t = o.find("timing")) {
    Obj to(*t, "deployment.timing");
    to.number("t_reacq_s", d.timing.t_reacq);
    to.number("t_max_s", d.timing.t_max);
    to.number("t_acq_s", d.timing.t_acq);
    to.finish();
    validated("deployment.timing", [&] { d.timing.validate(); });
  }
  double sep = 0.0;
  if (o.number("separation_m", sep)) d.separation_m = sep;
  o.numbers("curve_radii_m", d.curve_radii_m);
  o.numbers("curve_separations_m", d.curve_separations_m);
  o.numbers("curve_speeds_kmh", d.curve_speeds_kmh);
  o.finish();
  if (!(d.coverage_radius_m > 0.0)) throw ConfigError("deployment.coverage_radius_m", "must be positive");
  if (!std::is_sorted(d.simulator_positions_m.begin(), d.simulator_positions_m.end())) {
    throw ConfigError(pp, "positions must be sorted along the path");
  }
}

void parse_options(const json& j, Config& c) {
  Obj o(j, "scenario_options");
  auto& opt = c.options;
  double ms = 0.0;
  if (o.number("dt_ms", ms)) {
    opt.dt = Duration::from_millis(ms);
    if (opt.dt <= Duration{}) throw ConfigError("scenario_options.dt_ms", "must be positive");
  }
  o.seconds("ntp_warmup_s", opt.clocks.ntp_warmup);
  if (const json* g = o.find("origin")) {
    Obj go(*g, "scenario_options.origin");
    double lat = opt.origin.lat_rad * 180.0 / std::numbers::pi;
    double lon = opt.origin.lon_rad * 180.0 / std::numbers::pi;
    go.number("lat_deg", lat);
    go.number("lon_deg", lon);
    go.number("height_m", opt.origin.height_m);
    go.finish();
    if (std::abs(lat) > 90.0) throw ConfigError("scenario_options.origin.lat_deg", "must be within [-90, 90]");
    opt.origin.lat_rad = lat * std::numbers::pi / 180.0;
    opt.origin.lon_rad = lon * std::numbers::pi / 180.0;
  }
  if (const json* s = o.find("sky")) {
    Obj so(*s, "scenario_options.sky");
    so.count("satellites", opt.sky.satellites);
    so.number("orbit_radius_m", opt.sky.orbit_radius_m);
    so.number("speed_mps", opt.sky.speed_mps);
    so.number("elevation_mask_deg", opt.sky.elevation_mask_deg);
    so.number("max_pdop", opt.sky.max_pdop);
    so.finish();
    if (opt.sky.satellites < 4) throw ConfigError("scenario_options.sky.satellites", "need at least 4");
  }
  if (o.number("live_sky_sigma_m", opt.live_sky_sigma_m) && opt.live_sky_sigma_m < 0.0) {
    throw ConfigError("scenario_options.live_sky_sigma_m", "must be non-negative");
  }
  o.finish();
}

std::vector<scenario::ClockConfig> parse_clocks(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of clock configurations");
  std::vector<scenario::ClockConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = index_path(path, i);
    if (!j[i].is_string()) throw ConfigError(p, "expected a string such as \"private/calibrated\"");
    validated(p, [&] { out.push_back(scenario::parse_clock_config(j[i].get<std::string>())); });
  }
  return out;
}

ScenarioSpec parse_scenario(const json& j, const std::string& path, const std::string& name) {
  Obj o(j, path);
  std::string type;
  if (!o.string("type", type)) throw ConfigError(join(path, "type"), "required key is missing");

  if (type == "static") {
    StaticSpec s;
    if (const json* c = o.find("clocks")) s.clocks = parse_clocks(*c, join(path, "clocks"));
    o.string("receiver", s.receiver);
    o.count("trials", s.trials);
    o.finish();
    if (s.trials == 0) throw ConfigError(join(path, "trials"), "must be at least 1");
    return s;
  }
  if (type == "traversal") {
    TraversalSpec s;
    std::string preset = "drive";
    o.string("preset", preset);
    if (preset == "pedestrian") {
      s.path = scenario::PathScenario::pedestrian();
      s.receiver = "smartphone";
      s.clocks = {{ntp::ServerType::Private, true}};
      s.runs = 3;
    } else if (preset != "drive") {
      throw ConfigError(join(path, "preset"), "expected \"drive\" or \"pedestrian\"");
    }
    s.path.name = name;
    if (const json* c = o.find("clocks")) s.clocks = parse_clocks(*c, join(path, "clocks"));
    o.string("receiver", s.receiver);
    o.count("runs", s.runs);
    o.number("path_length_m", s.path.path_length_m);
    o.number("tunnel_start_m", s.path.tunnel_start_m);
    o.number("tunnel_end_m", s.path.tunnel_end_m);
    o.numbers("simulator_positions_m", s.path.simulator_positions);
    o.number("coverage_radius_m", s.path.coverage_radius_m);
    o.number("heading_deg", s.path.heading_deg);
    o.boolean("strict", s.path.strict);
    double kmh = 0.0;
    const bool has_speed = o.number("speed_kmh", kmh);
    const json* segs = o.find("speed_segments");
    if (has_speed && segs) throw ConfigError(join(path, "speed_kmh"), "give either speed_kmh or speed_segments");
    if (has_speed) {
      if (!(kmh > 0.0)) throw ConfigError(join(path, "speed_kmh"), "must be positive");
      s.path.speed = placement::SpeedProfile::constant(placement::Speed::from_kmh(kmh));
    }
    if (segs) s.path.speed = placement::SpeedProfile(parse_segments(*segs, join(path, "speed_segments")));
    o.finish();
    if (s.runs == 0) throw ConfigError(join(path, "runs"), "must be at least 1");
    return s;
  }
  if (type == "sweep") {
    SweepSpec s;
    std::vector<double> ms;
    if (o.numbers("offsets_ms", ms)) {
      if (ms.empty()) throw ConfigError(join(path, "offsets_ms"), "must not be empty");
      s.offsets.clear();
      for (double v : ms) s.offsets.push_back(TimeOffset::from_millis(v));
    }
    if (const json* r = o.find("receivers")) {
      const std::string rp = join(path, "receivers");
      if (!r->is_array() || r->empty()) throw ConfigError(rp, "expected a non-empty array of profile names");
      s.receivers.clear();
      for (std::size_t i = 0; i < r->size(); ++i) {
        if (!(*r)[i].is_string()) throw ConfigError(index_path(rp, i), "expected a string");
        s.receivers.push_back((*r)[i].get<std::string>());
      }
    }
    o.count("trials", s.trials);
    o.finish();
    if (s.trials == 0) throw ConfigError(join(path, "trials"), "must be at least 1");
    return s;
  }
  if (type == "outdoor") {
    OutdoorSpec s;
    o.string("receiver", s.receiver);
    o.count("trials", s.trials);
    o.number("coverage_radius_m", s.coverage_radius_m);
    o.finish();
    if (s.trials == 0) throw ConfigError(join(path, "trials"), "must be at least 1");
    return s;
  }
  throw ConfigError(join(path, "type"), "expected static, traversal, sweep or outdoor");
}

void check_receiver_refs(const Config& c) {
  auto need = [&](const std::string& name, const std::string& path) {
    if (!c.receivers.count(name)) throw ConfigError(path, "no receiver profile named '" + name + "'");
  };
  for (const auto& [name, spec] : c.scenarios) {
    const std::string path = join("scenarios", name);
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, SweepSpec>) {
            for (std::size_t i = 0; i < s.receivers.size(); ++i) {
              need(s.receivers[i], index_path(join(path, "receivers"), i));
            }
          } else {
            need(s.receiver, join(path, "receiver"));
          }
        },
        spec);
  }
}

}  // namespace

Config parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  Config c = default_config();
  Obj o(root, "");
  if (const json* v = o.find("seed")) c.seed = Obj::as_count(*v, "seed");
  if (const json* v = o.find("ntp")) parse_ntp(*v, c);
  if (const json* v = o.find("calibration")) parse_calibration(*v, c);
  if (const json* v = o.find("receivers")) parse_receivers(*v, c);
  if (const json* v = o.find("deployment")) parse_deployment(*v, c);
  if (const json* v = o.find("scenario_options")) parse_options(*v, c);
  if (const json* v = o.find("scenarios")) {
    if (!v->is_object()) throw ConfigError("scenarios", "expected an object of named scenarios");
    for (auto it = v->begin(); it != v->end(); ++it) {
      c.scenarios[it.key()] = parse_scenario(it.value(), join("scenarios", it.key()), it.key());
    }
  }
  o.finish();

  // Scenario traversals take their receiver from the named profile.
  for (auto& [name, spec] : c.scenarios) {
    if (auto* t = std::get_if<TraversalSpec>(&spec)) {
      if (c.receivers.count(t->receiver)) t->path.receiver = c.receivers.at(t->receiver);
    }
  }
  check_receiver_refs(c);
  c.options.clocks.ntp = c.ntp;
  c.options.clocks.sim_delay = c.sim_delay;
  c.options.clocks.calibration_samples = c.calibration_samples;
  c.options.clocks.fixed_correction = c.calibration_correction;
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace gpssim::config
