#include "mtscore/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "mtscore/errors.hpp"

namespace mtscore {

using nlohmann::json;

namespace {

void check_fields(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (item.key() == name) {
        known = true;
        break;
      }
    if (!known) {
      std::ostringstream msg;
      msg << "unknown field \"" << item.key() << "\" in " << where << "; valid fields:";
      for (const char* name : allowed) msg << " " << name;
      throw ParseError(msg.str());
    }
  }
}

double get_double(const json& obj, const char* name, double fallback) {
  if (!obj.contains(name)) return fallback;
  const json& v = obj.at(name);
  if (!v.is_number()) throw ParseError(std::string("field \"") + name + "\" must be a number");
  return v.get<double>();
}

long get_long(const json& obj, const char* name, long fallback) {
  if (!obj.contains(name)) return fallback;
  const json& v = obj.at(name);
  if (!v.is_number_integer())
    throw ParseError(std::string("field \"") + name + "\" must be an integer");
  return v.get<long>();
}

std::uint64_t get_seed(const json& obj, const char* name, std::uint64_t fallback) {
  if (!obj.contains(name)) return fallback;
  const json& v = obj.at(name);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const long long s = v.get<long long>();
    if (s < 0) throw ValidationError("seed must be nonnegative");
    return static_cast<std::uint64_t>(s);
  }
  throw ParseError(std::string("field \"") + name + "\" must be a nonnegative integer");
}

std::string get_string(const json& obj, const char* name, const std::string& fallback) {
  if (!obj.contains(name)) return fallback;
  const json& v = obj.at(name);
  if (!v.is_string()) throw ParseError(std::string("field \"") + name + "\" must be a string");
  return v.get<std::string>();
}

NoiseSpec::Family parse_noise_family(const std::string& name) {
  if (name == "gaussian") return NoiseSpec::Family::gaussian;
  if (name == "k_dist") return NoiseSpec::Family::k_dist;
  throw ValidationError("noise family must be \"gaussian\" or \"k_dist\", got \"" + name + "\"");
}

DetectorKind parse_detector_kind(const std::string& name) {
  if (name == "mt_gqst") return DetectorKind::mt_gqst;
  if (name == "gqst") return DetectorKind::gqst;
  if (name == "zmnl_gqst") return DetectorKind::zmnl_gqst;
  throw ValidationError("detector kind must be one of mt_gqst, gqst, zmnl_gqst, got \"" + name +
                        "\"");
}

WidthPolicy parse_width_policy(const std::string& name) {
  if (name == "data_driven") return WidthPolicy::data_driven;
  if (name == "fixed") return WidthPolicy::fixed;
  throw ValidationError("width_policy must be \"data_driven\" or \"fixed\", got \"" + name + "\"");
}

DetectorConfig parse_detector(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be a JSON object");
  check_fields(obj, where, {"kind", "width_policy", "width", "clip_factor"});
  if (!obj.contains("kind")) throw ParseError(where + ": field \"kind\" is required");

  DetectorConfig d;
  d.kind = parse_detector_kind(get_string(obj, "kind", ""));
  if (d.kind != DetectorKind::mt_gqst) {
    if (obj.contains("width_policy") || obj.contains("width"))
      throw ValidationError(where + ": width settings apply only to kind mt_gqst");
  }
  if (d.kind != DetectorKind::zmnl_gqst && obj.contains("clip_factor"))
    throw ValidationError(where + ": clip_factor applies only to kind zmnl_gqst");

  if (obj.contains("width_policy"))
    d.width_policy = parse_width_policy(get_string(obj, "width_policy", ""));
  if (obj.contains("width")) {
    if (d.width_policy != WidthPolicy::fixed)
      throw ValidationError(where + ": width requires width_policy \"fixed\"");
    d.width = get_double(obj, "width", d.width);
  } else if (d.kind == DetectorKind::mt_gqst && d.width_policy == WidthPolicy::fixed) {
    throw ValidationError(where + ": width_policy \"fixed\" requires a width");
  }
  d.clip_factor = get_double(obj, "clip_factor", d.clip_factor);
  return d;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };

  if (c.trials < 1) fail("trials must be >= 1");
  if (c.snapshots < 1) fail("snapshots must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (c.array.sensors < 2) fail("array.sensors must be >= 2");
  if (!(c.array.spacing_m > 0.0)) fail("array.spacing_m must be positive");
  if (!(c.array.wavelength_m > 0.0)) fail("array.wavelength_m must be positive");
  for (const auto* loc : {&c.theta0, &c.theta1}) {
    if (!(loc->range_m > 0.0)) fail("range_m must be positive");
    if (!(std::abs(loc->bearing_deg) < 90.0)) fail("bearing_deg must lie in (-90, 90)");
  }
  if (!(c.noise.variance > 0.0)) fail("noise.variance must be positive");
  if (c.noise.family == NoiseSpec::Family::k_dist && !(c.noise.shape > 0.0))
    fail("noise.shape must be positive");
  if (!(c.signal.variance > 0.0)) fail("signal.variance must be positive");
  if (!(c.width_grid.min > 0.0) || !(c.width_grid.max >= c.width_grid.min) ||
      !(c.width_grid.step > 0.0))
    fail("width_grid must satisfy 0 < min <= max and step > 0");
  if (c.detectors.empty()) fail("at least one detector is required");
  for (const auto& d : c.detectors)
    if (d.kind == DetectorKind::mt_gqst && d.width_policy == WidthPolicy::fixed &&
        !(d.width > 0.0))
      fail("detector width must be positive");
  for (const auto& d : c.detectors)
    if (d.kind == DetectorKind::zmnl_gqst && !(d.clip_factor > 0.0))
      fail("clip_factor must be positive");
  if (c.threads < 0) fail("threads must be >= 0");
  if (c.mode == RunMode::power) {
    if (c.snr_grid_db.empty()) fail("power mode needs a nonempty snr_grid_db");
    if (c.theta0 == c.theta1) fail("power mode needs theta1 different from theta0");
  }
}

}  // namespace

std::string run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::size: return "size";
    case RunMode::power: return "power";
    case RunMode::width_curve: return "width_curve";
    case RunMode::single_test: return "single_test";
  }
  return "unknown";
}

RunMode parse_run_mode(const std::string& name) {
  if (name == "size") return RunMode::size;
  if (name == "power") return RunMode::power;
  if (name == "width_curve") return RunMode::width_curve;
  if (name == "single_test") return RunMode::single_test;
  throw ValidationError("mode must be one of size, power, width_curve, single_test, got \"" +
                        name + "\"");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("config root must be a JSON object");

  ExperimentConfig cfg;
  try {
    check_fields(root, "config",
                 {"mode", "seed", "trials", "snapshots", "alpha", "array", "theta0", "theta1",
                  "noise", "signal", "snr_grid_db", "width_grid", "detectors", "output_dir",
                  "threads"});

    if (root.contains("mode")) cfg.mode = parse_run_mode(get_string(root, "mode", ""));
    cfg.seed = get_seed(root, "seed", cfg.seed);
    cfg.trials = get_long(root, "trials", cfg.trials);
    cfg.snapshots = static_cast<int>(get_long(root, "snapshots", cfg.snapshots));
    cfg.alpha = get_double(root, "alpha", cfg.alpha);

    if (root.contains("array")) {
      const json& a = root.at("array");
      if (!a.is_object()) throw ParseError("array must be a JSON object");
      check_fields(a, "array", {"sensors", "spacing_m", "wavelength_m"});
      cfg.array.sensors = static_cast<int>(get_long(a, "sensors", cfg.array.sensors));
      cfg.array.spacing_m = get_double(a, "spacing_m", cfg.array.spacing_m);
      cfg.array.wavelength_m = get_double(a, "wavelength_m", cfg.array.wavelength_m);
    }
    for (auto [name, loc] : {std::pair{"theta0", &cfg.theta0}, std::pair{"theta1", &cfg.theta1}}) {
      if (!root.contains(name)) continue;
      const json& t = root.at(name);
      if (!t.is_object()) throw ParseError(std::string(name) + " must be a JSON object");
      check_fields(t, name, {"range_m", "bearing_deg"});
      loc->range_m = get_double(t, "range_m", loc->range_m);
      loc->bearing_deg = get_double(t, "bearing_deg", loc->bearing_deg);
    }
    if (root.contains("noise")) {
      const json& n = root.at("noise");
      if (!n.is_object()) throw ParseError("noise must be a JSON object");
      check_fields(n, "noise", {"family", "variance", "shape"});
      if (n.contains("family")) cfg.noise.family = parse_noise_family(get_string(n, "family", ""));
      if (cfg.noise.family == NoiseSpec::Family::gaussian && n.contains("shape"))
        throw ValidationError("noise.shape applies only to the k_dist family");
      cfg.noise.variance = get_double(n, "variance", cfg.noise.variance);
      cfg.noise.shape = get_double(n, "shape", cfg.noise.shape);
    }
    if (root.contains("signal")) {
      const json& s = root.at("signal");
      if (!s.is_object()) throw ParseError("signal must be a JSON object");
      check_fields(s, "signal", {"variance"});
      cfg.signal.variance = get_double(s, "variance", cfg.signal.variance);
    }
    if (root.contains("snr_grid_db")) {
      const json& g = root.at("snr_grid_db");
      if (!g.is_array()) throw ParseError("snr_grid_db must be an array of numbers");
      cfg.snr_grid_db.clear();
      for (const auto& v : g) {
        if (!v.is_number()) throw ParseError("snr_grid_db must be an array of numbers");
        cfg.snr_grid_db.push_back(v.get<double>());
      }
    }
    if (root.contains("width_grid")) {
      const json& w = root.at("width_grid");
      if (!w.is_object()) throw ParseError("width_grid must be a JSON object");
      check_fields(w, "width_grid", {"min", "max", "step"});
      cfg.width_grid.min = get_double(w, "min", cfg.width_grid.min);
      cfg.width_grid.max = get_double(w, "max", cfg.width_grid.max);
      cfg.width_grid.step = get_double(w, "step", cfg.width_grid.step);
    }
    if (root.contains("detectors")) {
      const json& ds = root.at("detectors");
      if (!ds.is_array()) throw ParseError("detectors must be an array");
      cfg.detectors.clear();
      for (std::size_t i = 0; i < ds.size(); ++i)
        cfg.detectors.push_back(parse_detector(ds[i], "detectors[" + std::to_string(i) + "]"));
    }
    cfg.output_dir = get_string(root, "output_dir", cfg.output_dir);
    cfg.threads = static_cast<int>(get_long(root, "threads", cfg.threads));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file: " + path);
  return parse_config(text.str());
}

std::string emit_config(const ExperimentConfig& c) {
  json root;
  root["mode"] = run_mode_name(c.mode);
  root["seed"] = c.seed;
  root["trials"] = c.trials;
  root["snapshots"] = c.snapshots;
  root["alpha"] = c.alpha;
  root["array"] = {{"sensors", c.array.sensors},
                   {"spacing_m", c.array.spacing_m},
                   {"wavelength_m", c.array.wavelength_m}};
  root["theta0"] = {{"range_m", c.theta0.range_m}, {"bearing_deg", c.theta0.bearing_deg}};
  root["theta1"] = {{"range_m", c.theta1.range_m}, {"bearing_deg", c.theta1.bearing_deg}};
  root["noise"] = {{"family", c.noise.family == NoiseSpec::Family::gaussian ? "gaussian" : "k_dist"},
                   {"variance", c.noise.variance}};
  if (c.noise.family == NoiseSpec::Family::k_dist) root["noise"]["shape"] = c.noise.shape;
  root["signal"] = {{"variance", c.signal.variance}};
  root["snr_grid_db"] = c.snr_grid_db;
  root["width_grid"] = {
      {"min", c.width_grid.min}, {"max", c.width_grid.max}, {"step", c.width_grid.step}};
  root["detectors"] = json::array();
  for (const auto& d : c.detectors) {
    json jd;
    jd["kind"] = detector_kind_name(d.kind);
    if (d.kind == DetectorKind::mt_gqst) {
      jd["width_policy"] = d.width_policy == WidthPolicy::fixed ? "fixed" : "data_driven";
      if (d.width_policy == WidthPolicy::fixed) jd["width"] = d.width;
    }
    if (d.kind == DetectorKind::zmnl_gqst) jd["clip_factor"] = d.clip_factor;
    root["detectors"].push_back(jd);
  }
  root["output_dir"] = c.output_dir;
  root["threads"] = c.threads;
  return root.dump(2);
}

}  // namespace mtscore
