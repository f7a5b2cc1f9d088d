#include "cavesim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "cavesim/errors.hpp"

namespace cavesim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check_keys(const YAML::Node& node, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError("section '" + section + "' must be a mapping");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) throw ConfigError("unknown key '" + key + "' in '" + section + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (const auto n = node[key]) {
    try {
      out = n.as<T>();
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

/// Reads `key` in radians or `key_deg` in degrees.
void read_angle(const YAML::Node& node, const std::string& key, double& out) {
  read(node, key.c_str(), out);
  double deg = 0;
  if (node[key + "_deg"]) {
    read(node, (key + "_deg").c_str(), deg);
    out = deg * kDeg;
  }
}

Vec3 as_vec3(const YAML::Node& n, const char* what) {
  if (!n.IsSequence() || n.size() != 3) {
    throw ConfigError(std::string(what) + " must be a list of three numbers");
  }
  try {
    return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

void read_vec3(const YAML::Node& node, const char* key, Vec3& out) {
  if (const auto n = node[key]) out = as_vec3(n, key);
}

PidGains as_gains(const YAML::Node& n, const char* what) {
  if (!n.IsSequence() || n.size() < 2 || n.size() > 3) {
    throw ConfigError(std::string(what) + " must be [kp, kd] or [kp, kd, ki]");
  }
  PidGains g;
  try {
    g.kp = n[0].as<double>();
    g.kd = n[1].as<double>();
    if (n.size() == 3) g.ki = n[2].as<double>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
  return g;
}

std::vector<std::pair<double, double>> as_pairs(const YAML::Node& n, const char* what) {
  std::vector<std::pair<double, double>> out;
  if (!n.IsSequence()) throw ConfigError(std::string(what) + " must be a list of pairs");
  for (const auto& p : n) {
    if (!p.IsSequence() || p.size() != 2) {
      throw ConfigError(std::string(what) + " entries must be two numbers");
    }
    out.emplace_back(p[0].as<double>(), p[1].as<double>());
  }
  return out;
}

CavelinePath parse_path(const YAML::Node& n) {
  check_keys(n, "path",
             {"type", "width", "height", "depth", "line_width", "circumradius", "rows",
              "row_length", "row_spacing", "vertices", "closed", "offset"});
  std::string type = "rectangle";
  double width = 1, height = 2, depth = 1.5, line_width = 0.01, radius = 1, row_length = 3,
         row_spacing = 1;
  int rows = 3;
  bool closed = false;
  Vec3 offset = Vec3::Zero();
  read(n, "type", type);
  read(n, "width", width);
  read(n, "height", height);
  read(n, "depth", depth);
  read(n, "line_width", line_width);
  read(n, "circumradius", radius);
  read(n, "rows", rows);
  read(n, "row_length", row_length);
  read(n, "row_spacing", row_spacing);
  read(n, "closed", closed);
  read_vec3(n, "offset", offset);

  auto build = [&]() -> CavelinePath {
    if (type == "rectangle") return build_rectangle_loop(width, height, depth, line_width);
    if (type == "hexagon") return build_hexagon_loop(radius, depth, line_width);
    if (type == "lawnmower") {
      return build_lawnmower(rows, row_length, row_spacing, depth, line_width);
    }
    if (type == "polyline") {
      std::vector<Vec3> vertices;
      if (!n["vertices"]) throw ConfigError("polyline path needs 'vertices'");
      for (const auto& v : n["vertices"]) vertices.push_back(as_vec3(v, "path vertex"));
      return CavelinePath(std::move(vertices), closed, line_width);
    }
    throw ConfigError("unknown path type '" + type + "'");
  };
  try {
    auto path = build();
    return offset.isZero(0.0) ? path : path.translated(offset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("path: ") + e.what());
  }
}

void emit_vec3(YAML::Emitter& e, const char* key, const Vec3& v) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << v.x() << v.y()
    << v.z() << YAML::EndSeq;
}

void emit_pairs(YAML::Emitter& e, const char* key,
                const std::vector<std::pair<double, double>>& pairs) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& [a, b] : pairs) e << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq;
  e << YAML::EndSeq;
}

void emit_gains(YAML::Emitter& e, const char* key, const PidGains& g) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << g.kp << g.kd << g.ki
    << YAML::EndSeq;
}

}  // namespace

void Scenario::validate() const {
  if (!(target_depth > 0) || !(target_depth < floor_depth)) {
    throw ConfigError("target depth must satisfy 0 < target_depth < floor_depth");
  }
  if (!(duration > 0)) throw ConfigError("duration must be positive");
  if (!(initial_position.z() > 0)) throw ConfigError("initial depth must be positive");
  if (!(initial_position.z() < floor_depth)) throw ConfigError("initial depth is below the floor");
  try {
    current.validate();
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void SimConfig::validate() const {
  scenario.validate();
  try {
    vehicle.validate();
    control.heading.validate();
    control.depth.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!camera.valid()) throw ConfigError("invalid camera intrinsics");
  if (!(timing.dt > 0) || timing.dt > 0.1) throw ConfigError("dt must lie in (0, 0.1]");
  if (timing.camera_period < timing.dt - 1e-12) throw ConfigError("camera_period must be >= dt");
  if (timing.eval_period < timing.dt - 1e-12) throw ConfigError("eval_period must be >= dt");
  if (servo.min_area_px < 1) throw ConfigError("min_area_px must be at least 1");
  if (!(servo.psi_slow > 0)) throw ConfigError("psi_slow must be positive");
  if (!(servo.lookahead_px >= 0)) throw ConfigError("lookahead_px must be non-negative");
  if (grid.repeats < 1) throw ConfigError("grid repeats must be at least 1");
}

bool SimConfig::camera_blacked_out(double t) const {
  for (const auto& [start, end] : camera_blackouts) {
    if (t >= start && t < end) return true;
  }
  return false;
}

std::vector<std::pair<double, double>> default_heading_pairs() {
  return {{1, 0},     {2, 0},     {3, 0},     {3, 0.5},   {3.5, 0.5},
          {3.5, 0.7}, {3.4, 0.7}, {3.4, 0.9}, {3.5, 0.9}, {3.4, 1.0}};
}

std::vector<std::pair<double, double>> default_depth_pairs() {
  return {{500, 0},  {500, 10}, {550, 10}, {600, 10},  {600, 20},
          {600, 30}, {600, 50}, {600, 100}, {650, 200}, {720, 300}};
}

SimConfig parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("scenario must be a YAML mapping");
  check_keys(root, "scenario",
             {"name", "seed", "duration", "path", "environment", "initial", "timing", "camera",
              "perception", "sensors", "control", "vehicle", "evaluation", "grid"});

  SimConfig c;
  c.grid.heading_pairs = default_heading_pairs();
  c.grid.depth_pairs = default_depth_pairs();
  auto& s = c.scenario;
  read(root, "name", c.name);
  read(root, "seed", s.seed);
  read(root, "duration", s.duration);
  if (root["path"]) s.path = parse_path(root["path"]);

  if (const auto env = root["environment"]) {
    check_keys(env, "environment", {"floor_depth", "target_depth", "current"});
    read(env, "floor_depth", s.floor_depth);
    read(env, "target_depth", s.target_depth);
    if (const auto cur = env["current"]) {
      check_keys(cur, "current", {"velocity", "gust_amplitude", "gust_period"});
      read_vec3(cur, "velocity", s.current.velocity);
      read_vec3(cur, "gust_amplitude", s.current.gust_amplitude);
      read(cur, "gust_period", s.current.gust_period);
    }
  }

  if (const auto init = root["initial"]) {
    check_keys(init, "initial", {"position", "attitude", "attitude_deg"});
    read_vec3(init, "position", s.initial_position);
    Vec3 att = Vec3::Zero();
    if (init["attitude"]) att = as_vec3(init["attitude"], "attitude");
    if (init["attitude_deg"]) att = as_vec3(init["attitude_deg"], "attitude_deg") * kDeg;
    s.initial_attitude = EulerAngles{att.x(), att.y(), att.z()}.wrapped();
  }

  if (const auto t = root["timing"]) {
    check_keys(t, "timing",
               {"dt", "camera_period", "eval_period", "stabilize", "stop_after_loops", "warmup"});
    read(t, "dt", c.timing.dt);
    read(t, "camera_period", c.timing.camera_period);
    read(t, "eval_period", c.timing.eval_period);
    read(t, "stabilize", c.timing.stabilize_s);
    read(t, "stop_after_loops", c.timing.stop_after_loops);
    read(t, "warmup", c.warmup_s);
  }

  if (const auto cam = root["camera"]) {
    check_keys(cam, "camera", {"width", "height", "fov_deg", "intrinsics", "blackouts"});
    int width = c.camera.width, height = c.camera.height;
    read(cam, "width", width);
    read(cam, "height", height);
    double fov_u = 80, fov_v = 64;
    if (const auto f = cam["fov_deg"]) {
      if (!f.IsSequence() || f.size() != 2) throw ConfigError("fov_deg must be [u, v]");
      fov_u = f[0].as<double>();
      fov_v = f[1].as<double>();
    }
    try {
      c.camera = CameraIntrinsics::from_fov(width, height, fov_u * kDeg, fov_v * kDeg);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (const auto k = cam["intrinsics"]) {
      if (!k.IsSequence() || k.size() != 4) throw ConfigError("intrinsics must be [fx, fy, cx, cy]");
      c.camera.fx = k[0].as<double>();
      c.camera.fy = k[1].as<double>();
      c.camera.cx = k[2].as<double>();
      c.camera.cy = k[3].as<double>();
    }
    if (cam["blackouts"]) c.camera_blackouts = as_pairs(cam["blackouts"], "blackouts");
  }

  if (const auto p = root["perception"]) {
    check_keys(p, "perception", {"min_area_px", "noise"});
    read(p, "min_area_px", c.servo.min_area_px);
    if (const auto n = p["noise"]) {
      check_keys(n, "noise",
                 {"dropout_prob", "gap_rate", "gap_length_px", "speckle_rate", "speckle_area_px"});
      read(n, "dropout_prob", s.noise.dropout_prob);
      read(n, "gap_rate", s.noise.gap_rate);
      read(n, "gap_length_px", s.noise.gap_length_px);
      read(n, "speckle_rate", s.noise.speckle_rate);
      read(n, "speckle_area_px", s.noise.speckle_area_px);
    }
  }

  if (const auto sn = root["sensors"]) {
    check_keys(sn, "sensors",
               {"imu_sigma", "imu_sigma_deg", "depth_sigma", "depth_quantum", "sonar_sigma",
                "sonar_resolution"});
    read_angle(sn, "imu_sigma", c.sensors.imu_sigma_rad);
    read(sn, "depth_sigma", c.sensors.depth.sigma_m);
    read(sn, "depth_quantum", c.sensors.depth.quantum_m);
    read(sn, "sonar_sigma", c.sensors.sonar.sigma_m);
    read(sn, "sonar_resolution", c.sensors.sonar.resolution);
  }

  if (const auto ctl = root["control"]) {
    check_keys(ctl, "control",
               {"heading", "depth", "heading_gain_scale", "depth_gain_scale", "cruise_surge",
                "psi_slow", "psi_slow_deg", "recovery_rate", "recovery_rate_deg",
                "forward_crop", "lookahead_px"});
    if (ctl["heading"]) c.control.heading = as_gains(ctl["heading"], "control.heading");
    if (ctl["depth"]) c.control.depth = as_gains(ctl["depth"], "control.depth");
    read(ctl, "heading_gain_scale", c.control.heading_gain_scale);
    read(ctl, "depth_gain_scale", c.control.depth_gain_scale);
    read(ctl, "cruise_surge", c.servo.cruise_surge);
    read_angle(ctl, "psi_slow", c.servo.psi_slow);
    read_angle(ctl, "recovery_rate", c.servo.recovery_yaw_rate);
    read(ctl, "forward_crop", c.servo.forward_crop);
    read(ctl, "lookahead_px", c.servo.lookahead_px);
  }

  if (const auto v = root["vehicle"]) {
    check_keys(v, "vehicle",
               {"mass", "buoyancy_force", "buoyancy_ratio", "center_of_buoyancy_offset",
                "inertia", "linear_drag", "angular_drag", "max_thrust", "horizontal_arm",
                "vertical_arm", "mixing", "camera_to_sonar_offset"});
    auto& vp = c.vehicle;
    read(v, "mass", vp.mass);
    vp.buoyancy_force = vp.mass * kGravity * 1.02;
    read(v, "buoyancy_force", vp.buoyancy_force);
    if (v["buoyancy_ratio"]) {
      double ratio = 1;
      read(v, "buoyancy_ratio", ratio);
      vp.buoyancy_force = vp.mass * kGravity * ratio;
    }
    read_vec3(v, "center_of_buoyancy_offset", vp.center_of_buoyancy_offset);
    read_vec3(v, "inertia", vp.inertia);
    read_vec3(v, "linear_drag", vp.linear_drag_coeffs);
    read_vec3(v, "angular_drag", vp.angular_drag_coeffs);
    read(v, "max_thrust", vp.max_thrust);
    if (v["horizontal_arm"] || v["vertical_arm"]) {
      double h = 0.08, vert = 0.09;
      read(v, "horizontal_arm", h);
      read(v, "vertical_arm", vert);
      vp.mixing = VehicleParams::default_mixing(h, vert);
    }
    if (const auto m = v["mixing"]) {
      if (!m.IsSequence() || m.size() != 4) throw ConfigError("mixing must be 4 rows");
      for (int r = 0; r < 4; ++r) {
        if (!m[r].IsSequence() || m[r].size() != 4) throw ConfigError("mixing rows need 4 values");
        for (int col = 0; col < 4; ++col) vp.mixing(r, col) = m[r][col].as<double>();
      }
    }
    read_vec3(v, "camera_to_sonar_offset", vp.camera_to_sonar_offset);
  }

  if (const auto ev = root["evaluation"]) {
    check_keys(ev, "evaluation", {"corner_radius"});
    read(ev, "corner_radius", c.corner_radius);
  }

  if (const auto g = root["grid"]) {
    check_keys(g, "grid", {"heading_pairs", "depth_pairs", "repeats", "metric"});
    if (g["heading_pairs"]) c.grid.heading_pairs = as_pairs(g["heading_pairs"], "heading_pairs");
    if (g["depth_pairs"]) c.grid.depth_pairs = as_pairs(g["depth_pairs"], "depth_pairs");
    read(g, "repeats", c.grid.repeats);
    std::string metric = "oracle";
    read(g, "metric", metric);
    if (metric == "oracle") {
      c.grid.metric = DeltaSource::kOracle;
    } else if (metric == "pipeline") {
      c.grid.metric = DeltaSource::kPipeline;
    } else {
      throw ConfigError("grid.metric must be 'oracle' or 'pipeline'");
    }
  }

  c.servo.target_depth = s.target_depth;
  c.validate();
  return c;
}

SimConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open scenario file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_yaml(const SimConfig& c) {
  const auto& s = c.scenario;
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << c.name;
  e << YAML::Key << "seed" << YAML::Value << s.seed;
  e << YAML::Key << "duration" << YAML::Value << s.duration;

  e << YAML::Key << "path" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "type" << YAML::Value << "polyline";
  e << YAML::Key << "closed" << YAML::Value << s.path.closed();
  e << YAML::Key << "line_width" << YAML::Value << s.path.line_width();
  e << YAML::Key << "vertices" << YAML::Value << YAML::BeginSeq;
  for (const auto& v : s.path.vertices()) {
    e << YAML::Flow << YAML::BeginSeq << v.x() << v.y() << v.z() << YAML::EndSeq;
  }
  e << YAML::EndSeq << YAML::EndMap;

  e << YAML::Key << "environment" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "floor_depth" << YAML::Value << s.floor_depth;
  e << YAML::Key << "target_depth" << YAML::Value << s.target_depth;
  e << YAML::Key << "current" << YAML::Value << YAML::BeginMap;
  emit_vec3(e, "velocity", s.current.velocity);
  emit_vec3(e, "gust_amplitude", s.current.gust_amplitude);
  e << YAML::Key << "gust_period" << YAML::Value << s.current.gust_period;
  e << YAML::EndMap << YAML::EndMap;

  e << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  emit_vec3(e, "position", s.initial_position);
  emit_vec3(e, "attitude",
            {s.initial_attitude.roll, s.initial_attitude.pitch, s.initial_attitude.yaw});
  e << YAML::EndMap;

  e << YAML::Key << "timing" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dt" << YAML::Value << c.timing.dt;
  e << YAML::Key << "camera_period" << YAML::Value << c.timing.camera_period;
  e << YAML::Key << "eval_period" << YAML::Value << c.timing.eval_period;
  e << YAML::Key << "stabilize" << YAML::Value << c.timing.stabilize_s;
  e << YAML::Key << "stop_after_loops" << YAML::Value << c.timing.stop_after_loops;
  e << YAML::Key << "warmup" << YAML::Value << c.warmup_s;
  e << YAML::EndMap;

  e << YAML::Key << "camera" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "width" << YAML::Value << c.camera.width;
  e << YAML::Key << "height" << YAML::Value << c.camera.height;
  e << YAML::Key << "intrinsics" << YAML::Value << YAML::Flow << YAML::BeginSeq << c.camera.fx
    << c.camera.fy << c.camera.cx << c.camera.cy << YAML::EndSeq;
  emit_pairs(e, "blackouts", c.camera_blackouts);
  e << YAML::EndMap;

  e << YAML::Key << "perception" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "min_area_px" << YAML::Value << c.servo.min_area_px;
  e << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dropout_prob" << YAML::Value << s.noise.dropout_prob;
  e << YAML::Key << "gap_rate" << YAML::Value << s.noise.gap_rate;
  e << YAML::Key << "gap_length_px" << YAML::Value << s.noise.gap_length_px;
  e << YAML::Key << "speckle_rate" << YAML::Value << s.noise.speckle_rate;
  e << YAML::Key << "speckle_area_px" << YAML::Value << s.noise.speckle_area_px;
  e << YAML::EndMap << YAML::EndMap;

  e << YAML::Key << "sensors" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "imu_sigma" << YAML::Value << c.sensors.imu_sigma_rad;
  e << YAML::Key << "depth_sigma" << YAML::Value << c.sensors.depth.sigma_m;
  e << YAML::Key << "depth_quantum" << YAML::Value << c.sensors.depth.quantum_m;
  e << YAML::Key << "sonar_sigma" << YAML::Value << c.sensors.sonar.sigma_m;
  e << YAML::Key << "sonar_resolution" << YAML::Value << c.sensors.sonar.resolution;
  e << YAML::EndMap;

  e << YAML::Key << "control" << YAML::Value << YAML::BeginMap;
  emit_gains(e, "heading", c.control.heading);
  emit_gains(e, "depth", c.control.depth);
  e << YAML::Key << "heading_gain_scale" << YAML::Value << c.control.heading_gain_scale;
  e << YAML::Key << "depth_gain_scale" << YAML::Value << c.control.depth_gain_scale;
  e << YAML::Key << "cruise_surge" << YAML::Value << c.servo.cruise_surge;
  e << YAML::Key << "psi_slow" << YAML::Value << c.servo.psi_slow;
  e << YAML::Key << "recovery_rate" << YAML::Value << c.servo.recovery_yaw_rate;
  e << YAML::Key << "forward_crop" << YAML::Value << c.servo.forward_crop;
  e << YAML::Key << "lookahead_px" << YAML::Value << c.servo.lookahead_px;
  e << YAML::EndMap;

  const auto& vp = c.vehicle;
  e << YAML::Key << "vehicle" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mass" << YAML::Value << vp.mass;
  e << YAML::Key << "buoyancy_force" << YAML::Value << vp.buoyancy_force;
  emit_vec3(e, "center_of_buoyancy_offset", vp.center_of_buoyancy_offset);
  emit_vec3(e, "inertia", vp.inertia);
  emit_vec3(e, "linear_drag", vp.linear_drag_coeffs);
  emit_vec3(e, "angular_drag", vp.angular_drag_coeffs);
  e << YAML::Key << "max_thrust" << YAML::Value << vp.max_thrust;
  e << YAML::Key << "mixing" << YAML::Value << YAML::BeginSeq;
  for (int r = 0; r < 4; ++r) {
    e << YAML::Flow << YAML::BeginSeq;
    for (int col = 0; col < 4; ++col) e << vp.mixing(r, col);
    e << YAML::EndSeq;
  }
  e << YAML::EndSeq;
  emit_vec3(e, "camera_to_sonar_offset", vp.camera_to_sonar_offset);
  e << YAML::EndMap;

  e << YAML::Key << "evaluation" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "corner_radius" << YAML::Value << c.corner_radius;
  e << YAML::EndMap;

  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  emit_pairs(e, "heading_pairs", c.grid.heading_pairs);
  emit_pairs(e, "depth_pairs", c.grid.depth_pairs);
  e << YAML::Key << "repeats" << YAML::Value << c.grid.repeats;
  e << YAML::Key << "metric" << YAML::Value
    << (c.grid.metric == DeltaSource::kOracle ? "oracle" : "pipeline");
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace cavesim
