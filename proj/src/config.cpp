#include "quadsim/config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace quadsim {

namespace {

constexpr std::array<std::string_view, kNumLinks> kLinkNames{"abduction", "femur", "tibia", "tarsus"};

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json limb_json(const LimbMorphology& l) {
  Json j;
  j["config"] = l.config == LimbConfig::FourLink ? "four-link" : "three-link";
  j["l1"] = l.l1;
  j["l2"] = l.l2;
  j["l3"] = l.l3;
  j["l4"] = l.l4;
  j["knee_direction"] = l.knee_direction == KneeDirection::Forward ? "forward" : "backward";
  j["link_masses"] = l.link_masses;
  j["link_com_offsets"] = l.link_com_offsets;
  if (l.added_mass) {
    j["added_mass"] = {{"mass", l.added_mass->mass},
                       {"link", std::string(link_name(l.added_mass->link))},
                       {"position", l.added_mass->position}};
  } else {
    j["added_mass"] = nullptr;
  }
  return j;
}

LimbMorphology json_limb(const Json& j) {
  LimbMorphology l;
  const std::string config = j.at("config");
  if (config == "three-link") l.config = LimbConfig::ThreeLink;
  else if (config == "four-link") l.config = LimbConfig::FourLink;
  else throw ConfigError("morphology.limb.config: expected three-link or four-link, got " + config);
  l.l1 = j.at("l1");
  l.l2 = j.at("l2");
  l.l3 = j.at("l3");
  l.l4 = j.at("l4");
  const std::string knee = j.at("knee_direction");
  if (knee == "backward") l.knee_direction = KneeDirection::Backward;
  else if (knee == "forward") l.knee_direction = KneeDirection::Forward;
  else throw ConfigError("morphology.limb.knee_direction: expected backward or forward, got " + knee);
  l.link_masses = j.at("link_masses").get<std::array<double, kNumLinks>>();
  l.link_com_offsets = j.at("link_com_offsets").get<std::array<double, kNumLinks>>();
  const Json& am = j.at("added_mass");
  if (!am.is_null()) {
    l.added_mass = AddedMass{am.at("mass"), link_from_name(am.at("link").get<std::string>()), am.at("position")};
  }
  return l;
}

Json swing_json(const SwingSpec& s) {
  return {{"amplitude", s.amplitude}, {"frequency", s.frequency}, {"knee_angle", s.knee_angle}, {"samples", s.samples}};
}

Json grid_json(const GridSpec& g) {
  return {{"femur_min", g.femur_min}, {"femur_max", g.femur_max}, {"femur_steps", g.femur_steps},
          {"tibia_min", g.tibia_min}, {"tibia_max", g.tibia_max}, {"tibia_steps", g.tibia_steps}};
}

// Overlay `src` onto `dst`, which holds the full default document.
void overlay(Json& dst, const Json& src, const std::string& path) {
  if (dst.is_object()) {
    if (!src.is_object()) throw ConfigError(fmt::format("{}: expected a mapping", path));
    for (const auto& [key, value] : src.items()) {
      const std::string sub = path.empty() ? key : path + "." + key;
      if (!dst.contains(key)) throw ConfigError(fmt::format("{}: unknown key", sub));
      overlay(dst[key], value, sub);
    }
    return;
  }
  if (dst.is_null()) {
    // Optional blocks: accept a mapping or null.
    if (!(src.is_null() || src.is_object())) throw ConfigError(fmt::format("{}: expected a mapping or null", path));
    dst = src;
    return;
  }
  const bool ok = (dst.is_number() && src.is_number()) || (dst.is_boolean() && src.is_boolean()) ||
                  (dst.is_string() && src.is_string()) || (dst.is_array() && src.is_array());
  if (!ok) throw ConfigError(fmt::format("{}: expected {}, got {}", path, dst.type_name(), src.type_name()));
  if (dst.is_number_unsigned() && !src.is_number_unsigned()) {
    throw ConfigError(fmt::format("{}: expected a non-negative integer", path));
  }
  if (dst.is_number_integer() && !src.is_number_integer()) {
    throw ConfigError(fmt::format("{}: expected an integer", path));
  }
  dst = src;
}

Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      Json out = Json::array();
      for (const auto& item : node) out.push_back(yaml_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      Json out = Json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return out;
    }
    case YAML::NodeType::Scalar:
      break;
  }
  const std::string s = node.Scalar();
  if (node.Tag() == "!") return s;  // quoted
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  if (s == "null" || s == "~") return nullptr;
  try {
    std::size_t used = 0;
    const long long i = std::stoll(s, &used);
    if (used == s.size()) return i >= 0 ? Json(static_cast<std::uint64_t>(i)) : Json(i);
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used == s.size()) return d;
  } catch (const std::exception&) {
  }
  return s;
}

template <typename T>
T get(const Json& j, const char* key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("{}.{}: {}", path, key, e.what()));
  }
}

}  // namespace

std::string_view link_name(int link) {
  if (link < 0 || link >= kNumLinks) throw ConfigError(fmt::format("link index {} out of range", link));
  return kLinkNames[link];
}

int link_from_name(std::string_view name) {
  for (int i = 0; i < kNumLinks; ++i) {
    if (kLinkNames[i] == name) return i;
  }
  throw ConfigError(fmt::format("unknown link name '{}'", name));
}

BodyMorphology MorphologyConfig::body() const {
  BodyMorphology b;
  b.trunk_mass = trunk_mass;
  b.trunk_inertia = box_inertia(trunk_mass, trunk_size);
  for (Leg leg : kAllLegs) {
    b.hip_positions[index(leg)] = Vec3(is_front(leg) ? hip_x : -hip_x, side_sign(side_of(leg)) * hip_y, 0.0);
    b.limbs[index(leg)] = limb;
  }
  return b;
}

const CotProfile& InertiaCotPreset::selected() const {
  for (const auto& p : profiles) {
    if (p.name == profile) return p;
  }
  throw ConfigError(fmt::format("experiments.inertia_cot.profile: no profile named '{}'", profile));
}

Json to_json(const Config& c) {
  Json j;
  j["schema"] = kConfigSchema;
  j["seed"] = c.seed;

  const MorphologyConfig& m = c.morphology;
  j["morphology"] = {{"trunk_mass", m.trunk_mass},
                     {"trunk_size", vec_json(m.trunk_size)},
                     {"hip_x", m.hip_x},
                     {"hip_y", m.hip_y},
                     {"limb", limb_json(m.limb)}};

  const ActuatorParams& a = c.actuator;
  j["actuator"] = {{"gear_ratio", a.gear_ratio},
                   {"torque_constant", a.torque_constant},
                   {"back_emf_constant", a.back_emf_constant},
                   {"phase_resistance", a.phase_resistance},
                   {"max_output_torque", a.max_output_torque},
                   {"max_output_speed", a.max_output_speed},
                   {"rotor_inertia", a.rotor_inertia},
                   {"allow_constant_mismatch", a.allow_constant_mismatch},
                   {"constant_tolerance", a.constant_tolerance},
                   {"literal_current_formula", a.literal_current_formula}};

  Json offsets;
  for (Leg leg : kAllLegs) offsets[std::string(leg_name(leg))] = c.gait.offsets[index(leg)];
  j["gait"] = {{"period", c.gait.period}, {"duty_factor", c.gait.duty_factor}, {"offsets", offsets}};

  const ControllerParams& p = c.controller;
  const AllocationSettings& al = p.allocation;
  j["controller"] = {{"control_period", p.control_period},
                     {"stand_height", p.stand_height},
                     {"swing_clearance", p.swing_clearance},
                     {"touchdown_depth", p.touchdown_depth},
                     {"ground_height", p.ground_height},
                     {"swing_mode", p.swing_mode == SwingMode::KneeLift ? "knee-lift" : "cartesian"},
                     {"knee_lift", p.knee_lift},
                     {"kp_height", p.kp_height},
                     {"kd_height", p.kd_height},
                     {"kp_position", p.kp_position},
                     {"kd_velocity", p.kd_velocity},
                     {"kp_orientation", p.kp_orientation},
                     {"kd_orientation", p.kd_orientation},
                     {"stance_kd", p.stance_kd},
                     {"swing_kp", p.swing_kp},
                     {"swing_kd", p.swing_kd},
                     {"raibert_gain", p.raibert_gain},
                     {"max_acceleration", p.max_acceleration},
                     {"allocation",
                      {{"mu", al.mu},
                       {"regularization", al.regularization},
                       {"force_weight", al.wrench_weights(0)},
                       {"torque_weight", al.wrench_weights(3)},
                       {"kkt_tolerance", al.kkt_tolerance}}}};

  const SimParams& s = c.sim;
  j["simulation"] = {{"dt", s.dt},
                     {"substeps", s.substeps},
                     {"gravity", s.gravity},
                     {"joint_damping", s.joint_damping},
                     {"divergence_speed", s.divergence_speed}};
  j["contact"] = {{"enabled", s.contact.enabled},
                  {"stiffness", s.contact.stiffness},
                  {"damping", s.contact.damping},
                  {"mu", s.contact.mu},
                  {"tangential_stiffness", s.contact.tangential_stiffness},
                  {"tangential_damping", s.contact.tangential_damping}};
  j["imu"] = {{"accel_noise", s.imu.accel_noise},
              {"gyro_noise", s.imu.gyro_noise},
              {"accel_bias", vec_json(s.imu.accel_bias)},
              {"gyro_bias", vec_json(s.imu.gyro_bias)}};

  j["run"] = {{"speed", c.run.speed},
              {"duration", c.run.duration},
              {"settle_time", c.run.settle_time},
              {"log_rate", c.run.log_rate}};

  Json profiles = Json::array();
  for (const auto& pr : c.inertia_cot.profiles) {
    profiles.push_back({{"name", pr.name}, {"speed", pr.speed}, {"distance", pr.distance}, {"duration", pr.duration}});
  }
  const InertiaCotPreset& ic = c.inertia_cot;
  const LimbRatioPreset& lr = c.limb_ratio;
  const GrfValidationPreset& gv = c.grf_validation;
  j["experiments"] = {
      {"inertia_cot",
       {{"profile", ic.profile},
        {"profiles", profiles},
        {"added_mass", ic.added_mass},
        {"seeds", ic.seeds},
        {"analysis_samples", ic.analysis_samples},
        {"accel_noise", ic.accel_noise},
        {"gyro_noise", ic.gyro_noise},
        {"initial_perturbation", ic.initial_perturbation}}},
      {"limb_ratio",
       {{"tibia_fractions", lr.tibia_fractions},
        {"total_length", lr.total_length},
        {"speed", lr.speed},
        {"duration", lr.duration},
        {"knee_lift", lr.knee_lift},
        {"marker_offset", lr.marker_offset},
        {"marker_height", lr.marker_height}}},
      {"grf_validation",
       {{"amplitude", gv.amplitude},
        {"frequency", gv.frequency},
        {"repetitions", gv.repetitions},
        {"axes", gv.axes},
        {"settle_time", gv.settle_time},
        {"min_contact_force", gv.min_contact_force}}},
      {"feasibility",
       {{"grid", grid_json(c.feasibility.grid)},
        {"swing", swing_json(c.feasibility.swing)},
        {"gear_ratios", c.feasibility.gear_ratios}}}};
  return j;
}

Config config_from_json(const Json& j) {
  Config c;
  try {
    if (j.at("schema") != kConfigSchema) throw ConfigError(fmt::format("schema: expected {}", kConfigSchema));
    c.seed = j.at("seed").get<std::uint64_t>();

    const Json& m = j.at("morphology");
    c.morphology.trunk_mass = get<double>(m, "trunk_mass", "morphology");
    c.morphology.trunk_size = json_vec(m.at("trunk_size"));
    c.morphology.hip_x = get<double>(m, "hip_x", "morphology");
    c.morphology.hip_y = get<double>(m, "hip_y", "morphology");
    c.morphology.limb = json_limb(m.at("limb"));

    const Json& a = j.at("actuator");
    ActuatorParams& ap = c.actuator;
    ap.gear_ratio = a.at("gear_ratio");
    ap.torque_constant = a.at("torque_constant");
    ap.back_emf_constant = a.at("back_emf_constant");
    ap.phase_resistance = a.at("phase_resistance");
    ap.max_output_torque = a.at("max_output_torque");
    ap.max_output_speed = a.at("max_output_speed");
    ap.rotor_inertia = a.at("rotor_inertia");
    ap.allow_constant_mismatch = a.at("allow_constant_mismatch");
    ap.constant_tolerance = a.at("constant_tolerance");
    ap.literal_current_formula = a.at("literal_current_formula");

    const Json& g = j.at("gait");
    c.gait.period = g.at("period");
    c.gait.duty_factor = g.at("duty_factor");
    for (Leg leg : kAllLegs) c.gait.offsets[index(leg)] = g.at("offsets").at(std::string(leg_name(leg)));

    const Json& p = j.at("controller");
    ControllerParams& cp = c.controller;
    cp.control_period = p.at("control_period");
    cp.stand_height = p.at("stand_height");
    cp.swing_clearance = p.at("swing_clearance");
    cp.touchdown_depth = p.at("touchdown_depth");
    cp.ground_height = p.at("ground_height");
    const std::string mode = p.at("swing_mode");
    if (mode == "cartesian") cp.swing_mode = SwingMode::Cartesian;
    else if (mode == "knee-lift") cp.swing_mode = SwingMode::KneeLift;
    else throw ConfigError("controller.swing_mode: expected cartesian or knee-lift, got " + mode);
    cp.knee_lift = p.at("knee_lift");
    cp.kp_height = p.at("kp_height");
    cp.kd_height = p.at("kd_height");
    cp.kp_position = p.at("kp_position");
    cp.kd_velocity = p.at("kd_velocity");
    cp.kp_orientation = p.at("kp_orientation");
    cp.kd_orientation = p.at("kd_orientation");
    cp.stance_kd = p.at("stance_kd");
    cp.swing_kp = p.at("swing_kp");
    cp.swing_kd = p.at("swing_kd");
    cp.raibert_gain = p.at("raibert_gain");
    cp.max_acceleration = p.at("max_acceleration");
    const Json& al = p.at("allocation");
    cp.allocation.mu = al.at("mu");
    cp.allocation.regularization = al.at("regularization");
    cp.allocation.wrench_weights.head<3>().setConstant(al.at("force_weight").get<double>());
    cp.allocation.wrench_weights.tail<3>().setConstant(al.at("torque_weight").get<double>());
    cp.allocation.kkt_tolerance = al.at("kkt_tolerance");

    const Json& s = j.at("simulation");
    c.sim.dt = s.at("dt");
    c.sim.substeps = s.at("substeps");
    c.sim.gravity = s.at("gravity");
    c.sim.joint_damping = s.at("joint_damping");
    c.sim.divergence_speed = s.at("divergence_speed");
    const Json& ct = j.at("contact");
    c.sim.contact.enabled = ct.at("enabled");
    c.sim.contact.stiffness = ct.at("stiffness");
    c.sim.contact.damping = ct.at("damping");
    c.sim.contact.mu = ct.at("mu");
    c.sim.contact.tangential_stiffness = ct.at("tangential_stiffness");
    c.sim.contact.tangential_damping = ct.at("tangential_damping");
    const Json& imu = j.at("imu");
    c.sim.imu.accel_noise = imu.at("accel_noise");
    c.sim.imu.gyro_noise = imu.at("gyro_noise");
    c.sim.imu.accel_bias = json_vec(imu.at("accel_bias"));
    c.sim.imu.gyro_bias = json_vec(imu.at("gyro_bias"));
    c.sim.imu.seed = c.seed;

    const Json& r = j.at("run");
    c.run.speed = r.at("speed");
    c.run.duration = r.at("duration");
    c.run.settle_time = r.at("settle_time");
    c.run.log_rate = r.at("log_rate");

    const Json& e = j.at("experiments");
    const Json& ic = e.at("inertia_cot");
    c.inertia_cot.profile = ic.at("profile");
    c.inertia_cot.profiles.clear();
    for (const Json& pr : ic.at("profiles")) {
      c.inertia_cot.profiles.push_back({pr.at("name"), pr.at("speed"), pr.at("distance"), pr.at("duration")});
    }
    c.inertia_cot.added_mass = ic.at("added_mass");
    c.inertia_cot.seeds = ic.at("seeds").get<std::vector<std::uint64_t>>();
    c.inertia_cot.analysis_samples = ic.at("analysis_samples");
    c.inertia_cot.accel_noise = ic.at("accel_noise");
    c.inertia_cot.gyro_noise = ic.at("gyro_noise");
    c.inertia_cot.initial_perturbation = ic.at("initial_perturbation");

    const Json& lr = e.at("limb_ratio");
    c.limb_ratio.tibia_fractions = lr.at("tibia_fractions").get<std::vector<double>>();
    c.limb_ratio.total_length = lr.at("total_length");
    c.limb_ratio.speed = lr.at("speed");
    c.limb_ratio.duration = lr.at("duration");
    c.limb_ratio.knee_lift = lr.at("knee_lift");
    c.limb_ratio.marker_offset = lr.at("marker_offset");
    c.limb_ratio.marker_height = lr.at("marker_height");

    const Json& gv = e.at("grf_validation");
    c.grf_validation.amplitude = gv.at("amplitude");
    c.grf_validation.frequency = gv.at("frequency");
    c.grf_validation.repetitions = gv.at("repetitions");
    c.grf_validation.axes = gv.at("axes").get<std::vector<std::string>>();
    c.grf_validation.settle_time = gv.at("settle_time");
    c.grf_validation.min_contact_force = gv.at("min_contact_force");

    const Json& f = e.at("feasibility");
    const Json& grid = f.at("grid");
    GridSpec& gs = c.feasibility.grid;
    gs.femur_min = grid.at("femur_min");
    gs.femur_max = grid.at("femur_max");
    gs.femur_steps = grid.at("femur_steps");
    gs.tibia_min = grid.at("tibia_min");
    gs.tibia_max = grid.at("tibia_max");
    gs.tibia_steps = grid.at("tibia_steps");
    const Json& sw = f.at("swing");
    c.feasibility.swing.amplitude = sw.at("amplitude");
    c.feasibility.swing.frequency = sw.at("frequency");
    c.feasibility.swing.knee_angle = sw.at("knee_angle");
    c.feasibility.swing.samples = sw.at("samples");
    c.feasibility.gear_ratios = f.at("gear_ratios").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Config config_from_partial_json(const Json& partial) {
  Json full = to_json(Config{});
  overlay(full, partial, "");
  return config_from_json(full);
}

Config parse_config_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (root.IsNull()) return Config{};
  return config_from_partial_json(yaml_to_json(root));
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_yaml(buf.str());
}

std::vector<Violation> validate(const Config& c) {
  std::vector<Violation> out;
  auto add = [&](std::vector<Violation> v) { out.insert(out.end(), v.begin(), v.end()); };
  auto need = [&](bool ok, const std::string& field, const std::string& rule) {
    if (!ok) out.push_back({field, rule});
  };
  const MorphologyConfig& m = c.morphology;
  need(m.trunk_mass > 0.0, "morphology.trunk_mass", "must be positive");
  need((m.trunk_size.array() > 0.0).all(), "morphology.trunk_size", "must be positive");
  need(m.hip_x > 0.0, "morphology.hip_x", "must be positive");
  need(m.hip_y >= 0.0, "morphology.hip_y", "must be non-negative");
  add(validate(m.limb, "morphology.limb"));
  add(validate(c.actuator));
  add(validate(c.gait));

  const ControllerParams& p = c.controller;
  need(p.control_period >= c.sim.dt, "controller.control_period", "must be at least simulation.dt");
  need(p.stand_height > 0.0, "controller.stand_height", "must be positive");
  need(p.stand_height < m.limb.proximal_length() + m.limb.distal_length(), "controller.stand_height",
       "must be below the full limb reach");
  need(p.swing_clearance >= 0.0, "controller.swing_clearance", "must be non-negative");
  need(p.allocation.mu >= 0.0, "controller.allocation.mu", "must be non-negative");
  need(p.allocation.regularization >= 0.0, "controller.allocation.regularization", "must be non-negative");
  need(p.max_acceleration > 0.0, "controller.max_acceleration", "must be positive");
  const std::pair<const char*, double> gains[] = {
      {"kp_height", p.kp_height},       {"kd_height", p.kd_height},   {"kp_position", p.kp_position},
      {"kd_velocity", p.kd_velocity},   {"kp_orientation", p.kp_orientation},
      {"kd_orientation", p.kd_orientation}, {"stance_kd", p.stance_kd}, {"swing_kp", p.swing_kp},
      {"swing_kd", p.swing_kd}};
  for (const auto& [name, value] : gains) need(value >= 0.0, fmt::format("controller.{}", name), "must be non-negative");

  const SimParams& s = c.sim;
  need(s.dt > 0.0 && s.dt <= 2e-3, "simulation.dt", "must lie in (0, 0.002]");
  need(s.substeps >= 1, "simulation.substeps", "must be at least 1");
  need(s.gravity >= 0.0, "simulation.gravity", "must be non-negative");
  need(s.contact.stiffness > 0.0, "contact.stiffness", "must be positive");
  need(s.contact.damping >= 0.0, "contact.damping", "must be non-negative");
  need(s.contact.mu >= 0.0, "contact.mu", "must be non-negative");
  need(s.imu.accel_noise >= 0.0, "imu.accel_noise", "must be non-negative");
  need(s.imu.gyro_noise >= 0.0, "imu.gyro_noise", "must be non-negative");

  need(c.run.duration > 0.0, "run.duration", "must be positive");
  need(c.run.settle_time >= 0.0, "run.settle_time", "must be non-negative");
  need(c.run.log_rate > 0.0 && std::abs(std::remainder(1.0 / c.run.log_rate, s.dt)) < 1e-9,
       "run.log_rate", "log period must be a positive multiple of simulation.dt");

  const InertiaCotPreset& ic = c.inertia_cot;
  need(std::any_of(ic.profiles.begin(), ic.profiles.end(), [&](const CotProfile& pr) { return pr.name == ic.profile; }),
       "experiments.inertia_cot.profile", "must name one of the profiles");
  for (std::size_t i = 0; i < ic.profiles.size(); ++i) {
    const CotProfile& pr = ic.profiles[i];
    const std::string f = fmt::format("experiments.inertia_cot.profiles[{}]", i);
    need(pr.speed > 0.0, f + ".speed", "must be positive");
    need(pr.distance > 0.0 || pr.duration > 0.0, f, "needs a positive distance or duration");
  }
  need(ic.added_mass >= 0.0, "experiments.inertia_cot.added_mass", "must be non-negative");
  need(!ic.seeds.empty(), "experiments.inertia_cot.seeds", "must not be empty");
  need(ic.analysis_samples > 1, "experiments.inertia_cot.analysis_samples", "must exceed 1");

  const LimbRatioPreset& lr = c.limb_ratio;
  need(!lr.tibia_fractions.empty(), "experiments.limb_ratio.tibia_fractions", "must not be empty");
  for (double f : lr.tibia_fractions) {
    need(f > 0.0 && f < 1.0, "experiments.limb_ratio.tibia_fractions", "entries must lie in (0, 1)");
  }
  need(lr.total_length > p.stand_height, "experiments.limb_ratio.total_length", "must exceed the stand height");
  need(lr.speed > 0.0, "experiments.limb_ratio.speed", "must be positive");
  need(lr.duration > 2.0 * c.gait.period, "experiments.limb_ratio.duration", "must cover at least two strides");

  const GrfValidationPreset& gv = c.grf_validation;
  need(gv.amplitude >= 0.0 && gv.amplitude < 30.0, "experiments.grf_validation.amplitude", "must lie in [0, 30) deg");
  need(gv.frequency > 0.0, "experiments.grf_validation.frequency", "must be positive");
  need(gv.repetitions >= 1, "experiments.grf_validation.repetitions", "must be at least 1");
  for (const auto& axis : gv.axes) {
    need(axis == "roll" || axis == "pitch" || axis == "yaw", "experiments.grf_validation.axes",
         "entries must be roll, pitch or yaw");
  }

  const GridSpec& g = c.feasibility.grid;
  need(g.femur_steps >= 2 && g.tibia_steps >= 2, "experiments.feasibility.grid", "needs at least 2 steps per axis");
  need(g.femur_min > 0.0 && g.femur_max > g.femur_min, "experiments.feasibility.grid.femur", "needs 0 < min < max");
  need(g.tibia_min > 0.0 && g.tibia_max > g.tibia_min, "experiments.feasibility.grid.tibia", "needs 0 < min < max");
  for (double r : c.feasibility.gear_ratios) {
    need(r > 0.0, "experiments.feasibility.gear_ratios", "entries must be positive");
  }
  return out;
}

void require_valid(const Config& config) {
  const auto v = validate(config);
  if (v.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& x : v) msg += fmt::format("\n  {}: {}", x.field, x.rule);
  throw ConfigError(msg);
}

}  // namespace quadsim
