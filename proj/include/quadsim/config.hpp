#pragma once

// Single structured-text configuration covering morphology, actuators, gait,
// controller, contact, simulation and experiment presets. YAML on disk; the
// resolved form is echoed as JSON into every report.

#include "quadsim/gait.hpp"
#include "quadsim/limb_dynamics.hpp"
#include "quadsim/world.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace quadsim {

using Json = nlohmann::ordered_json;

inline constexpr const char* kConfigSchema = "quadsim.config/1";

struct MorphologyConfig {
  double trunk_mass = 7.0;
  Vec3 trunk_size = Vec3(0.5, 0.2, 0.1);  // box used for the trunk inertia, m
  double hip_x = 0.2;                      // |x| of the hips, m
  double hip_y = 0.06;                     // |y| of the hips, m
  LimbMorphology limb;                     // applied to all four legs

  BodyMorphology body() const;
};

struct RunSettings {
  double speed = 0.3;        // m/s, forward command
  double duration = 5.0;     // s of trotting after the settle phase
  double settle_time = 0.5;  // s of standing before the gait starts
  double log_rate = 500.0;   // Hz
};

struct CotProfile {
  std::string name;
  double speed = 0.3;     // m/s
  double distance = 0.0;  // m of cruising; used when positive
  double duration = 0.0;  // s of cruising; used when distance is zero
};

struct InertiaCotPreset {
  std::string profile = "inertia-cot-slow";
  std::vector<CotProfile> profiles{{"inertia-cot-slow", 0.3, 3.0, 0.0}, {"inertia-cot-fast", 1.0, 0.0, 2.0}};
  double added_mass = 0.5;  // kg per limb
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int analysis_samples = 1000;
  double accel_noise = 0.02;           // m/s^2
  double gyro_noise = 0.002;           // rad/s
  double initial_perturbation = 0.01;  // rad on joints, scaled 0.2x in m on the trunk

  const CotProfile& selected() const;
};

struct LimbRatioPreset {
  std::vector<double> tibia_fractions{0.45, 0.50, 0.55};
  double total_length = 0.4;  // m
  double speed = 0.1;         // m/s
  double duration = 8.0;      // s of trotting
  double knee_lift = 0.5;     // rad
  bool marker_offset = false;
  double marker_height = 0.035;  // m above the foot centre
};

struct GrfValidationPreset {
  double amplitude = 10.0;  // degrees
  double frequency = 0.5;   // Hz
  int repetitions = 6;
  std::vector<std::string> axes{"roll", "pitch", "yaw"};
  double settle_time = 1.0;        // s
  double min_contact_force = 2.0;  // N, below this a foot counts as lifted
};

struct FeasibilityPreset {
  GridSpec grid;
  SwingSpec swing;
  std::vector<double> gear_ratios{7.5, 15.0};
};

struct Config {
  std::uint64_t seed = 1;
  MorphologyConfig morphology;
  ActuatorParams actuator;
  GaitSchedule gait;
  ControllerParams controller;
  SimParams sim;
  RunSettings run;
  InertiaCotPreset inertia_cot;
  LimbRatioPreset limb_ratio;
  GrfValidationPreset grf_validation;
  FeasibilityPreset feasibility;
};

Json to_json(const Config& config);
// Inverse of to_json; every key must be present. Throws ConfigError.
Config config_from_json(const Json& j);

// Overlays a partial document on the defaults. Unknown keys and type
// mismatches are ConfigErrors naming the offending path.
Config config_from_partial_json(const Json& partial);
Config parse_config_yaml(const std::string& text);
// Throws IoError when the file cannot be read and ConfigError otherwise.
Config load_config(const std::string& path);

// All semantic violations (morphology, actuator, gait, presets).
std::vector<Violation> validate(const Config& config);
// Throws ConfigError listing every violation.
void require_valid(const Config& config);

std::string_view link_name(int link);
int link_from_name(std::string_view name);

}  // namespace quadsim
