#pragma once

// URDF-style robot description under the serial three-joint-per-leg model.
// A four-link limb adds a tarsus joint that mimics the knee with multiplier
// -1, holding the tarsus parallel to the femur. Payloads become fixed links.

#include "quadsim/actuation.hpp"
#include "quadsim/morphology.hpp"

#include <string>

namespace quadsim {

struct RobotDescription {
  std::string name = "quadsim";
  BodyMorphology body;
  double effort_limit = 18.0;    // N*m, every revolute joint
  double velocity_limit = 50.0;  // rad/s
};

RobotDescription make_robot_description(const BodyMorphology& body, const ActuatorParams& actuator,
                                        const std::string& name = "quadsim");

std::string export_robot_description(const RobotDescription& description);
inline std::string export_robot_description(const BodyMorphology& body, const ActuatorParams& actuator = {}) {
  return export_robot_description(make_robot_description(body, actuator));
}

// Inverse of export_robot_description. Throws ConfigError on malformed input.
RobotDescription parse_robot_description(const std::string& xml);

}  // namespace quadsim
