#pragma once

#include "quadsim/common.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace quadsim {

struct JointAngles;

enum class LimbConfig { ThreeLink, FourLink };
enum class KneeDirection { Backward, Forward };

// Link indices used for masses, COM offsets and payload placement.
enum LinkIndex : int { kAbductionLink = 0, kFemur = 1, kTibia = 2, kTarsus = 3 };
inline constexpr int kNumLinks = 4;

struct AddedMass {
  double mass = 0.0;      // kg
  int link = kFemur;      // LinkIndex
  double position = 0.0;  // m along the link from its proximal joint
};

// One limb. Link 1 is the abduction linkage (lateral), link 2 the femur,
// link 3 the tibia. In the four-link configuration link 4 is a tarsus held
// parallel to the femur; in the three-link configuration l4 is a massless
// lateral foot offset (default 0) and link_masses[3] must be zero.
struct LimbMorphology {
  LimbConfig config = LimbConfig::ThreeLink;
  double l1 = 0.08;
  double l2 = 0.20;
  double l3 = 0.20;
  double l4 = 0.0;
  KneeDirection knee_direction = KneeDirection::Backward;
  std::array<double, kNumLinks> link_masses{0.25, 0.35, 0.15, 0.0};
  std::array<double, kNumLinks> link_com_offsets{0.04, 0.10, 0.10, 0.0};
  std::optional<AddedMass> added_mass;

  double length(int link) const;
  // Total lateral offset between the abduction axis and the foot.
  double lateral_offset() const;
  // Length of the segment that moves with the femur pitch (femur + tarsus).
  double proximal_length() const { return config == LimbConfig::FourLink ? l2 + l4 : l2; }
  double distal_length() const { return l3; }
  double mass() const;

  // Sets every link COM to its geometric midpoint.
  void set_midpoint_coms();
  // Femur and tibia lengths for a total length and tibia fraction, e.g. 0.45
  // for a 45:55 tibia:femur limb. Femur and tibia masses keep their current
  // linear density (telescoping tubes) and COMs move to the new midpoints.
  void set_ratio(double total_length, double tibia_fraction);
};

struct BodyMorphology {
  double trunk_mass = 7.0;
  Mat3 trunk_inertia = Mat3::Identity();
  std::array<Vec3, kNumLegs> hip_positions;
  std::array<LimbMorphology, kNumLegs> limbs;
  bool symmetric_hips = true;

  double total_mass() const;

  // 10 kg robot: 7 kg trunk approximated as a 0.5 x 0.2 x 0.1 m box, hips at
  // (+-0.2, +-0.06, 0), four 0.75 kg 50:50 limbs of 0.4 m total length.
  static BodyMorphology default_robot();
};

Mat3 box_inertia(double mass, const Vec3& size);

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate(const LimbMorphology& limb, const std::string& prefix = "limb");
std::vector<Violation> validate(const BodyMorphology& body);

struct LimbRatio {
  double tibia;  // l3 / (l2 + l3)
  double femur;  // l2 / (l2 + l3)
};

LimbRatio limb_ratio(const LimbMorphology& limb);

// Rotational inertia of the pitching part of the limb (femur, tibia, tarsus
// and any payload on them) about the hip pitch axis, by parallel-axis
// summation. Links are treated as slender rods. Default pose: fully extended.
double moment_of_inertia_about_hip(const LimbMorphology& limb);
double moment_of_inertia_about_hip(const LimbMorphology& limb, const JointAngles& pose);

}  // namespace quadsim
