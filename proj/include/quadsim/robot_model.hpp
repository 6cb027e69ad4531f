#pragma once

// Multibody models built from morphology: a fixed-base single limb and the
// floating-base quadruped. Both use the serial simplification, with the
// four-link tarsus as a mimic body coupled to the knee (angle = -knee) so it
// stays parallel to the femur.

#include "quadsim/morphology.hpp"
#include "quadsim/multibody.hpp"

#include <array>

namespace quadsim {

struct LimbChain {
  int abad = -1;
  int femur = -1;
  int tibia = -1;
  int tarsus = -1;
  int foot_body = -1;
  Vec3 foot_local = Vec3::Zero();
  int first_dof = 0;
};

LimbChain add_limb(MultibodyModel& model, const LimbMorphology& limb, Side side, const Vec3& hip, int first_dof);

struct LimbModel {
  MultibodyModel model;
  LimbChain chain;
};

LimbModel build_limb_model(const LimbMorphology& limb, Side side = Side::Left);

struct QuadrupedModel {
  MultibodyModel model;
  std::array<LimbChain, kNumLegs> limbs;
};

// Joint coordinate of leg l, joint j (0 abad, 1 hip, 2 knee) is 3 * l + j.
QuadrupedModel build_quadruped_model(const BodyMorphology& body, const Vec3& joint_armature = Vec3::Zero());

}  // namespace quadsim
