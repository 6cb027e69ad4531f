#include "quadsim/robot_model.hpp"

namespace quadsim {

namespace {

spatial::Mat6 link_inertia(const LimbMorphology& limb, int link, const Vec3& direction) {
  spatial::Mat6 I = spatial::rod(limb.link_masses[link], limb.length(link), Vec3::Zero(), direction,
                                 limb.link_com_offsets[link]);
  if (limb.added_mass && limb.added_mass->link == link) {
    I += spatial::point_mass(limb.added_mass->mass, limb.added_mass->position * direction);
  }
  return I;
}

}  // namespace

LimbChain add_limb(MultibodyModel& model, const LimbMorphology& limb, Side side, const Vec3& hip, int first_dof) {
  const double s = side_sign(side);
  const Vec3 down = -Vec3::UnitZ();
  const Vec3 pitch_axis = -Vec3::UnitY();
  LimbChain chain;
  chain.first_dof = first_dof;

  MultibodyBody abad;
  abad.name = "abad";
  abad.parent = -1;
  abad.tree.r = hip;
  abad.axis = Vec3(s, 0.0, 0.0);
  abad.dof = first_dof;
  abad.inertia = link_inertia(limb, kAbductionLink, Vec3(0.0, s, 0.0));
  chain.abad = model.add_body(abad);

  MultibodyBody femur;
  femur.name = "femur";
  femur.parent = chain.abad;
  femur.tree.r = Vec3(0.0, s * limb.l1, 0.0);
  femur.axis = pitch_axis;
  femur.dof = first_dof + 1;
  femur.inertia = link_inertia(limb, kFemur, down);
  chain.femur = model.add_body(femur);

  MultibodyBody tibia;
  tibia.name = "tibia";
  tibia.parent = chain.femur;
  tibia.tree.r = Vec3(0.0, 0.0, -limb.l2);
  tibia.axis = pitch_axis;
  tibia.dof = first_dof + 2;
  tibia.inertia = link_inertia(limb, kTibia, down);
  chain.tibia = model.add_body(tibia);

  if (limb.config == LimbConfig::FourLink) {
    MultibodyBody tarsus;
    tarsus.name = "tarsus";
    tarsus.parent = chain.tibia;
    tarsus.tree.r = Vec3(0.0, 0.0, -limb.l3);
    tarsus.axis = pitch_axis;
    tarsus.dof = first_dof + 2;
    tarsus.multiplier = -1.0;
    tarsus.inertia = link_inertia(limb, kTarsus, down);
    chain.tarsus = model.add_body(tarsus);
    chain.foot_body = chain.tarsus;
    chain.foot_local = Vec3(0.0, 0.0, -limb.l4);
  } else {
    chain.foot_body = chain.tibia;
    chain.foot_local = Vec3(0.0, s * limb.l4, -limb.l3);
  }
  return chain;
}

LimbModel build_limb_model(const LimbMorphology& limb, Side side) {
  LimbModel out;
  out.model.floating_base = false;
  out.chain = add_limb(out.model, limb, side, Vec3::Zero(), 0);
  return out;
}

QuadrupedModel build_quadruped_model(const BodyMorphology& body, const Vec3& joint_armature) {
  QuadrupedModel out;
  out.model.floating_base = true;
  out.model.base_inertia = spatial::inertia(body.trunk_mass, Vec3::Zero(), body.trunk_inertia);
  for (Leg leg : kAllLegs) {
    const int l = index(leg);
    out.limbs[l] = add_limb(out.model, body.limbs[l], side_of(leg), body.hip_positions[l], 3 * l);
  }
  for (int l = 0; l < kNumLegs; ++l) out.model.armature.segment<3>(3 * l) = joint_armature;
  return out;
}

}  // namespace quadsim
