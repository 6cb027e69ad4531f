#include "quadsim/morphology.hpp"

#include "quadsim/limb_kinematics.hpp"

#include <cmath>
#include <fmt/format.h>

namespace quadsim {

std::string_view leg_name(Leg leg) {
  switch (leg) {
    case Leg::FR: return "FR";
    case Leg::FL: return "FL";
    case Leg::HR: return "HR";
    case Leg::HL: return "HL";
  }
  return "?";
}

Leg leg_from_name(std::string_view name) {
  for (Leg leg : kAllLegs) {
    if (leg_name(leg) == name) return leg;
  }
  throw ConfigError(fmt::format("unknown leg '{}'", name));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  return fmt::format("{}", x);
}

double LimbMorphology::length(int link) const {
  switch (link) {
    case kAbductionLink: return l1;
    case kFemur: return l2;
    case kTibia: return l3;
    case kTarsus: return l4;
  }
  throw DegenerateInputError(fmt::format("link index {} out of range", link));
}

double LimbMorphology::lateral_offset() const { return config == LimbConfig::ThreeLink ? l1 + l4 : l1; }

double LimbMorphology::mass() const {
  double m = 0.0;
  for (double link_mass : link_masses) m += link_mass;
  if (added_mass) m += added_mass->mass;
  return m;
}

void LimbMorphology::set_midpoint_coms() {
  for (int i = 0; i < kNumLinks; ++i) link_com_offsets[i] = 0.5 * length(i);
}

void LimbMorphology::set_ratio(double total_length, double tibia_fraction) {
  const double femur_density = l2 > 0.0 ? link_masses[kFemur] / l2 : 0.0;
  const double tibia_density = l3 > 0.0 ? link_masses[kTibia] / l3 : 0.0;
  l3 = total_length * tibia_fraction;
  l2 = total_length - l3;
  link_masses[kFemur] = femur_density * l2;
  link_masses[kTibia] = tibia_density * l3;
  link_com_offsets[kFemur] = 0.5 * l2;
  link_com_offsets[kTibia] = 0.5 * l3;
}

Mat3 box_inertia(double mass, const Vec3& size) {
  const Vec3 sq = size.cwiseProduct(size);
  return (mass / 12.0 * Vec3(sq.y() + sq.z(), sq.x() + sq.z(), sq.x() + sq.y())).asDiagonal();
}

double BodyMorphology::total_mass() const {
  double m = trunk_mass;
  for (const auto& limb : limbs) m += limb.mass();
  return m;
}

BodyMorphology BodyMorphology::default_robot() {
  BodyMorphology body;
  body.trunk_mass = 7.0;
  body.trunk_inertia = box_inertia(body.trunk_mass, Vec3(0.5, 0.2, 0.1));
  for (Leg leg : kAllLegs) {
    const double x = is_front(leg) ? 0.2 : -0.2;
    const double y = side_sign(side_of(leg)) * 0.06;
    body.hip_positions[index(leg)] = Vec3(x, y, 0.0);
    body.limbs[index(leg)] = LimbMorphology{};
  }
  return body;
}

namespace {

void check(std::vector<Violation>& out, bool ok, const std::string& field, const std::string& rule) {
  if (!ok) out.push_back({field, rule});
}

}  // namespace

std::vector<Violation> validate(const LimbMorphology& limb, const std::string& prefix) {
  std::vector<Violation> out;
  const bool four = limb.config == LimbConfig::FourLink;
  const std::array<const char*, kNumLinks> names{"l1", "l2", "l3", "l4"};
  for (int i = 0; i < kNumLinks; ++i) {
    const double len = limb.length(i);
    const std::string field = prefix + "." + names[i];
    if (!std::isfinite(len)) {
      out.push_back({field, "must be finite"});
      continue;
    }
    if (i == kTarsus && !four) {
      check(out, len >= 0.0, field, "lateral foot offset must be >= 0");
    } else {
      check(out, len > 0.0, field, "length must be > 0");
    }
  }
  for (int i = 0; i < kNumLinks; ++i) {
    const std::string mfield = fmt::format("{}.link_masses[{}]", prefix, i);
    const double m = limb.link_masses[i];
    check(out, std::isfinite(m) && m >= 0.0, mfield, "mass must be >= 0");
    if (i == kTarsus && !four) check(out, m == 0.0, mfield, "three-link limb has no tarsus mass");
    const std::string cfield = fmt::format("{}.link_com_offsets[{}]", prefix, i);
    const double c = limb.link_com_offsets[i];
    check(out, std::isfinite(c) && c >= 0.0 && c <= limb.length(i), cfield, "COM offset must lie in [0, link length]");
  }
  if (limb.added_mass) {
    const AddedMass& a = *limb.added_mass;
    const std::string field = prefix + ".added_mass";
    check(out, std::isfinite(a.mass) && a.mass >= 0.0, field, "mass must be >= 0");
    const bool link_ok = a.link >= 0 && a.link < kNumLinks && (four || a.link != kTarsus);
    check(out, link_ok, field, "link index must name an existing link");
    if (link_ok) {
      check(out, std::isfinite(a.position) && a.position >= 0.0 && a.position <= limb.length(a.link), field,
            "position must lie within the link");
    }
  }
  return out;
}

std::vector<Violation> validate(const BodyMorphology& body) {
  std::vector<Violation> out;
  check(out, std::isfinite(body.trunk_mass) && body.trunk_mass > 0.0, "body.trunk_mass", "mass must be > 0");
  const Mat3& inertia = body.trunk_inertia;
  const bool symmetric = inertia.allFinite() && (inertia - inertia.transpose()).norm() <= 1e-12 * (1.0 + inertia.norm());
  check(out, symmetric, "body.trunk_inertia", "must be a finite symmetric matrix");
  if (symmetric) {
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
    check(out, eig.eigenvalues().minCoeff() >= 0.0, "body.trunk_inertia", "must be positive semi-definite");
  }
  for (Leg leg : kAllLegs) {
    const std::string name(leg_name(leg));
    check(out, body.hip_positions[index(leg)].allFinite(), "body.hip_positions." + name, "must be finite");
    auto limb_violations = validate(body.limbs[index(leg)], "limbs." + name);
    out.insert(out.end(), limb_violations.begin(), limb_violations.end());
  }
  if (body.symmetric_hips) {
    const std::array<std::pair<Leg, Leg>, 2> pairs{{{Leg::FR, Leg::FL}, {Leg::HR, Leg::HL}}};
    for (auto [right, left] : pairs) {
      const Vec3& r = body.hip_positions[index(right)];
      const Vec3& l = body.hip_positions[index(left)];
      const bool mirrored = std::abs(r.x() - l.x()) <= 1e-12 && std::abs(r.y() + l.y()) <= 1e-12 &&
                            std::abs(r.z() - l.z()) <= 1e-12;
      check(out, mirrored, "body.hip_positions." + std::string(leg_name(right)),
            "declared symmetric but not mirrored about the sagittal plane");
    }
  }
  return out;
}

LimbRatio limb_ratio(const LimbMorphology& limb) {
  const double total = limb.l2 + limb.l3;
  if (!(limb.l2 > 0.0) || !(limb.l3 > 0.0) || !(total > 0.0)) {
    throw DegenerateInputError("limb_ratio needs positive femur and tibia lengths");
  }
  return {limb.l3 / total, limb.l2 / total};
}

double moment_of_inertia_about_hip(const LimbMorphology& limb) { return moment_of_inertia_about_hip(limb, {}); }

double moment_of_inertia_about_hip(const LimbMorphology& limb, const JointAngles& pose) {
  if (!pose.finite()) throw DegenerateInputError("moment_of_inertia_about_hip: pose must be finite");

  // Sagittal-plane geometry: unit direction of a link pitched by angle a.
  const auto dir = [](double a) { return Eigen::Vector2d(std::sin(a), -std::cos(a)); };
  const Eigen::Vector2d femur_dir = dir(pose.hip);
  const Eigen::Vector2d tibia_dir = dir(pose.hip + pose.knee);
  const Eigen::Vector2d knee = limb.l2 * femur_dir;
  const Eigen::Vector2d ankle = knee + limb.l3 * tibia_dir;

  struct Segment {
    int link;
    Eigen::Vector2d start;
    Eigen::Vector2d dir;
  };
  std::vector<Segment> segments{{kFemur, Eigen::Vector2d::Zero(), femur_dir}, {kTibia, knee, tibia_dir}};
  if (limb.config == LimbConfig::FourLink) segments.push_back({kTarsus, ankle, femur_dir});

  double inertia = 0.0;
  for (const Segment& s : segments) {
    const double m = limb.link_masses[s.link];
    const double len = limb.length(s.link);
    const Eigen::Vector2d com = s.start + limb.link_com_offsets[s.link] * s.dir;
    inertia += m * len * len / 12.0 + m * com.squaredNorm();
  }
  if (limb.added_mass) {
    for (const Segment& s : segments) {
      if (s.link != limb.added_mass->link) continue;
      const Eigen::Vector2d p = s.start + limb.added_mass->position * s.dir;
      inertia += limb.added_mass->mass * p.squaredNorm();
    }
  }
  return inertia;
}

}  // namespace quadsim
