#include "quadsim/robot_description.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace quadsim {

namespace pt = boost::property_tree;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFootRadius = 0.01;  // collision sphere marking the foot point
constexpr std::array<const char*, kNumLinks> kLinkNames{"abad", "femur", "tibia", "tarsus"};

std::string vec_string(const Vec3& v) {
  return fmt::format("{} {} {}", format_number(v.x()), format_number(v.y()), format_number(v.z()));
}

Vec3 parse_vec(const std::string& s, const std::string& where) {
  std::istringstream in(s);
  Vec3 v;
  if (!(in >> v.x() >> v.y() >> v.z())) throw ConfigError(fmt::format("robot description: bad vector at {}", where));
  return v;
}

Vec3 link_direction(int link, double side) { return link == kAbductionLink ? Vec3(0.0, side, 0.0) : -Vec3::UnitZ(); }

void add_origin(pt::ptree& node, const Vec3& xyz) {
  pt::ptree& o = node.add("origin", "");
  o.put("<xmlattr>.xyz", vec_string(xyz));
  o.put("<xmlattr>.rpy", "0 0 0");
}

void add_inertial(pt::ptree& link, double mass, const Vec3& com, const Mat3& I) {
  pt::ptree& in = link.add("inertial", "");
  add_origin(in, com);
  in.put("mass.<xmlattr>.value", format_number(mass));
  pt::ptree& t = in.add("inertia", "");
  t.put("<xmlattr>.ixx", format_number(I(0, 0)));
  t.put("<xmlattr>.ixy", format_number(I(0, 1)));
  t.put("<xmlattr>.ixz", format_number(I(0, 2)));
  t.put("<xmlattr>.iyy", format_number(I(1, 1)));
  t.put("<xmlattr>.iyz", format_number(I(1, 2)));
  t.put("<xmlattr>.izz", format_number(I(2, 2)));
}

void add_foot(pt::ptree& link, const Vec3& at) {
  pt::ptree& c = link.add("collision", "");
  add_origin(c, at);
  c.put("geometry.sphere.<xmlattr>.radius", format_number(kFootRadius));
}

struct JointSpec {
  std::string name, type, parent, child;
  Vec3 origin = Vec3::Zero();
  Vec3 axis = Vec3::Zero();
  double lower = 0.0, upper = 0.0;
  std::string mimic;
};

void add_joint(pt::ptree& robot, const JointSpec& j, const RobotDescription& d) {
  pt::ptree& n = robot.add("joint", "");
  n.put("<xmlattr>.name", j.name);
  n.put("<xmlattr>.type", j.type);
  add_origin(n, j.origin);
  n.put("parent.<xmlattr>.link", j.parent);
  n.put("child.<xmlattr>.link", j.child);
  if (j.type == "fixed") return;
  n.put("axis.<xmlattr>.xyz", vec_string(j.axis));
  pt::ptree& lim = n.add("limit", "");
  lim.put("<xmlattr>.lower", format_number(j.lower));
  lim.put("<xmlattr>.upper", format_number(j.upper));
  lim.put("<xmlattr>.effort", format_number(d.effort_limit));
  lim.put("<xmlattr>.velocity", format_number(d.velocity_limit));
  if (!j.mimic.empty()) {
    pt::ptree& m = n.add("mimic", "");
    m.put("<xmlattr>.joint", j.mimic);
    m.put("<xmlattr>.multiplier", "-1");
    m.put("<xmlattr>.offset", "0");
  }
}

// Slender rod about its own COM, axis along `direction`.
Mat3 rod_inertia(double mass, double length, const Vec3& direction) {
  return mass * length * length / 12.0 * (Mat3::Identity() - direction * direction.transpose());
}

}  // namespace

RobotDescription make_robot_description(const BodyMorphology& body, const ActuatorParams& actuator,
                                        const std::string& name) {
  RobotDescription d;
  d.name = name;
  d.body = body;
  d.effort_limit = actuator.max_output_torque;
  d.velocity_limit = actuator.max_output_speed;
  return d;
}

std::string export_robot_description(const RobotDescription& d) {
  pt::ptree doc;
  pt::ptree& robot = doc.add("robot", "");
  robot.put("<xmlattr>.name", d.name);
  pt::ptree& trunk = robot.add("link", "");
  trunk.put("<xmlattr>.name", "trunk");
  add_inertial(trunk, d.body.trunk_mass, Vec3::Zero(), d.body.trunk_inertia);

  for (Leg leg : kAllLegs) {
    const int l = index(leg);
    const LimbMorphology& limb = d.body.limbs[l];
    const double s = side_sign(side_of(leg));
    const std::string p(leg_name(leg));
    const bool four = limb.config == LimbConfig::FourLink;
    const double knee_lo = limb.knee_direction == KneeDirection::Backward ? 0.0 : -kPi;
    const double knee_hi = limb.knee_direction == KneeDirection::Backward ? kPi : 0.0;
    const int links = four ? 4 : 3;
    for (int k = 0; k < links; ++k) {
      pt::ptree& link = robot.add("link", "");
      link.put("<xmlattr>.name", p + "_" + kLinkNames[k]);
      const Vec3 dir = link_direction(k, s);
      add_inertial(link, limb.link_masses[k], limb.link_com_offsets[k] * dir,
                   rod_inertia(limb.link_masses[k], limb.length(k), dir));
      if (k == kTibia && !four) add_foot(link, Vec3(0.0, s * limb.l4, -limb.l3));
      if (k == kTarsus) add_foot(link, Vec3(0.0, 0.0, -limb.l4));
    }
    add_joint(robot, {p + "_abad", "revolute", "trunk", p + "_abad", d.body.hip_positions[l], Vec3(s, 0, 0),
                      -0.5 * kPi, 0.5 * kPi, ""}, d);
    add_joint(robot, {p + "_hip", "revolute", p + "_abad", p + "_femur", Vec3(0.0, s * limb.l1, 0.0),
                      Vec3(0, -1, 0), -kPi, kPi, ""}, d);
    add_joint(robot, {p + "_knee", "revolute", p + "_femur", p + "_tibia", Vec3(0.0, 0.0, -limb.l2),
                      Vec3(0, -1, 0), knee_lo, knee_hi, ""}, d);
    if (four) {
      add_joint(robot, {p + "_tarsus", "revolute", p + "_tibia", p + "_tarsus", Vec3(0.0, 0.0, -limb.l3),
                        Vec3(0, -1, 0), -knee_hi, -knee_lo, p + "_knee"}, d);
    }
    if (limb.added_mass) {
      const AddedMass& a = *limb.added_mass;
      pt::ptree& link = robot.add("link", "");
      link.put("<xmlattr>.name", p + "_payload");
      add_inertial(link, a.mass, Vec3::Zero(), Mat3::Zero());
      add_joint(robot, {p + "_payload", "fixed", p + "_" + kLinkNames[a.link], p + "_payload",
                        a.position * link_direction(a.link, s), Vec3::Zero(), 0.0, 0.0, ""}, d);
    }
  }

  std::ostringstream out;
  pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

RobotDescription parse_robot_description(const std::string& xml) {
  pt::ptree doc;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ConfigError(fmt::format("robot description: {}", e.what()));
  }
  const auto robot_opt = doc.get_child_optional("robot");
  if (!robot_opt) throw ConfigError("robot description: missing <robot>");
  const pt::ptree& robot = *robot_opt;

  std::map<std::string, const pt::ptree*> links, joints;
  for (const auto& [tag, node] : robot) {
    if (tag == "link") links[node.get<std::string>("<xmlattr>.name", "")] = &node;
    if (tag == "joint") joints[node.get<std::string>("<xmlattr>.name", "")] = &node;
  }
  auto link = [&](const std::string& n) -> const pt::ptree& {
    const auto it = links.find(n);
    if (it == links.end()) throw ConfigError(fmt::format("robot description: missing link '{}'", n));
    return *it->second;
  };
  auto joint = [&](const std::string& n) -> const pt::ptree& {
    const auto it = joints.find(n);
    if (it == joints.end()) throw ConfigError(fmt::format("robot description: missing joint '{}'", n));
    return *it->second;
  };
  auto origin = [&](const pt::ptree& node, const std::string& where) {
    return parse_vec(node.get<std::string>("origin.<xmlattr>.xyz", ""), where);
  };
  auto number = [&](const pt::ptree& node, const std::string& path) {
    const auto v = node.get_optional<double>(path);
    if (!v) throw ConfigError(fmt::format("robot description: missing {}", path));
    return *v;
  };

  RobotDescription d;
  d.name = robot.get<std::string>("<xmlattr>.name", "");
  const pt::ptree& trunk = link("trunk");
  d.body.trunk_mass = number(trunk, "inertial.mass.<xmlattr>.value");
  const pt::ptree& ti = trunk.get_child("inertial.inertia");
  Mat3& I = d.body.trunk_inertia;
  I(0, 0) = number(ti, "<xmlattr>.ixx");
  I(1, 1) = number(ti, "<xmlattr>.iyy");
  I(2, 2) = number(ti, "<xmlattr>.izz");
  I(0, 1) = I(1, 0) = number(ti, "<xmlattr>.ixy");
  I(0, 2) = I(2, 0) = number(ti, "<xmlattr>.ixz");
  I(1, 2) = I(2, 1) = number(ti, "<xmlattr>.iyz");

  bool first = true;
  for (Leg leg : kAllLegs) {
    const int l = index(leg);
    const std::string p(leg_name(leg));
    LimbMorphology& limb = d.body.limbs[l];
    const pt::ptree& abad = joint(p + "_abad");
    d.body.hip_positions[l] = origin(abad, p + "_abad");
    if (first) {
      d.effort_limit = number(abad, "limit.<xmlattr>.effort");
      d.velocity_limit = number(abad, "limit.<xmlattr>.velocity");
      first = false;
    }
    limb.config = links.count(p + "_tarsus") ? LimbConfig::FourLink : LimbConfig::ThreeLink;
    limb.l1 = std::abs(origin(joint(p + "_hip"), p + "_hip").y());
    limb.l2 = -origin(joint(p + "_knee"), p + "_knee").z();
    limb.knee_direction = number(joint(p + "_knee"), "limit.<xmlattr>.lower") < 0.0 ? KneeDirection::Forward
                                                                                     : KneeDirection::Backward;
    const int count = limb.config == LimbConfig::FourLink ? 4 : 3;
    limb.link_masses = {0.0, 0.0, 0.0, 0.0};
    limb.link_com_offsets = {0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k < count; ++k) {
      const pt::ptree& n = link(p + "_" + kLinkNames[k]);
      limb.link_masses[k] = number(n, "inertial.mass.<xmlattr>.value");
      limb.link_com_offsets[k] = parse_vec(n.get<std::string>("inertial.origin.<xmlattr>.xyz", ""), p).norm();
    }
    if (limb.config == LimbConfig::FourLink) {
      limb.l3 = -origin(joint(p + "_tarsus"), p + "_tarsus").z();
      limb.l4 = -parse_vec(link(p + "_tarsus").get<std::string>("collision.origin.<xmlattr>.xyz", ""), p).z();
    } else {
      const Vec3 foot = parse_vec(link(p + "_tibia").get<std::string>("collision.origin.<xmlattr>.xyz", ""), p);
      limb.l3 = -foot.z();
      limb.l4 = std::abs(foot.y());
    }
    limb.added_mass.reset();
    if (links.count(p + "_payload")) {
      const pt::ptree& j = joint(p + "_payload");
      const std::string parent = j.get<std::string>("parent.<xmlattr>.link", "");
      AddedMass a;
      a.mass = number(link(p + "_payload"), "inertial.mass.<xmlattr>.value");
      a.position = origin(j, p + "_payload").norm();
      a.link = -1;
      for (int k = 0; k < kNumLinks; ++k) {
        if (parent == p + "_" + kLinkNames[k]) a.link = k;
      }
      if (a.link < 0) throw ConfigError(fmt::format("robot description: payload on unknown link '{}'", parent));
      limb.added_mass = a;
    }
  }
  const auto& h = d.body.hip_positions;
  d.body.symmetric_hips = h[0] == Vec3(h[1].x(), -h[1].y(), h[1].z()) && h[2] == Vec3(h[3].x(), -h[3].y(), h[3].z());
  return d;
}

}  // namespace quadsim
