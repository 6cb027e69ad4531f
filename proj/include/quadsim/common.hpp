#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace quadsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kStandardGravity = 9.81;

// Leg order follows the common quadruped convention: front-right, front-left,
// hind-right, hind-left. Trunk frame: x forward, y left, z up.
enum class Leg : int { FR = 0, FL = 1, HR = 2, HL = 3 };
inline constexpr int kNumLegs = 4;
inline constexpr std::array<Leg, kNumLegs> kAllLegs{Leg::FR, Leg::FL, Leg::HR, Leg::HL};

enum class Side { Left, Right };

constexpr int index(Leg leg) { return static_cast<int>(leg); }
constexpr bool is_front(Leg leg) { return leg == Leg::FR || leg == Leg::FL; }
constexpr Side side_of(Leg leg) { return (leg == Leg::FL || leg == Leg::HL) ? Side::Left : Side::Right; }
constexpr double side_sign(Side side) { return side == Side::Left ? 1.0 : -1.0; }

std::string_view leg_name(Leg leg);
Leg leg_from_name(std::string_view name);

// Shortest decimal representation that parses back to the same double.
std::string format_number(double x);

// ---------------------------------------------------------------------------
// Errors. Everything thrown by the library derives from quadsim::Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class SingularConfigurationError : public Error {
 public:
  SingularConfigurationError(const std::string& what, double condition_number)
      : Error(what), condition_number_(condition_number) {}
  double condition_number() const { return condition_number_; }

 private:
  double condition_number_;
};

class WorkspaceError : public Error {
 public:
  WorkspaceError(const std::string& what, const Vec3& nearest_reachable)
      : Error(what), nearest_(nearest_reachable) {}
  const Vec3& nearest_reachable() const { return nearest_; }

 private:
  Vec3 nearest_;
};

// IK failure inside the controller, tagged with the leg that failed.
class LegWorkspaceError : public WorkspaceError {
 public:
  LegWorkspaceError(Leg leg, const WorkspaceError& inner)
      : WorkspaceError(std::string(leg_name(leg)) + ": " + inner.what(), inner.nearest_reachable()),
        leg_(leg) {}
  Leg leg() const { return leg_; }

 private:
  Leg leg_;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, int axis) : Error(what), axis_(axis) {}
  int axis() const { return axis_; }

 private:
  int axis_;
};

class TrajectoryError : public Error {
 public:
  using Error::Error;
};

class InfeasibleAllocationError : public Error {
 public:
  using Error::Error;
};

class ProtocolAbortedError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace quadsim
