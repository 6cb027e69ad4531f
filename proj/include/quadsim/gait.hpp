#pragma once

// Trot scheduling, swing-foot trajectories, single-step stance force
// allocation and the joint-level controller that ties them together.

#include "quadsim/actuation.hpp"
#include "quadsim/robot_model.hpp"
#include "quadsim/robot_state.hpp"

#include <array>
#include <optional>

namespace quadsim {

// ---------------------------------------------------------------------------
// Gait schedule

struct GaitSchedule {
  double period = 0.5;        // s
  double duty_factor = 0.5;   // stance fraction
  // Leg phase offsets (FR, FL, HR, HL); diagonal pairs share an offset.
  std::array<double, kNumLegs> offsets{0.0, 0.5, 0.5, 0.0};
};

std::vector<Violation> validate(const GaitSchedule& g, const std::string& prefix = "gait");

struct LegPhase {
  bool stance = true;
  double cycle = 0.0;     // phase within the stride, [0, 1)
  double progress = 0.0;  // progress through the current stance or swing, [0, 1)
};

std::array<LegPhase, kNumLegs> schedule_at(const GaitSchedule& g, double t);

// ---------------------------------------------------------------------------
// Swing trajectory: quintic blend in the horizontal plane; vertically two
// quintic segments meeting at an apex `clearance` above the higher endpoint.

struct SwingTrajectory {
  Vec3 lift_off = Vec3::Zero();
  Vec3 touchdown = Vec3::Zero();
  double clearance = 0.05;

  double apex_height() const { return std::max(lift_off.z(), touchdown.z()) + clearance; }
};

Vec3 swing_position(const SwingTrajectory& traj, double phase);
// d/dphase of swing_position.
Vec3 swing_velocity(const SwingTrajectory& traj, double phase);

// Quintic smoothstep 10s^3 - 15s^4 + 6s^5 and its derivatives.
double smoothstep(double s);
double smoothstep_rate(double s);
double smoothstep_accel(double s);

// ---------------------------------------------------------------------------
// Stance force allocation

using Vec6 = Eigen::Matrix<double, 6, 1>;

struct AllocationSettings {
  double mu = 0.6;
  double regularization = 1e-6;  // weight on ||f||^2
  Vec6 wrench_weights = (Vec6() << 1.0, 1.0, 1.0, 20.0, 20.0, 20.0).finished();  // (force, torque) residual weights
  double kkt_tolerance = 1e-8;
};

struct StanceAllocation {
  std::array<Vec3, kNumLegs> forces{};  // ground on foot, world frame, N
  std::array<bool, kNumLegs> stance{};
  double residual = 0.0;         // ||A f - w|| (unweighted)
  double objective = 0.0;        // weighted objective at the solution
  double friction_margin = 0.0;  // min over stance feet of mu f_z - ||f_t||
  int iterations = 0;
};

// Wrench is (force, torque about `com`) in the world frame. Forces are
// restricted to the pyramid inscribed in the friction cone, so both the
// pyramid and the circular cone hold at the returned point.
StanceAllocation allocate_stance_forces(const Vec3& com, const std::array<Vec3, kNumLegs>& feet,
                                        const std::array<bool, kNumLegs>& stance, const Vec6& wrench,
                                        const AllocationSettings& settings = {});

// Weighted objective ||W (A f - w)||^2 + eps ||f||^2 at an arbitrary force set.
double allocation_objective(const Vec3& com, const std::array<Vec3, kNumLegs>& feet,
                            const std::array<bool, kNumLegs>& stance, const Vec6& wrench,
                            const std::array<Vec3, kNumLegs>& forces, const AllocationSettings& settings = {});

// ---------------------------------------------------------------------------
// Controller

enum class ControlMode { Stand, Trot };

// Cartesian swings follow SwingTrajectory through IK. KneeLift swings
// interpolate joint angles from lift-off to the touchdown IK solution and add
// a fixed knee flexion bump, with the hip compensating so the foot retracts
// along the hip-foot line. The knee motion is the same for any proportions.
enum class SwingMode { Cartesian, KneeLift };

struct ControllerParams {
  double control_period = 0.002;  // s
  double stand_height = 0.30;     // hip height above ground, m
  double swing_clearance = 0.06;  // m
  double touchdown_depth = 0.005; // m below the ground plane
  double ground_height = 0.0;     // m, flat terrain assumed by the planner
  SwingMode swing_mode = SwingMode::Cartesian;
  double knee_lift = 0.5;         // rad, KneeLift mode

  // Trunk wrench: accelerations per unit error, scaled by total mass.
  double kp_height = 400.0;
  double kd_height = 40.0;
  double kp_position = 100.0;  // stand mode horizontal hold
  double kd_velocity = 20.0;
  // Trunk orientation: N*m/rad and N*m*s/rad.
  double kp_orientation = 60.0;
  double kd_orientation = 6.0;

  double stance_kd = 0.1;
  double swing_kp = 60.0;
  double swing_kd = 1.5;
  double raibert_gain = 0.03;  // s, velocity error feedback on foot placement
  double max_acceleration = 1.0;  // m/s^2, ramp on the commanded planar velocity

  AllocationSettings allocation;
};

struct ControlCommand {
  double time = 0.0;
  std::array<JointCommand, 12> joints{};
  std::array<bool, kNumLegs> stance{};
  StanceAllocation allocation;
  Vec6 desired_wrench = Vec6::Zero();
};

class Controller {
 public:
  Controller(const BodyMorphology& body, const ActuatorParams& actuator, const GaitSchedule& gait,
             const ControllerParams& params = {});

  void set_mode(ControlMode mode, double gait_start_time = 0.0);
  ControlMode mode() const { return mode_; }
  void set_desired_orientation(const Mat3& R) { desired_orientation_ = R; }
  void set_hold_position(const Vec3& p) { hold_position_ = p; }
  const ControllerParams& params() const { return params_; }
  const GaitSchedule& gait() const { return gait_; }

  // commanded: forward and lateral speed (m/s, heading frame) and yaw rate.
  ControlCommand control_tick(const RobotState& state, const Vec3& commanded);

  // Nominal foot position relative to the hip, trunk frame.
  Vec3 nominal_foot(Leg leg) const;
  // Standing joint configuration and trunk height for initialization.
  Vec12 standing_joint_angles() const;

 private:
  struct LegMemory {
    bool was_stance = true;
    Vec3 lift_off = Vec3::Zero();     // hip-relative, trunk frame
    Vec3 lift_off_q = Vec3::Zero();
    std::optional<Vec3> last_target_q;
  };

  Vec3 leg_gravity_torque(Leg leg, const Vec3& q, const Vec3& qd, const Vec3& qdd, const Mat3& R) const;

  BodyMorphology body_;
  ActuatorParams actuator_;
  GaitSchedule gait_;
  ControllerParams params_;
  QuadrupedModel whole_body_;
  std::array<LimbModel, kNumLegs> limb_models_;
  double total_mass_ = 0.0;
  ControlMode mode_ = ControlMode::Stand;
  double gait_start_ = 0.0;
  Mat3 desired_orientation_ = Mat3::Identity();
  std::optional<Vec3> hold_position_;
  Vec3 ramped_velocity_ = Vec3::Zero();
  Vec3 integrated_target_ = Vec3::Zero();
  double last_time_ = 0.0;
  bool started_ = false;
  std::array<LegMemory, kNumLegs> legs_{};
};

}  // namespace quadsim
