#pragma once

// Closed-loop trials and the three locomotion experiments: GRF validation by
// trunk rotations, limb-ratio foot trajectories, and inertia versus cost of
// transport. Plus the gear-ratio feasibility comparison.

#include "quadsim/config.hpp"
#include "quadsim/imu.hpp"
#include "quadsim/telemetry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quadsim {

// ---------------------------------------------------------------------------
// Trials

struct TrialSpec {
  BodyMorphology body = BodyMorphology::default_robot();
  ActuatorParams actuator;
  SimParams sim;
  GaitSchedule gait;
  ControllerParams controller;
  double speed = 0.3;        // m/s forward command
  double settle_time = 0.5;  // s standing before the gait starts
  double duration = 5.0;     // s of trotting
  double log_rate = 500.0;   // Hz
  // Uniform joint-angle perturbation (rad) of the initial pose, with 0.2x that
  // in metres on the trunk position; drawn from `seed`.
  double initial_perturbation = 0.0;
  std::uint64_t seed = 1;
};

TrialSpec trial_spec(const Config& config);

struct TrialResult {
  TrialLog log;
  double total_mass = 0.0;
  bool completed = true;
  bool diverged = false;  // ended by numerical divergence
  std::string failure;    // diagnostic when the trial ended early
};

// Nominal standing pose at rest, trunk level at the stand height.
RobotState standing_state(const Controller& controller);

// Runs stand-then-trot from rest. Divergence and controller failures end the
// trial early with `completed` false and the log up to the failure.
TrialResult run_trial(const TrialSpec& spec);

// Log row for the step just taken by `world`.
LogRow make_log_row(const World& world);

// ---------------------------------------------------------------------------
// Metrics

enum class SpeedSource { Imu, GroundTruth };

double mean_speed(const TrialLog& log, SpeedSource source);

// Mean summed clamped power over M g V. Throws DegenerateInputError for an
// empty log or non-positive mean speed.
double compute_cot(const TrialLog& log, double total_mass, SpeedSource source,
                   double gravity = kStandardGravity);

// Peak and mean of the summed instantaneous series.
struct PowerSummary {
  double peak_power = 0.0;
  double mean_power = 0.0;
  double peak_torque = 0.0;
  double mean_torque = 0.0;
};

PowerSummary summarize_power(const TrialLog& log);

// Per-axis root mean squared difference. Throws on size mismatch or empty input.
Vec3 rmse(const std::vector<Vec3>& estimate, const std::vector<Vec3>& reference);

// ---------------------------------------------------------------------------
// Rotation protocol and GRF validation

enum class RotationAxis { Roll, Pitch, Yaw };

std::string_view axis_name(RotationAxis axis);
RotationAxis axis_from_name(std::string_view name);

struct RotationSpec {
  double amplitude = 10.0 * 3.14159265358979323846 / 180.0;  // rad
  double frequency = 0.5;                                    // Hz
  int repetitions = 6;
  double settle_time = 1.0;        // s
  double min_contact_force = 2.0;  // N
  double log_rate = 500.0;         // Hz
};

// Holds the trunk position and sweeps its orientation sinusoidally about one
// axis, logging every leg's estimated and true GRF. The controller must be
// driving `world` in stand mode from a standing state. Throws
// ProtocolAbortedError when any foot's vertical force drops below the
// contact threshold.
TrialLog run_rotation_protocol(World& world, Controller& controller, RotationAxis axis, const RotationSpec& spec);

struct LimbGrfError {
  Vec3 uncalibrated = Vec3::Zero();  // RMSE, N
  Vec3 calibrated = Vec3::Zero();
  Vec3 model = Vec3::Zero();         // estimator with exact limb dynamics
  Vec3 calibration = Vec3::Ones();   // per-axis scale
  std::size_t samples = 0;
};

struct GrfValidationResult {
  std::array<LimbGrfError, kNumLegs> limbs{};
  std::vector<RotationAxis> axes;
  std::vector<TrialLog> runs;  // one per axis
};

// Per-limb errors over the concatenated runs, in the world frame.
std::array<LimbGrfError, kNumLegs> grf_errors(const std::vector<TrialLog>& runs);

GrfValidationResult run_grf_validation(const Config& config);

// Reference RMSE (N) for the hardware robot, rows FR, FL, HR, HL.
std::array<Vec3, kNumLegs> reference_grf_rmse();

// ---------------------------------------------------------------------------
// Limb ratio

struct FootPath {
  std::vector<double> time;
  std::vector<Eigen::Vector2d> points;  // (fore-aft from the hip, height above ground contact), m
};

struct PathDescriptors {
  double peak_vertical = 0.0;         // m
  double horizontal_excursion = 0.0;  // m
  double asymmetry = 0.0;             // apex offset from mid-stroke over excursion
  double closure = 0.0;               // m, distance between stride start and end
};

PathDescriptors describe_path(const FootPath& stride);

struct StridePaths {
  FootPath fore;
  FootPath hind;
};

struct StrideDescriptors {
  PathDescriptors fore;
  PathDescriptors hind;
};

StrideDescriptors describe_stride(const StridePaths& paths);
StridePaths swap_fore_hind(const StridePaths& paths);

// Foot (or marker) path of one leg over the last complete stride of a trial.
FootPath stride_path(const TrialLog& log, const BodyMorphology& body, Leg leg, double period,
                     std::optional<double> marker_height = std::nullopt);

struct LimbRatioRun {
  double tibia_fraction = 0.0;
  LimbMorphology limb;
  bool completed = true;
  std::string failure;
  StridePaths paths;
  StrideDescriptors descriptors;
  double mean_speed = 0.0;  // m/s, ground truth over the last stride
};

struct LimbRatioResult {
  std::vector<LimbRatioRun> runs;
};

LimbRatioResult run_limb_ratio_experiment(const Config& config);

// ---------------------------------------------------------------------------
// Inertia and cost of transport

enum class Payload { None, Femur, Tibia };

std::string_view payload_name(Payload p);
LimbMorphology with_payload(const LimbMorphology& limb, Payload p, double mass);

struct CotRun {
  Payload payload = Payload::None;
  std::uint64_t seed = 0;
  bool completed = true;
  std::string failure;
  double total_mass = 0.0;
  double cot_imu = 0.0;
  double cot_truth = 0.0;
  double speed_imu = 0.0;
  double speed_truth = 0.0;
  PowerSummary power;
  std::size_t samples = 0;
};

struct InertiaCotResult {
  CotProfile profile;
  std::vector<CotRun> runs;  // payload-major, then seed
  std::array<double, 3> moi_analytic{};
  std::array<double, 3> moi_pendulum{};

  const CotRun& run(Payload p, std::uint64_t seed) const;
};

InertiaCotResult run_inertia_cot_experiment(const Config& config);

// Table reference values of the hardware robot, columns unloaded, femur, tibia.
struct CotReference {
  std::array<double, 3> peak_power{9584.20, 18603.1, 21109.03};
  std::array<double, 3> mean_power{5070.20, 9425.62, 9636.00};
  std::array<double, 3> peak_torque{21.59, 25.49, 27.70};
  std::array<double, 3> mean_torque{10.66, 13.19, 13.85};
  std::array<double, 3> cot{126.12, 135.57, 195.41};
};

// ---------------------------------------------------------------------------
// Feasibility

struct FeasibilityResult {
  std::vector<FeasibilityMap> maps;  // in the configured gear-ratio order
};

// True when every cell feasible in `inner` is feasible in `outer` and outer
// has strictly more feasible cells.
bool strictly_contains(const FeasibilityMap& outer, const FeasibilityMap& inner);

FeasibilityResult run_feasibility(const Config& config);

}  // namespace quadsim
