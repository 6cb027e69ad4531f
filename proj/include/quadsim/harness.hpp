#pragma once

// Experiment dispatch and report assembly.

#include "quadsim/experiments.hpp"
#include "quadsim/report.hpp"

namespace quadsim {

// grf-validation, limb-ratio-kinematics, inertia-cot, feasibility-map. The
// inertia-cot-slow and inertia-cot-fast presets select the profile.
std::vector<std::string> experiment_ids();

// Throws ConfigError for an unknown id.
TrialReport run_experiment(const Config& config, std::string_view id);

TrialReport grf_validation_report(const Config& config, const GrfValidationResult& result);
TrialReport limb_ratio_report(const Config& config, const LimbRatioResult& result);
TrialReport inertia_cot_report(const Config& config, const InertiaCotResult& result);
TrialReport feasibility_report(const Config& config, const FeasibilityResult& result);

struct SimulationOutcome {
  TrialResult trial;
  TrialReport report;
};

// Stand-then-trot run from config.run with telemetry attached to the report.
SimulationOutcome run_simulation(const Config& config);

std::string ratio_label(double tibia_fraction);

}  // namespace quadsim
