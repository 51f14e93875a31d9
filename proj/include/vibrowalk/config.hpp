#pragma once

// Run configuration: one JSON document covering the model, integrator,
// sweep, analysis, calibration and control settings.
//
// Every numeric field accepts either a bare number in SI units (angles of
// commands and the leg twist in degrees, frequencies in Hz) or a string with
// an explicit unit, e.g. "12 mm", "50 g", "0.2 ms", "35 Hz", "1.2 rad".
// Encoding always writes bare canonical numbers.

#include "vibrowalk/calibration.hpp"
#include "vibrowalk/control.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>

namespace vibrowalk {

struct Figure8Config {
  Point2 center;
  double radius = 0.5;  // m
  int count = 8;
};

enum class PlantKind { Model, Surrogate };

struct Config {
  std::optional<std::uint64_t> seed;

  DesignParams design;
  LegStiffness stiffness;
  ErrorParams errors;
  ContactParams contact;
  RunOptions run;
  SweepAxes axes;

  ModeThresholds thresholds;
  IndexParams index;
  RobustnessParams robustness;
  SelectionParams selection;
  VariantOptions variants;

  LegExperiment leg;
  LegRmseWeights leg_weights;
  int leg_budget = 300;
  int full_budget = 500;
  int population = 0;
  FrictionMode friction_mode = FrictionMode::Cooptimize;
  std::array<double, 3> calib_weight{1.0, 1.0, 1.0};
  std::array<double, 3> calib_scale{1.0, 1.0, 1.0};
  double penalty_factor = 10.0;
  // Self-recovery grid; stays below the hopping regime where cell averages
  // stop being reproducible.
  SweepAxes synthetic_axes{{-25.0, -20.0, 15.0, 20.0, 25.0}, make_axis(-90.0, 90.0, 45.0)};

  ControllerConfig controller;
  ActuationTable table;
  SurrogateParams surrogate;
  Figure8Config figure8;
  double task_duration = 120.0;  // s
  std::vector<Disturbance> disturbances;
  PlantKind plant = PlantKind::Model;

  void validate() const;
  FullCalibConfig full_calib(int jobs) const;
  RobotModel build_model() const;
};

/// Parses a quantity. `dim` names the expected dimension: "length", "mass",
/// "time", "frequency", "angle_deg", "angle_rad", "speed", "rate",
/// "acceleration", "dimensionless", "torsion_stiffness", "torsion_damping",
/// "linear_stiffness", "linear_damping", "density". Throws ConfigError.
double parse_quantity(const nlohmann::json& v, const std::string& dim, const std::string& field);

Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& c);
Config load_config(const std::string& path);

/// Canonical serialization (sorted keys, SI numbers) and its FNV-1a hash.
std::string canonical_config(const Config& c);
std::string config_hash(const Config& c);

/// Model snapshot: inputs plus derived masses and effective coefficients.
nlohmann::json model_snapshot(const RobotModel& m);

}  // namespace vibrowalk
