#pragma once

// Two-stage identification: single-leg joint coefficients from release
// experiments, then whole-robot error parameters from averaged velocities.

#include "vibrowalk/analysis.hpp"
#include "vibrowalk/optimize.hpp"

#include <variant>

namespace vibrowalk {

// ---------------------------------------------------------------------------
// Single-leg release experiment

/// Tip pose history for one load angle. Times are measured from release.
/// Rotation is the tip frame relative to its unloaded orientation as
/// intrinsic X-Y-Z angles.
struct LegSeries {
  double angle_deg = 0.0;
  std::vector<double> t;
  std::vector<Vec3> position;  // m, world
  std::vector<Vec3> rotation;  // rad

  std::size_t size() const { return t.size(); }
  double sample_interval() const { return t.size() < 2 ? 0.0 : t[1] - t[0]; }
};

struct LegReference {
  std::vector<LegSeries> series;
  /// Non-empty series, >= min_samples each, strictly increasing uniform time,
  /// equal sampling interval across series.
  void validate(std::size_t min_samples = 100) const;
};

struct LegExperiment {
  double load_mass = 0.05;    // kg, hung from the tip
  double deflection = 0.0;    // m, tip pre-deflection toward the load before it is attached
  double settle_time = 5.0;   // s, loaded
  double record_time = 3.0;   // s, after release (timeout)
  double sample_rate = 100.0; // Hz
  double stop_threshold = 0.0;  // rad/s; stop early once every |qdot| is below (0 = never)
  double dt = 1e-3;
  std::vector<double> angles_deg{-60.0, 0.0, 60.0};

  void validate() const;
};

/// Intrinsic X-Y-Z angles (R = Rx(a) Ry(b) Rz(c)).
Vec3 intrinsic_xyz(const Mat3& R);

/// Load, settle, release and record one series. Throws IntegrationError if
/// the leg diverges.
LegSeries leg_release_experiment(const LegStiffness& stiffness, double load_angle_deg, const LegExperiment& exp,
                                 const DesignParams& design = {});

/// Runs every configured angle.
LegReference leg_release_reference(const LegStiffness& stiffness, const LegExperiment& exp,
                                   const DesignParams& design = {});

/// Channel weights and scales for pooled RMSE. Each residual is divided by its
/// channel scale, squared, weighted, and the weighted mean is square-rooted.
struct LegRmseWeights {
  std::array<double, 6> weight{1, 1, 1, 1, 1, 1};  // px py pz rx ry rz
  std::array<double, 6> scale{1, 1, 1, 1, 1, 1};   // m, m, m, rad, rad, rad
};

/// Pooled RMSE between two leg references. `candidate` is linearly resampled
/// onto the reference's time base; series are matched by load angle.
double leg_rmse(const LegReference& candidate, const LegReference& reference, const LegRmseWeights& w = {});

/// Simulates `candidate` with the reference's angles and length, then scores it.
double leg_objective(const LegStiffness& candidate, const LegReference& reference, const LegExperiment& exp,
                     const DesignParams& design = {}, const LegRmseWeights& w = {});

struct LegIdentifyResult {
  LegStiffness best;
  double objective = 0.0;
  OptResult opt;
};

/// Default search box: each coefficient within [x/4, 4x] of the baseline,
/// searched in log space.
OptBudget default_leg_budget(int max_evals, std::uint64_t seed, const LegStiffness& around = {});

/// `start` is the first evaluated point (default: the box center).
LegIdentifyResult identify_leg(const LegReference& reference, const OptBudget& budget, const LegExperiment& exp,
                               const DesignParams& design = {}, const LegRmseWeights& w = {},
                               const std::optional<LegStiffness>& start = std::nullopt);

// ---------------------------------------------------------------------------
// Whole-robot calibration

struct ReferenceEntry {
  ActuationCommand cmd;
  VelocitySummary summary;
};

struct RobotReference {
  std::vector<ReferenceEntry> entries;
  void validate(double f_max = 35.0) const;
};

/// Rectangular sweep grid built from a reference that covers every pair of
/// its own f and theta values exactly once. Throws SchemaError otherwise.
SweepGrid reference_grid(const RobotReference& ref);

enum class FrictionMode { Cooptimize, Fixed };

struct FullCalibConfig {
  DesignParams design;
  LegStiffness stiffness;
  ContactParams contact;
  RunOptions run;
  std::array<double, 3> weight{1.0, 1.0, 1.0};  // vx, vy, w
  std::array<double, 3> scale{1.0, 1.0, 1.0};   // m/s, m/s, rad/s
  double penalty_factor = 10.0;  // diverged cell error = factor x worst finite residual
  double penalty_floor = 1.0;    // used when no cell is finite
  FrictionMode friction = FrictionMode::Cooptimize;
  int jobs = 1;  // workers inside one objective evaluation

  void validate() const;
};

/// Pooled RMSE of simulated against reference summaries. Failed cells take
/// the divergence penalty.
double pooled_velocity_rmse(const std::vector<SweepCell>& simulated, const RobotReference& reference,
                            const FullCalibConfig& cfg);

double full_objective(const ErrorParams& candidate, const RobotReference& reference, const FullCalibConfig& cfg);

/// Simulates every reference command with `errors` and returns the result as
/// a reference (used to synthesize self-recovery targets).
RobotReference synthesize_robot_reference(const ErrorParams& errors, const std::vector<ActuationCommand>& cmds,
                                          const FullCalibConfig& cfg);

/// Default box over the 23 error parameters around `start`: factors within
/// [1/2, 2] (log), friction [0.1, 1.5], m_mag within 15%, offsets within
/// 2 cm. In Fixed friction mode the friction bounds collapse onto `start`.
OptBudget default_full_budget(int max_evals, std::uint64_t seed, const ErrorParams& start, FrictionMode mode);

struct FullCalibResult {
  ErrorParams best;
  double objective = 0.0;
  double initial_objective = 0.0;  // at the start point (first evaluation)
  OptResult opt;
};

FullCalibResult calibrate_full(const RobotReference& reference, const OptBudget& budget, const FullCalibConfig& cfg,
                               const ErrorParams& start = {});

// ---------------------------------------------------------------------------
// Reference files

LegReference read_leg_reference_csv(const std::string& path);
RobotReference read_robot_reference_csv(const std::string& path, double f_max = 35.0);
void write_leg_reference_csv(const std::string& path, const LegReference& ref);
void write_robot_reference_csv(const std::string& path, const RobotReference& ref);

/// Reads either reference kind, chosen by the header.
std::variant<LegReference, RobotReference> ingest_reference_csv(const std::string& path);

}  // namespace vibrowalk
