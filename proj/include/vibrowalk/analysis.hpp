#pragma once

// Actuation-space sweeps, locomotion-mode classification, sensitivity
// variants, performance/robustness indices and actuation-pair selection.

#include "vibrowalk/simulate.hpp"

#include <optional>

namespace vibrowalk {

/// Per-run settings shared by sweeps and calibration.
struct RunOptions {
  SimConfig sim;
  double duration = 8.0;  // s
  double settle = 1.0;    // s, start of the averaging window

  void validate() const;
};

/// Simulates one command and averages its velocities. Divergence is caught
/// and reported through the cell status.
SweepCell run_cell(const RobotModel& model, const ActuationCommand& cmd, const RunOptions& opt);

/// Runs a list of commands in parallel; results keep the input order.
std::vector<SweepCell> run_commands(const RobotModel& model, const std::vector<ActuationCommand>& cmds,
                                    const RunOptions& opt, int jobs);

struct SweepAxes {
  std::vector<double> f_axis = make_axis(-35.0, 35.0, 5.0);
  std::vector<double> theta_axis = make_axis(-90.0, 90.0, 15.0);
  void validate(double f_max) const;
};

SweepGrid sweep(const RobotModel& model, const SweepAxes& axes, const RunOptions& opt, int jobs);

/// Sweeps several models over the same axes as one flat parallel job.
std::vector<SweepGrid> sweep_many(const std::vector<const RobotModel*>& models, const SweepAxes& axes,
                                  const RunOptions& opt, int jobs);

// ---------------------------------------------------------------------------

enum class LocomotionMode { LinearTranslation, LeftTurn, RightTurn, LeftStrafe, RightStrafe, Mixed, Stationary };

inline constexpr std::array<LocomotionMode, 7> kAllModes{
    LocomotionMode::LinearTranslation, LocomotionMode::LeftTurn,   LocomotionMode::RightTurn,
    LocomotionMode::LeftStrafe,        LocomotionMode::RightStrafe, LocomotionMode::Mixed,
    LocomotionMode::Stationary};

const char* mode_name(LocomotionMode m);
LocomotionMode parse_mode(const std::string& s);

struct ModeThresholds {
  double floor_linear = 0.02;  // m/s
  double floor_turn = 0.1;     // rad/s
  double dominance = 3.0;
  std::array<double, 3> scale{0.1, 0.1, 0.5};  // vx, vy, w normalization

  void validate() const;
};

/// Stationary below all floors, otherwise the dominant channel names the mode.
LocomotionMode classify_mode(const VelocitySummary& s, const ModeThresholds& th = {});

/// The dominance part of classify_mode alone (no floors). Invariant under
/// uniform positive scaling of the summary.
LocomotionMode dominant_mode(const VelocitySummary& s, const ModeThresholds& th = {});

// ---------------------------------------------------------------------------

struct Variant {
  std::string label;
  std::string group;  // "reference", "mass" or "friction"
  RobotModel model;
};

struct VariantOptions {
  double payload_mass = 0.050;  // kg
  double edge_inset = 0.012;    // m, load center from the named edge
  double payload_height = 0.0;  // m above the plate top surface
  std::vector<double> friction_offsets{-0.58, -0.10, 0.10, 0.58};  // relative, left legs
};

/// Reference first, then mass variants {front, rear, left, right}, then
/// friction variants in offset order.
std::vector<Variant> make_variants(const RobotModel& reference, const VariantOptions& opt = {});

// ---------------------------------------------------------------------------

enum class Direction { Longitudinal = 0, Lateral = 1, Turning = 2 };
inline constexpr std::array<Direction, 3> kDirections{Direction::Longitudinal, Direction::Lateral, Direction::Turning};
const char* direction_name(Direction d);
Direction parse_direction(const std::string& s);

struct IndexParams {
  double eps = 1e-4;     // RMSE below this caps the index
  double i_max = 1e3;
  void validate() const;
};

/// I = |V_ref| / RMSE(V_load, V_ref) per cell for one channel. NaN where the
/// reference or any variant cell failed.
std::vector<double> performance_index(const SweepGrid& ref, const std::vector<SweepGrid>& variants, Direction d,
                                      const IndexParams& p = {});

/// Scalar form of the same formula.
double performance_index_value(double v_ref, const std::vector<double>& v_load, const IndexParams& p = {});

enum class PMode { DirectionResolved, Summed };

struct IndexCell {
  ActuationCommand cmd;
  Direction direction = Direction::Longitudinal;
  double i_mass = 0.0;
  double i_friction = 0.0;
  double p = 0.0;        // computed for every cell, meaningful when !excluded
  int sign = 0;          // sign of the reference channel
  bool excluded = false;
  std::string reason;
};

struct RobustnessParams {
  double min_heading_speed = 0.05;  // m/s
  PMode mode = PMode::DirectionResolved;
};

struct IndexGrid {
  std::vector<double> f_axis;
  std::vector<double> theta_axis;
  std::vector<IndexCell> cells;  // grid index major, direction minor
  std::vector<VelocitySummary> reference;  // per grid index, may be empty

  const IndexCell& at(std::size_t grid_index, Direction d) const {
    return cells.at(3 * grid_index + static_cast<std::size_t>(d));
  }
  std::size_t grid_size() const { return f_axis.size() * theta_axis.size(); }
};

/// P = (I'_mass + I'_friction) / 2 after masking |Vx_ref| below the heading
/// threshold. In Summed mode I' is the sum of the three direction indices.
IndexGrid robustness_index(const std::array<std::vector<double>, 3>& i_mass,
                           const std::array<std::vector<double>, 3>& i_friction, const SweepGrid& ref,
                           const RobustnessParams& p = {});

/// Both index families from the variant sweeps (reference, 4 mass, 4 friction).
IndexGrid compute_indices(const SweepGrid& ref, const std::vector<SweepGrid>& mass,
                          const std::vector<SweepGrid>& friction, const IndexParams& ip = {},
                          const RobustnessParams& rp = {});

// ---------------------------------------------------------------------------

struct ModeCriterion {
  LocomotionMode mode = LocomotionMode::LinearTranslation;
  Direction target = Direction::Longitudinal;
  int sign = 1;                  // required sign of the target channel
  bool apply_exclusion = true;   // honor the heading-speed mask
};

struct SelectionParams {
  std::vector<ModeCriterion> criteria = default_criteria();
  double w_target = 1.0;
  double w_off = 0.5;
  std::array<double, 3> scale{0.1, 0.1, 0.5};  // off-channel normalization
  std::size_t top_k = 3;

  static std::vector<ModeCriterion> default_criteria();
};

struct SelectedPair {
  ActuationCommand cmd;
  double score = 0.0;
  double p = 0.0;
  VelocitySummary reference;
};

struct ModeSelection {
  LocomotionMode mode = LocomotionMode::LinearTranslation;
  std::vector<SelectedPair> ranked;
  std::string diagnostic;  // set when no cell qualifies
};

/// Ranks cells per mode by w_target P_target - w_off sum(|V_off| / scale).
/// Off-channel penalties need the reference summaries in the grid; without
/// them the penalty is zero and the diagnostic says so.
std::vector<ModeSelection> select_pairs(const IndexGrid& grid, const SelectionParams& p = {});

}  // namespace vibrowalk
