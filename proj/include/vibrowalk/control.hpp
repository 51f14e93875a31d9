#pragma once

// Bang-bang heading controller, task runners and a kinematic unicycle
// surrogate that closes the loop without the multibody engine.

#include "vibrowalk/analysis.hpp"
#include "vibrowalk/io.hpp"

#include <map>
#include <memory>

namespace vibrowalk {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct ActuationTable {
  std::map<LocomotionMode, ActuationCommand> commands{
      {LocomotionMode::LinearTranslation, {-30.0, 30.0}}, {LocomotionMode::LeftTurn, {-30.0, 90.0}},
      {LocomotionMode::RightTurn, {30.0, 90.0}},          {LocomotionMode::LeftStrafe, {30.0, 30.0}},
      {LocomotionMode::RightStrafe, {-30.0, -60.0}}};

  const ActuationCommand& at(LocomotionMode m) const;
  void validate(double f_max = 35.0) const;
};

struct ControllerConfig {
  double deadband = 0.1;        // rad
  double period = 0.1;          // s
  bool three_state = false;     // translate inside the deadband
  double capture_radius = 0.1;  // m

  void validate() const;
};

/// Heading error toward `target`, wrapped to (-pi, pi]; positive means the
/// target is to the left. Throws Error if the target is at the position.
double heading_error(const PlanarPose& pose, const Point2& target);

/// Switching law state: the last turn direction issued.
struct SwitchState {
  LocomotionMode last_turn = LocomotionMode::LeftTurn;
};

/// Mode chosen for `error`. Outside the deadband the sign picks the turn;
/// inside it the previous turn is held, or translation in three-state mode.
LocomotionMode switching_mode(double error, const ControllerConfig& cfg, SwitchState& state);

ActuationCommand switching_command(double error, const ControllerConfig& cfg, const ActuationTable& table,
                                   SwitchState& state);

// ---------------------------------------------------------------------------

/// Anything the controller can drive for one control period.
class Plant {
 public:
  virtual ~Plant() = default;
  virtual double time() const = 0;
  virtual PlanarPose pose() const = 0;
  virtual TrajectorySample sample() const = 0;
  /// Applies `cmd` for `duration` seconds.
  virtual void apply(const ActuationCommand& cmd, double duration) = 0;
  /// Rigid planar displacement (world frame).
  virtual void displace(double dx, double dy, double dyaw) = 0;
};

/// Unicycle response per mode: forward/lateral speed and yaw rate.
struct SurrogateParams {
  std::map<LocomotionMode, VelocitySummary> response{
      {LocomotionMode::LinearTranslation, {0.10, 0.0, 0.0}}, {LocomotionMode::LeftTurn, {0.10, 0.0, 1.0}},
      {LocomotionMode::RightTurn, {0.10, 0.0, -1.0}},        {LocomotionMode::LeftStrafe, {0.0, 0.08, 0.0}},
      {LocomotionMode::RightStrafe, {0.0, -0.08, 0.0}},      {LocomotionMode::Stationary, {0.0, 0.0, 0.0}}};
  double substep = 1e-3;  // s

  void validate() const;
};

class UnicycleSurrogate : public Plant {
 public:
  UnicycleSurrogate(SurrogateParams params, ActuationTable table, PlanarPose start = {});
  double time() const override { return static_cast<double>(steps_) * params_.substep; }
  PlanarPose pose() const override { return pose_; }
  TrajectorySample sample() const override;
  void apply(const ActuationCommand& cmd, double duration) override;
  void displace(double dx, double dy, double dyaw) override;

  /// Body-frame velocity produced by a command (by table lookup; zero for
  /// f = 0 or an unlisted command).
  VelocitySummary response(const ActuationCommand& cmd) const;

 private:
  SurrogateParams params_;
  ActuationTable table_;
  PlanarPose pose_;
  VelocitySummary current_;
  long steps_ = 0;
};

/// Full multibody plant.
class SimPlant : public Plant {
 public:
  SimPlant(const RobotModel& model, const SimConfig& cfg);
  double time() const override { return sim_.state().t; }
  PlanarPose pose() const override;
  TrajectorySample sample() const override { return sim_.sample(); }
  void apply(const ActuationCommand& cmd, double duration) override;
  void displace(double dx, double dy, double dyaw) override { sim_.displace(dx, dy, dyaw); }

 private:
  Simulator sim_;
};

// ---------------------------------------------------------------------------

struct Disturbance {
  double t = 0.0;  // s
  double dx = 0.0;
  double dy = 0.0;
  double dyaw = 0.0;
};

struct TaskResult {
  Trajectory trajectory;  // sampled once per control period
  std::vector<Event> events;
  std::size_t captured = 0;
  bool success = false;
  double completion_time = -1.0;  // s, when the last waypoint was captured
  std::vector<LocomotionMode> modes;  // mode issued each period
  std::vector<double> errors;         // heading error each period (NaN when holding)
};

/// Closed-loop waypoint tracking until every waypoint is captured or
/// `duration` elapses.
TaskResult run_tracking(Plant& plant, const std::vector<Point2>& waypoints, const ControllerConfig& cfg,
                        const ActuationTable& table, double duration);

TaskResult run_tracking(const RobotModel& model, const std::vector<Point2>& waypoints, const ControllerConfig& cfg,
                        const ActuationTable& table, double duration, const SimConfig& sim = {});

/// Figure-eight (lemniscate of Gerono) through `center`: x = 2r sin s,
/// y = r sin 2s. The first and last points coincide with the start.
std::vector<Point2> figure_eight_waypoints(const Point2& center, double lobe_radius, int count);

/// Drives to the origin with scheduled displacements. Inside the capture
/// radius the robot holds a zero-frequency command. Success = final distance
/// below the capture radius.
TaskResult return_to_origin(Plant& plant, const ControllerConfig& cfg, const ActuationTable& table,
                            const std::vector<Disturbance>& disturbances, double duration, const Point2& origin = {});

TaskResult return_to_origin(const RobotModel& model, const ControllerConfig& cfg, const ActuationTable& table,
                            const std::vector<Disturbance>& disturbances, double duration, const SimConfig& sim = {});

}  // namespace vibrowalk
