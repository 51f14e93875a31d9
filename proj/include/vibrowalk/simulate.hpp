#pragma once

#include "vibrowalk/robot.hpp"

#include <functional>

namespace vibrowalk {

struct SimConfig {
  double dt = 2e-4;
  double sample_rate = 200.0;  // Hz, trajectory output
  double motor_lag = 0.0;      // first-order rotor spin-up time constant, s (0 = instantaneous)
  double max_joint_rate = 1e4; // divergence threshold, rad/s
  double f_max = 35.0;
  bool gravity = true;

  void validate() const;
  /// Integrator steps between trajectory samples.
  long sample_stride() const;
};

/// Stateful integrator for one robot. Owns its scratch memory; one instance
/// per thread.
class Simulator {
 public:
  Simulator(const RobotModel& model, SimConfig cfg);
  Simulator(const RobotModel& model, SimConfig cfg, SimState initial);

  const SimState& state() const { return state_; }
  void reset(const SimState& s) { state_ = s; }
  const SimConfig& config() const { return cfg_; }
  const RobotModel& model() const { return *model_; }

  void set_command(const ActuationCommand& cmd);
  const ActuationCommand& command() const { return cmd_; }

  /// Advances one step of length cfg.dt. Throws IntegrationError on divergence.
  void step();
  /// Advances n steps.
  void advance(long n);

  /// Moves the robot rigidly in the plane (disturbance injection).
  void displace(double dx, double dy, double dyaw);

  TrajectorySample sample() const;

  /// Sum of kinetic, gravitational and joint-spring energy.
  double mechanical_energy();

  /// Ground reaction at each foot from the last step (world frame).
  const PerLeg<Vec3>& foot_forces() const { return foot_forces_; }

 private:
  const RobotModel* model_;
  SimConfig cfg_;
  SimState state_;
  ActuationCommand cmd_;
  Multibody::Workspace ws_;
  PerLeg<Vec3> foot_forces_{};
  long steps_ = 0;
};

/// One integrator step from `state` (pure function form of Simulator::step).
SimState step(const RobotModel& model, const SimState& state, const ActuationCommand& cmd, double dt,
              const SimConfig& cfg = {});

/// Runs from the canonical rest pose for `duration` seconds.
Trajectory simulate(const RobotModel& model, const ActuationCommand& cmd, double duration, const SimConfig& cfg = {});

/// Mean heading-frame velocities and yaw rate over [settle, end], from
/// finite differences of the sampled planar poses.
VelocitySummary average_velocities(const Trajectory& traj, double settle = 1.0);

}  // namespace vibrowalk
