#pragma once

// Dual-rotor shaker: two offset masses spinning in opposite directions about
// a shared vertical axis, separated vertically by h. All vectors are in the
// body frame with the origin at the rotor-pair midpoint.

#include "vibrowalk/core.hpp"

namespace vibrowalk {

struct RotorGeometry {
  double arm = 0.028;         // l
  double separation = 0.028;  // h
  double mass = 0.012;        // m, per rotor
  double gravity = 9.81;

  static RotorGeometry from(const DesignParams& d) {
    return {d.rotor_arm, d.rotor_separation, d.rotor_mass, d.gravity};
  }
};

struct RotorState {
  Vec3 r1 = Vec3::Zero();  // top mass
  Vec3 r2 = Vec3::Zero();  // bottom mass
  double phase = 0.0;      // Omega * t
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

RotorState rotor_positions(double t, const ActuationCommand& cmd, const RotorGeometry& geom);

/// Closed-form net force including the rotor masses' weight.
Vec3 net_force(double t, const ActuationCommand& cmd, const RotorGeometry& geom);

/// Closed-form net torque about the rotor-pair midpoint; z is identically 0.
Vec3 net_torque(double t, const ActuationCommand& cmd, const RotorGeometry& geom);

/// Per-rotor summation of centrifugal forces and moments r_i x (F_i - m g z).
/// Independent of the closed forms above; used to check them.
Wrench rotor_wrench_numeric(double t, const ActuationCommand& cmd, const RotorGeometry& geom);

/// Peak shaking force amplitude 2 m Omega^2 l.
double max_force(double f_hz, const RotorGeometry& geom);

/// Closed-form wrench at an explicit rotor phase and rate. The simulator uses
/// this so a lagged rotor (phase != Omega t) stays consistent.
Wrench shaker_wrench(double phase, double rotor_rate, double theta_rad, const RotorGeometry& geom);

}  // namespace vibrowalk
