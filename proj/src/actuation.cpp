#include "vibrowalk/actuation.hpp"

namespace vibrowalk {

RotorState rotor_positions(double t, const ActuationCommand& cmd, const RotorGeometry& geom) {
  const double phase = cmd.rotor_rate() * t;
  const double th = cmd.theta_rad();
  const double l = geom.arm, h = geom.separation;
  return {Vec3(l * std::cos(phase + th), l * std::sin(phase + th), h / 2.0),
          Vec3(l * std::cos(-phase + th), l * std::sin(-phase + th), -h / 2.0), phase};
}

Wrench shaker_wrench(double phase, double rate, double th, const RotorGeometry& geom) {
  const double m = geom.mass, l = geom.arm, h = geom.separation, g = geom.gravity;
  const double amp = m * rate * rate * l;
  const double c = std::cos(phase), s = std::sin(phase);
  const double ct = std::cos(th), st = std::sin(th);
  Wrench w;
  w.force = Vec3(2.0 * amp * c * ct, 2.0 * amp * c * st, -2.0 * m * g);
  w.torque = Vec3(-h * amp * s * ct - 2.0 * m * g * l * c * st,  //
                  -h * amp * s * st + 2.0 * m * g * l * c * ct,  //
                  0.0);
  return w;
}

Vec3 net_force(double t, const ActuationCommand& cmd, const RotorGeometry& geom) {
  return shaker_wrench(cmd.rotor_rate() * t, cmd.rotor_rate(), cmd.theta_rad(), geom).force;
}

Vec3 net_torque(double t, const ActuationCommand& cmd, const RotorGeometry& geom) {
  return shaker_wrench(cmd.rotor_rate() * t, cmd.rotor_rate(), cmd.theta_rad(), geom).torque;
}

Wrench rotor_wrench_numeric(double t, const ActuationCommand& cmd, const RotorGeometry& geom) {
  const RotorState rs = rotor_positions(t, cmd, geom);
  const double om = cmd.rotor_rate();
  const double m = geom.mass;
  // Centrifugal force points along each mass's horizontal radius vector.
  const Vec3 f1 = m * om * om * Vec3(rs.r1.x(), rs.r1.y(), 0.0);
  const Vec3 f2 = m * om * om * Vec3(rs.r2.x(), rs.r2.y(), 0.0);
  const Vec3 weight(0.0, 0.0, -m * geom.gravity);
  Wrench w;
  w.force = f1 + f2 + 2.0 * weight;
  w.torque = rs.r1.cross(f1 + weight) + rs.r2.cross(f2 + weight);
  return w;
}

double max_force(double f_hz, const RotorGeometry& geom) {
  const double om = 2.0 * kPi * f_hz;
  return 2.0 * geom.mass * om * om * geom.arm;
}

}  // namespace vibrowalk
