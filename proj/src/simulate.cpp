#include "vibrowalk/simulate.hpp"

#include <algorithm>
#include <sstream>

namespace vibrowalk {

void SimConfig::validate() const {
  if (!(dt > 0.0) || dt > 1e-3) throw ConfigError("dt must be in (0, 1e-3] s");
  if (!(sample_rate > 0.0) || 1.0 / sample_rate < dt) throw ConfigError("sample rate must be positive and <= 1/dt");
  if (!(motor_lag >= 0.0)) throw ConfigError("motor lag must be >= 0");
  if (!(max_joint_rate > 0.0)) throw ConfigError("max joint rate must be > 0");
}

long SimConfig::sample_stride() const { return std::max(1L, std::lround(1.0 / (sample_rate * dt))); }

Simulator::Simulator(const RobotModel& model, SimConfig cfg) : Simulator(model, cfg, model.rest_state()) {}

Simulator::Simulator(const RobotModel& model, SimConfig cfg, SimState initial)
    : model_(&model), cfg_(cfg), state_(initial), ws_(model.tree().make_workspace()) {
  cfg_.validate();
}

void Simulator::set_command(const ActuationCommand& cmd) {
  cmd_ = ActuationCommand::make(cmd.f_hz, cmd.theta_deg, cfg_.f_max);
}

namespace {

Vec6 base_twist(const SimState& s) {
  Vec6 v;
  v.head<3>() = s.base_angular;
  v.tail<3>() = s.base_linear;
  return v;
}

}  // namespace

void Simulator::step() {
  const RobotModel& m = *model_;
  const Multibody& tree = m.tree();
  const double dt = cfg_.dt;
  const ContactParams& cp = m.contact();

  // Rotor rate: instantaneous or first-order lag (backward Euler).
  const double target = cmd_.rotor_rate();
  if (cfg_.motor_lag > 0.0)
    state_.rotor_rate += (target - state_.rotor_rate) * dt / (cfg_.motor_lag + dt);
  else
    state_.rotor_rate = target;

  tree.kinematics(state_.base, base_twist(state_), state_.q, state_.qd, ws_);
  ws_.clear_inputs();
  if (cfg_.gravity) tree.add_gravity(Vec3(0.0, 0.0, -m.design().gravity), ws_);

  // Shaker wrench on the base at the rotor-pair midpoint (body frame).
  RotorGeometry geom = m.rotor();
  if (!cfg_.gravity) geom.gravity = 0.0;
  const Wrench w = shaker_wrench(state_.rotor_phase, state_.rotor_rate, cmd_.theta_rad(), geom);
  ws_.f_ext[0] += force_at_point(m.rotor_midpoint(), w.force, w.torque);

  // Penalty contact, linearized implicitly through the foot body impedance.
  ContactParams pc = cp;
  const double share = 1.0 / static_cast<double>(m.foot_points().size());
  pc.k_n *= share;
  pc.d_n *= share;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const int body = m.foot_body(leg);
    const double mu = m.friction(leg);
    const Mat3& R = ws_.R[body];
    foot_forces_[leg].setZero();
    for (const Vec3& local : m.foot_points()) {
      FootPointState foot{tree.point_world(body, local, ws_), tree.point_velocity_world(body, local, ws_)};
      Vec3 f = contact_force(foot, mu, pc);
      foot_forces_[leg] += f;
      const double n = f.z();
      if (n <= 0.0) continue;
      const double slip = foot.velocity.head<2>().norm();
      const double ct = mu * n / std::max(slip, pc.v_eps);
      const double cn = pc.d_n + dt * pc.k_n;
      f.z() -= pc.k_n * dt * foot.velocity.z();
      const Mat3 C = Vec3(ct, ct, cn).asDiagonal();
      Vec3 torque = Vec3::Zero();
      if (pc.torsional_mu > 0.0) {
        const double wz = (R * ws_.v[body].head<3>()).z();
        const double tz = -pc.torsional_mu * n * std::clamp(wz / pc.w_eps, -1.0, 1.0);
        torque = R.transpose() * Vec3(0.0, 0.0, tz);
      }
      ws_.f_ext[body] += force_at_point(local, R.transpose() * f, torque);
      ws_.I_extra[body] += dt * point_impedance(local, R, C);
    }
  }

  tree.forward_dynamics(state_.q, state_.qd, dt, ws_);

  // Semi-implicit update: velocities first, positions with the new velocities.
  double worst = 0.0;
  for (int j = 0; j < kNumJoints; ++j) {
    state_.qd[j] += dt * ws_.qdd[j];
    state_.q[j] += dt * state_.qd[j];
    worst = std::max(worst, std::abs(state_.qd[j]));
  }
  state_.base_angular += dt * ws_.base_acc.head<3>();
  state_.base_linear += dt * ws_.base_acc.tail<3>();
  state_.base.position += dt * (state_.base.orientation * state_.base_linear);
  const Vec3 dtheta = dt * state_.base_angular;
  const double angle = dtheta.norm();
  if (angle > 0.0) {
    state_.base.orientation = state_.base.orientation * Quat(Eigen::AngleAxisd(angle, dtheta / angle));
    state_.base.orientation.normalize();
  }
  state_.rotor_phase += dt * state_.rotor_rate;
  ++steps_;
  state_.t += dt;

  if (worst > cfg_.max_joint_rate || !state_.finite()) {
    std::ostringstream os;
    os << "integration diverged (max |qdot| = " << worst << " rad/s)";
    throw IntegrationError(os.str(), state_.t);
  }
}

void Simulator::advance(long n) {
  for (long i = 0; i < n; ++i) step();
}

void Simulator::displace(double dx, double dy, double dyaw) {
  state_.base.position.x() += dx;
  state_.base.position.y() += dy;
  state_.base.orientation = Quat(Eigen::AngleAxisd(dyaw, Vec3::UnitZ())) * state_.base.orientation;
  state_.base.orientation.normalize();
}

TrajectorySample Simulator::sample() const {
  TrajectorySample s;
  s.t = state_.t;
  s.pose = state_.base;
  const Vec3 vb = body_frame_velocity(state_.base, state_.world_linear_velocity());
  s.vx_body = vb.x();
  s.vy_body = vb.y();
  s.yaw_rate = (state_.base.orientation * state_.base_angular).z();
  return s;
}

double Simulator::mechanical_energy() {
  const Multibody& tree = model_->tree();
  Vec6 v;
  v.head<3>() = state_.base_angular;
  v.tail<3>() = state_.base_linear;
  tree.kinematics(state_.base, v, state_.q, state_.qd, ws_);
  const Vec3 g = cfg_.gravity ? Vec3(0.0, 0.0, -model_->design().gravity) : Vec3::Zero();
  return tree.kinetic_energy(ws_) + tree.gravity_potential(g, ws_) + tree.spring_potential(state_.q);
}

SimState step(const RobotModel& model, const SimState& state, const ActuationCommand& cmd, double dt,
              const SimConfig& cfg) {
  SimConfig c = cfg;
  c.dt = dt;
  c.sample_rate = 1.0 / dt;
  Simulator sim(model, c, state);
  sim.set_command(cmd);
  sim.step();
  return sim.state();
}

Trajectory simulate(const RobotModel& model, const ActuationCommand& cmd, double duration, const SimConfig& cfg) {
  if (!(duration > 0.0)) throw ConfigError("duration must be > 0");
  Simulator sim(model, cfg);
  sim.set_command(cmd);
  const long steps = std::lround(duration / cfg.dt);
  const long stride = cfg.sample_stride();
  Trajectory traj;
  traj.sample_interval = static_cast<double>(stride) * cfg.dt;
  traj.samples.reserve(static_cast<std::size_t>(steps / stride + 1));
  traj.samples.push_back(sim.sample());
  for (long k = 1; k <= steps; ++k) {
    sim.step();
    if (k % stride == 0) {
      TrajectorySample s = sim.sample();
      s.t = static_cast<double>(k) * cfg.dt;  // exact grid, free of accumulated rounding
      traj.samples.push_back(s);
    }
  }
  return traj;
}

VelocitySummary average_velocities(const Trajectory& traj, double settle) {
  std::size_t i0 = 0;
  while (i0 < traj.samples.size() && traj.samples[i0].t < settle - 1e-9) ++i0;
  if (i0 + 1 >= traj.samples.size()) throw Error("average_velocities: empty averaging window");
  double sx = 0.0, sy = 0.0, syaw = 0.0, total = 0.0;
  for (std::size_t i = i0 + 1; i < traj.samples.size(); ++i) {
    const auto a = traj.samples[i - 1].planar();
    const auto b = traj.samples[i].planar();
    const double h = traj.samples[i].t - traj.samples[i - 1].t;
    const double dyaw = wrap_angle(b.yaw - a.yaw);
    const double mid = a.yaw + 0.5 * dyaw;
    const double dx = b.x - a.x, dy = b.y - a.y;
    sx += std::cos(mid) * dx + std::sin(mid) * dy;
    sy += -std::sin(mid) * dx + std::cos(mid) * dy;
    syaw += dyaw;
    total += h;
  }
  return {sx / total, sy / total, syaw / total};
}

}  // namespace vibrowalk
