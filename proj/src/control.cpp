#include "vibrowalk/control.hpp"

#include <limits>
#include <sstream>

namespace vibrowalk {

const ActuationCommand& ActuationTable::at(LocomotionMode m) const {
  auto it = commands.find(m);
  if (it == commands.end()) throw ConfigError(std::string("actuation table has no entry for ") + mode_name(m));
  return it->second;
}

void ActuationTable::validate(double f_max) const {
  for (auto m : {LocomotionMode::LeftTurn, LocomotionMode::RightTurn}) at(m);
  for (const auto& [mode, c] : commands)
    if (!std::isfinite(c.f_hz) || std::abs(c.f_hz) > f_max || !std::isfinite(c.theta_deg) ||
        std::abs(c.theta_deg) > 90.0)
      throw ConfigError(std::string("actuation table entry for ") + mode_name(mode) + " is outside the sweep bounds");
}

void ControllerConfig::validate() const {
  if (!(deadband >= 0.0)) throw ConfigError("controller deadband must be >= 0");
  if (!(period > 0.0)) throw ConfigError("controller period must be > 0");
  if (!(capture_radius >= 0.0)) throw ConfigError("capture radius must be >= 0");
}

double heading_error(const PlanarPose& pose, const Point2& target) {
  const double dx = target.x - pose.x, dy = target.y - pose.y;
  if (dx == 0.0 && dy == 0.0) throw Error("heading_error: target coincides with the robot position");
  return wrap_angle(std::atan2(dy, dx) - pose.yaw);
}

LocomotionMode switching_mode(double error, const ControllerConfig& cfg, SwitchState& state) {
  if (error > cfg.deadband) {
    state.last_turn = LocomotionMode::LeftTurn;
    return state.last_turn;
  }
  if (error < -cfg.deadband) {
    state.last_turn = LocomotionMode::RightTurn;
    return state.last_turn;
  }
  return cfg.three_state ? LocomotionMode::LinearTranslation : state.last_turn;
}

ActuationCommand switching_command(double error, const ControllerConfig& cfg, const ActuationTable& table,
                                   SwitchState& state) {
  return table.at(switching_mode(error, cfg, state));
}

// ---------------------------------------------------------------------------

void SurrogateParams::validate() const {
  if (!(substep > 0.0)) throw ConfigError("surrogate substep must be > 0");
  for (const auto& [m, v] : response)
    if (!v.finite()) throw ConfigError(std::string("surrogate response for ") + mode_name(m) + " is not finite");
}

UnicycleSurrogate::UnicycleSurrogate(SurrogateParams params, ActuationTable table, PlanarPose start)
    : params_(std::move(params)), table_(std::move(table)), pose_(start) {
  params_.validate();
}

VelocitySummary UnicycleSurrogate::response(const ActuationCommand& cmd) const {
  if (cmd.f_hz == 0.0) return {};
  for (const auto& [mode, c] : table_.commands) {
    if (c == cmd) {
      auto it = params_.response.find(mode);
      return it == params_.response.end() ? VelocitySummary{} : it->second;
    }
  }
  return {};
}

TrajectorySample UnicycleSurrogate::sample() const {
  TrajectorySample s;
  s.t = time();
  s.pose = Pose::planar(pose_.x, pose_.y, pose_.yaw);
  s.vx_body = current_.vx;
  s.vy_body = current_.vy;
  s.yaw_rate = current_.w;
  return s;
}

void UnicycleSurrogate::apply(const ActuationCommand& cmd, double duration) {
  current_ = response(cmd);
  const long n = std::max(1L, std::lround(duration / params_.substep));
  const double h = params_.substep;
  for (long k = 0; k < n; ++k) {
    const double mid = pose_.yaw + 0.5 * h * current_.w;
    const double c = std::cos(mid), s = std::sin(mid);
    pose_.x += h * (c * current_.vx - s * current_.vy);
    pose_.y += h * (s * current_.vx + c * current_.vy);
    pose_.yaw = wrap_angle(pose_.yaw + h * current_.w);
  }
  steps_ += n;
}

void UnicycleSurrogate::displace(double dx, double dy, double dyaw) {
  pose_.x += dx;
  pose_.y += dy;
  pose_.yaw = wrap_angle(pose_.yaw + dyaw);
}

SimPlant::SimPlant(const RobotModel& model, const SimConfig& cfg) : sim_(model, cfg) {}

PlanarPose SimPlant::pose() const { return sim_.sample().planar(); }

void SimPlant::apply(const ActuationCommand& cmd, double duration) {
  sim_.set_command(cmd);
  sim_.advance(std::max(1L, std::lround(duration / sim_.config().dt)));
}

// ---------------------------------------------------------------------------

namespace {

double distance(const PlanarPose& p, const Point2& q) { return std::hypot(q.x - p.x, q.y - p.y); }

std::string point_payload(std::size_t index, const PlanarPose& p) {
  std::ostringstream os;
  os << "index=" << index << ";x=" << fmt(p.x) << ";y=" << fmt(p.y);
  return os.str();
}

void record(TaskResult& r, const Plant& plant) { r.trajectory.samples.push_back(plant.sample()); }

}  // namespace

TaskResult run_tracking(Plant& plant, const std::vector<Point2>& waypoints, const ControllerConfig& cfg,
                        const ActuationTable& table, double duration) {
  cfg.validate();
  if (waypoints.empty()) throw ConfigError("tracking needs at least one waypoint");
  if (!(duration > 0.0)) throw ConfigError("task duration must be > 0");
  TaskResult r;
  r.trajectory.sample_interval = cfg.period;
  SwitchState state;
  const double t0 = plant.time();
  const long periods = std::lround(duration / cfg.period);
  record(r, plant);
  for (long k = 0; k < periods && r.captured < waypoints.size();) {
    const PlanarPose p = plant.pose();
    const Point2& target = waypoints[r.captured];
    if (const double d = distance(p, target); d < cfg.capture_radius || d == 0.0) {
      r.events.push_back({plant.time() - t0, "capture", point_payload(r.captured, p)});
      ++r.captured;
      if (r.captured == waypoints.size()) {
        r.completion_time = plant.time() - t0;
        r.events.push_back({r.completion_time, "complete", "captured=" + std::to_string(r.captured)});
      }
      continue;
    }
    const double e = heading_error(p, target);
    const LocomotionMode m = switching_mode(e, cfg, state);
    plant.apply(table.at(m), cfg.period);
    r.modes.push_back(m);
    r.errors.push_back(e);
    record(r, plant);
    ++k;
  }
  r.success = r.captured == waypoints.size();
  return r;
}

TaskResult run_tracking(const RobotModel& model, const std::vector<Point2>& waypoints, const ControllerConfig& cfg,
                        const ActuationTable& table, double duration, const SimConfig& sim) {
  SimPlant plant(model, sim);
  return run_tracking(plant, waypoints, cfg, table, duration);
}

std::vector<Point2> figure_eight_waypoints(const Point2& center, double lobe_radius, int count) {
  if (!(lobe_radius > 0.0) || !std::isfinite(lobe_radius)) throw ConfigError("figure-eight radius must be > 0");
  if (count < 4) throw ConfigError("figure-eight needs at least 4 waypoints");
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double s = kPi / 2.0 + 2.0 * kPi * k / (count - 1);
    pts.push_back({center.x + 2.0 * lobe_radius * std::sin(s), center.y + lobe_radius * std::sin(2.0 * s)});
  }
  return pts;
}

TaskResult return_to_origin(Plant& plant, const ControllerConfig& cfg, const ActuationTable& table,
                            const std::vector<Disturbance>& disturbances, double duration, const Point2& origin) {
  cfg.validate();
  if (!(duration > 0.0)) throw ConfigError("task duration must be > 0");
  for (const auto& d : disturbances)
    if (!std::isfinite(d.t) || !std::isfinite(d.dx) || !std::isfinite(d.dy) || !std::isfinite(d.dyaw))
      throw ConfigError("disturbance entries must be finite");
  std::vector<Disturbance> pending = disturbances;
  std::stable_sort(pending.begin(), pending.end(), [](const Disturbance& a, const Disturbance& b) { return a.t < b.t; });

  TaskResult r;
  r.trajectory.sample_interval = cfg.period;
  SwitchState state;
  const double t0 = plant.time();
  const long periods = std::lround(duration / cfg.period);
  std::size_t next = 0;
  bool inside = false;
  record(r, plant);
  for (long k = 0; k < periods; ++k) {
    const double now = plant.time() - t0;
    while (next < pending.size() && pending[next].t <= now + 1e-9) {
      const Disturbance& d = pending[next++];
      plant.displace(d.dx, d.dy, d.dyaw);
      std::ostringstream os;
      os << "dx=" << fmt(d.dx) << ";dy=" << fmt(d.dy) << ";dyaw=" << fmt(d.dyaw)
         << ";magnitude=" << fmt(std::hypot(d.dx, d.dy));
      r.events.push_back({now, "disturbance", os.str()});
      inside = false;
    }
    const PlanarPose p = plant.pose();
    const double dist = distance(p, origin);
    if (dist < cfg.capture_radius || dist == 0.0) {
      if (!inside && dist < cfg.capture_radius) r.events.push_back({now, "capture", point_payload(0, p)});
      inside = true;
      plant.apply(ActuationCommand{}, cfg.period);
      r.modes.push_back(LocomotionMode::Stationary);
      r.errors.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      inside = false;
      const double e = heading_error(p, origin);
      const LocomotionMode m = switching_mode(e, cfg, state);
      plant.apply(table.at(m), cfg.period);
      r.modes.push_back(m);
      r.errors.push_back(e);
    }
    record(r, plant);
  }
  const double final_dist = distance(plant.pose(), origin);
  r.success = final_dist < cfg.capture_radius;
  r.captured = r.success ? 1 : 0;
  if (r.success) r.completion_time = plant.time() - t0;
  r.events.push_back({plant.time() - t0, r.success ? "success" : "failure", "distance=" + fmt(final_dist)});
  return r;
}

TaskResult return_to_origin(const RobotModel& model, const ControllerConfig& cfg, const ActuationTable& table,
                            const std::vector<Disturbance>& disturbances, double duration, const SimConfig& sim) {
  SimPlant plant(model, sim);
  return return_to_origin(plant, cfg, table, disturbances, duration);
}

}  // namespace vibrowalk
