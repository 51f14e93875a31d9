#include "vibrowalk/calibration.hpp"

#include "vibrowalk/io.hpp"
#include "vibrowalk/parallel.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace vibrowalk {

void LegReference::validate(std::size_t min_samples) const {
  if (series.empty()) throw SchemaError("leg reference has no series");
  const double h0 = series.front().sample_interval();
  for (const auto& s : series) {
    if (s.t.size() < min_samples)
      throw SchemaError("leg series at " + fmt(s.angle_deg) + " deg has " + std::to_string(s.t.size()) +
                        " samples, need at least " + std::to_string(min_samples));
    if (s.position.size() != s.t.size() || s.rotation.size() != s.t.size())
      throw SchemaError("leg series at " + fmt(s.angle_deg) + " deg has ragged channels");
    const double h = s.sample_interval();
    for (std::size_t i = 1; i < s.t.size(); ++i) {
      const double d = s.t[i] - s.t[i - 1];
      if (!(d > 0.0)) throw SchemaError("leg series at " + fmt(s.angle_deg) + " deg: time not increasing", i + 1, "t");
      if (std::abs(d - h) > 1e-9 * std::max(1.0, s.t[i]))
        throw SchemaError("leg series at " + fmt(s.angle_deg) + " deg: non-uniform sampling", i + 1, "t");
    }
    if (std::abs(h - h0) > 1e-9) throw SchemaError("leg series use different sampling intervals");
  }
}

void LegExperiment::validate() const {
  if (!(load_mass >= 0.0) || !std::isfinite(load_mass)) throw ConfigError("leg experiment: load mass must be >= 0");
  if (!std::isfinite(deflection)) throw ConfigError("leg experiment: non-finite deflection");
  if (!(settle_time >= 0.0) || !(record_time > 0.0)) throw ConfigError("leg experiment: bad settle/record time");
  if (!(sample_rate > 0.0)) throw ConfigError("leg experiment: sample rate must be > 0");
  if (!(dt > 0.0) || dt > 1e-3 || 1.0 / sample_rate < dt) throw ConfigError("leg experiment: dt must be in (0, 1e-3] and <= 1/rate");
  if (!(stop_threshold >= 0.0)) throw ConfigError("leg experiment: stop threshold must be >= 0");
  if (angles_deg.empty()) throw ConfigError("leg experiment: no load angles");
}

Vec3 intrinsic_xyz(const Mat3& R) {
  const double b = std::asin(std::clamp(R(0, 2), -1.0, 1.0));
  const double a = std::atan2(-R(1, 2), R(2, 2));
  const double c = std::atan2(-R(0, 1), R(0, 0));
  return {a, b, c};
}

namespace {

constexpr double kMaxLegRate = 1e4;

class LegSim {
 public:
  LegSim(const LegRig& rig, double dt) : rig_(rig), dt_(dt), ws_(rig.tree.make_workspace()), q_(rig.tree.dof(), 0.0), qd_(q_) {}

  void step(const Vec3& tip_force_world) {
    const Multibody& tree = rig_.tree;
    tree.kinematics(Pose{}, Vec6::Zero(), q_, qd_, ws_);
    ws_.clear_inputs();
    if (tip_force_world.squaredNorm() > 0.0) {
      const Mat3& R = ws_.R[rig_.tip_body];
      ws_.f_ext[rig_.tip_body] += force_at_point(rig_.tip_point, R.transpose() * tip_force_world);
    }
    tree.forward_dynamics(q_, qd_, dt_, ws_);
    for (std::size_t j = 0; j < q_.size(); ++j) {
      qd_[j] += dt_ * ws_.qdd[j];
      q_[j] += dt_ * qd_[j];
      if (!std::isfinite(qd_[j]) || std::abs(qd_[j]) > kMaxLegRate)
        throw IntegrationError("leg release: integration diverged", t_);
    }
    t_ += dt_;
  }

  // Tip position and orientation for the current q.
  std::pair<Vec3, Mat3> tip() {
    rig_.tree.kinematics(Pose{}, Vec6::Zero(), q_, qd_, ws_);
    return {rig_.tree.point_world(rig_.tip_body, rig_.tip_point, ws_), ws_.R[rig_.tip_body]};
  }

  double max_rate() const {
    double m = 0.0;
    for (double v : qd_) m = std::max(m, std::abs(v));
    return m;
  }

  std::vector<double>& q() { return q_; }

 private:
  const LegRig& rig_;
  double dt_;
  Multibody::Workspace ws_;
  std::vector<double> q_, qd_;
  double t_ = 0.0;
};

}  // namespace

LegSeries leg_release_experiment(const LegStiffness& stiffness, double load_angle_deg, const LegExperiment& exp,
                                 const DesignParams& design) {
  exp.validate();
  const LegRig rig = build_leg_rig(stiffness, design, deg2rad(load_angle_deg));
  LegSim sim(rig, exp.dt);
  const auto [p_rest, R_rest] = sim.tip();
  (void)p_rest;

  // Pre-deflect about the first bend axis, toward the load side.
  const double reach = design.leg_length + design.foot_height;
  if (exp.deflection != 0.0) sim.q()[0] = -std::asin(std::clamp(exp.deflection / reach, -1.0, 1.0));

  const Vec3 load(0.0, 0.0, -exp.load_mass * design.gravity);
  const long settle_steps = std::lround(exp.settle_time / exp.dt);
  for (long k = 0; k < settle_steps; ++k) sim.step(load);

  LegSeries s;
  s.angle_deg = load_angle_deg;
  const long stride = std::max(1L, std::lround(1.0 / (exp.sample_rate * exp.dt)));
  const double h = static_cast<double>(stride) * exp.dt;
  const long samples = std::lround(exp.record_time / h);
  auto record = [&](long k) {
    const auto [p, R] = sim.tip();
    s.t.push_back(static_cast<double>(k) * h);
    s.position.push_back(p);
    s.rotation.push_back(intrinsic_xyz(R_rest.transpose() * R));
  };
  record(0);
  for (long k = 1; k <= samples; ++k) {
    for (long i = 0; i < stride; ++i) sim.step(Vec3::Zero());
    record(k);
    if (exp.stop_threshold > 0.0 && k >= 99 && sim.max_rate() < exp.stop_threshold) break;
  }
  return s;
}

LegReference leg_release_reference(const LegStiffness& stiffness, const LegExperiment& exp, const DesignParams& design) {
  LegReference ref;
  for (double a : exp.angles_deg) ref.series.push_back(leg_release_experiment(stiffness, a, exp, design));
  return ref;
}

namespace {

// Linear interpolation of a uniformly sampled channel at time t.
template <typename T>
T interp(const LegSeries& s, const std::vector<T>& v, double t) {
  const double h = s.sample_interval();
  if (s.t.size() == 1 || h <= 0.0) return v.front();
  const double u = (t - s.t.front()) / h;
  if (u < -1e-9 || u > static_cast<double>(s.t.size() - 1) + 1e-9)
    throw Error("leg series does not cover t=" + fmt(t) + " s");
  const std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(u))), s.t.size() - 2);
  const double a = std::clamp(u - static_cast<double>(i), 0.0, 1.0);
  return (1.0 - a) * v[i] + a * v[i + 1];
}

const LegSeries& match_angle(const LegReference& r, double angle) {
  for (const auto& s : r.series)
    if (std::abs(s.angle_deg - angle) < 1e-9) return s;
  throw Error("no leg series at " + fmt(angle) + " deg");
}

}  // namespace

double leg_rmse(const LegReference& candidate, const LegReference& reference, const LegRmseWeights& w) {
  double num = 0.0, den = 0.0;
  for (const auto& ref : reference.series) {
    const LegSeries& cand = match_angle(candidate, ref.angle_deg);
    for (std::size_t n = 0; n < ref.t.size(); ++n) {
      const Vec3 p = interp(cand, cand.position, ref.t[n]);
      const Vec3 r = interp(cand, cand.rotation, ref.t[n]);
      for (int c = 0; c < 3; ++c) {
        const double ep = (p[c] - ref.position[n][c]) / w.scale[c];
        const double er = (r[c] - ref.rotation[n][c]) / w.scale[3 + c];
        num += w.weight[c] * ep * ep + w.weight[3 + c] * er * er;
        den += w.weight[c] + w.weight[3 + c];
      }
    }
  }
  if (!(den > 0.0)) throw Error("leg RMSE: no weighted samples");
  return std::sqrt(num / den);
}

double leg_objective(const LegStiffness& candidate, const LegReference& reference, const LegExperiment& exp,
                     const DesignParams& design, const LegRmseWeights& w) {
  LegExperiment e = exp;
  e.stop_threshold = 0.0;
  LegReference sim;
  for (const auto& s : reference.series) {
    e.record_time = s.t.back() + 1.0 / e.sample_rate;
    sim.series.push_back(leg_release_experiment(candidate, s.angle_deg, e, design));
  }
  return leg_rmse(sim, reference, w);
}

OptBudget default_leg_budget(int max_evals, std::uint64_t seed, const LegStiffness& around) {
  OptBudget b;
  b.max_evals = max_evals;
  b.seed = seed;
  for (double v : {around.k_bend, around.b_bend, around.k_twist, around.b_twist}) {
    b.lower.push_back(v / 4.0);
    b.upper.push_back(v * 4.0);
  }
  b.log_scale.assign(4, true);
  return b;
}

LegIdentifyResult identify_leg(const LegReference& reference, const OptBudget& budget, const LegExperiment& exp,
                               const DesignParams& design, const LegRmseWeights& w,
                               const std::optional<LegStiffness>& start) {
  reference.validate();
  if (budget.dim() != 4) throw ConfigError("leg identification needs a 4-dimensional search box");
  auto f = [&](const std::vector<double>& x) {
    return leg_objective(LegStiffness{x[0], x[1], x[2], x[3]}, reference, exp, design, w);
  };
  LegIdentifyResult r;
  std::optional<std::vector<double>> x0;
  if (start) x0 = std::vector<double>{start->k_bend, start->b_bend, start->k_twist, start->b_twist};
  r.opt = minimize(f, budget, x0);
  const auto& x = r.opt.best_x;
  r.best = {x[0], x[1], x[2], x[3]};
  r.objective = r.opt.best_value;
  return r;
}

// ---------------------------------------------------------------------------

void RobotReference::validate(double f_max) const {
  if (entries.empty()) throw SchemaError("robot reference is empty");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!std::isfinite(e.cmd.f_hz) || std::abs(e.cmd.f_hz) > f_max)
      throw SchemaError("robot reference row " + std::to_string(i + 1) + ": f out of range", i + 1, "f_hz");
    if (!std::isfinite(e.cmd.theta_deg) || std::abs(e.cmd.theta_deg) > 90.0)
      throw SchemaError("robot reference row " + std::to_string(i + 1) + ": theta out of [-90, 90] deg", i + 1,
                        "theta_deg");
    if (!e.summary.finite())
      throw SchemaError("robot reference row " + std::to_string(i + 1) + ": non-finite velocity", i + 1);
  }
}

void FullCalibConfig::validate() const {
  design.validate();
  stiffness.validate();
  contact.validate();
  run.validate();
  for (int c = 0; c < 3; ++c)
    if (!(weight[c] >= 0.0) || !(scale[c] > 0.0)) throw ConfigError("calibration weights must be >= 0, scales > 0");
  if (!(weight[0] + weight[1] + weight[2] > 0.0)) throw ConfigError("calibration weights must not all be zero");
  if (!(penalty_factor > 0.0) || !(penalty_floor > 0.0)) throw ConfigError("divergence penalty must be > 0");
}

double pooled_velocity_rmse(const std::vector<SweepCell>& sim, const RobotReference& ref, const FullCalibConfig& cfg) {
  if (sim.size() != ref.entries.size()) throw Error("velocity RMSE: simulated/reference size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (sim[i].status != CellStatus::Ok) continue;
    for (int c = 0; c < 3; ++c)
      worst = std::max(worst, std::abs(sim[i].summary.channel(c) - ref.entries[i].summary.channel(c)) / cfg.scale[c]);
  }
  const double penalty = worst > 0.0 ? cfg.penalty_factor * worst : cfg.penalty_floor;
  const double wsum = cfg.weight[0] + cfg.weight[1] + cfg.weight[2];
  double num = 0.0;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double e = sim[i].status == CellStatus::Ok
                           ? (sim[i].summary.channel(c) - ref.entries[i].summary.channel(c)) / cfg.scale[c]
                           : penalty;
      num += cfg.weight[c] * e * e;
    }
  }
  return std::sqrt(num / (static_cast<double>(sim.size()) * wsum));
}

namespace {

std::vector<ActuationCommand> commands_of(const RobotReference& ref) {
  std::vector<ActuationCommand> cmds;
  for (const auto& e : ref.entries) cmds.push_back(e.cmd);
  return cmds;
}

}  // namespace

double full_objective(const ErrorParams& candidate, const RobotReference& reference, const FullCalibConfig& cfg) {
  if (reference.entries.empty()) throw Error("full objective: empty reference");
  const RobotModel model = build_robot(cfg.design, cfg.stiffness, candidate, cfg.contact);
  return pooled_velocity_rmse(run_commands(model, commands_of(reference), cfg.run, cfg.jobs), reference, cfg);
}

RobotReference synthesize_robot_reference(const ErrorParams& errors, const std::vector<ActuationCommand>& cmds,
                                          const FullCalibConfig& cfg) {
  const RobotModel model = build_robot(cfg.design, cfg.stiffness, errors, cfg.contact);
  const auto cells = run_commands(model, cmds, cfg.run, cfg.jobs);
  RobotReference ref;
  for (const auto& c : cells) {
    if (c.status != CellStatus::Ok)
      throw IntegrationError("synthetic reference run diverged: " + c.message, cfg.run.duration);
    ref.entries.push_back({c.cmd, c.summary});
  }
  return ref;
}

OptBudget default_full_budget(int max_evals, std::uint64_t seed, const ErrorParams& start, FrictionMode mode) {
  OptBudget b;
  b.max_evals = max_evals;
  b.seed = seed;
  const auto x = start.to_vector();
  b.lower.resize(ErrorParams::kDim);
  b.upper.resize(ErrorParams::kDim);
  b.log_scale.assign(ErrorParams::kDim, false);
  for (std::size_t i = 0; i < 16; ++i) {
    b.lower[i] = x[i] / 2.0;
    b.upper[i] = x[i] * 2.0;
    b.log_scale[i] = true;
  }
  for (std::size_t i = 16; i < 20; ++i) {
    if (mode == FrictionMode::Fixed) {
      b.lower[i] = b.upper[i] = x[i];
    } else {
      b.lower[i] = std::min(0.1, x[i]);
      b.upper[i] = std::max(1.5, x[i]);
    }
  }
  b.lower[20] = 0.85 * x[20];
  b.upper[20] = 1.15 * x[20];
  for (std::size_t i = 21; i < 23; ++i) {
    b.lower[i] = x[i] - 0.02;
    b.upper[i] = x[i] + 0.02;
  }
  return b;
}

FullCalibResult calibrate_full(const RobotReference& reference, const OptBudget& budget, const FullCalibConfig& cfg,
                               const ErrorParams& start) {
  reference.validate(cfg.run.sim.f_max);
  cfg.validate();
  if (budget.dim() != ErrorParams::kDim)
    throw ConfigError("full calibration needs a " + std::to_string(ErrorParams::kDim) + "-dimensional search box");
  auto to_params = [](const std::vector<double>& x) {
    std::array<double, ErrorParams::kDim> a{};
    std::copy(x.begin(), x.end(), a.begin());
    return ErrorParams::from_vector(a);
  };
  auto f = [&](const std::vector<double>& x) { return full_objective(to_params(x), reference, cfg); };
  const auto sv = start.to_vector();
  FullCalibResult r;
  r.opt = minimize(f, budget, std::vector<double>(sv.begin(), sv.end()));
  r.best = to_params(r.opt.best_x);
  r.objective = r.opt.best_value;
  r.initial_objective = r.opt.trace.front().value;
  return r;
}

// ---------------------------------------------------------------------------

SweepGrid reference_grid(const RobotReference& ref) {
  if (ref.entries.empty()) throw SchemaError("robot reference is empty");
  SweepGrid g;
  for (const auto& e : ref.entries) {
    g.f_axis.push_back(e.cmd.f_hz);
    g.theta_axis.push_back(e.cmd.theta_deg);
  }
  for (auto* axis : {&g.f_axis, &g.theta_axis}) {
    std::sort(axis->begin(), axis->end());
    axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
  }
  if (ref.entries.size() != g.size())
    throw SchemaError("robot reference is not a full rectangular grid (" + std::to_string(ref.entries.size()) +
                      " rows for " + std::to_string(g.f_axis.size()) + " x " + std::to_string(g.theta_axis.size()) +
                      " axis values)");
  g.cells.resize(g.size());
  std::vector<bool> seen(g.size(), false);
  for (std::size_t r = 0; r < ref.entries.size(); ++r) {
    const auto& e = ref.entries[r];
    const auto i_f = static_cast<std::size_t>(std::lower_bound(g.f_axis.begin(), g.f_axis.end(), e.cmd.f_hz) - g.f_axis.begin());
    const auto i_t = static_cast<std::size_t>(
        std::lower_bound(g.theta_axis.begin(), g.theta_axis.end(), e.cmd.theta_deg) - g.theta_axis.begin());
    const std::size_t k = g.index(i_f, i_t);
    if (seen[k]) throw SchemaError("robot reference repeats a grid cell", r + 1);
    seen[k] = true;
    g.cells[k].cmd = e.cmd;
    g.cells[k].summary = e.summary;
    if (!e.summary.finite()) {
      g.cells[k].status = CellStatus::Failed;
      g.cells[k].message = "non-finite reference velocity";
    }
  }
  return g;
}

LegReference read_leg_reference_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  require_columns(t, {"t", "angle_deg", "px", "py", "pz", "rx", "ry", "rz"});
  const std::size_t ct = t.column("t"), ca = t.column("angle_deg");
  const std::array<std::size_t, 3> cp{t.column("px"), t.column("py"), t.column("pz")};
  const std::array<std::size_t, 3> cr{t.column("rx"), t.column("ry"), t.column("rz")};
  LegReference ref;
  std::map<double, std::size_t> by_angle;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double a = t.number(r, ca);
    if (!std::isfinite(a) || std::abs(a) > 180.0)
      throw SchemaError(path + ": row " + std::to_string(r + 1) + ": angle out of range", r + 1, "angle_deg");
    auto it = by_angle.find(a);
    if (it == by_angle.end()) {
      it = by_angle.emplace(a, ref.series.size()).first;
      ref.series.push_back({});
      ref.series.back().angle_deg = a;
    }
    LegSeries& s = ref.series[it->second];
    const double time = t.number(r, ct);
    if (!s.t.empty() && !(time > s.t.back()))
      throw SchemaError(path + ": row " + std::to_string(r + 1) + ": time not increasing within angle " + fmt(a), r + 1,
                        "t");
    s.t.push_back(time);
    s.position.emplace_back(t.number(r, cp[0]), t.number(r, cp[1]), t.number(r, cp[2]));
    s.rotation.emplace_back(t.number(r, cr[0]), t.number(r, cr[1]), t.number(r, cr[2]));
  }
  ref.validate();
  return ref;
}

RobotReference read_robot_reference_csv(const std::string& path, double f_max) {
  const CsvTable t = read_csv(path);
  require_columns(t, {"f_hz", "theta_deg", "vx", "vy", "w"});
  const std::size_t cf = t.column("f_hz"), ct = t.column("theta_deg"), cx = t.column("vx"), cy = t.column("vy"),
                    cw = t.column("w");
  RobotReference ref;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double f = t.number(r, cf), th = t.number(r, ct);
    if (!std::isfinite(f) || std::abs(f) > f_max)
      throw SchemaError(path + ": row " + std::to_string(r + 1) + ": f_hz=" + fmt(f) + " outside [-" + fmt(f_max) +
                            ", " + fmt(f_max) + "]",
                        r + 1, "f_hz");
    if (!std::isfinite(th) || std::abs(th) > 90.0)
      throw SchemaError(path + ": row " + std::to_string(r + 1) + ": theta_deg=" + fmt(th) + " outside [-90, 90]", r + 1,
                        "theta_deg");
    ref.entries.push_back({{f, th}, {t.number(r, cx), t.number(r, cy), t.number(r, cw)}});
  }
  ref.validate(f_max);
  return ref;
}

void write_leg_reference_csv(const std::string& path, const LegReference& ref) {
  std::string s = csv_row({"t", "angle_deg", "px", "py", "pz", "rx", "ry", "rz"});
  for (const auto& ser : ref.series)
    for (std::size_t i = 0; i < ser.t.size(); ++i) {
      const Vec3& p = ser.position[i];
      const Vec3& r = ser.rotation[i];
      s += csv_row({fmt(ser.t[i]), fmt(ser.angle_deg), fmt(p.x()), fmt(p.y()), fmt(p.z()), fmt(r.x()), fmt(r.y()),
                    fmt(r.z())});
    }
  write_text(path, s);
}

void write_robot_reference_csv(const std::string& path, const RobotReference& ref) {
  std::string s = csv_row({"f_hz", "theta_deg", "vx", "vy", "w"});
  for (const auto& e : ref.entries)
    s += csv_row({fmt(e.cmd.f_hz), fmt(e.cmd.theta_deg), fmt(e.summary.vx), fmt(e.summary.vy), fmt(e.summary.w)});
  write_text(path, s);
}

std::variant<LegReference, RobotReference> ingest_reference_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.has_column("angle_deg")) return read_leg_reference_csv(path);
  if (t.has_column("f_hz")) return read_robot_reference_csv(path);
  throw SchemaError(path + ": header matches neither the leg nor the robot reference schema");
}

}  // namespace vibrowalk
