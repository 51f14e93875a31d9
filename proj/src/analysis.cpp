#include "vibrowalk/analysis.hpp"

#include "vibrowalk/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace vibrowalk {

void RunOptions::validate() const {
  sim.validate();
  if (!(duration > 0.0)) throw ConfigError("run duration must be > 0");
  if (!(settle >= 0.0) || settle >= duration) throw ConfigError("settle time must be in [0, duration)");
}

SweepCell run_cell(const RobotModel& model, const ActuationCommand& cmd, const RunOptions& opt) {
  SweepCell cell;
  cell.cmd = cmd;
  try {
    cell.summary = average_velocities(simulate(model, cmd, opt.duration, opt.sim), opt.settle);
    if (!cell.summary.finite()) throw Error("non-finite velocity summary");
  } catch (const Error& e) {
    cell.status = CellStatus::Failed;
    cell.message = e.what();
    cell.summary = {};
  }
  return cell;
}

std::vector<SweepCell> run_commands(const RobotModel& model, const std::vector<ActuationCommand>& cmds,
                                    const RunOptions& opt, int jobs) {
  opt.validate();
  std::vector<SweepCell> out(cmds.size());
  parallel_for(cmds.size(), jobs, [&](std::size_t i) { out[i] = run_cell(model, cmds[i], opt); });
  return out;
}

void SweepAxes::validate(double f_max) const {
  if (f_axis.empty() || theta_axis.empty()) throw ConfigError("sweep axes must be non-empty");
  for (std::size_t i = 0; i < f_axis.size(); ++i) {
    if (!std::isfinite(f_axis[i]) || std::abs(f_axis[i]) > f_max) throw ConfigError("sweep f axis exceeds the frequency limit");
    if (i > 0 && !(f_axis[i] > f_axis[i - 1])) throw ConfigError("sweep f axis must be strictly ascending");
  }
  for (std::size_t i = 0; i < theta_axis.size(); ++i) {
    if (!std::isfinite(theta_axis[i]) || std::abs(theta_axis[i]) > 90.0) throw ConfigError("sweep theta axis must lie in [-90, 90] deg");
    if (i > 0 && !(theta_axis[i] > theta_axis[i - 1])) throw ConfigError("sweep theta axis must be strictly ascending");
  }
}

namespace {

std::vector<ActuationCommand> grid_commands(const SweepAxes& axes) {
  std::vector<ActuationCommand> cmds;
  cmds.reserve(axes.f_axis.size() * axes.theta_axis.size());
  for (double f : axes.f_axis)
    for (double th : axes.theta_axis) cmds.push_back({f, th});
  return cmds;
}

}  // namespace

SweepGrid sweep(const RobotModel& model, const SweepAxes& axes, const RunOptions& opt, int jobs) {
  return sweep_many({&model}, axes, opt, jobs).front();
}

std::vector<SweepGrid> sweep_many(const std::vector<const RobotModel*>& models, const SweepAxes& axes,
                                  const RunOptions& opt, int jobs) {
  axes.validate(opt.sim.f_max);
  opt.validate();
  const auto cmds = grid_commands(axes);
  const std::size_t n = cmds.size();
  std::vector<SweepGrid> grids(models.size());
  for (auto& g : grids) {
    g.f_axis = axes.f_axis;
    g.theta_axis = axes.theta_axis;
    g.cells.resize(n);
  }
  parallel_for(models.size() * n, jobs, [&](std::size_t k) {
    const std::size_t m = k / n, c = k % n;
    grids[m].cells[c] = run_cell(*models[m], cmds[c], opt);
  });
  return grids;
}

// ---------------------------------------------------------------------------

const char* mode_name(LocomotionMode m) {
  switch (m) {
    case LocomotionMode::LinearTranslation: return "LinearTranslation";
    case LocomotionMode::LeftTurn: return "LeftTurn";
    case LocomotionMode::RightTurn: return "RightTurn";
    case LocomotionMode::LeftStrafe: return "LeftStrafe";
    case LocomotionMode::RightStrafe: return "RightStrafe";
    case LocomotionMode::Mixed: return "Mixed";
    case LocomotionMode::Stationary: return "Stationary";
  }
  return "?";
}

LocomotionMode parse_mode(const std::string& s) {
  for (auto m : kAllModes)
    if (s == mode_name(m)) return m;
  throw ConfigError("unknown locomotion mode '" + s + "'");
}

void ModeThresholds::validate() const {
  if (!(floor_linear >= 0.0) || !(floor_turn >= 0.0)) throw ConfigError("mode floors must be >= 0");
  if (!(dominance >= 1.0)) throw ConfigError("dominance ratio must be >= 1");
  for (double s : scale)
    if (!(s > 0.0)) throw ConfigError("mode channel scales must be > 0");
}

LocomotionMode dominant_mode(const VelocitySummary& s, const ModeThresholds& th) {
  const std::array<double, 3> n{std::abs(s.vx) / th.scale[0], std::abs(s.vy) / th.scale[1],
                                std::abs(s.w) / th.scale[2]};
  for (int c = 0; c < 3; ++c) {
    const double other = std::max(n[(c + 1) % 3], n[(c + 2) % 3]);
    if (n[c] > 0.0 && n[c] >= th.dominance * other) {
      if (c == 0) return LocomotionMode::LinearTranslation;
      if (c == 1) return s.vy > 0.0 ? LocomotionMode::LeftStrafe : LocomotionMode::RightStrafe;
      return s.w > 0.0 ? LocomotionMode::LeftTurn : LocomotionMode::RightTurn;
    }
  }
  return LocomotionMode::Mixed;
}

LocomotionMode classify_mode(const VelocitySummary& s, const ModeThresholds& th) {
  if (std::abs(s.vx) < th.floor_linear && std::abs(s.vy) < th.floor_linear && std::abs(s.w) < th.floor_turn)
    return LocomotionMode::Stationary;
  return dominant_mode(s, th);
}

// ---------------------------------------------------------------------------

std::vector<Variant> make_variants(const RobotModel& ref, const VariantOptions& opt) {
  const DesignParams& d = ref.design();
  std::vector<Variant> out;
  out.push_back({"reference", "reference", ref});

  const double z = d.body_thickness / 2.0 + opt.payload_height;
  const double ex = d.body_length / 2.0 - opt.edge_inset;
  const double ey = d.body_width / 2.0 - opt.edge_inset;
  const std::array<std::pair<const char*, Vec3>, 4> spots{{{"mass_front", Vec3(ex, 0.0, z)},
                                                           {"mass_rear", Vec3(-ex, 0.0, z)},
                                                           {"mass_left", Vec3(0.0, ey, z)},
                                                           {"mass_right", Vec3(0.0, -ey, z)}}};
  for (const auto& [label, pos] : spots) {
    auto att = ref.attachments();
    att.push_back({opt.payload_mass, pos});
    out.push_back({label, "mass", build_robot(d, ref.baseline(), ref.errors(), ref.contact(), att)});
  }
  for (double off : opt.friction_offsets) {
    ErrorParams e = ref.errors();
    for (int leg = 0; leg < kNumLegs; ++leg)
      if (is_left(leg)) e.friction[leg] = std::min(2.0, e.friction[leg] * (1.0 + off));
    const long pct = std::lround(off * 100.0);
    const std::string label = std::string("friction_") + (pct < 0 ? "m" : "p") + std::to_string(std::abs(pct));
    out.push_back({label, "friction", build_robot(d, ref.baseline(), e, ref.contact(), ref.attachments())});
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Longitudinal: return "longitudinal";
    case Direction::Lateral: return "lateral";
    case Direction::Turning: return "turning";
  }
  return "?";
}

Direction parse_direction(const std::string& s) {
  for (auto d : kDirections)
    if (s == direction_name(d)) return d;
  throw SchemaError("unknown direction '" + s + "'");
}

void IndexParams::validate() const {
  if (!(eps > 0.0) || !(i_max > 0.0)) throw ConfigError("index eps and I_max must be > 0");
}

double performance_index_value(double v_ref, const std::vector<double>& v_load, const IndexParams& p) {
  if (v_load.empty()) throw Error("performance index needs at least one variant");
  if (v_ref == 0.0) return 0.0;
  double ss = 0.0;
  for (double v : v_load) ss += (v - v_ref) * (v - v_ref);
  const double rmse = std::sqrt(ss / static_cast<double>(v_load.size()));
  if (rmse < p.eps) return p.i_max;
  return std::min(p.i_max, std::abs(v_ref) / rmse);
}

std::vector<double> performance_index(const SweepGrid& ref, const std::vector<SweepGrid>& variants, Direction d,
                                      const IndexParams& p) {
  p.validate();
  for (const auto& v : variants)
    if (!ref.same_axes(v)) throw Error("performance index: variant grid axes differ from the reference");
  const int c = static_cast<int>(d);
  std::vector<double> out(ref.cells.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> loads(variants.size());
  for (std::size_t i = 0; i < ref.cells.size(); ++i) {
    if (ref.cells[i].status != CellStatus::Ok) continue;
    bool ok = true;
    for (std::size_t k = 0; k < variants.size(); ++k) {
      if (variants[k].cells[i].status != CellStatus::Ok) ok = false;
      loads[k] = variants[k].cells[i].summary.channel(c);
    }
    if (ok) out[i] = performance_index_value(ref.cells[i].summary.channel(c), loads, p);
  }
  return out;
}

IndexGrid robustness_index(const std::array<std::vector<double>, 3>& i_mass,
                           const std::array<std::vector<double>, 3>& i_friction, const SweepGrid& ref,
                           const RobustnessParams& p) {
  const std::size_t n = ref.cells.size();
  for (int d = 0; d < 3; ++d)
    if (i_mass[d].size() != n || i_friction[d].size() != n) throw Error("robustness index: grid size mismatch");
  IndexGrid g;
  g.f_axis = ref.f_axis;
  g.theta_axis = ref.theta_axis;
  g.cells.resize(3 * n);
  g.reference.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SweepCell& rc = ref.cells[i];
    g.reference[i] = rc.summary;
    double sum_m = 0.0, sum_f = 0.0;
    for (int d = 0; d < 3; ++d) {
      sum_m += i_mass[d][i];
      sum_f += i_friction[d][i];
    }
    for (int d = 0; d < 3; ++d) {
      IndexCell& c = g.cells[3 * i + d];
      c.cmd = rc.cmd;
      c.direction = static_cast<Direction>(d);
      c.i_mass = i_mass[d][i];
      c.i_friction = i_friction[d][i];
      c.p = p.mode == PMode::DirectionResolved ? (c.i_mass + c.i_friction) / 2.0 : (sum_m + sum_f) / 2.0;
      const double v = rc.summary.channel(d);
      c.sign = (v > 0.0) - (v < 0.0);
      if (rc.status != CellStatus::Ok || !std::isfinite(c.p)) {
        c.excluded = true;
        c.reason = "failed cell";
      } else if (std::abs(rc.summary.vx) < p.min_heading_speed) {
        c.excluded = true;
        c.reason = "heading-speed exclusion";
      }
    }
  }
  return g;
}

IndexGrid compute_indices(const SweepGrid& ref, const std::vector<SweepGrid>& mass,
                          const std::vector<SweepGrid>& friction, const IndexParams& ip, const RobustnessParams& rp) {
  std::array<std::vector<double>, 3> im, ifr;
  for (auto d : kDirections) {
    im[static_cast<int>(d)] = performance_index(ref, mass, d, ip);
    ifr[static_cast<int>(d)] = performance_index(ref, friction, d, ip);
  }
  return robustness_index(im, ifr, ref, rp);
}

// ---------------------------------------------------------------------------

std::vector<ModeCriterion> SelectionParams::default_criteria() {
  return {{LocomotionMode::LinearTranslation, Direction::Longitudinal, 1, true},
          {LocomotionMode::LeftTurn, Direction::Turning, 1, true},
          {LocomotionMode::RightTurn, Direction::Turning, -1, true},
          {LocomotionMode::LeftStrafe, Direction::Lateral, 1, true},
          {LocomotionMode::RightStrafe, Direction::Lateral, -1, true}};
}

std::vector<ModeSelection> select_pairs(const IndexGrid& grid, const SelectionParams& p) {
  const std::size_t n = grid.grid_size();
  if (grid.cells.size() != 3 * n) throw Error("select_pairs: incomplete index grid");
  const bool have_ref = grid.reference.size() == n;
  std::vector<ModeSelection> out;
  for (const auto& crit : p.criteria) {
    ModeSelection sel;
    sel.mode = crit.mode;
    const int t = static_cast<int>(crit.target);
    for (std::size_t i = 0; i < n; ++i) {
      const IndexCell& c = grid.at(i, crit.target);
      if (c.reason == "failed cell" || !std::isfinite(c.p)) continue;
      if (c.excluded && crit.apply_exclusion) continue;
      if (c.sign != crit.sign) continue;
      SelectedPair sp;
      sp.cmd = c.cmd;
      sp.p = c.p;
      double penalty = 0.0;
      if (have_ref) {
        sp.reference = grid.reference[i];
        for (int o = 0; o < 3; ++o)
          if (o != t) penalty += std::abs(sp.reference.channel(o)) / p.scale[o];
      }
      sp.score = p.w_target * c.p - p.w_off * penalty;
      sel.ranked.push_back(sp);
    }
    std::stable_sort(sel.ranked.begin(), sel.ranked.end(),
                     [](const SelectedPair& a, const SelectedPair& b) { return a.score > b.score; });
    if (sel.ranked.size() > p.top_k) sel.ranked.resize(p.top_k);
    if (sel.ranked.empty())
      sel.diagnostic = "no qualifying cells";
    else if (!have_ref)
      sel.diagnostic = "reference velocities unavailable; off-channel penalty omitted";
    out.push_back(std::move(sel));
  }
  return out;
}

}  // namespace vibrowalk
