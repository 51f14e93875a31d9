#include "vibrowalk/cli.hpp"

#include "vibrowalk/actuation.hpp"
#include "vibrowalk/config.hpp"
#include "vibrowalk/parallel.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

namespace vibrowalk {

const char* version() { return "0.1.0"; }

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Globals {
  std::string config;
  std::string out_dir = "vibrowalk-out";
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::optional<double> dt;
  std::optional<double> duration;
};

struct Run {
  std::string command;
  fs::path out_dir;
  Config cfg;
  int jobs = 1;
  std::vector<std::string> outputs;
  std::ostream* out = nullptr;

  void write(const std::string& rel, const std::string& content) {
    write_text((out_dir / rel).string(), content);
    outputs.push_back(rel);
  }
  void write_json(const std::string& rel, const json& j) { write(rel, j.dump(2) + "\n"); }
  /// Registers an output written by someone else and returns its full path.
  std::string output_path(const std::string& rel) {
    outputs.push_back(rel);
    return (out_dir / rel).string();
  }
  std::uint64_t seed() const {
    if (!cfg.seed) throw ConfigError(command + " needs a seed (--seed or \"seed\" in the config)");
    return *cfg.seed;
  }
};

int sign_of(double v) { return std::isfinite(v) ? (v > 0.0) - (v < 0.0) : 0; }

json summary_json(const VelocitySummary& s) { return {{"vx", s.vx}, {"vy", s.vy}, {"w", s.w}}; }

json stiffness_json(const LegStiffness& s) {
  return {{"k_bend", s.k_bend}, {"b_bend", s.b_bend}, {"k_twist", s.k_twist}, {"b_twist", s.b_twist}};
}

std::string trace_csv(const OptResult& r, const std::vector<std::string>& names) {
  std::vector<std::string> header{"id"};
  header.insert(header.end(), names.begin(), names.end());
  header.push_back("objective");
  header.push_back("ok");
  std::string s = csv_row(header);
  for (const auto& e : r.trace) {
    std::vector<std::string> row{std::to_string(e.id)};
    for (double v : e.x) row.push_back(fmt(v));
    row.push_back(fmt(e.value));
    row.push_back(e.ok ? "1" : "0");
    s += csv_row(row);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Plot data

/// One long-format file per velocity channel. Failed cells are written as
/// nan and listed in the returned warnings.
json emit_velocity_heatmaps(Run& run, const SweepGrid& g, const std::string& prefix) {
  static const std::array<const char*, 3> channels{"vx", "vy", "w"};
  for (int c = 0; c < 3; ++c) {
    std::string s = csv_row({"f_hz", "theta_deg", "channel", "value", "sign", "status"});
    for (const auto& cell : g.cells) {
      const bool ok = cell.status == CellStatus::Ok;
      const double v = ok ? cell.summary.channel(c) : std::nan("");
      s += csv_row({fmt(cell.cmd.f_hz), fmt(cell.cmd.theta_deg), channels[c], fmt(v), std::to_string(sign_of(v)),
                    ok ? "ok" : "failed"});
    }
    run.write(prefix + "heatmap_" + channels[c] + ".csv", s);
  }
  json failed = json::array();
  for (const auto& cell : g.cells)
    if (cell.status != CellStatus::Ok)
      failed.push_back({{"f_hz", cell.cmd.f_hz}, {"theta_deg", cell.cmd.theta_deg}, {"message", cell.message}});
  if (failed.empty()) return json::array();
  return json::array({{{"kind", "incomplete grid"}, {"file", prefix + "heatmap_*.csv"}, {"failed_cells", failed}}});
}

void emit_p_map(Run& run, const IndexGrid& g, const std::string& name) {
  std::string s = csv_row({"f_hz", "theta_deg", "direction", "P", "sign", "mask", "reason"});
  for (const auto& c : g.cells)
    s += csv_row({fmt(c.cmd.f_hz), fmt(c.cmd.theta_deg), direction_name(c.direction), fmt(c.p), std::to_string(c.sign),
                  c.excluded ? "1" : "0", c.reason});
  run.write(name, s);
}

void write_warnings(Run& run, const json& warnings) {
  if (warnings.empty()) return;
  run.write_json("warnings.json", {{"warnings", warnings}});
  *run.out << "warning: " << warnings.size() << " warning record(s) written to warnings.json\n";
}

// ---------------------------------------------------------------------------
// Subcommands

struct EnvelopeOpts {
  double f = 10.0;
  double theta = 0.0;
  int samples = 360;
  double f_step = 1.0;
};

void cmd_envelope(Run& run, const EnvelopeOpts& o) {
  const auto& cfg = run.cfg;
  const ActuationCommand cmd = ActuationCommand::make(o.f, o.theta, cfg.run.sim.f_max);
  if (cmd.f_hz == 0.0) throw ConfigError("envelope needs a nonzero frequency");
  if (o.samples < 2) throw ConfigError("envelope needs at least 2 samples");
  if (!(o.f_step > 0.0)) throw ConfigError("--f-step must be > 0");
  const RotorGeometry geom = RotorGeometry::from(cfg.design);
  const double period = 1.0 / std::abs(cmd.f_hz);
  std::string s = csv_row(kEnvelopeColumns);
  double peak = 0.0;
  for (int k = 0; k < o.samples; ++k) {
    const double t = period * k / o.samples;
    const Vec3 F = net_force(t, cmd, geom), T = net_torque(t, cmd, geom);
    peak = std::max(peak, std::hypot(F.x(), F.y()));
    s += csv_row({fmt(t), fmt(cmd.f_hz), fmt(cmd.theta_deg), fmt(F.x()), fmt(F.y()), fmt(F.z()), fmt(T.x()), fmt(T.y()),
                  fmt(T.z())});
  }
  run.write("envelope.csv", s);
  std::string m = csv_row({"f_hz", "max_force"});
  for (double f : make_axis(0.0, cfg.run.sim.f_max, o.f_step)) m += csv_row({fmt(f), fmt(max_force(f, geom))});
  run.write("max_force.csv", m);
  *run.out << "peak horizontal force " << fmt(peak) << " N at " << fmt(cmd.f_hz) << " Hz\n";
}

struct SimulateOpts {
  double f = 0.0;
  double theta = 0.0;
};

void cmd_simulate(Run& run, const SimulateOpts& o) {
  const auto& cfg = run.cfg;
  const ActuationCommand cmd = ActuationCommand::make(o.f, o.theta, cfg.run.sim.f_max);
  const RobotModel model = cfg.build_model();
  const Trajectory traj = simulate(model, cmd, cfg.run.duration, cfg.run.sim);
  const VelocitySummary s = average_velocities(traj, cfg.run.settle);
  run.write("trajectory.csv", trajectory_csv(traj));
  json j{{"f_hz", cmd.f_hz},
         {"theta_deg", cmd.theta_deg},
         {"duration", cfg.run.duration},
         {"settle", cfg.run.settle},
         {"summary", summary_json(s)},
         {"mode", mode_name(classify_mode(s, cfg.thresholds))}};
  run.write_json("summary.json", j);
  run.write_json("model.json", model_snapshot(model));
  *run.out << "vx " << fmt(s.vx) << " m/s, vy " << fmt(s.vy) << " m/s, w " << fmt(s.w) << " rad/s ("
           << mode_name(classify_mode(s, cfg.thresholds)) << ")\n";
}

struct LegOpts {
  std::string ref;
  std::optional<int> budget;
};

void cmd_leg_identify(Run& run, const LegOpts& o) {
  const auto& cfg = run.cfg;
  const std::uint64_t seed = run.seed();
  LegReference ref;
  if (o.ref.empty()) {
    ref = leg_release_reference(cfg.stiffness, cfg.leg, cfg.design);
    write_leg_reference_csv(run.output_path("leg_reference.csv"), ref);
  } else {
    ref = read_leg_reference_csv(o.ref);
  }
  OptBudget budget = default_leg_budget(o.budget.value_or(cfg.leg_budget), seed, cfg.stiffness);
  budget.population = cfg.population;
  budget.jobs = run.jobs;
  const LegIdentifyResult r = identify_leg(ref, budget, cfg.leg, cfg.design, cfg.leg_weights);
  json report{{"best", stiffness_json(r.best)},
              {"objective", r.objective},
              {"best_evaluation", r.opt.best_id},
              {"evaluations", r.opt.trace.size()},
              {"budget", budget.max_evals},
              {"seed", seed},
              {"config_hash", config_hash(cfg)},
              {"reference", o.ref.empty() ? "synthetic" : o.ref}};
  run.write_json("leg_calibration.json", report);
  run.write("leg_trace.csv", trace_csv(r.opt, {"k_bend", "b_bend", "k_twist", "b_twist"}));
  *run.out << "k_bend " << fmt(r.best.k_bend) << ", b_bend " << fmt(r.best.b_bend) << ", k_twist "
           << fmt(r.best.k_twist) << ", b_twist " << fmt(r.best.b_twist) << " (objective " << fmt(r.objective)
           << ")\n";
}

struct CalibrateOpts {
  std::string ref;
  std::optional<int> budget;
};

void cmd_calibrate(Run& run, const CalibrateOpts& o) {
  const auto& cfg = run.cfg;
  const std::uint64_t seed = run.seed();
  const FullCalibConfig fc = cfg.full_calib(1);
  RobotReference ref;
  if (o.ref.empty()) {
    std::vector<ActuationCommand> cmds;
    for (double f : cfg.synthetic_axes.f_axis)
      for (double th : cfg.synthetic_axes.theta_axis) cmds.push_back(ActuationCommand::make(f, th, cfg.run.sim.f_max));
    FullCalibConfig synth = fc;
    synth.jobs = run.jobs;
    ref = synthesize_robot_reference(cfg.errors, cmds, synth);
    write_robot_reference_csv(run.output_path("robot_reference.csv"), ref);
  } else {
    ref = read_robot_reference_csv(o.ref, cfg.run.sim.f_max);
  }
  ErrorParams start;
  start.m_mag = cfg.design.total_mass;
  OptBudget budget = default_full_budget(o.budget.value_or(cfg.full_budget), seed, start, cfg.friction_mode);
  budget.population = cfg.population;
  budget.jobs = run.jobs;
  const FullCalibResult r = calibrate_full(ref, budget, fc, start);

  json best = json::object();
  const auto names = ErrorParams::names();
  const auto v = r.best.to_vector();
  for (std::size_t i = 0; i < names.size(); ++i) best[names[i]] = v[i];
  json report{{"best", best},
              {"objective", r.objective},
              {"initial_objective", r.initial_objective},
              {"best_evaluation", r.opt.best_id},
              {"evaluations", r.opt.trace.size()},
              {"budget", budget.max_evals},
              {"friction_mode", cfg.friction_mode == FrictionMode::Cooptimize ? "cooptimize" : "fixed"},
              {"reference_rows", ref.entries.size()},
              {"seed", seed},
              {"config_hash", config_hash(cfg)},
              {"reference", o.ref.empty() ? "synthetic" : o.ref}};
  run.write_json("calibration_report.json", report);
  run.write("calibration_trace.csv", trace_csv(r.opt, {names.begin(), names.end()}));
  run.write_json("calibrated_model.json",
                 model_snapshot(build_robot(cfg.design, cfg.stiffness, r.best, cfg.contact)));
  *run.out << "objective " << fmt(r.initial_objective) << " -> " << fmt(r.objective) << " after "
           << r.opt.trace.size() << " evaluations\n";
}

struct SweepOpts {
  std::string out = "sweep.csv";
};

void cmd_sweep(Run& run, const SweepOpts& o) {
  const auto& cfg = run.cfg;
  const RobotModel model = cfg.build_model();
  const SweepGrid g = sweep(model, cfg.axes, cfg.run, run.jobs);
  run.write(o.out, sweep_csv(g, cfg.thresholds));
  const json warnings = emit_velocity_heatmaps(run, g, "");
  run.write_json("model.json", model_snapshot(model));
  write_warnings(run, warnings);
  std::size_t failed = 0;
  for (const auto& c : g.cells) failed += c.status != CellStatus::Ok;
  *run.out << g.cells.size() << " cells swept, " << failed << " failed\n";
}

std::string sweep_file(const std::string& label) { return "sweeps/sweep_" + label + ".csv"; }

IndexGrid indices_from(const Config& cfg, const std::vector<Variant>& variants, const std::vector<SweepGrid>& grids) {
  const SweepGrid* ref = nullptr;
  std::vector<SweepGrid> mass, friction;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (variants[i].group == "reference") ref = &grids[i];
    else if (variants[i].group == "mass") mass.push_back(grids[i]);
    else friction.push_back(grids[i]);
  }
  return compute_indices(*ref, mass, friction, cfg.index, cfg.robustness);
}

void emit_indices(Run& run, const IndexGrid& idx) {
  run.write("index.csv", index_csv(idx));
  emit_p_map(run, idx, "p_map.csv");
  std::size_t masked = 0;
  for (const auto& c : idx.cells) masked += c.excluded;
  *run.out << idx.cells.size() << " index rows, " << masked << " masked\n";
}

void cmd_sensitivity(Run& run) {
  const auto& cfg = run.cfg;
  const RobotModel model = cfg.build_model();
  const std::vector<Variant> variants = make_variants(model, cfg.variants);
  std::vector<const RobotModel*> models;
  for (const auto& v : variants) models.push_back(&v.model);
  const std::vector<SweepGrid> grids = sweep_many(models, cfg.axes, cfg.run, run.jobs);
  json warnings = json::array();
  for (std::size_t i = 0; i < variants.size(); ++i) {
    run.write(sweep_file(variants[i].label), sweep_csv(grids[i], cfg.thresholds));
    for (const auto& c : grids[i].cells)
      if (c.status != CellStatus::Ok)
        warnings.push_back({{"kind", "failed cell"},
                            {"variant", variants[i].label},
                            {"f_hz", c.cmd.f_hz},
                            {"theta_deg", c.cmd.theta_deg},
                            {"message", c.message}});
  }
  for (const auto& w : emit_velocity_heatmaps(run, grids[0], "")) warnings.push_back(w);
  const IndexGrid idx = indices_from(cfg, variants, grids);
  emit_indices(run, idx);
  const auto sel = select_pairs(idx, cfg.selection);
  run.write("selection.txt", selection_text(sel));
  run.write("selection.csv", selection_csv(sel));
  run.write_json("model.json", model_snapshot(model));
  write_warnings(run, warnings);
}

struct IndicesOpts {
  std::string sweep_dir;
};

void cmd_indices(Run& run, const IndicesOpts& o) {
  const auto& cfg = run.cfg;
  const fs::path dir = o.sweep_dir.empty() ? run.out_dir : fs::path(o.sweep_dir);
  const std::vector<Variant> variants = make_variants(cfg.build_model(), cfg.variants);
  std::vector<SweepGrid> grids;
  for (const auto& v : variants) grids.push_back(read_sweep_csv((dir / sweep_file(v.label)).string()));
  emit_indices(run, indices_from(cfg, variants, grids));
}

struct SelectOpts {
  std::string indices;
  std::string sweep;
};

void cmd_select(Run& run, const SelectOpts& o) {
  IndexGrid idx = read_index_csv(o.indices);
  if (!o.sweep.empty()) {
    const SweepGrid g = read_sweep_csv(o.sweep);
    idx.reference.clear();
    for (double f : idx.f_axis)
      for (double th : idx.theta_axis) {
        const SweepCell& c = g.find(f, th);
        const double nan = std::nan("");
        idx.reference.push_back(c.status == CellStatus::Ok ? c.summary : VelocitySummary{nan, nan, nan});
      }
  }
  const auto sel = select_pairs(idx, run.cfg.selection);
  const std::string text = selection_text(sel);
  run.write("selection.txt", text);
  run.write("selection.csv", selection_csv(sel));
  *run.out << text;
}

struct PlantHolder {
  std::optional<RobotModel> model;
  std::unique_ptr<Plant> plant;
};

PlantHolder make_plant(const Config& cfg) {
  PlantHolder h;
  if (cfg.plant == PlantKind::Surrogate) {
    h.plant = std::make_unique<UnicycleSurrogate>(cfg.surrogate, cfg.table);
  } else {
    h.model.emplace(cfg.build_model());
    h.plant = std::make_unique<SimPlant>(*h.model, cfg.run.sim);
  }
  return h;
}

json task_json(const TaskResult& r) {
  return {{"captured", r.captured},
          {"success", r.success},
          {"completion_time", r.completion_time >= 0.0 ? json(r.completion_time) : json(nullptr)},
          {"periods", r.modes.size()}};
}

void cmd_track(Run& run) {
  const auto& cfg = run.cfg;
  const auto pts = figure_eight_waypoints(cfg.figure8.center, cfg.figure8.radius, cfg.figure8.count);
  PlantHolder h = make_plant(cfg);
  const TaskResult r = run_tracking(*h.plant, pts, cfg.controller, cfg.table, cfg.task_duration);
  std::string w = csv_row({"index", "x", "y"});
  for (std::size_t i = 0; i < pts.size(); ++i) w += csv_row({std::to_string(i), fmt(pts[i].x), fmt(pts[i].y)});
  run.write("waypoints.csv", w);
  run.write("trajectory.csv", trajectory_csv(r.trajectory));
  run.write("events.csv", events_csv(r.events));
  json j = task_json(r);
  j["waypoints"] = pts.size();
  j["plant"] = cfg.plant == PlantKind::Model ? "model" : "surrogate";
  run.write_json("track_report.json", j);
  *run.out << r.captured << "/" << pts.size() << " waypoints captured\n";
}

void cmd_return_home(Run& run) {
  const auto& cfg = run.cfg;
  PlantHolder h = make_plant(cfg);
  const TaskResult r = return_to_origin(*h.plant, cfg.controller, cfg.table, cfg.disturbances, cfg.task_duration);
  run.write("trajectory.csv", trajectory_csv(r.trajectory));
  run.write("events.csv", events_csv(r.events));
  json j = task_json(r);
  j["disturbances"] = cfg.disturbances.size();
  j["plant"] = cfg.plant == PlantKind::Model ? "model" : "surrogate";
  run.write_json("return_report.json", j);
  *run.out << (r.success ? "returned to origin" : "did not return to origin") << "\n";
}

// ---------------------------------------------------------------------------

std::string scan_out_dir(const std::vector<std::string>& args) {
  std::string dir = Globals{}.out_dir;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out-dir" && i + 1 < args.size()) dir = args[i + 1];
    else if (args[i].rfind("--out-dir=", 0) == 0) dir = args[i].substr(10);
  }
  return dir;
}

struct Failure {
  int code;
  std::string kind;
  std::string message;
  json details = json::object();
};

void write_failure(const fs::path& dir, const std::string& command, const Failure& f, std::ostream& err) {
  json j{{"status", "error"},
         {"exit_code", f.code},
         {"kind", f.kind},
         {"command", command},
         {"message", f.message},
         {"details", f.details}};
  try {
    write_text((dir / "error.json").string(), j.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "could not write error record: " << e.what() << "\n";
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::string started = utc_now();
  Globals g;
  CLI::App app{"Vibration-driven quadruped simulator and analysis pipeline", "vibrowalk"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out-dir", g.out_dir, "Directory for every output of this run");
  app.add_option("--seed", g.seed, "Seed for commands that use randomness");
  app.add_option("--jobs", g.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--dt", g.dt, "Integrator step override, s");
  app.add_option("--duration", g.duration, "Run or task duration override, s");

  EnvelopeOpts env;
  auto* s_env = app.add_subcommand("envelope", "Shaker force/torque over one period and max force vs f");
  s_env->alias("actuation-envelope");
  s_env->add_option("--f", env.f, "Frequency, Hz");
  s_env->add_option("--theta", env.theta, "Offset angle, deg");
  s_env->add_option("--samples", env.samples, "Samples per period");
  s_env->add_option("--f-step", env.f_step, "Frequency step of the max-force curve, Hz");

  SimulateOpts sim;
  auto* s_sim = app.add_subcommand("simulate", "Simulate one actuation command");
  s_sim->add_option("--f", sim.f, "Frequency, Hz")->required();
  s_sim->add_option("--theta", sim.theta, "Offset angle, deg")->required();

  LegOpts leg;
  auto* s_leg = app.add_subcommand("leg-identify", "Identify leg joint coefficients from release data");
  s_leg->add_option("--ref", leg.ref, "Leg reference CSV (default: synthesized from the config)");
  s_leg->add_option("--budget", leg.budget, "Objective evaluations");

  CalibrateOpts cal;
  auto* s_cal = app.add_subcommand("calibrate", "Identify whole-robot error parameters");
  s_cal->add_option("--ref", cal.ref, "Robot reference CSV (default: synthesized from the config)");
  s_cal->add_option("--budget", cal.budget, "Objective evaluations");

  SweepOpts sw;
  auto* s_sweep = app.add_subcommand("sweep", "Sweep the actuation space");
  s_sweep->add_option("--out", sw.out, "Sweep CSV path inside the output directory");

  auto* s_sens = app.add_subcommand("sensitivity", "Sweep the reference and every variant, then compute indices");

  IndicesOpts ind;
  auto* s_ind = app.add_subcommand("indices", "Compute indices from existing variant sweeps");
  s_ind->add_option("--sweep-dir", ind.sweep_dir, "Directory holding sweeps/sweep_<variant>.csv");

  SelectOpts sel;
  auto* s_sel = app.add_subcommand("select", "Rank actuation pairs per locomotion mode");
  s_sel->add_option("--indices", sel.indices, "Index CSV")->required();
  s_sel->add_option("--sweep", sel.sweep, "Reference sweep CSV for off-channel penalties");

  auto* s_track = app.add_subcommand("track", "Closed-loop figure-eight waypoint tracking");
  auto* s_home = app.add_subcommand("return-home", "Return to the origin under disturbances");

  std::string command;
  const fs::path fallback_dir = scan_out_dir(args);
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    const auto extra = app.remaining();
    if (!extra.empty()) msg += " (unrecognized: " + CLI::detail::join(extra, " ") + ")";
    err << "usage error: " << msg << "\n" << "run with --help for usage\n";
    write_failure(fallback_dir, args.empty() ? "" : args.front(), {kExitUsage, "usage", msg}, err);
    return kExitUsage;
  }
  command = app.get_subcommands().front()->get_name();

  Run run;
  run.command = command;
  run.out = &out;
  run.out_dir = g.out_dir;
  std::string hash;
  int code = kExitOk;
  std::optional<Failure> failure;
  try {
    if (!g.config.empty()) {
      if (!fs::exists(g.config)) throw ConfigError("config file not found: " + g.config);
      run.cfg = load_config(g.config);
    }
    if (g.seed) run.cfg.seed = g.seed;
    if (g.dt) {
      run.cfg.run.sim.dt = *g.dt;
      if (command == "leg-identify") run.cfg.leg.dt = *g.dt;
    }
    if (g.duration) {
      if (command == "track" || command == "return-home") run.cfg.task_duration = *g.duration;
      else if (command == "leg-identify") run.cfg.leg.record_time = *g.duration;
      else run.cfg.run.duration = *g.duration;
    }
    run.cfg.validate();
    hash = config_hash(run.cfg);
    run.jobs = resolve_jobs(g.jobs);

    if (s_env->parsed()) cmd_envelope(run, env);
    else if (s_sim->parsed()) cmd_simulate(run, sim);
    else if (s_leg->parsed()) cmd_leg_identify(run, leg);
    else if (s_cal->parsed()) cmd_calibrate(run, cal);
    else if (s_sweep->parsed()) cmd_sweep(run, sw);
    else if (s_sens->parsed()) cmd_sensitivity(run);
    else if (s_ind->parsed()) cmd_indices(run, ind);
    else if (s_sel->parsed()) cmd_select(run, sel);
    else if (s_track->parsed()) cmd_track(run);
    else if (s_home->parsed()) cmd_return_home(run);
  } catch (const SchemaError& e) {
    json d = json::object();
    if (e.row()) d["row"] = e.row();
    if (!e.column().empty()) d["column"] = e.column();
    failure = Failure{kExitConfig, "schema", e.what(), d};
  } catch (const ConfigError& e) {
    failure = Failure{kExitConfig, "config", e.what()};
  } catch (const IntegrationError& e) {
    failure = Failure{kExitRuntime, "integration", e.what(), {{"t", e.time()}}};
  } catch (const std::exception& e) {
    failure = Failure{kExitRuntime, "runtime", e.what()};
  }
  if (failure) {
    code = failure->code;
    err << failure->kind << " error: " << failure->message << "\n";
    write_failure(run.out_dir, command, *failure, err);
    run.outputs.push_back("error.json");
  }

  json manifest{{"tool", "vibrowalk"},
                {"version", version()},
                {"command", command},
                {"cmdline", args},
                {"config_hash", hash.empty() ? json(nullptr) : json(hash)},
                {"seed", run.cfg.seed ? json(*run.cfg.seed) : json(nullptr)},
                {"jobs", run.jobs},
                {"started", started},
                {"finished", utc_now()},
                {"status", failure ? "error" : "ok"},
                {"exit_code", code},
                {"outputs", run.outputs}};
  try {
    write_text((run.out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "could not write manifest: " << e.what() << "\n";
    if (code == kExitOk) code = kExitRuntime;
  }
  return code;
}

}  // namespace vibrowalk
