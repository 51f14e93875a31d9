#include "vibrowalk/config.hpp"

#include "vibrowalk/io.hpp"

#include <map>
#include <set>
#include <sstream>

namespace vibrowalk {

using nlohmann::json;

namespace {

const std::map<std::string, std::map<std::string, double>>& unit_table() {
  static const std::map<std::string, std::map<std::string, double>> t{
      {"length", {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}}},
      {"mass", {{"kg", 1.0}, {"g", 1e-3}}},
      {"time", {{"s", 1.0}, {"ms", 1e-3}}},
      {"frequency", {{"Hz", 1.0}, {"rad/s", 1.0 / (2.0 * kPi)}}},
      {"angle_deg", {{"deg", 1.0}, {"rad", 180.0 / kPi}}},
      {"angle_rad", {{"rad", 1.0}, {"deg", kPi / 180.0}}},
      {"speed", {{"m/s", 1.0}, {"cm/s", 1e-2}, {"mm/s", 1e-3}}},
      {"rate", {{"rad/s", 1.0}, {"deg/s", kPi / 180.0}}},
      {"acceleration", {{"m/s^2", 1.0}}},
      {"dimensionless", {}},
      {"torsion_stiffness", {{"N*m/rad", 1.0}, {"Nm/rad", 1.0}}},
      {"torsion_damping", {{"N*m*s/rad", 1.0}, {"Nms/rad", 1.0}}},
      {"linear_stiffness", {{"N/m", 1.0}}},
      {"linear_damping", {{"N*s/m", 1.0}, {"Ns/m", 1.0}}},
      {"density", {{"kg/m^3", 1.0}, {"g/cm^3", 1000.0}}},
  };
  return t;
}

}  // namespace

double parse_quantity(const json& v, const std::string& dim, const std::string& field) {
  const auto& table = unit_table();
  auto units = table.find(dim);
  if (units == table.end()) throw ConfigError("internal: unknown dimension '" + dim + "'");
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw ConfigError(field + ": expected a number or a quantity string");
  const std::string s = v.get<std::string>();
  std::istringstream is(s);
  double x = 0.0;
  if (!(is >> x)) throw ConfigError(field + ": cannot parse quantity '" + s + "'");
  std::string unit;
  is >> unit;
  std::string extra;
  if (is >> extra) throw ConfigError(field + ": trailing text in quantity '" + s + "'");
  if (unit.empty()) return x;
  auto u = units->second.find(unit);
  if (u == units->second.end()) {
    std::string expected;
    for (const auto& [name, f] : units->second) expected += (expected.empty() ? "" : ", ") + name;
    throw ConfigError(field + ": unit '" + unit + "' is not a " + dim + " unit" +
                      (expected.empty() ? " (value is dimensionless)" : " (expected " + expected + ")"));
  }
  return x * u->second;
}

namespace {

// Reads one JSON object, remembering which keys were consumed so unknown
// keys can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  void num(const char* key, double& out, const char* dim) {
    if (const json* v = take(key)) out = parse_quantity(*v, dim, field(key));
  }
  void integer(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
      out = v->get<int>();
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void text(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  template <std::size_t N>
  void fixed(const char* key, std::array<double, N>& out, const char* dim) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != N)
        throw ConfigError(field(key) + ": expected an array of " + std::to_string(N) + " values");
      for (std::size_t i = 0; i < N; ++i) out[i] = parse_quantity((*v)[i], dim, field(key) + "[" + std::to_string(i) + "]");
    }
  }
  void list(const char* key, std::vector<double>& out, const char* dim) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(field(key) + ": expected an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(parse_quantity((*v)[i], dim, field(key) + "[" + std::to_string(i) + "]"));
    }
  }
  const json* object(const char* key) { return take(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
  }

 private:
  const json* take(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_axes(const json& j, const std::string& path, SweepAxes& axes) {
  Reader r(j, path);
  r.list("f_axis", axes.f_axis, "frequency");
  r.list("theta_axis", axes.theta_axis, "angle_deg");
  if (r.has("f_step")) {
    double lo = -35, hi = 35, step = 5;
    r.num("f_min", lo, "frequency");
    r.num("f_max", hi, "frequency");
    r.num("f_step", step, "frequency");
    axes.f_axis = make_axis(lo, hi, step);
  }
  if (r.has("theta_step")) {
    double lo = -90, hi = 90, step = 15;
    r.num("theta_min", lo, "angle_deg");
    r.num("theta_max", hi, "angle_deg");
    r.num("theta_step", step, "angle_deg");
    axes.theta_axis = make_axis(lo, hi, step);
  }
  r.finish();
}

json axes_json(const SweepAxes& a) { return {{"f_axis", a.f_axis}, {"theta_axis", a.theta_axis}}; }

std::map<LocomotionMode, ActuationCommand> read_table(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object of mode -> command");
  ActuationTable t;
  for (auto it = j.begin(); it != j.end(); ++it) {
    LocomotionMode m;
    try {
      m = parse_mode(it.key());
    } catch (const ConfigError&) {
      throw ConfigError(path + "." + it.key() + ": unknown locomotion mode");
    }
    Reader r(it.value(), path + "." + it.key());
    ActuationCommand c = t.commands.count(m) ? t.commands.at(m) : ActuationCommand{};
    r.num("f", c.f_hz, "frequency");
    r.num("theta", c.theta_deg, "angle_deg");
    r.finish();
    t.commands[m] = c;
  }
  return t.commands;
}

}  // namespace

// ---------------------------------------------------------------------------

Config config_from_json(const json& j) {
  Config c;
  Reader root(j, "");
  if (const json* v = root.object("seed")) {
    if (v->is_null()) {
      c.seed.reset();
    } else {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        throw ConfigError("seed: expected a non-negative integer");
      c.seed = v->get<std::uint64_t>();
    }
  }
  if (const json* v = root.object("design")) {
    Reader r(*v, "design");
    auto& d = c.design;
    r.num("body_length", d.body_length, "length");
    r.num("body_width", d.body_width, "length");
    r.num("body_thickness", d.body_thickness, "length");
    r.num("leg_length", d.leg_length, "length");
    r.num("leg_width", d.leg_width, "length");
    r.num("leg_thickness", d.leg_thickness, "length");
    r.num("leg_twist", d.leg_twist_deg, "angle_deg");
    r.num("foot_length", d.foot_length, "length");
    r.num("foot_width", d.foot_width, "length");
    r.num("rotor_arm", d.rotor_arm, "length");
    r.num("rotor_separation", d.rotor_separation, "length");
    r.num("rotor_mass", d.rotor_mass, "mass");
    r.num("total_mass", d.total_mass, "mass");
    r.num("gravity", d.gravity, "acceleration");
    r.num("plate_mass", d.plate_mass, "mass");
    r.num("foot_height", d.foot_height, "length");
    r.num("leg_density", d.leg_density, "density");
    r.num("foot_density", d.foot_density, "density");
    r.num("leg_inset", d.leg_inset, "length");
    r.num("rotor_height", d.rotor_height, "length");
    r.num("electronics_height", d.electronics_height, "length");
    r.list("electronics_fraction", d.electronics_fraction, "dimensionless");
    r.list("electronics_x", d.electronics_x, "length");
    r.boolean("mirror_legs", d.mirror_legs);
    r.finish();
    // total_mass doubles as the default body-mass magnitude.
    c.errors.m_mag = d.total_mass;
  }
  if (const json* v = root.object("stiffness")) {
    Reader r(*v, "stiffness");
    r.num("k_bend", c.stiffness.k_bend, "torsion_stiffness");
    r.num("b_bend", c.stiffness.b_bend, "torsion_damping");
    r.num("k_twist", c.stiffness.k_twist, "torsion_stiffness");
    r.num("b_twist", c.stiffness.b_twist, "torsion_damping");
    r.finish();
  }
  if (const json* v = root.object("errors")) {
    Reader r(*v, "errors");
    auto& e = c.errors;
    r.fixed("d_k_bend", e.d_k_bend, "dimensionless");
    r.fixed("d_b_bend", e.d_b_bend, "dimensionless");
    r.fixed("d_k_twist", e.d_k_twist, "dimensionless");
    r.fixed("d_b_twist", e.d_b_twist, "dimensionless");
    r.fixed("friction", e.friction, "dimensionless");
    r.num("m_mag", e.m_mag, "mass");
    r.num("m_x", e.m_x, "length");
    r.num("m_y", e.m_y, "length");
    r.finish();
  }
  if (const json* v = root.object("contact")) {
    Reader r(*v, "contact");
    r.num("k_n", c.contact.k_n, "linear_stiffness");
    r.num("d_n", c.contact.d_n, "linear_damping");
    r.num("v_eps", c.contact.v_eps, "speed");
    r.num("torsional_mu", c.contact.torsional_mu, "length");
    r.num("w_eps", c.contact.w_eps, "rate");
    r.integer("points_per_foot", c.contact.points_per_foot);
    r.finish();
  }
  if (const json* v = root.object("sim")) {
    Reader r(*v, "sim");
    auto& s = c.run.sim;
    r.num("dt", s.dt, "time");
    r.num("sample_rate", s.sample_rate, "frequency");
    r.num("motor_lag", s.motor_lag, "time");
    r.num("max_joint_rate", s.max_joint_rate, "rate");
    r.num("f_max", s.f_max, "frequency");
    r.boolean("gravity", s.gravity);
    r.num("duration", c.run.duration, "time");
    r.num("settle", c.run.settle, "time");
    r.finish();
  }
  if (const json* v = root.object("sweep")) read_axes(*v, "sweep", c.axes);
  if (const json* v = root.object("analysis")) {
    Reader r(*v, "analysis");
    if (const json* t = r.object("thresholds")) {
      Reader q(*t, "analysis.thresholds");
      q.num("floor_linear", c.thresholds.floor_linear, "speed");
      q.num("floor_turn", c.thresholds.floor_turn, "rate");
      q.num("dominance", c.thresholds.dominance, "dimensionless");
      q.fixed("scale", c.thresholds.scale, "dimensionless");
      q.finish();
    }
    r.num("index_eps", c.index.eps, "dimensionless");
    r.num("index_max", c.index.i_max, "dimensionless");
    r.num("min_heading_speed", c.robustness.min_heading_speed, "speed");
    std::string pmode;
    r.text("p_mode", pmode);
    if (pmode == "direction") c.robustness.mode = PMode::DirectionResolved;
    else if (pmode == "summed") c.robustness.mode = PMode::Summed;
    else if (!pmode.empty()) throw ConfigError("analysis.p_mode: expected 'direction' or 'summed'");
    r.num("w_target", c.selection.w_target, "dimensionless");
    r.num("w_off", c.selection.w_off, "dimensionless");
    r.fixed("off_scale", c.selection.scale, "dimensionless");
    int top_k = static_cast<int>(c.selection.top_k);
    r.integer("top_k", top_k);
    if (top_k < 1) throw ConfigError("analysis.top_k must be >= 1");
    c.selection.top_k = static_cast<std::size_t>(top_k);
    if (const json* ex = r.object("exclusion")) {
      if (!ex->is_object()) throw ConfigError("analysis.exclusion: expected an object of mode -> bool");
      for (auto it = ex->begin(); it != ex->end(); ++it) {
        LocomotionMode m;
        try {
          m = parse_mode(it.key());
        } catch (const ConfigError&) {
          throw ConfigError("analysis.exclusion." + it.key() + ": unknown locomotion mode");
        }
        if (!it.value().is_boolean()) throw ConfigError("analysis.exclusion." + it.key() + ": expected true or false");
        for (auto& crit : c.selection.criteria)
          if (crit.mode == m) crit.apply_exclusion = it.value().get<bool>();
      }
    }
    if (const json* va = r.object("variants")) {
      Reader q(*va, "analysis.variants");
      q.num("payload_mass", c.variants.payload_mass, "mass");
      q.num("edge_inset", c.variants.edge_inset, "length");
      q.num("payload_height", c.variants.payload_height, "length");
      q.list("friction_offsets", c.variants.friction_offsets, "dimensionless");
      q.finish();
    }
    r.finish();
  }
  if (const json* v = root.object("calibration")) {
    Reader r(*v, "calibration");
    if (const json* l = r.object("leg")) {
      Reader q(*l, "calibration.leg");
      q.num("load_mass", c.leg.load_mass, "mass");
      q.num("deflection", c.leg.deflection, "length");
      q.num("settle_time", c.leg.settle_time, "time");
      q.num("record_time", c.leg.record_time, "time");
      q.num("sample_rate", c.leg.sample_rate, "frequency");
      q.num("stop_threshold", c.leg.stop_threshold, "rate");
      q.num("dt", c.leg.dt, "time");
      q.list("angles", c.leg.angles_deg, "angle_deg");
      q.fixed("weights", c.leg_weights.weight, "dimensionless");
      q.fixed("scales", c.leg_weights.scale, "dimensionless");
      q.finish();
    }
    r.integer("leg_budget", c.leg_budget);
    r.integer("full_budget", c.full_budget);
    r.integer("population", c.population);
    std::string fm;
    r.text("friction_mode", fm);
    if (fm == "cooptimize") c.friction_mode = FrictionMode::Cooptimize;
    else if (fm == "fixed") c.friction_mode = FrictionMode::Fixed;
    else if (!fm.empty()) throw ConfigError("calibration.friction_mode: expected 'cooptimize' or 'fixed'");
    r.fixed("weights", c.calib_weight, "dimensionless");
    r.fixed("scales", c.calib_scale, "dimensionless");
    r.num("penalty_factor", c.penalty_factor, "dimensionless");
    if (const json* s = r.object("synthetic_grid")) read_axes(*s, "calibration.synthetic_grid", c.synthetic_axes);
    r.finish();
  }
  if (const json* v = root.object("control")) {
    Reader r(*v, "control");
    r.num("deadband", c.controller.deadband, "angle_rad");
    r.num("period", c.controller.period, "time");
    r.boolean("three_state", c.controller.three_state);
    r.num("capture_radius", c.controller.capture_radius, "length");
    r.num("duration", c.task_duration, "time");
    if (const json* t = r.object("table")) c.table.commands = read_table(*t, "control.table");
    if (const json* s = r.object("surrogate")) {
      if (!s->is_object()) throw ConfigError("control.surrogate: expected an object");
      for (auto it = s->begin(); it != s->end(); ++it) {
        if (it.key() == "substep") {
          c.surrogate.substep = parse_quantity(it.value(), "time", "control.surrogate.substep");
          continue;
        }
        LocomotionMode m;
        try {
          m = parse_mode(it.key());
        } catch (const ConfigError&) {
          throw ConfigError("control.surrogate." + it.key() + ": unknown locomotion mode");
        }
        Reader q(it.value(), "control.surrogate." + it.key());
        VelocitySummary vs = c.surrogate.response.count(m) ? c.surrogate.response.at(m) : VelocitySummary{};
        q.num("vx", vs.vx, "speed");
        q.num("vy", vs.vy, "speed");
        q.num("w", vs.w, "rate");
        q.finish();
        c.surrogate.response[m] = vs;
      }
    }
    if (const json* f = r.object("figure8")) {
      Reader q(*f, "control.figure8");
      std::array<double, 2> center{c.figure8.center.x, c.figure8.center.y};
      q.fixed("center", center, "length");
      c.figure8.center = {center[0], center[1]};
      q.num("radius", c.figure8.radius, "length");
      q.integer("count", c.figure8.count);
      q.finish();
    }
    if (const json* d = r.object("disturbances")) {
      if (!d->is_array()) throw ConfigError("control.disturbances: expected an array");
      c.disturbances.clear();
      for (std::size_t i = 0; i < d->size(); ++i) {
        Reader q((*d)[i], "control.disturbances[" + std::to_string(i) + "]");
        Disturbance x;
        q.num("t", x.t, "time");
        q.num("dx", x.dx, "length");
        q.num("dy", x.dy, "length");
        q.num("dyaw", x.dyaw, "angle_rad");
        q.finish();
        c.disturbances.push_back(x);
      }
    }
    std::string plant;
    r.text("plant", plant);
    if (plant == "model") c.plant = PlantKind::Model;
    else if (plant == "surrogate") c.plant = PlantKind::Surrogate;
    else if (!plant.empty()) throw ConfigError("control.plant: expected 'model' or 'surrogate'");
    r.finish();
  }
  root.finish();
  c.validate();
  return c;
}

json config_to_json(const Config& c) {
  json j;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  const auto& d = c.design;
  j["design"] = {{"body_length", d.body_length},
                 {"body_width", d.body_width},
                 {"body_thickness", d.body_thickness},
                 {"leg_length", d.leg_length},
                 {"leg_width", d.leg_width},
                 {"leg_thickness", d.leg_thickness},
                 {"leg_twist", d.leg_twist_deg},
                 {"foot_length", d.foot_length},
                 {"foot_width", d.foot_width},
                 {"rotor_arm", d.rotor_arm},
                 {"rotor_separation", d.rotor_separation},
                 {"rotor_mass", d.rotor_mass},
                 {"total_mass", d.total_mass},
                 {"gravity", d.gravity},
                 {"plate_mass", d.plate_mass},
                 {"foot_height", d.foot_height},
                 {"leg_density", d.leg_density},
                 {"foot_density", d.foot_density},
                 {"leg_inset", d.leg_inset},
                 {"rotor_height", d.rotor_height},
                 {"electronics_height", d.electronics_height},
                 {"electronics_fraction", d.electronics_fraction},
                 {"electronics_x", d.electronics_x},
                 {"mirror_legs", d.mirror_legs}};
  j["stiffness"] = {{"k_bend", c.stiffness.k_bend},
                    {"b_bend", c.stiffness.b_bend},
                    {"k_twist", c.stiffness.k_twist},
                    {"b_twist", c.stiffness.b_twist}};
  const auto& e = c.errors;
  j["errors"] = {{"d_k_bend", e.d_k_bend}, {"d_b_bend", e.d_b_bend}, {"d_k_twist", e.d_k_twist},
                 {"d_b_twist", e.d_b_twist}, {"friction", e.friction}, {"m_mag", e.m_mag},
                 {"m_x", e.m_x},           {"m_y", e.m_y}};
  j["contact"] = {{"k_n", c.contact.k_n},
                  {"d_n", c.contact.d_n},
                  {"v_eps", c.contact.v_eps},
                  {"torsional_mu", c.contact.torsional_mu},
                  {"w_eps", c.contact.w_eps},
                  {"points_per_foot", c.contact.points_per_foot}};
  const auto& s = c.run.sim;
  j["sim"] = {{"dt", s.dt},
              {"sample_rate", s.sample_rate},
              {"motor_lag", s.motor_lag},
              {"max_joint_rate", s.max_joint_rate},
              {"f_max", s.f_max},
              {"gravity", s.gravity},
              {"duration", c.run.duration},
              {"settle", c.run.settle}};
  j["sweep"] = axes_json(c.axes);
  json exclusion = json::object();
  for (const auto& crit : c.selection.criteria) exclusion[mode_name(crit.mode)] = crit.apply_exclusion;
  j["analysis"] = {{"thresholds",
                    {{"floor_linear", c.thresholds.floor_linear},
                     {"floor_turn", c.thresholds.floor_turn},
                     {"dominance", c.thresholds.dominance},
                     {"scale", c.thresholds.scale}}},
                   {"index_eps", c.index.eps},
                   {"index_max", c.index.i_max},
                   {"min_heading_speed", c.robustness.min_heading_speed},
                   {"p_mode", c.robustness.mode == PMode::DirectionResolved ? "direction" : "summed"},
                   {"w_target", c.selection.w_target},
                   {"w_off", c.selection.w_off},
                   {"off_scale", c.selection.scale},
                   {"top_k", c.selection.top_k},
                   {"exclusion", exclusion},
                   {"variants",
                    {{"payload_mass", c.variants.payload_mass},
                     {"edge_inset", c.variants.edge_inset},
                     {"payload_height", c.variants.payload_height},
                     {"friction_offsets", c.variants.friction_offsets}}}};
  j["calibration"] = {{"leg",
                       {{"load_mass", c.leg.load_mass},
                        {"deflection", c.leg.deflection},
                        {"settle_time", c.leg.settle_time},
                        {"record_time", c.leg.record_time},
                        {"sample_rate", c.leg.sample_rate},
                        {"stop_threshold", c.leg.stop_threshold},
                        {"dt", c.leg.dt},
                        {"angles", c.leg.angles_deg},
                        {"weights", c.leg_weights.weight},
                        {"scales", c.leg_weights.scale}}},
                      {"leg_budget", c.leg_budget},
                      {"full_budget", c.full_budget},
                      {"population", c.population},
                      {"friction_mode", c.friction_mode == FrictionMode::Cooptimize ? "cooptimize" : "fixed"},
                      {"weights", c.calib_weight},
                      {"scales", c.calib_scale},
                      {"penalty_factor", c.penalty_factor},
                      {"synthetic_grid", axes_json(c.synthetic_axes)}};
  json table = json::object(), surrogate = json::object();
  for (const auto& [m, cmd] : c.table.commands) table[mode_name(m)] = {{"f", cmd.f_hz}, {"theta", cmd.theta_deg}};
  for (const auto& [m, v] : c.surrogate.response) surrogate[mode_name(m)] = {{"vx", v.vx}, {"vy", v.vy}, {"w", v.w}};
  surrogate["substep"] = c.surrogate.substep;
  json dist = json::array();
  for (const auto& x : c.disturbances) dist.push_back({{"t", x.t}, {"dx", x.dx}, {"dy", x.dy}, {"dyaw", x.dyaw}});
  j["control"] = {{"deadband", c.controller.deadband},
                  {"period", c.controller.period},
                  {"three_state", c.controller.three_state},
                  {"capture_radius", c.controller.capture_radius},
                  {"duration", c.task_duration},
                  {"table", table},
                  {"surrogate", surrogate},
                  {"figure8",
                   {{"center", {c.figure8.center.x, c.figure8.center.y}},
                    {"radius", c.figure8.radius},
                    {"count", c.figure8.count}}},
                  {"disturbances", dist},
                  {"plant", c.plant == PlantKind::Model ? "model" : "surrogate"}};
  return j;
}

void Config::validate() const {
  design.validate();
  stiffness.validate();
  errors.validate();
  contact.validate();
  run.validate();
  axes.validate(run.sim.f_max);
  synthetic_axes.validate(run.sim.f_max);
  thresholds.validate();
  index.validate();
  if (!(robustness.min_heading_speed >= 0.0)) throw ConfigError("min heading speed must be >= 0");
  if (!(variants.payload_mass >= 0.0) || !(variants.edge_inset >= 0.0)) throw ConfigError("variant payload must be >= 0");
  leg.validate();
  if (leg_budget < 1 || full_budget < 1) throw ConfigError("calibration budgets must be >= 1");
  if (population < 0) throw ConfigError("population must be >= 0");
  controller.validate();
  table.validate(run.sim.f_max);
  surrogate.validate();
  if (!(figure8.radius > 0.0) || figure8.count < 4) throw ConfigError("figure8 needs radius > 0 and count >= 4");
  if (!(task_duration > 0.0)) throw ConfigError("control duration must be > 0");
}

FullCalibConfig Config::full_calib(int jobs) const {
  FullCalibConfig f;
  f.design = design;
  f.stiffness = stiffness;
  f.contact = contact;
  f.run = run;
  f.weight = calib_weight;
  f.scale = calib_scale;
  f.penalty_factor = penalty_factor;
  f.friction = friction_mode;
  f.jobs = jobs;
  return f;
}

RobotModel Config::build_model() const { return build_robot(design, stiffness, errors, contact); }

Config load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string canonical_config(const Config& c) { return config_to_json(c).dump(); }

std::string config_hash(const Config& c) { return hex64(fnv1a64(canonical_config(c))); }

json model_snapshot(const RobotModel& m) {
  Config c;
  c.design = m.design();
  c.stiffness = m.baseline();
  c.errors = m.errors();
  c.contact = m.contact();
  const json full = config_to_json(c);
  json j;
  j["design"] = full["design"];
  j["stiffness"] = full["stiffness"];
  j["errors"] = full["errors"];
  j["contact"] = full["contact"];
  json att = json::array();
  for (const auto& a : m.attachments())
    att.push_back({{"mass", a.mass}, {"position", {a.position.x(), a.position.y(), a.position.z()}}});
  j["attachments"] = att;
  json legs = json::object();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const LegStiffness s = m.leg_coefficients(leg);
    legs[kLegNames[leg]] = {{"k_bend", s.k_bend},
                            {"b_bend", s.b_bend},
                            {"k_twist", s.k_twist},
                            {"b_twist", s.b_twist},
                            {"friction", m.friction(leg)}};
  }
  const Vec3 com = m.base_com();
  j["derived"] = {{"total_mass", m.total_mass()},
                  {"base_mass", m.base_mass()},
                  {"leg_mass", m.leg_mass()},
                  {"base_com", {com.x(), com.y(), com.z()}},
                  {"legs", legs},
                  {"bodies", m.tree().num_bodies()},
                  {"joints", m.tree().dof()}};
  return j;
}

}  // namespace vibrowalk
