#include "vibrowalk/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vibrowalk {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw SchemaError(source + ": missing column '" + name + "'", 0, name);
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

const std::string& CsvTable::text(std::size_t row, std::size_t col) const { return rows.at(row).at(col); }

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& s = text(row, col);
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size())
    throw SchemaError(source + ": row " + std::to_string(row + 1) + ", column '" + header[col] +
                          "': not a number: '" + s + "'",
                      row + 1, header[col]);
  return v;
}

CsvTable parse_csv(const std::string& content, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::istringstream is(content);
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw SchemaError(source + ": row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(t.header.size()),
                        t.rows.size() + 1);
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw SchemaError(source + ": empty file");
  return t;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text(path), path); }

void require_columns(const CsvTable& t, const std::vector<std::string>& names) {
  for (const auto& n : names) t.column(n);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += fields[i];
  }
  s += '\n';
  return s;
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kTrajectoryColumns{"t",  "x",  "y",  "z",       "qw",      "qx",
                                                  "qy", "qz", "vx_body", "vy_body", "yaw_rate"};
const std::vector<std::string> kSweepColumns{"f_hz", "theta_deg", "vx", "vy", "w", "mode", "status"};
const std::vector<std::string> kIndexColumns{"f_hz", "theta_deg", "direction", "I_mass",
                                             "I_friction", "P", "sign", "excluded"};
const std::vector<std::string> kEventColumns{"t", "type", "payload"};
const std::vector<std::string> kEnvelopeColumns{"t", "f", "theta", "Fx", "Fy", "Fz", "Tx", "Ty", "Tz"};

std::string trajectory_csv(const Trajectory& traj) {
  std::string s = csv_row(kTrajectoryColumns);
  for (const auto& smp : traj.samples) {
    const auto& p = smp.pose.position;
    const auto& q = smp.pose.orientation;
    s += csv_row({fmt(smp.t), fmt(p.x()), fmt(p.y()), fmt(p.z()), fmt(q.w()), fmt(q.x()), fmt(q.y()), fmt(q.z()),
                  fmt(smp.vx_body), fmt(smp.vy_body), fmt(smp.yaw_rate)});
  }
  return s;
}

Trajectory read_trajectory_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  require_columns(t, kTrajectoryColumns);
  std::vector<std::size_t> c;
  for (const auto& n : kTrajectoryColumns) c.push_back(t.column(n));
  Trajectory traj;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    TrajectorySample s;
    s.t = t.number(r, c[0]);
    s.pose.position = Vec3(t.number(r, c[1]), t.number(r, c[2]), t.number(r, c[3]));
    s.pose.orientation = Quat(t.number(r, c[4]), t.number(r, c[5]), t.number(r, c[6]), t.number(r, c[7]));
    s.vx_body = t.number(r, c[8]);
    s.vy_body = t.number(r, c[9]);
    s.yaw_rate = t.number(r, c[10]);
    traj.samples.push_back(s);
  }
  if (traj.samples.size() >= 2) traj.sample_interval = traj.samples[1].t - traj.samples[0].t;
  return traj;
}

std::string sweep_csv(const SweepGrid& grid, const ModeThresholds& th) {
  std::string s = csv_row(kSweepColumns);
  for (const auto& c : grid.cells) {
    const bool ok = c.status == CellStatus::Ok;
    s += csv_row({fmt(c.cmd.f_hz), fmt(c.cmd.theta_deg), ok ? fmt(c.summary.vx) : "nan", ok ? fmt(c.summary.vy) : "nan",
                  ok ? fmt(c.summary.w) : "nan", ok ? mode_name(classify_mode(c.summary, th)) : "NA",
                  ok ? "ok" : "failed"});
  }
  return s;
}

namespace {

// Recovers sorted axes from cell coordinates and checks full coverage.
template <typename Cell, typename Key>
void build_axes(const std::vector<Cell>& cells, Key key, std::vector<double>& f_axis, std::vector<double>& th_axis,
                const std::string& source) {
  std::set<double> fs, ths;
  for (const auto& c : cells) {
    fs.insert(key(c).first);
    ths.insert(key(c).second);
  }
  f_axis.assign(fs.begin(), fs.end());
  th_axis.assign(ths.begin(), ths.end());
  if (cells.size() != f_axis.size() * th_axis.size())
    throw SchemaError(source + ": grid is not rectangular (" + std::to_string(cells.size()) + " cells for " +
                      std::to_string(f_axis.size()) + " x " + std::to_string(th_axis.size()) + " axes)");
}

}  // namespace

SweepGrid read_sweep_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  require_columns(t, kSweepColumns);
  const auto cf = t.column("f_hz"), ct = t.column("theta_deg"), cx = t.column("vx"), cy = t.column("vy"),
             cw = t.column("w"), cs = t.column("status");
  std::vector<SweepCell> cells;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    SweepCell c;
    c.cmd = {t.number(r, cf), t.number(r, ct)};
    const std::string& st = t.text(r, cs);
    if (st == "ok") {
      c.summary = {t.number(r, cx), t.number(r, cy), t.number(r, cw)};
    } else if (st == "failed") {
      c.status = CellStatus::Failed;
      c.message = "failed in source file";
    } else {
      throw SchemaError(path + ": row " + std::to_string(r + 1) + ": unknown status '" + st + "'", r + 1, "status");
    }
    cells.push_back(c);
  }
  SweepGrid g;
  build_axes(cells, [](const SweepCell& c) { return std::make_pair(c.cmd.f_hz, c.cmd.theta_deg); }, g.f_axis,
             g.theta_axis, path);
  g.cells.resize(cells.size());
  std::vector<bool> seen(cells.size(), false);
  for (const auto& c : cells) {
    const auto i_f = std::lower_bound(g.f_axis.begin(), g.f_axis.end(), c.cmd.f_hz) - g.f_axis.begin();
    const auto i_t = std::lower_bound(g.theta_axis.begin(), g.theta_axis.end(), c.cmd.theta_deg) - g.theta_axis.begin();
    const std::size_t idx = g.index(static_cast<std::size_t>(i_f), static_cast<std::size_t>(i_t));
    if (seen[idx]) throw SchemaError(path + ": duplicate grid point", 0);
    seen[idx] = true;
    g.cells[idx] = c;
  }
  return g;
}

std::string index_csv(const IndexGrid& grid) {
  std::string s = csv_row(kIndexColumns);
  for (const auto& c : grid.cells)
    s += csv_row({fmt(c.cmd.f_hz), fmt(c.cmd.theta_deg), direction_name(c.direction), fmt(c.i_mass),
                  fmt(c.i_friction), fmt(c.p), std::to_string(c.sign), c.excluded ? "1" : "0"});
  return s;
}

IndexGrid read_index_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  require_columns(t, kIndexColumns);
  const auto cf = t.column("f_hz"), ct = t.column("theta_deg"), cd = t.column("direction"), cm = t.column("I_mass"),
             cr = t.column("I_friction"), cp = t.column("P"), cs = t.column("sign"), ce = t.column("excluded");
  std::vector<IndexCell> cells;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    IndexCell c;
    c.cmd = {t.number(r, cf), t.number(r, ct)};
    try {
      c.direction = parse_direction(t.text(r, cd));
    } catch (const SchemaError&) {
      throw SchemaError(path + ": row " + std::to_string(r + 1) + ": unknown direction '" + t.text(r, cd) + "'", r + 1,
                        "direction");
    }
    c.i_mass = t.number(r, cm);
    c.i_friction = t.number(r, cr);
    c.p = t.number(r, cp);
    c.sign = static_cast<int>(t.number(r, cs));
    const std::string& ex = t.text(r, ce);
    if (ex != "0" && ex != "1")
      throw SchemaError(path + ": row " + std::to_string(r + 1) + ": excluded must be 0 or 1", r + 1, "excluded");
    c.excluded = ex == "1";
    if (c.excluded) c.reason = std::isfinite(c.p) ? "heading-speed exclusion" : "failed cell";
    cells.push_back(c);
  }
  if (cells.size() % 3 != 0) throw SchemaError(path + ": expected three direction rows per grid point");
  std::vector<IndexCell> points;
  for (std::size_t i = 0; i < cells.size(); i += 3) points.push_back(cells[i]);
  IndexGrid g;
  build_axes(points, [](const IndexCell& c) { return std::make_pair(c.cmd.f_hz, c.cmd.theta_deg); }, g.f_axis,
             g.theta_axis, path);
  g.cells.resize(cells.size());
  std::vector<bool> seen(cells.size(), false);
  for (const auto& c : cells) {
    const auto i_f = std::lower_bound(g.f_axis.begin(), g.f_axis.end(), c.cmd.f_hz) - g.f_axis.begin();
    const auto i_t = std::lower_bound(g.theta_axis.begin(), g.theta_axis.end(), c.cmd.theta_deg) - g.theta_axis.begin();
    if (i_f >= static_cast<long>(g.f_axis.size()) || g.f_axis[i_f] != c.cmd.f_hz ||
        i_t >= static_cast<long>(g.theta_axis.size()) || g.theta_axis[i_t] != c.cmd.theta_deg)
      throw SchemaError(path + ": grid point off axis");
    const std::size_t idx = 3 * (static_cast<std::size_t>(i_f) * g.theta_axis.size() + static_cast<std::size_t>(i_t)) +
                            static_cast<std::size_t>(c.direction);
    if (seen[idx]) throw SchemaError(path + ": duplicate (grid point, direction) row");
    seen[idx] = true;
    g.cells[idx] = c;
  }
  return g;
}

std::string events_csv(const std::vector<Event>& events) {
  std::string s = csv_row(kEventColumns);
  for (const auto& e : events) s += csv_row({fmt(e.t), e.type, e.payload});
  return s;
}

std::string selection_text(const std::vector<ModeSelection>& sel) {
  std::ostringstream os;
  char buf[256];
  for (const auto& m : sel) {
    os << mode_name(m.mode) << '\n';
    if (!m.diagnostic.empty()) os << "  note: " << m.diagnostic << '\n';
    if (m.ranked.empty()) {
      os << "  (empty)\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, "  %4s %7s %9s %10s %10s %8s %8s %8s\n", "rank", "f_hz", "theta_deg", "score", "P",
                  "vx", "vy", "w");
    os << buf;
    for (std::size_t k = 0; k < m.ranked.size(); ++k) {
      const auto& r = m.ranked[k];
      std::snprintf(buf, sizeof buf, "  %4zu %7.1f %9.1f %10.4f %10.4f %8.4f %8.4f %8.4f\n", k + 1, r.cmd.f_hz,
                    r.cmd.theta_deg, r.score, r.p, r.reference.vx, r.reference.vy, r.reference.w);
      os << buf;
    }
  }
  return os.str();
}

std::string selection_csv(const std::vector<ModeSelection>& sel) {
  std::string s = csv_row({"mode", "rank", "f_hz", "theta_deg", "score", "P", "vx", "vy", "w"});
  for (const auto& m : sel)
    for (std::size_t k = 0; k < m.ranked.size(); ++k) {
      const auto& r = m.ranked[k];
      s += csv_row({mode_name(m.mode), std::to_string(k + 1), fmt(r.cmd.f_hz), fmt(r.cmd.theta_deg), fmt(r.score),
                    fmt(r.p), fmt(r.reference.vx), fmt(r.reference.vy), fmt(r.reference.w)});
    }
  return s;
}

// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace vibrowalk
