#include "vibrowalk/core.hpp"

#include <algorithm>
#include <sstream>

namespace vibrowalk {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

SchemaError::SchemaError(const std::string& what, std::size_t row, std::string column)
    : Error(what), row_(row), column_(std::move(column)) {}

IntegrationError::IntegrationError(const std::string& what, double t)
    : Error(what + " at t=" + std::to_string(t)), t_(t) {}

// ---------------------------------------------------------------------------

double Pose::yaw() const {
  const Quat& q = orientation;
  return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()), 1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

bool Pose::normalized(double tol) const { return std::abs(orientation.norm() - 1.0) <= tol; }

Pose Pose::planar(double x, double y, double yaw) {
  Pose p;
  p.position = Vec3(x, y, 0.0);
  p.orientation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
  return p;
}

bool Pose::operator==(const Pose& o) const {
  return position == o.position && orientation.coeffs() == o.orientation.coeffs();
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void DesignParams::validate() const {
  for (double v : {body_length, body_width, body_thickness, leg_length, leg_width, leg_thickness, foot_length,
                   foot_width, foot_height, rotor_arm, rotor_separation})
    require(finite_positive(v), "design: lengths must be finite and > 0");
  for (double v : {rotor_mass, total_mass, plate_mass, leg_density, foot_density, gravity})
    require(finite_positive(v), "design: masses, densities and gravity must be > 0");
  require(std::isfinite(leg_twist_deg) && leg_twist_deg >= 0.0 && leg_twist_deg <= 180.0,
          "design: leg twist angle must be in [0, 180] deg");
  require(std::isfinite(leg_inset) && leg_inset >= 0.0 && 2 * leg_inset < body_width,
          "design: leg inset out of range");
  require(std::isfinite(rotor_height) && std::isfinite(electronics_height), "design: non-finite height");
  require(!electronics_fraction.empty() && electronics_fraction.size() == electronics_x.size(),
          "design: electronics fractions and positions must have equal, non-zero length");
  double sum = 0.0;
  for (double f : electronics_fraction) {
    require(std::isfinite(f) && f >= 0.0, "design: electronics fractions must be >= 0");
    sum += f;
  }
  require(std::abs(sum - 1.0) < 1e-9, "design: electronics fractions must sum to 1");
  for (double x : electronics_x) require(std::isfinite(x), "design: non-finite electronics position");
}

void LegStiffness::validate() const {
  for (double v : {k_bend, b_bend, k_twist, b_twist})
    require(std::isfinite(v) && v >= 0.0, "leg stiffness coefficients must be finite and >= 0");
}

LegStiffness LegStiffness::scaled(double factor) const {
  return {k_bend * factor, b_bend * factor, k_twist * factor, b_twist * factor};
}

std::array<double, ErrorParams::kDim> ErrorParams::to_vector() const {
  std::array<double, kDim> v{};
  for (int i = 0; i < kNumLegs; ++i) {
    v[i] = d_k_bend[i];
    v[4 + i] = d_b_bend[i];
    v[8 + i] = d_k_twist[i];
    v[12 + i] = d_b_twist[i];
    v[16 + i] = friction[i];
  }
  v[20] = m_mag;
  v[21] = m_x;
  v[22] = m_y;
  return v;
}

ErrorParams ErrorParams::from_vector(const std::array<double, kDim>& v) {
  ErrorParams e;
  for (int i = 0; i < kNumLegs; ++i) {
    e.d_k_bend[i] = v[i];
    e.d_b_bend[i] = v[4 + i];
    e.d_k_twist[i] = v[8 + i];
    e.d_b_twist[i] = v[12 + i];
    e.friction[i] = v[16 + i];
  }
  e.m_mag = v[20];
  e.m_x = v[21];
  e.m_y = v[22];
  return e;
}

std::array<std::string, ErrorParams::kDim> ErrorParams::names() {
  std::array<std::string, kDim> n;
  const char* groups[] = {"d_k_bend", "d_b_bend", "d_k_twist", "d_b_twist", "friction"};
  for (int g = 0; g < 5; ++g)
    for (int i = 0; i < kNumLegs; ++i) n[4 * g + i] = std::string(groups[g]) + "_" + kLegNames[i];
  n[20] = "m_mag";
  n[21] = "m_x";
  n[22] = "m_y";
  return n;
}

ErrorParams ErrorParams::symmetric(double mu, double total_mass) {
  ErrorParams e;
  e.friction = {mu, mu, mu, mu};
  e.m_mag = total_mass;
  return e;
}

void ErrorParams::validate() const {
  for (const auto* arr : {&d_k_bend, &d_b_bend, &d_k_twist, &d_b_twist})
    for (double d : *arr) require(finite_positive(d), "error factors must be finite and > 0");
  for (double f : friction) require(std::isfinite(f) && f >= 0.0 && f <= 2.0, "friction coefficients must be in [0, 2]");
  require(finite_positive(m_mag), "m_mag must be > 0");
  require(std::isfinite(m_x) && std::isfinite(m_y), "mass offsets must be finite");
}

ActuationCommand ActuationCommand::make(double f_hz, double theta_deg, double f_max) {
  if (!std::isfinite(f_hz) || !std::isfinite(theta_deg)) throw ConfigError("actuation command must be finite");
  if (std::abs(f_hz) > f_max) {
    std::ostringstream os;
    os << "driving frequency " << f_hz << " Hz exceeds limit " << f_max << " Hz";
    throw ConfigError(os.str());
  }
  return {f_hz, std::clamp(theta_deg, -90.0, 90.0)};
}

ActuationCommand mirror_command(const ActuationCommand& cmd) { return {-cmd.f_hz, -cmd.theta_deg}; }

Vec3 body_frame_velocity(const Pose& pose, const Vec3& v) {
  if (!v.allFinite() || !pose.position.allFinite() || !pose.orientation.coeffs().allFinite())
    throw Error("body_frame_velocity: non-finite input");
  const double yaw = pose.yaw();
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * v.x() + s * v.y(), -s * v.x() + c * v.y(), v.z()};
}

// ---------------------------------------------------------------------------

bool SimState::finite() const {
  if (!std::isfinite(t) || !base.position.allFinite() || !base.orientation.coeffs().allFinite() ||
      !base_angular.allFinite() || !base_linear.allFinite() || !std::isfinite(rotor_phase) ||
      !std::isfinite(rotor_rate))
    return false;
  for (int i = 0; i < kNumJoints; ++i)
    if (!std::isfinite(q[i]) || !std::isfinite(qd[i])) return false;
  return true;
}

Vec3 SimState::world_linear_velocity() const { return base.orientation * base_linear; }

bool SimState::operator==(const SimState& o) const {
  return t == o.t && base == o.base && base_angular == o.base_angular && base_linear == o.base_linear &&
         q == o.q && qd == o.qd && rotor_phase == o.rotor_phase && rotor_rate == o.rotor_rate;
}

PlanarPose TrajectorySample::planar() const { return {pose.position.x(), pose.position.y(), pose.yaw()}; }

double Trajectory::duration() const {
  return samples.size() < 2 ? 0.0 : samples.back().t - samples.front().t;
}

void Trajectory::validate() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dt = samples[i].t - samples[i - 1].t;
    if (!(dt > 0.0)) throw Error("trajectory times must be strictly increasing");
    // Sample times are computed as k * interval, so spacing is exact up to rounding.
    if (std::abs(dt - sample_interval) > 1e-12 * std::max(1.0, samples[i].t) + 1e-12)
      throw Error("trajectory sampling is not uniform");
  }
}

bool VelocitySummary::finite() const { return std::isfinite(vx) && std::isfinite(vy) && std::isfinite(w); }

const SweepCell& SweepGrid::find(double f_hz, double theta_deg) const {
  for (const auto& c : cells)
    if (c.cmd.f_hz == f_hz && c.cmd.theta_deg == theta_deg) return c;
  std::ostringstream os;
  os << "no grid cell at f=" << f_hz << " Hz, theta=" << theta_deg << " deg";
  throw Error(os.str());
}

bool SweepGrid::same_axes(const SweepGrid& o) const { return f_axis == o.f_axis && theta_axis == o.theta_axis; }

void SweepGrid::validate() const {
  if (!std::is_sorted(f_axis.begin(), f_axis.end()) || !std::is_sorted(theta_axis.begin(), theta_axis.end()))
    throw Error("sweep axes must be sorted ascending");
  if (std::adjacent_find(f_axis.begin(), f_axis.end()) != f_axis.end() ||
      std::adjacent_find(theta_axis.begin(), theta_axis.end()) != theta_axis.end())
    throw Error("sweep axes must not contain duplicates");
  if (cells.size() != size()) throw Error("sweep grid must have exactly one cell per grid point");
  for (std::size_t i = 0; i < f_axis.size(); ++i)
    for (std::size_t j = 0; j < theta_axis.size(); ++j) {
      const auto& c = cells[index(i, j)];
      if (c.cmd.f_hz != f_axis[i] || c.cmd.theta_deg != theta_axis[j])
        throw Error("sweep cell out of order with its axes");
    }
}

std::vector<double> make_axis(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ConfigError("axis requires lo <= hi and step > 0");
  std::vector<double> axis;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) axis.push_back(lo + static_cast<double>(i) * step);
  return axis;
}

}  // namespace vibrowalk
