#pragma once

// Shared domain types. Everything is SI internally (m, kg, s, rad); Hz and
// degrees only appear at the config/CLI boundary.

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace vibrowalk {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input file does not match its schema. Row/column are 1-based, 0 = n/a.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::size_t row = 0, std::string column = {});
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// Simulation blew up (non-finite state or runaway joint rates).
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t);
  double time() const { return t_; }

 private:
  double t_;
};

// ---------------------------------------------------------------------------
// Legs are always indexed in this order.

enum class Leg : int { FL = 0, FR = 1, RL = 2, RR = 3 };
inline constexpr int kNumLegs = 4;
inline constexpr std::array<const char*, kNumLegs> kLegNames{"fl", "fr", "rl", "rr"};
inline constexpr bool is_left(int leg) { return leg == 0 || leg == 2; }

template <typename T>
using PerLeg = std::array<T, kNumLegs>;

// ---------------------------------------------------------------------------

struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  /// Heading angle about world z (ZYX yaw).
  double yaw() const;
  bool normalized(double tol = 1e-9) const;
  static Pose planar(double x, double y, double yaw);

  bool operator==(const Pose& o) const;
};

struct PlanarPose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

/// Geometry and mass budget of the robot.
struct DesignParams {
  double body_length = 0.220;
  double body_width = 0.120;
  double body_thickness = 0.0035;
  double leg_length = 0.050;
  double leg_width = 0.020;
  double leg_thickness = 0.003;
  double leg_twist_deg = 90.0;
  double foot_length = 0.085;
  double foot_width = 0.005;
  double rotor_arm = 0.028;         // l
  double rotor_separation = 0.028;  // h
  double rotor_mass = 0.012;        // m, per rotor
  double total_mass = 0.350;
  double gravity = 9.81;

  // Quantities the prototype description leaves open; see README.
  double plate_mass = 0.016;
  double foot_height = 0.005;
  double leg_density = 1220.0;   // TPU
  double foot_density = 1240.0;  // PLA
  double leg_inset = 0.010;      // corner mount inset from both plate edges
  double rotor_height = 0.0;     // rotor-pair midpoint above plate center
  double electronics_height = 0.010;
  // Electronics lumps (battery front, controller rear) as fractions of the
  // residual mass at body-frame x positions.
  std::vector<double> electronics_fraction{0.5, 0.5};
  std::vector<double> electronics_x{0.070, -0.070};
  bool mirror_legs = true;  // right legs twist opposite to left legs

  void validate() const;
  bool operator==(const DesignParams&) const = default;
};

/// PRBM joint coefficients shared by all bend joints and all twist joints.
struct LegStiffness {
  double k_bend = 1.062072;   // N m / rad
  double b_bend = 2.21209;    // N m s / rad
  double k_twist = 0.0024;    // N m / rad
  double b_twist = 0.00183;   // N m s / rad

  void validate() const;
  LegStiffness scaled(double factor) const;
  bool operator==(const LegStiffness&) const = default;
};

/// Per-robot deviations from the nominal build. Default-constructed value is
/// the identity element (all factors 1, no offsets) with the calibrated
/// non-biased friction coefficients.
struct ErrorParams {
  PerLeg<double> d_k_bend{1.0, 1.0, 1.0, 1.0};
  PerLeg<double> d_b_bend{1.0, 1.0, 1.0, 1.0};
  PerLeg<double> d_k_twist{1.0, 1.0, 1.0, 1.0};
  PerLeg<double> d_b_twist{1.0, 1.0, 1.0, 1.0};
  PerLeg<double> friction{0.646, 0.508, 0.451, 0.553};  // fl, fr, rl, rr
  double m_mag = 0.350;  // total robot mass, kg
  double m_x = 0.0;      // base center-of-mass offset, m
  double m_y = 0.0;

  static constexpr std::size_t kDim = 23;
  /// Flat order: d_k_bend[4], d_b_bend[4], d_k_twist[4], d_b_twist[4],
  /// friction[4], m_mag, m_x, m_y.
  std::array<double, kDim> to_vector() const;
  static ErrorParams from_vector(const std::array<double, kDim>& v);
  static std::array<std::string, kDim> names();

  /// Identity factors with every foot at the same friction coefficient.
  static ErrorParams symmetric(double mu, double total_mass = 0.350);

  void validate() const;
  bool operator==(const ErrorParams&) const = default;
};

struct ActuationCommand {
  double f_hz = 0.0;       // signed; positive = top rotor clockwise
  double theta_deg = 0.0;  // offset angle in [-90, 90]

  /// Rotor angular rate in rad/s (2 pi f).
  double rotor_rate() const { return 2.0 * kPi * f_hz; }
  double theta_rad() const { return deg2rad(theta_deg); }

  /// Builds a command with theta clamped to [-90, 90]; throws ConfigError if
  /// |f| exceeds f_max or any value is non-finite.
  static ActuationCommand make(double f_hz, double theta_deg, double f_max = 35.0);
  bool operator==(const ActuationCommand&) const = default;
};

/// (f, theta) -> (-f, -theta): the reflection through the sagittal plane.
ActuationCommand mirror_command(const ActuationCommand& cmd);

/// Rotates a world velocity into the heading (yaw-only) frame of the pose.
/// The vertical component is unchanged.
Vec3 body_frame_velocity(const Pose& pose, const Vec3& world_velocity);

inline constexpr int kJointsPerLeg = 6;
inline constexpr int kNumJoints = kNumLegs * kJointsPerLeg;

/// Full robot state. Joint index = 6 * leg + 2 * connection + {0 bend, 1 twist}.
struct SimState {
  double t = 0.0;
  Pose base;
  Vec3 base_angular = Vec3::Zero();  // body frame
  Vec3 base_linear = Vec3::Zero();   // velocity of body origin, body frame
  std::array<double, kNumJoints> q{};
  std::array<double, kNumJoints> qd{};
  double rotor_phase = 0.0;
  double rotor_rate = 0.0;  // realized rate (differs from command under lag)

  bool finite() const;
  Vec3 world_linear_velocity() const;
  bool operator==(const SimState& o) const;
};

struct TrajectorySample {
  double t = 0.0;
  Pose pose;
  double vx_body = 0.0;
  double vy_body = 0.0;
  double yaw_rate = 0.0;

  PlanarPose planar() const;
};

struct Trajectory {
  double sample_interval = 0.0;
  std::vector<TrajectorySample> samples;

  bool empty() const { return samples.empty(); }
  double duration() const;
  /// Checks strictly increasing, uniformly spaced times.
  void validate() const;
};

struct VelocitySummary {
  double vx = 0.0;  // mean longitudinal velocity, m/s
  double vy = 0.0;  // mean lateral velocity, m/s
  double w = 0.0;   // mean yaw rate, rad/s

  bool finite() const;
  double channel(int c) const { return c == 0 ? vx : (c == 1 ? vy : w); }
  bool operator==(const VelocitySummary&) const = default;
};

enum class CellStatus { Ok, Failed };

struct SweepCell {
  ActuationCommand cmd;
  VelocitySummary summary;
  CellStatus status = CellStatus::Ok;
  std::string message;
};

/// Rectangular (f, theta) grid, f-major: index = i_f * theta_axis.size() + i_theta.
struct SweepGrid {
  std::vector<double> f_axis;
  std::vector<double> theta_axis;
  std::vector<SweepCell> cells;

  std::size_t size() const { return f_axis.size() * theta_axis.size(); }
  std::size_t index(std::size_t i_f, std::size_t i_theta) const {
    return i_f * theta_axis.size() + i_theta;
  }
  const SweepCell& at(std::size_t i_f, std::size_t i_theta) const { return cells.at(index(i_f, i_theta)); }
  /// Locates a cell by exact axis values; throws if absent.
  const SweepCell& find(double f_hz, double theta_deg) const;
  bool same_axes(const SweepGrid& o) const;
  void validate() const;
};

/// Evenly spaced inclusive axis [lo, hi] with the given step.
std::vector<double> make_axis(double lo, double hi, double step);

}  // namespace vibrowalk
