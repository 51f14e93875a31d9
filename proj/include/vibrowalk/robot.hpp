#pragma once

// PRBM legs, ground contact and the assembled quadruped.
//
// Leg frame convention: +Y runs along the beam from its mount toward the foot,
// X spans the beam width and Z its thickness. Each of the three connections
// (mount-s1, s1-s2, s2-s3) carries a fixed mounting twist about Y followed by
// a bend joint about X and a twist joint about Y.

#include "vibrowalk/actuation.hpp"
#include "vibrowalk/core.hpp"
#include "vibrowalk/multibody.hpp"

#include <array>
#include <vector>

namespace vibrowalk {

inline constexpr int kSegments = 3;

struct PrbmLeg {
  double segment_length = 0.0;
  double segment_mass = 0.0;
  Vec3 segment_dims = Vec3::Zero();  // box edges along leg X, Y, Z
  std::array<double, kSegments> mount_twist_rad{};
  LegStiffness stiffness;
  double foot_mass = 0.0;
  Vec3 foot_dims = Vec3::Zero();
  double foot_height = 0.0;

  double mass() const { return kSegments * segment_mass + foot_mass; }
  /// Foot contact point in the distal segment frame.
  Vec3 contact_point() const { return {0.0, segment_length + foot_height, 0.0}; }
  /// Appends the 6 bodies of this leg under `parent`; returns the distal body.
  /// `chirality` multiplies the mounting twists (+1 or -1).
  int append_to(Multibody& mb, int parent, const Mat3& mount_R, const Vec3& mount_p, double chirality,
                const std::string& prefix) const;
};

/// Three equal segments with mounting twists (0, phi/2, phi/2).
PrbmLeg build_leg(const LegStiffness& stiffness, const DesignParams& design);

/// Linear torsional spring-damper.
inline double joint_torque(double q, double qdot, double k, double b) { return -k * q - b * qdot; }

struct ContactParams {
  double k_n = 2e4;     // N/m
  double d_n = 50.0;    // N s/m
  double v_eps = 1e-3;  // m/s
  double torsional_mu = 0.0;  // m; torsional friction torque = mu_t N
  double w_eps = 1e-2;        // rad/s
  int points_per_foot = 1;    // >1 spreads k_n, d_n over points along the foot bar

  void validate() const;
  bool operator==(const ContactParams&) const = default;
};

struct FootPointState {
  Vec3 position = Vec3::Zero();  // world
  Vec3 velocity = Vec3::Zero();  // world
};

/// Penalty normal force with regularized Coulomb friction. Zero when z > 0.
Vec3 contact_force(const FootPointState& foot, double mu, const ContactParams& params);

/// Extra point mass rigidly attached to the base (sensitivity variants).
struct PointMass {
  double mass = 0.0;
  Vec3 position = Vec3::Zero();  // body frame
  bool operator==(const PointMass&) const = default;
};

class RobotModel {
 public:
  const DesignParams& design() const { return design_; }
  const LegStiffness& baseline() const { return baseline_; }
  const ErrorParams& errors() const { return errors_; }
  const ContactParams& contact() const { return contact_; }
  const std::vector<PointMass>& attachments() const { return attachments_; }
  const Multibody& tree() const { return tree_; }
  const RotorGeometry& rotor() const { return rotor_; }
  const Vec3& rotor_midpoint() const { return rotor_mid_; }

  /// Effective joint coefficients of a leg (baseline times the leg's factors).
  LegStiffness leg_coefficients(int leg) const;
  double friction(int leg) const { return errors_.friction[leg]; }
  int foot_body(int leg) const { return foot_body_[leg]; }
  const Vec3& foot_point() const { return foot_point_; }
  /// Contact points of one foot in the distal segment frame.
  const std::vector<Vec3>& foot_points() const { return foot_points_; }
  const Vec3& mount_position(int leg) const { return mount_p_[leg]; }

  double base_mass() const { return base_mass_; }
  /// Base body center of mass (body frame), without attachments.
  const Vec3& base_com_nominal() const { return base_com_nominal_; }
  /// Base body center of mass including attachments.
  Vec3 base_com() const;
  double total_mass() const { return tree_.total_mass(); }
  double leg_mass() const { return leg_.mass(); }

  /// Standing pose with feet at their static penetration, all joints at zero.
  SimState rest_state() const;

  friend RobotModel build_robot(const DesignParams&, const LegStiffness&, const ErrorParams&, const ContactParams&,
                                const std::vector<PointMass>&);

 private:
  DesignParams design_;
  LegStiffness baseline_;
  ErrorParams errors_;
  ContactParams contact_;
  std::vector<PointMass> attachments_;
  PrbmLeg leg_;
  Multibody tree_;
  RotorGeometry rotor_;
  Vec3 rotor_mid_ = Vec3::Zero();
  PerLeg<int> foot_body_{};
  PerLeg<Vec3> mount_p_{};
  Vec3 foot_point_ = Vec3::Zero();
  std::vector<Vec3> foot_points_;
  double base_mass_ = 0.0;
  Vec3 base_com_nominal_ = Vec3::Zero();
};

/// Assembles the quadruped. Throws ConfigError when m_mag cannot cover the
/// plate, rotors and legs.
RobotModel build_robot(const DesignParams& design, const LegStiffness& stiffness, const ErrorParams& errors,
                       const ContactParams& contact = {}, const std::vector<PointMass>& attachments = {});

/// A single leg clamped to the world for the release experiment. The clamp
/// holds the beam horizontal along world +x, rolled about the beam axis so a
/// downward load acts at `load_angle` from the leg's thickness direction.
struct LegRig {
  PrbmLeg leg;
  Multibody tree;
  int tip_body = -1;
  Vec3 tip_point = Vec3::Zero();  // in the distal frame
  Mat3 clamp_R = Mat3::Identity();
  Vec3 clamp_p = Vec3::Zero();
};

LegRig build_leg_rig(const LegStiffness& stiffness, const DesignParams& design, double load_angle_rad);

}  // namespace vibrowalk
