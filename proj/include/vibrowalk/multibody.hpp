#pragma once

// Reduced-coordinate rigid-body tree with revolute joints and an optional
// 6-DoF floating root. Forward dynamics uses the articulated-body algorithm
// with linearly-implicit joint spring-dampers and user-supplied implicit
// body impedances (used for penalty contact).
//
// Spatial vectors are [angular; linear] in body coordinates, following
// Featherstone's conventions.

#include "vibrowalk/core.hpp"

#include <span>
#include <string>
#include <vector>

namespace vibrowalk {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Mat3 skew(const Vec3& v);

/// Spatial inertia about the body origin.
Mat6 spatial_inertia(double mass, const Vec3& com, const Mat3& inertia_com);

/// Solid box inertia about its centroid, edge lengths along x, y, z.
Mat3 box_inertia(double mass, const Vec3& dims);

enum class JointKind { Free, Revolute };

struct BodySpec {
  std::string name;
  int parent = -1;  // -1: attached to the world (revolute) or floating (free)
  JointKind joint = JointKind::Revolute;
  Vec3 axis = Vec3::UnitX();  // revolute axis in the child frame
  Mat3 tree_rotation = Mat3::Identity();  // joint frame in parent frame
  Vec3 tree_translation = Vec3::Zero();
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia_com = Mat3::Zero();
  double stiffness = 0.0;  // joint spring, N m / rad
  double damping = 0.0;    // joint damper, N m s / rad
  // Portion of the mass that gravity acts on (defaults to all of it).
  double gravity_mass = -1.0;
  Vec3 gravity_com = Vec3::Zero();
};

class Multibody {
 public:
  struct Workspace {
    // Kinematics
    std::vector<Mat3> R;  // body orientation in world
    std::vector<Vec3> p;  // body origin in world
    std::vector<Mat3> E;  // parent -> child rotation (child coords)
    std::vector<Vec3> r;  // child origin in parent coords
    std::vector<Vec6> v;  // spatial velocity, body coords
    std::vector<Vec6> c;
    // Dynamics inputs
    std::vector<Vec6> f_ext;    // external spatial force, body coords
    std::vector<Mat6> I_extra;  // implicit impedance added to the inertia
    // Dynamics scratch/outputs
    std::vector<Mat6> IA;
    std::vector<Vec6> pA;
    std::vector<Vec6> U;
    std::vector<double> D, u;
    std::vector<Vec6> a;
    std::vector<double> qdd;
    Vec6 base_acc = Vec6::Zero();

    void clear_inputs();
  };

  int add_body(const BodySpec& spec);

  int num_bodies() const { return static_cast<int>(bodies_.size()); }
  int dof() const { return num_joints_; }
  bool floating() const { return floating_; }
  const BodySpec& body(int i) const { return bodies_.at(i); }
  /// Index of the revolute coordinate driven by body i (-1 for the free root).
  int joint_index(int body) const { return q_index_.at(body); }

  /// World pose of the fixed anchor used by world-attached revolute roots.
  void set_anchor(const Mat3& R, const Vec3& p);
  void set_joint_coefficients(int joint, double stiffness, double damping);
  double joint_stiffness(int joint) const { return k_[joint]; }
  double joint_damping(int joint) const { return b_[joint]; }

  Workspace make_workspace() const;

  /// Positions and velocities of every body. base/base_vel are ignored for a
  /// fixed-root tree.
  void kinematics(const Pose& base, const Vec6& base_vel, std::span<const double> q, std::span<const double> qd,
                  Workspace& ws) const;

  /// Adds m g at each body's gravity center to ws.f_ext. Needs kinematics().
  void add_gravity(const Vec3& g_world, Workspace& ws) const;

  /// Articulated-body forward dynamics. Joint spring-dampers and ws.I_extra are
  /// treated implicitly over a step of length dt (dt = 0 gives the explicit
  /// accelerations). Needs kinematics(); fills ws.qdd and ws.base_acc.
  void forward_dynamics(std::span<const double> q, std::span<const double> qd, double dt, Workspace& ws) const;

  /// Kinetic energy of all bodies. Needs kinematics().
  double kinetic_energy(const Workspace& ws) const;
  /// Gravitational potential (reference z = 0). Needs kinematics().
  double gravity_potential(const Vec3& g_world, const Workspace& ws) const;
  double spring_potential(std::span<const double> q) const;

  double total_mass() const;
  /// World position of a point given in body coordinates. Needs kinematics().
  Vec3 point_world(int body, const Vec3& local, const Workspace& ws) const;
  /// World velocity of a body-fixed point. Needs kinematics().
  Vec3 point_velocity_world(int body, const Vec3& local, const Workspace& ws) const;

 private:
  std::vector<BodySpec> bodies_;
  std::vector<int> q_index_;
  std::vector<double> k_, b_;
  std::vector<Mat6> inertia_;
  int num_joints_ = 0;
  bool floating_ = false;
  Mat3 anchor_R_ = Mat3::Identity();
  Vec3 anchor_p_ = Vec3::Zero();
};

/// Spatial force at the body origin from a force applied at a body-fixed point
/// (both in body coordinates).
Vec6 force_at_point(const Vec3& point, const Vec3& force, const Vec3& torque = Vec3::Zero());

/// Implicit impedance for a world-frame point damping matrix C acting at a
/// body-fixed point: returns X^T (R^T C R) X.
Mat6 point_impedance(const Vec3& point, const Mat3& R_body, const Mat3& C_world);

}  // namespace vibrowalk
