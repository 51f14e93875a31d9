#include "vibrowalk/multibody.hpp"

namespace vibrowalk {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

Mat6 spatial_inertia(double mass, const Vec3& com, const Mat3& inertia_com) {
  const Mat3 C = skew(com);
  Mat6 I;
  I.topLeftCorner<3, 3>() = inertia_com + mass * C * C.transpose();
  I.topRightCorner<3, 3>() = mass * C;
  I.bottomLeftCorner<3, 3>() = mass * C.transpose();
  I.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return I;
}

Mat3 box_inertia(double mass, const Vec3& d) {
  const Vec3 sq = d.cwiseProduct(d);
  return (mass / 12.0) * Vec3(sq.y() + sq.z(), sq.x() + sq.z(), sq.x() + sq.y()).asDiagonal();
}

Vec6 force_at_point(const Vec3& point, const Vec3& force, const Vec3& torque) {
  Vec6 f;
  f.head<3>() = torque + point.cross(force);
  f.tail<3>() = force;
  return f;
}

Mat6 point_impedance(const Vec3& point, const Mat3& R_body, const Mat3& C_world) {
  Eigen::Matrix<double, 3, 6> X;
  X.leftCols<3>() = -skew(point);
  X.rightCols<3>() = Mat3::Identity();
  const Mat3 Cb = R_body.transpose() * C_world * R_body;
  return X.transpose() * Cb * X;
}

namespace {

// Motion transform parent -> child as a 6x6 matrix.
Mat6 motion_transform(const Mat3& E, const Vec3& r) {
  Mat6 X = Mat6::Zero();
  X.topLeftCorner<3, 3>() = E;
  X.bottomRightCorner<3, 3>() = E;
  X.bottomLeftCorner<3, 3>() = -E * skew(r);
  return X;
}

Vec6 transform_motion(const Mat3& E, const Vec3& r, const Vec6& m) {
  Vec6 out;
  const Vec3 w = m.head<3>();
  out.head<3>() = E * w;
  out.tail<3>() = E * (m.tail<3>() - r.cross(w));
  return out;
}

// Child force -> parent force (X^T f).
Vec6 transform_force_to_parent(const Mat3& E, const Vec3& r, const Vec6& f) {
  Vec6 out;
  const Vec3 F = E.transpose() * f.tail<3>();
  out.head<3>() = E.transpose() * f.head<3>() + r.cross(F);
  out.tail<3>() = F;
  return out;
}

Vec6 cross_force(const Vec6& v, const Vec6& f) {
  const Vec3 w = v.head<3>(), vl = v.tail<3>();
  Vec6 out;
  out.head<3>() = w.cross(f.head<3>()) + vl.cross(f.tail<3>());
  out.tail<3>() = w.cross(f.tail<3>());
  return out;
}

}  // namespace

void Multibody::Workspace::clear_inputs() {
  for (auto& f : f_ext) f.setZero();
  for (auto& m : I_extra) m.setZero();
}

int Multibody::add_body(const BodySpec& spec) {
  const int idx = num_bodies();
  if (spec.parent >= idx) throw ConfigError("multibody: parent must precede child");
  if (spec.joint == JointKind::Free) {
    if (idx != 0 || spec.parent != -1) throw ConfigError("multibody: only the root may be a free joint");
    floating_ = true;
    q_index_.push_back(-1);
  } else {
    if (std::abs(spec.axis.norm() - 1.0) > 1e-12) throw ConfigError("multibody: joint axis must be unit length");
    if (spec.parent == -1 && idx != 0) throw ConfigError("multibody: only the root may attach to the world");
    q_index_.push_back(num_joints_++);
    k_.push_back(spec.stiffness);
    b_.push_back(spec.damping);
  }
  if (!(spec.mass >= 0.0)) throw ConfigError("multibody: negative mass");
  bodies_.push_back(spec);
  if (bodies_.back().gravity_mass < 0.0) {
    bodies_.back().gravity_mass = spec.mass;
    bodies_.back().gravity_com = spec.com;
  }
  inertia_.push_back(spatial_inertia(spec.mass, spec.com, spec.inertia_com));
  return idx;
}

void Multibody::set_anchor(const Mat3& R, const Vec3& p) {
  anchor_R_ = R;
  anchor_p_ = p;
}

void Multibody::set_joint_coefficients(int joint, double stiffness, double damping) {
  k_.at(joint) = stiffness;
  b_.at(joint) = damping;
}

Multibody::Workspace Multibody::make_workspace() const {
  const auto n = bodies_.size();
  Workspace ws;
  ws.R.assign(n, Mat3::Identity());
  ws.p.assign(n, Vec3::Zero());
  ws.E.assign(n, Mat3::Identity());
  ws.r.assign(n, Vec3::Zero());
  ws.v.assign(n, Vec6::Zero());
  ws.c.assign(n, Vec6::Zero());
  ws.f_ext.assign(n, Vec6::Zero());
  ws.I_extra.assign(n, Mat6::Zero());
  ws.IA.assign(n, Mat6::Zero());
  ws.pA.assign(n, Vec6::Zero());
  ws.U.assign(n, Vec6::Zero());
  ws.D.assign(n, 0.0);
  ws.u.assign(n, 0.0);
  ws.a.assign(n, Vec6::Zero());
  ws.qdd.assign(static_cast<std::size_t>(num_joints_), 0.0);
  return ws;
}

void Multibody::kinematics(const Pose& base, const Vec6& base_vel, std::span<const double> q,
                           std::span<const double> qd, Workspace& ws) const {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const BodySpec& b = bodies_[i];
    if (b.joint == JointKind::Free) {
      ws.R[i] = base.orientation.toRotationMatrix();
      ws.p[i] = base.position;
      ws.E[i] = ws.R[i].transpose();
      ws.r[i] = base.position;
      ws.v[i] = base_vel;
      ws.c[i].setZero();
      continue;
    }
    const int j = q_index_[i];
    const Mat3 R_rel = b.tree_rotation * Eigen::AngleAxisd(q[j], b.axis).toRotationMatrix();
    ws.E[i] = R_rel.transpose();
    ws.r[i] = b.tree_translation;
    const Mat3& Rp = b.parent >= 0 ? ws.R[b.parent] : anchor_R_;
    const Vec3& pp = b.parent >= 0 ? ws.p[b.parent] : anchor_p_;
    ws.R[i] = Rp * R_rel;
    ws.p[i] = pp + Rp * b.tree_translation;

    Vec6 vj;
    vj.head<3>() = b.axis * qd[j];
    vj.tail<3>().setZero();
    if (b.parent >= 0)
      ws.v[i] = transform_motion(ws.E[i], ws.r[i], ws.v[b.parent]) + vj;
    else
      ws.v[i] = vj;
    // c = v x vJ for a revolute joint with constant axis
    ws.c[i].head<3>() = ws.v[i].head<3>().cross(vj.head<3>());
    ws.c[i].tail<3>() = ws.v[i].tail<3>().cross(vj.head<3>());
  }
}

void Multibody::add_gravity(const Vec3& g_world, Workspace& ws) const {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const BodySpec& b = bodies_[i];
    if (b.gravity_mass == 0.0) continue;
    const Vec3 F = ws.R[i].transpose() * (b.gravity_mass * g_world);
    ws.f_ext[i] += force_at_point(b.gravity_com, F);
  }
}

void Multibody::forward_dynamics(std::span<const double> q, std::span<const double> qd, double dt,
                                 Workspace& ws) const {
  const int n = num_bodies();
  for (int i = 0; i < n; ++i) {
    ws.IA[i] = inertia_[i] + ws.I_extra[i];
    ws.pA[i] = cross_force(ws.v[i], inertia_[i] * ws.v[i]) - ws.f_ext[i];
  }

  for (int i = n - 1; i >= 0; --i) {
    const BodySpec& b = bodies_[i];
    if (b.joint == JointKind::Free) continue;
    const int j = q_index_[i];
    ws.U[i] = ws.IA[i].leftCols<3>() * b.axis;
    const double k = k_[j], damp = b_[j];
    ws.D[i] = b.axis.dot(ws.U[i].head<3>()) + dt * damp + dt * dt * k;
    const double tau = -k * q[j] - (damp + dt * k) * qd[j];
    ws.u[i] = tau - b.axis.dot(ws.pA[i].head<3>());
    if (b.parent >= 0) {
      const Mat6 Ia = ws.IA[i] - ws.U[i] * ws.U[i].transpose() / ws.D[i];
      const Vec6 pa = ws.pA[i] + Ia * ws.c[i] + ws.U[i] * (ws.u[i] / ws.D[i]);
      const Mat6 X = motion_transform(ws.E[i], ws.r[i]);
      ws.IA[b.parent].noalias() += X.transpose() * Ia * X;
      ws.pA[b.parent] += transform_force_to_parent(ws.E[i], ws.r[i], pa);
    }
  }

  for (int i = 0; i < n; ++i) {
    const BodySpec& b = bodies_[i];
    if (b.joint == JointKind::Free) {
      ws.a[i] = -ws.IA[i].ldlt().solve(ws.pA[i]);
      ws.base_acc = ws.a[i];
      continue;
    }
    Vec6 ap = ws.c[i];
    if (b.parent >= 0) ap += transform_motion(ws.E[i], ws.r[i], ws.a[b.parent]);
    const int j = q_index_[i];
    const double qdd = (ws.u[i] - ws.U[i].dot(ap)) / ws.D[i];
    ws.qdd[j] = qdd;
    ws.a[i] = ap;
    ws.a[i].head<3>() += b.axis * qdd;
  }
  if (!floating_) ws.base_acc.setZero();
}

double Multibody::kinetic_energy(const Workspace& ws) const {
  double e = 0.0;
  for (std::size_t i = 0; i < bodies_.size(); ++i) e += 0.5 * ws.v[i].dot(inertia_[i] * ws.v[i]);
  return e;
}

double Multibody::gravity_potential(const Vec3& g_world, const Workspace& ws) const {
  double e = 0.0;
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const BodySpec& b = bodies_[i];
    e -= b.gravity_mass * g_world.dot(ws.p[i] + ws.R[i] * b.gravity_com);
  }
  return e;
}

double Multibody::spring_potential(std::span<const double> q) const {
  double e = 0.0;
  for (int j = 0; j < num_joints_; ++j) e += 0.5 * k_[j] * q[j] * q[j];
  return e;
}

double Multibody::total_mass() const {
  double m = 0.0;
  for (const auto& b : bodies_) m += b.mass;
  return m;
}

Vec3 Multibody::point_world(int body, const Vec3& local, const Workspace& ws) const {
  return ws.p[body] + ws.R[body] * local;
}

Vec3 Multibody::point_velocity_world(int body, const Vec3& local, const Workspace& ws) const {
  const Vec6& v = ws.v[body];
  return ws.R[body] * (v.tail<3>() + v.head<3>().cross(local));
}

}  // namespace vibrowalk
