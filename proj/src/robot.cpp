#include "vibrowalk/robot.hpp"

#include <algorithm>

namespace vibrowalk {

namespace {

struct MassPart {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();  // about own com
};

// Parallel-axis combination of rigid parts.
MassPart combine(const std::vector<MassPart>& parts) {
  MassPart out;
  for (const auto& p : parts) {
    out.mass += p.mass;
    out.com += p.mass * p.com;
  }
  if (out.mass <= 0.0) return {};
  out.com /= out.mass;
  for (const auto& p : parts) {
    const Vec3 d = p.com - out.com;
    out.inertia += p.inertia + p.mass * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
  }
  return out;
}

Mat3 rot_y(double a) { return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix(); }

// Leg frame at a plate mount: X along body x, Y pointing down, Z along body y.
Mat3 mount_rotation() {
  Mat3 R;
  R.col(0) = Vec3::UnitX();
  R.col(1) = -Vec3::UnitZ();
  R.col(2) = Vec3::UnitY();
  return R;
}

}  // namespace

// ---------------------------------------------------------------------------

PrbmLeg build_leg(const LegStiffness& stiffness, const DesignParams& d) {
  d.validate();
  stiffness.validate();
  PrbmLeg leg;
  leg.segment_length = d.leg_length / kSegments;
  leg.segment_mass = d.leg_density * d.leg_length * d.leg_width * d.leg_thickness / kSegments;
  leg.segment_dims = Vec3(d.leg_width, leg.segment_length, d.leg_thickness);
  const double half = deg2rad(d.leg_twist_deg) / 2.0;
  leg.mount_twist_rad = {0.0, half, half};
  leg.stiffness = stiffness;
  leg.foot_mass = d.foot_density * d.foot_length * d.foot_width * d.foot_height;
  leg.foot_dims = Vec3(d.foot_length, d.foot_height, d.foot_width);
  leg.foot_height = d.foot_height;
  return leg;
}

int PrbmLeg::append_to(Multibody& mb, int parent, const Mat3& mount_R, const Vec3& mount_p, double chirality,
                       const std::string& prefix) const {
  const MassPart seg{segment_mass, Vec3(0.0, segment_length / 2.0, 0.0), box_inertia(segment_mass, segment_dims)};
  const MassPart foot{foot_mass, Vec3(0.0, segment_length + foot_height / 2.0, 0.0), box_inertia(foot_mass, foot_dims)};
  int prev = parent;
  for (int s = 0; s < kSegments; ++s) {
    BodySpec bend;
    bend.name = prefix + "bend" + std::to_string(s + 1);
    bend.parent = prev;
    bend.axis = Vec3::UnitX();
    const Mat3 twist = rot_y(chirality * mount_twist_rad[s]);
    bend.tree_rotation = s == 0 ? Mat3(mount_R * twist) : twist;
    bend.tree_translation = s == 0 ? mount_p : Vec3(0.0, segment_length, 0.0);
    bend.stiffness = stiffness.k_bend;
    bend.damping = stiffness.b_bend;
    const int bend_idx = mb.add_body(bend);

    const MassPart body = s + 1 == kSegments ? combine({seg, foot}) : seg;
    BodySpec tw;
    tw.name = prefix + "seg" + std::to_string(s + 1);
    tw.parent = bend_idx;
    tw.axis = Vec3::UnitY();
    tw.mass = body.mass;
    tw.com = body.com;
    tw.inertia_com = body.inertia;
    tw.stiffness = stiffness.k_twist;
    tw.damping = stiffness.b_twist;
    prev = mb.add_body(tw);
  }
  return prev;
}

// ---------------------------------------------------------------------------

void ContactParams::validate() const {
  if (!(k_n > 0.0) || !(d_n >= 0.0) || !(v_eps > 0.0) || !(torsional_mu >= 0.0) || !(w_eps > 0.0) ||
      points_per_foot < 1 ||
      !std::isfinite(k_n) || !std::isfinite(d_n))
    throw ConfigError("contact: require k_n > 0, d_n >= 0, v_eps > 0, w_eps > 0, torsional_mu >= 0");
}

Vec3 contact_force(const FootPointState& foot, double mu, const ContactParams& p) {
  const double z = foot.position.z();
  if (z > 0.0) return Vec3::Zero();
  const double n = std::max(0.0, -p.k_n * z - p.d_n * foot.velocity.z());
  if (n == 0.0) return Vec3::Zero();
  const Eigen::Vector2d vt = foot.velocity.head<2>();
  const double speed = vt.norm();
  // sat(v / v_eps): linear inside the regularization band, unit outside.
  const Eigen::Vector2d ft = -mu * n * vt / std::max(speed, p.v_eps);
  return {ft.x(), ft.y(), n};
}

// ---------------------------------------------------------------------------

LegStiffness RobotModel::leg_coefficients(int leg) const {
  return {baseline_.k_bend * errors_.d_k_bend[leg], baseline_.b_bend * errors_.d_b_bend[leg],
          baseline_.k_twist * errors_.d_k_twist[leg], baseline_.b_twist * errors_.d_b_twist[leg]};
}

Vec3 RobotModel::base_com() const { return tree_.body(0).com; }

SimState RobotModel::rest_state() const {
  SimState s;
  const double clearance = design_.body_thickness / 2.0 + design_.leg_length + design_.foot_height;
  const double sag = total_mass() * design_.gravity / (kNumLegs * contact_.k_n);
  s.base.position = Vec3(0.0, 0.0, clearance - sag);
  return s;
}

RobotModel build_robot(const DesignParams& d, const LegStiffness& stiffness, const ErrorParams& errors,
                       const ContactParams& contact, const std::vector<PointMass>& attachments) {
  d.validate();
  stiffness.validate();
  errors.validate();
  contact.validate();

  RobotModel m;
  m.design_ = d;
  m.baseline_ = stiffness;
  m.errors_ = errors;
  m.contact_ = contact;
  m.attachments_ = attachments;
  m.leg_ = build_leg(stiffness, d);
  m.rotor_ = RotorGeometry::from(d);
  m.rotor_mid_ = Vec3(0.0, 0.0, d.rotor_height);

  // Mass budget: m_mag covers plate, both rotor masses, four legs and the
  // electronics lumps that take up the remainder.
  const double rotors = 2.0 * d.rotor_mass;
  const double legs = kNumLegs * m.leg_.mass();
  const double residual = errors.m_mag - d.plate_mass - rotors - legs;
  if (residual < 0.0)
    throw ConfigError("mass budget inconsistent: m_mag " + std::to_string(errors.m_mag) +
                      " kg leaves a negative residual body mass");
  for (const auto& pm : attachments)
    if (!(pm.mass >= 0.0) || !pm.position.allFinite()) throw ConfigError("invalid attached point mass");

  const double base_nominal = d.plate_mass + rotors + residual;
  const double lump_z = d.body_thickness / 2.0 + d.electronics_height;
  Vec3 shift = Vec3::Zero();
  if (errors.m_x != 0.0 || errors.m_y != 0.0) {
    if (residual <= 0.0) throw ConfigError("mass offsets need a positive residual body mass");
    shift = Vec3(errors.m_x, errors.m_y, 0.0) * (base_nominal / residual);
  }

  std::vector<MassPart> parts;
  parts.push_back({d.plate_mass, Vec3::Zero(),
                   box_inertia(d.plate_mass, Vec3(d.body_length, d.body_width, d.body_thickness))});
  parts.push_back({rotors, m.rotor_mid_, Mat3::Zero()});
  for (std::size_t i = 0; i < d.electronics_x.size(); ++i)
    parts.push_back({residual * d.electronics_fraction[i], Vec3(d.electronics_x[i], 0.0, lump_z) + shift, Mat3::Zero()});
  const MassPart nominal = combine(parts);
  m.base_mass_ = nominal.mass;
  m.base_com_nominal_ = nominal.com;
  for (const auto& pm : attachments) parts.push_back({pm.mass, pm.position, Mat3::Zero()});
  const MassPart base = combine(parts);

  BodySpec root;
  root.name = "base";
  root.joint = JointKind::Free;
  root.mass = base.mass;
  root.com = base.com;
  root.inertia_com = base.inertia;
  // The rotor masses' weight enters through the shaker wrench, which applies
  // it at the orbiting mass positions.
  root.gravity_mass = base.mass - rotors;
  root.gravity_com = (base.mass * base.com - rotors * m.rotor_mid_) / root.gravity_mass;
  m.tree_.add_body(root);

  const double hx = d.body_length / 2.0 - d.leg_inset;
  const double hy = d.body_width / 2.0 - d.leg_inset;
  const double z = -d.body_thickness / 2.0;
  m.mount_p_ = {Vec3(hx, hy, z), Vec3(hx, -hy, z), Vec3(-hx, hy, z), Vec3(-hx, -hy, z)};
  const Mat3 R = mount_rotation();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const double chirality = (d.mirror_legs && !is_left(leg)) ? -1.0 : 1.0;
    PrbmLeg l = m.leg_;
    l.stiffness = m.leg_coefficients(leg);
    m.foot_body_[leg] = l.append_to(m.tree_, 0, R, m.mount_p_[leg], chirality, std::string(kLegNames[leg]) + "_");
  }
  m.foot_point_ = m.leg_.contact_point();
  const int np = contact.points_per_foot;
  for (int i = 0; i < np; ++i) {
    const double u = np == 1 ? 0.0 : d.foot_length * (static_cast<double>(i) / (np - 1) - 0.5);
    m.foot_points_.push_back(m.foot_point_ + Vec3(u, 0.0, 0.0));
  }
  return m;
}

// ---------------------------------------------------------------------------

LegRig build_leg_rig(const LegStiffness& stiffness, const DesignParams& design, double load_angle_rad) {
  LegRig rig;
  rig.leg = build_leg(stiffness, design);
  Mat3 R0;
  R0.col(0) = -Vec3::UnitY();
  R0.col(1) = Vec3::UnitX();
  R0.col(2) = Vec3::UnitZ();
  rig.clamp_R = R0 * rot_y(load_angle_rad);
  rig.clamp_p = Vec3::Zero();
  rig.tree.set_anchor(Mat3::Identity(), Vec3::Zero());
  rig.tip_body = rig.leg.append_to(rig.tree, -1, rig.clamp_R, rig.clamp_p, 1.0, "");
  rig.tip_point = rig.leg.contact_point();
  return rig;
}

}  // namespace vibrowalk
