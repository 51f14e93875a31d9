#include <doctest.h>

#include "vibrowalk/core.hpp"

using namespace vibrowalk;
using doctest::Approx;

namespace {
void check_vec(const Vec3& a, const Vec3& b, double eps = 1e-12) {
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) < eps);
}
}  // namespace

TEST_CASE("body_frame_velocity") {
  check_vec(body_frame_velocity(Pose{}, Vec3(1, 0, 0)), Vec3(1, 0, 0));
  check_vec(body_frame_velocity(Pose::planar(0, 0, kPi / 2), Vec3(1, 0, 0)), Vec3(0, -1, 0));
  check_vec(body_frame_velocity(Pose::planar(0, 0, kPi), Vec3(0.2, -0.1, 0)), Vec3(-0.2, 0.1, 0));
  check_vec(body_frame_velocity(Pose::planar(0, 0, 0.7), Vec3(0.0, 0.0, 0.3)), Vec3(0, 0, 0.3));
  CHECK_THROWS(body_frame_velocity(Pose{}, Vec3(std::nan(""), 0, 0)));
}

TEST_CASE("mirror_command") {
  CHECK(mirror_command({20, 45}) == ActuationCommand{-20, -45});
  CHECK(mirror_command({0, 0}) == ActuationCommand{0, 0});
  CHECK(mirror_command({-35, 90}) == ActuationCommand{35, -90});
  for (double f : {-35.0, -12.5, 0.0, 7.0, 35.0})
    for (double th : {-90.0, -33.0, 0.0, 15.0, 90.0}) CHECK(mirror_command(mirror_command({f, th})) == ActuationCommand{f, th});
}

TEST_CASE("ActuationCommand::make validates") {
  CHECK(ActuationCommand::make(10, 120).theta_deg == 90.0);
  CHECK_THROWS_AS(ActuationCommand::make(36, 0), ConfigError);
  CHECK_THROWS_AS(ActuationCommand::make(std::nan(""), 0), ConfigError);
  CHECK(ActuationCommand{10, 0}.rotor_rate() == Approx(2 * kPi * 10));
}

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(kPi) == Approx(kPi));
  CHECK(wrap_angle(-kPi) == Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == Approx(-kPi / 2));
  CHECK(wrap_angle(0.25) == 0.25);
}

TEST_CASE("pose yaw round trip") {
  for (double yaw : {-3.0, -1.0, 0.0, 0.5, 3.1}) {
    const Pose p = Pose::planar(0.1, -0.2, yaw);
    CHECK(p.yaw() == Approx(yaw));
    CHECK(p.normalized());
  }
}

TEST_CASE("make_axis") {
  CHECK(make_axis(-35, 35, 5).size() == 15);
  CHECK(make_axis(-90, 90, 15).size() == 13);
  const auto a = make_axis(-90, 90, 15);
  CHECK(a.front() == -90.0);
  CHECK(a.back() == 90.0);
  CHECK(a[6] == 0.0);
}

TEST_CASE("ErrorParams vector round trip") {
  ErrorParams e;
  e.d_k_bend[2] = 1.3;
  e.friction[0] = 0.2;
  e.m_x = 0.004;
  CHECK(ErrorParams::from_vector(e.to_vector()) == e);
  CHECK(ErrorParams::names().size() == 23);
  CHECK(ErrorParams::symmetric(0.54).friction == PerLeg<double>{0.54, 0.54, 0.54, 0.54});
}

TEST_CASE("validation rejects bad inputs") {
  DesignParams d;
  d.leg_length = -1;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  LegStiffness s;
  s.k_bend = -1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  ErrorParams e;
  e.friction[1] = -0.1;
  CHECK_THROWS_AS(e.validate(), ConfigError);
}
