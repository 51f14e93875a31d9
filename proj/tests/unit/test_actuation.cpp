#include <doctest.h>

#include "vibrowalk/actuation.hpp"

#include <random>

using namespace vibrowalk;
using doctest::Approx;

namespace {
const RotorGeometry kGeom;
constexpr double kTwoMg = 2 * 0.012 * 9.81;
}  // namespace

TEST_CASE("rotor_positions") {
  auto rs = rotor_positions(0.0, {10, 0}, kGeom);
  CHECK(rs.r1.x() == Approx(0.028));
  CHECK(rs.r1.y() == Approx(0.0));
  CHECK(rs.r1.z() == Approx(0.014));
  CHECK(rs.r2.x() == Approx(0.028));
  CHECK(rs.r2.z() == Approx(-0.014));

  rs = rotor_positions(0.0, {10, 90}, kGeom);
  CHECK(rs.r1.x() == Approx(0.0).scale(1e-3));
  CHECK(rs.r1.y() == Approx(0.028));
  CHECK(rs.r2.y() == Approx(0.028));

  rs = rotor_positions(0.05, {10, 0}, kGeom);
  CHECK(rs.r1.x() == Approx(-0.028));
  CHECK(std::abs(rs.r1.y()) < 1e-15);
  CHECK(rs.r1.z() == Approx(0.014));
}

TEST_CASE("rotor state invariants") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 200; ++k) {
    const auto rs = rotor_positions(u(rng), {35 * u(rng), 90 * u(rng)}, kGeom);
    CHECK(std::abs(rs.r1.z() - 0.014) < 1e-12);
    CHECK(std::abs(rs.r2.z() + 0.014) < 1e-12);
    CHECK(std::abs(rs.r1.head<2>().norm() - 0.028) < 1e-12);
    CHECK(std::abs(rs.r2.head<2>().norm() - 0.028) < 1e-12);
  }
}

TEST_CASE("net_force examples") {
  for (double th : {-90.0, 0.0, 37.0}) {
    const Vec3 F = net_force(0.3, {0, th}, kGeom);
    CHECK(F.x() == 0.0);
    CHECK(F.y() == 0.0);
    CHECK(F.z() == Approx(-0.23544));
  }
  Vec3 F = net_force(0.0, {10, 0}, kGeom);
  CHECK(F.x() == Approx(2.6529).epsilon(2e-5));
  CHECK(F.y() == 0.0);
  CHECK(F.z() == Approx(-kTwoMg));
  F = net_force(0.025, {10, 0}, kGeom);  // Omega t = pi / 2
  CHECK(std::abs(F.x()) < 1e-12);
  CHECK(F.z() == Approx(-0.23544));
}

TEST_CASE("net_torque examples") {
  for (double f : {0.0, 10.0, -35.0}) {
    Vec3 T = net_torque(0.0, {f, 0}, kGeom);
    CHECK(std::abs(T.x()) < 1e-15);
    CHECK(T.y() == Approx(0.0065923).epsilon(1e-4));
    CHECK(T.z() == 0.0);
    T = net_torque(0.0, {f, 90}, kGeom);
    CHECK(T.x() == Approx(-0.0065923).epsilon(1e-4));
    CHECK(std::abs(T.y()) < 1e-15);
    CHECK(T.z() == 0.0);
  }
}

TEST_CASE("rotor_wrench_numeric agrees with the closed forms") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ut(0, 1), uf(-35, 35), uth(-90, 90);
  for (int k = 0; k < 1000; ++k) {
    const ActuationCommand cmd{uf(rng), uth(rng)};
    const double t = ut(rng);
    const Wrench w = rotor_wrench_numeric(t, cmd, kGeom);
    const Vec3 F = net_force(t, cmd, kGeom), T = net_torque(t, cmd, kGeom);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(w.force[i] - F[i]) < 1e-9 * (1 + std::abs(F[i])));
      CHECK(std::abs(w.torque[i] - T[i]) < 1e-9 * (1 + std::abs(T[i])));
    }
  }
  const Wrench still = rotor_wrench_numeric(0.4, {0, 30}, kGeom);
  CHECK(still.force.x() == 0.0);
  CHECK(still.force.z() == Approx(-0.23544));
  const Wrench diag = rotor_wrench_numeric(0.0, {10, 45}, kGeom);
  CHECK(diag.force.x() == Approx(diag.force.y()).epsilon(1e-12));
}

TEST_CASE("max_force") {
  CHECK(max_force(0, kGeom) == 0.0);
  CHECK(max_force(10, kGeom) == Approx(2.6529).epsilon(2e-5));
  CHECK(max_force(35, kGeom) == Approx(32.4986).epsilon(2e-6));
  CHECK(max_force(20, kGeom) == Approx(4 * max_force(10, kGeom)).epsilon(1e-14));
  CHECK(max_force(-12, kGeom) == max_force(12, kGeom));
  double prev = 0;
  for (double f = 1; f <= 35; f += 1) {
    CHECK(max_force(f, kGeom) > prev);
    prev = max_force(f, kGeom);
  }
}

TEST_CASE("actuation properties") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ut(0, 1), uf(-35, 35), uth(-90, 90);
  for (int k = 0; k < 300; ++k) {
    double f = uf(rng);
    if (std::abs(f) < 0.5) f = 0.5;
    const ActuationCommand cmd{f, uth(rng)};
    const double t = ut(rng);
    // Periodicity.
    const Vec3 a = net_force(t, cmd, kGeom), b = net_force(t + 1.0 / std::abs(f), cmd, kGeom);
    CHECK((a - b).norm() < 1e-12 * (1 + a.norm()) * 100);
    // Mirror.
    const ActuationCommand m = mirror_command(cmd);
    const Vec3 Fm = net_force(t, m, kGeom), Tm = net_torque(t, m, kGeom), T = net_torque(t, cmd, kGeom);
    CHECK(Fm.x() == Approx(a.x()).epsilon(1e-12).scale(1));
    CHECK(Fm.y() == Approx(-a.y()).epsilon(1e-12).scale(1));
    CHECK(Tm.x() == Approx(-T.x()).epsilon(1e-12).scale(1));
    CHECK(Tm.y() == Approx(T.y()).epsilon(1e-12).scale(1));
    // Direction.
    const double th = cmd.theta_rad();
    CHECK(std::abs(a.x() * std::sin(th) - a.y() * std::cos(th)) < 1e-12);
  }
}

TEST_CASE("shaker_wrench matches net force at the ideal phase") {
  const ActuationCommand cmd{17, -30};
  const double t = 0.0123;
  const Wrench w = shaker_wrench(cmd.rotor_rate() * t, cmd.rotor_rate(), cmd.theta_rad(), kGeom);
  CHECK((w.force - net_force(t, cmd, kGeom)).norm() < 1e-12);
  CHECK((w.torque - net_torque(t, cmd, kGeom)).norm() < 1e-12);
}
