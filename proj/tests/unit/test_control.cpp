#include <doctest.h>

#include "vibrowalk/control.hpp"

#include <random>

using namespace vibrowalk;
using doctest::Approx;

namespace {

UnicycleSurrogate surrogate(PlanarPose start = {}) { return UnicycleSurrogate(SurrogateParams{}, ActuationTable{}, start); }

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto orient = [](Point2 p, Point2 q, Point2 r) { return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x); };
  return orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0;
}

}  // namespace

TEST_CASE("heading_error") {
  CHECK(heading_error({0, 0, 0}, {1, 1}) == Approx(kPi / 4));
  CHECK(heading_error({0, 0, kPi / 2}, {1, 0}) == Approx(-kPi / 2));
  CHECK(heading_error({0, 0, 0}, {-1, 0}) == Approx(kPi));
  CHECK(heading_error({1, 1, 3.0}, {1, 0}) == Approx(wrap_angle(-kPi / 2 - 3.0)));
  CHECK_THROWS(heading_error({1, 2, 0}, {1, 2}));
}

TEST_CASE("switching law") {
  ControllerConfig cfg;
  SwitchState s;
  CHECK(switching_mode(0.5, cfg, s) == LocomotionMode::LeftTurn);
  CHECK(switching_mode(-0.5, cfg, s) == LocomotionMode::RightTurn);
  CHECK(switching_mode(0.05, cfg, s) == LocomotionMode::RightTurn);
  CHECK(switching_mode(0.1, cfg, s) == LocomotionMode::RightTurn);
  CHECK(switching_mode(0.11, cfg, s) == LocomotionMode::LeftTurn);
  CHECK(switching_mode(-0.05, cfg, s) == LocomotionMode::LeftTurn);

  cfg.three_state = true;
  CHECK(switching_mode(0.05, cfg, s) == LocomotionMode::LinearTranslation);
  CHECK(switching_mode(-0.3, cfg, s) == LocomotionMode::RightTurn);

  const ActuationTable t;
  CHECK(switching_command(0.3, cfg, t, s) == ActuationCommand{-30, 90});

  // Odd symmetry outside the deadband.
  cfg.three_state = false;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1000001, kPi);
  for (int k = 0; k < 200; ++k) {
    SwitchState a, b;
    const double e = u(rng);
    CHECK(switching_mode(e, cfg, a) == LocomotionMode::LeftTurn);
    CHECK(switching_mode(-e, cfg, b) == LocomotionMode::RightTurn);
  }

  ControllerConfig bad;
  bad.deadband = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  ActuationTable missing;
  missing.commands.erase(LocomotionMode::RightTurn);
  CHECK_THROWS_AS(missing.validate(), ConfigError);
  ActuationTable wide;
  wide.commands[LocomotionMode::LeftTurn] = {40, 0};
  CHECK_THROWS_AS(wide.validate(), ConfigError);
}

TEST_CASE("surrogate kinematics") {
  auto p = surrogate({0, 0, kPi / 2});
  p.apply(ActuationTable{}.at(LocomotionMode::LinearTranslation), 1.0);
  CHECK(p.pose().x == Approx(0.0).epsilon(1e-12));
  CHECK(p.pose().y == Approx(0.1));
  CHECK(p.time() == Approx(1.0));
  p.apply(ActuationCommand{}, 2.0);
  CHECK(p.pose().y == Approx(0.1));
  p.apply(ActuationTable{}.at(LocomotionMode::LeftTurn), kPi);
  CHECK(p.pose().yaw == Approx(-kPi / 2).epsilon(1e-3));
  // A full half circle of radius 0.1 moves the position 0.2 to the left of
  // the initial heading.
  CHECK(p.pose().x == Approx(-0.2).epsilon(1e-4));
  p.displace(1, 1, 0);
  CHECK(p.pose().x == Approx(0.8).epsilon(1e-4));
}

TEST_CASE("single waypoint behind the robot") {
  auto p = surrogate();
  ControllerConfig cfg;
  const auto r = run_tracking(p, {{-1.0, -0.01}}, cfg, ActuationTable{}, 60.0);
  CHECK(r.success);
  REQUIRE(r.modes.size() > 10);
  // Target is behind and slightly right: saturated right turn first.
  for (int k = 0; k < 10; ++k) CHECK(r.modes[k] == LocomotionMode::RightTurn);
  CHECK(r.events.size() == 2);
  CHECK(r.events[0].type == "capture");
  CHECK(r.events[1].type == "complete");
  CHECK(r.completion_time > 0.0);

  auto q = surrogate();
  const auto miss = run_tracking(q, {{5.0, 5.0}}, cfg, ActuationTable{}, 1.0);
  CHECK_FALSE(miss.success);
  CHECK(miss.captured == 0);
  CHECK(miss.events.empty());
  CHECK(miss.modes.size() == 10);
  CHECK(miss.trajectory.samples.size() == 11);
}

TEST_CASE("figure-eight waypoints") {
  const auto w = figure_eight_waypoints({0, 0}, 0.5, 9);
  REQUIRE(w.size() == 9);
  CHECK(w.front().x == Approx(w.back().x));
  CHECK(w.front().y == Approx(w.back().y).epsilon(1e-12));
  int crossings = 0;
  Point2 where{};
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    for (std::size_t j = i + 2; j + 1 < w.size(); ++j)
      if (segments_cross(w[i], w[i + 1], w[j], w[j + 1])) {
        ++crossings;
        where = w[i];
      }
  CHECK(crossings == 1);
  (void)where;
  for (const auto& p : w) {
    CHECK(std::abs(p.x) <= 1.0 + 1e-12);
    CHECK(std::abs(p.y) <= 0.5 + 1e-12);
  }
  const auto big = figure_eight_waypoints({1, 2}, 1.0, 9);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(big[i].x - 1 == Approx(2 * w[i].x));
    CHECK(big[i].y - 2 == Approx(2 * w[i].y).epsilon(1e-9));
  }
  CHECK_THROWS_AS(figure_eight_waypoints({0, 0}, 0.0, 9), ConfigError);
  CHECK_THROWS_AS(figure_eight_waypoints({0, 0}, 1.0, 3), ConfigError);
}

TEST_CASE("surrogate figure-eight") {
  auto p = surrogate();
  const auto w = figure_eight_waypoints({0, 0}, 0.5, 9);
  const auto r = run_tracking(p, std::vector<Point2>(w.begin() + 1, w.end()), ControllerConfig{}, ActuationTable{}, 120);
  CHECK(r.success);
  CHECK(r.captured == 8);
  CHECK(r.completion_time < 120);
}

TEST_CASE("return to origin") {
  ControllerConfig cfg;
  auto p = surrogate({0.8, -0.6, 1.0});
  const auto r = return_to_origin(p, cfg, ActuationTable{}, {}, 30.0);
  CHECK(r.success);
  CHECK(r.events.back().type == "success");

  auto q = surrogate();
  const auto d = return_to_origin(q, cfg, ActuationTable{}, {{5.0, 0.3, 0.4, 0.0}}, 40.0);
  CHECK(d.success);
  bool seen = false;
  for (const auto& e : d.events)
    if (e.type == "disturbance") {
      seen = true;
      CHECK(e.t == Approx(5.0));
      CHECK(e.payload.find("magnitude=0.5") != std::string::npos);
    }
  CHECK(seen);

  ControllerConfig zero;
  zero.capture_radius = 0.0;
  auto z = surrogate({0.5, 0, 0});
  const auto never = return_to_origin(z, zero, ActuationTable{}, {}, 10.0);
  CHECK_FALSE(never.success);
  CHECK(never.events.back().type == "failure");

  auto bad = surrogate();
  CHECK_THROWS_AS(return_to_origin(bad, cfg, ActuationTable{}, {{NAN, 0, 0, 0}}, 1.0), ConfigError);
}
