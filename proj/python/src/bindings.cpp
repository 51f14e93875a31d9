#include "vibrowalk/cli.hpp"
#include "vibrowalk/config.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace vibrowalk;

namespace {

RotorGeometry geometry(const py::object& design_json) {
  if (design_json.is_none()) return RotorGeometry{};
  const Config c = config_from_json({{"design", nlohmann::json::parse(py::str(design_json).cast<std::string>())}});
  return RotorGeometry::from(c.design);
}

Config parse_config(const std::string& text) {
  Config c = config_from_json(text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text));
  c.validate();
  return c;
}

py::array_t<double> vec(const Vec3& v) { return py::array_t<double>(py::ssize_t{3}, v.data()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Vibration-driven quadruped simulation, calibration and control";
  m.attr("__version__") = version();

  const auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());

  py::class_<ActuationCommand>(m, "ActuationCommand")
      .def(py::init([](double f, double theta) { return ActuationCommand::make(f, theta); }), py::arg("f_hz"),
           py::arg("theta_deg"))
      .def_readonly("f_hz", &ActuationCommand::f_hz)
      .def_readonly("theta_deg", &ActuationCommand::theta_deg)
      .def("mirrored", [](const ActuationCommand& c) { return mirror_command(c); })
      .def("__eq__", [](const ActuationCommand& a, const ActuationCommand& b) { return a == b; })
      .def("__repr__", [](const ActuationCommand& c) {
        return "ActuationCommand(f_hz=" + fmt(c.f_hz) + ", theta_deg=" + fmt(c.theta_deg) + ")";
      });

  py::class_<VelocitySummary>(m, "VelocitySummary")
      .def(py::init([](double vx, double vy, double w) { return VelocitySummary{vx, vy, w}; }), py::arg("vx") = 0.0,
           py::arg("vy") = 0.0, py::arg("w") = 0.0)
      .def_readwrite("vx", &VelocitySummary::vx)
      .def_readwrite("vy", &VelocitySummary::vy)
      .def_readwrite("w", &VelocitySummary::w)
      .def("__repr__", [](const VelocitySummary& s) {
        return "VelocitySummary(vx=" + fmt(s.vx) + ", vy=" + fmt(s.vy) + ", w=" + fmt(s.w) + ")";
      });

  m.def(
      "net_force", [](double t, const ActuationCommand& c, const py::object& d) { return vec(net_force(t, c, geometry(d))); },
      py::arg("t"), py::arg("cmd"), py::arg("design") = py::none(), "Shaker force in the body frame, N");
  m.def(
      "net_torque",
      [](double t, const ActuationCommand& c, const py::object& d) { return vec(net_torque(t, c, geometry(d))); },
      py::arg("t"), py::arg("cmd"), py::arg("design") = py::none(), "Shaker torque about the rotor axis midpoint, N m");
  m.def(
      "max_force", [](double f, const py::object& d) { return max_force(f, geometry(d)); }, py::arg("f_hz"),
      py::arg("design") = py::none());

  m.def(
      "classify_mode", [](const VelocitySummary& s) { return std::string(mode_name(classify_mode(s))); },
      py::arg("summary"));
  m.def(
      "performance_index",
      [](double v_ref, const std::vector<double>& v_load) { return performance_index_value(v_ref, v_load); },
      py::arg("v_ref"), py::arg("v_load"));

  m.def(
      "simulate",
      [](const ActuationCommand& cmd, double duration, const std::string& config) {
        const Config c = parse_config(config);
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = simulate(c.build_model(), cmd, duration, c.run.sim);
        }
        const auto n = static_cast<py::ssize_t>(traj.samples.size());
        py::array_t<double> out({n, py::ssize_t{7}});
        auto a = out.mutable_unchecked<2>();
        for (py::ssize_t i = 0; i < n; ++i) {
          const auto& s = traj.samples[static_cast<std::size_t>(i)];
          const PlanarPose p = s.planar();
          const double row[7] = {s.t, p.x, p.y, s.pose.position.z(), p.yaw, s.vx_body, s.yaw_rate};
          for (int k = 0; k < 7; ++k) a(i, k) = row[k];
        }
        return out;
      },
      py::arg("cmd"), py::arg("duration"), py::arg("config") = "",
      "Columns: t, x, y, z, yaw, vx_body, yaw_rate. `config` is a JSON document.");
  m.def(
      "average_velocities",
      [](const ActuationCommand& cmd, const std::string& config) {
        const Config c = parse_config(config);
        py::gil_scoped_release release;
        const auto traj = simulate(c.build_model(), cmd, c.run.duration, c.run.sim);
        return average_velocities(traj, c.run.settle);
      },
      py::arg("cmd"), py::arg("config") = "");

  m.def(
      "config_hash", [](const std::string& config) { return config_hash(parse_config(config)); },
      py::arg("config") = "");
  m.def(
      "canonical_config", [](const std::string& config) { return canonical_config(parse_config(config)); },
      py::arg("config") = "");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_command(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one CLI command line; returns (exit_code, stdout, stderr).");
}
