#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nemalab/errors.hpp"
#include "nemalab/lab.hpp"
#include "nemalab/littlewood_paley.hpp"
#include "nemalab/spectral.hpp"

namespace py = pybind11;
using namespace nemalab;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

RealField field_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double period) {
  if (a.ndim() != 2 && a.ndim() != 3) throw std::invalid_argument("expected a 2D or 3D array");
  for (int i = 1; i < a.ndim(); ++i)
    if (a.shape(i) != a.shape(0)) throw std::invalid_argument("expected a cubic array");
  const Grid g = Grid::cube(static_cast<int>(a.ndim()), static_cast<int>(a.shape(0)), period);
  return RealField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict masses_dict(const BlockMasses& m) {
  py::dict d;
  for (int q = m.q_min; q <= m.q_max(); ++q) d[py::int_(q)] = m.at(q);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the nemalab C++ core";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverBreakdown>(m, "SolverBreakdown", PyExc_RuntimeError);

  m.attr("experiments") = lab::kExperiments;

  m.def("default_config", [](const std::string& e) { return to_python(lab::default_config(e)); },
        py::arg("experiment") = "run");

  m.def(
      "run_experiment",
      [](const std::string& experiment, const std::vector<std::string>& overrides, std::optional<std::string> config,
         std::optional<std::string> out) {
        const auto cfg = lab::resolve_config(
            experiment, config ? std::optional<std::filesystem::path>(*config) : std::nullopt, overrides);
        lab::ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = lab::run_experiment(cfg);
        }
        if (out) lab::write_artifacts(r, cfg, *out);
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : r.checks) checks.push_back(c.to_json());
        nlohmann::json j{{"experiment", r.experiment}, {"pass", r.pass()},       {"exit_code", r.exit_code()},
                         {"seconds", r.seconds},       {"checks", checks},       {"report", r.report}};
        if (r.breakdown) j["breakdown"] = *r.breakdown;
        return to_python(j);
      },
      py::arg("experiment"), py::arg("overrides") = std::vector<std::string>{}, py::arg("config") = py::none(),
      py::arg("out") = py::none());

  m.def("psi", &DyadicPartition::standard_psi, py::arg("r"), "Dyadic profile psi(r)");

  m.def(
      "partition_of_unity_defect",
      [](int dim, int n, double period) { return partition_of_unity_defect(DyadicPartition(Grid::cube(dim, n, period))); },
      py::arg("dim"), py::arg("n"), py::arg("period"));

  m.def(
      "block_masses",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double period) {
        const RealField f = field_from_array(a, period);
        return masses_dict(block_masses(transform_forward(f), DyadicPartition(f.grid())));
      },
      py::arg("samples"), py::arg("period"), "L2 mass of every dyadic block of a periodic sample array");

  m.def(
      "besov_norm",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double period, double s) {
        const RealField f = field_from_array(a, period);
        return besov_norm(f, DyadicPartition(f.grid()), s);
      },
      py::arg("samples"), py::arg("period"), py::arg("s"));

  m.def(
      "hybrid_norm",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double period, double s, double t) {
        const RealField f = field_from_array(a, period);
        return hybrid_norm(f, DyadicPartition(f.grid()), HybridSpec{s, t, 0});
      },
      py::arg("samples"), py::arg("period"), py::arg("s"), py::arg("t"));
}
