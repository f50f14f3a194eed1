#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "auxcell/config.hpp"
#include "auxcell/error.hpp"
#include "auxcell/optimizer.hpp"

namespace py = pybind11;
using namespace auxcell;

namespace {

// Configs cross the boundary as canonical JSON text so Python never sees a
// half-validated struct.
Config from_json(const std::string& text) {
  Config config = parse_config(text);
  config.validate();
  return config;
}

py::dict evaluation_dict(const Evaluation& eval) {
  py::dict d;
  d["A"] = eval.homogenized.tensor.voigt();
  d["A1111"] = eval.homogenized.a1111();
  d["A1122"] = eval.homogenized.a1122();
  d["A2222"] = eval.homogenized.a2222();
  d["A1212"] = eval.homogenized.a1212();
  d["objective"] = eval.objective;
  d["volumes"] = eval.volumes;
  try {
    d["nu_app"] = apparent_poisson(eval.homogenized.tensor);
  } catch (const DegenerateTensor&) {
    d["nu_app"] = py::none();
  }
  return d;
}

py::dict record_dict(const IterationRecord& r) {
  py::dict d;
  d["iteration"] = r.iteration;
  d["objective"] = r.objective;
  d["A1111"] = r.a1111;
  d["A1122"] = r.a1122;
  d["A2222"] = r.a2222;
  d["A1212"] = r.a1212;
  d["volumes"] = r.volumes;
  d["multipliers"] = r.multipliers;
  d["dt"] = r.dt;
  d["line_search_trials"] = r.line_search_trials;
  d["reinitialized"] = r.reinitialized;
  d["stagnated"] = r.stagnated;
  return d;
}

// Level sets on the (n, n) periodic grid, row j holding y index j.
py::array_t<double> as_grid(const NodalField& phi, int n) {
  py::array_t<double> out({n, n});
  auto view = out.mutable_unchecked<2>();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) view(j, i) = phi[j * n + i];
  return out;
}

class PyOptimizer {
 public:
  PyOptimizer(const std::string& config_json, int threads)
      : opt_(std::make_unique<Optimizer>(from_json(config_json), threads)), state_(opt_->initial_state()) {}

  int iteration() const { return state_.iteration; }
  py::dict evaluation() const { return evaluation_dict(state_.current); }

  py::list step(int count) {
    py::list rows;
    for (int k = 0; k < count; ++k) {
      IterationRecord record;
      {
        py::gil_scoped_release release;
        state_ = opt_->step(state_, &record);
      }
      rows.append(record_dict(record));
    }
    return rows;
  }

  py::tuple level_sets() const {
    const int n = opt_->mesh().n();
    return py::make_tuple(as_grid(state_.level_sets.phi[0], n), as_grid(state_.level_sets.phi[1], n));
  }

  std::string config_json() const { return serialize_config(opt_->config()); }

 private:
  std::unique_ptr<Optimizer> opt_;
  OptState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the auxcell C++ core";

  auto base = py::register_exception<Error>(m, "AuxcellError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("preset_names", &preset_names);
  m.def(
      "preset", [](const std::string& name) { return serialize_config(preset(name)); }, py::arg("name"),
      "Canonical JSON of a built-in preset.");
  m.def(
      "parse_config", [](const std::string& text) { return serialize_config(from_json(text)); },
      py::arg("text"), "Validates a JSON config and returns it with every default filled in.");
  m.def(
      "isotropic_tensor",
      [](double young, double poisson, bool plane_strain) {
        return Eigen::Matrix3d(
            isotropic_tensor(young, poisson, plane_strain ? PlaneModel::Strain : PlaneModel::Stress).voigt());
      },
      py::arg("young"), py::arg("poisson"), py::arg("plane_strain") = false,
      "Voigt matrix in the (11, 22, 12) basis with engineering shear.");
  m.def(
      "apparent_poisson", [](const Eigen::Matrix3d& voigt) { return apparent_poisson(ElasticTensor4(voigt)); },
      py::arg("voigt"));
  m.def(
      "homogenize",
      [](const std::string& config_json, int threads) {
        Evaluation eval;
        {
          py::gil_scoped_release release;
          const Optimizer opt(from_json(config_json), threads);
          eval = opt.initial_state().current;
        }
        return evaluation_dict(eval);
      },
      py::arg("config"), py::arg("threads") = 1, "Solves the cell problems for the initial design.");

  py::class_<PyOptimizer>(m, "Optimizer")
      .def(py::init<const std::string&, int>(), py::arg("config"), py::arg("threads") = 1)
      .def_property_readonly("iteration", &PyOptimizer::iteration)
      .def("evaluation", &PyOptimizer::evaluation)
      .def("step", &PyOptimizer::step, py::arg("count") = 1, "Advances the design; returns one row per step.")
      .def("level_sets", &PyOptimizer::level_sets)
      .def("config", &PyOptimizer::config_json);
}
