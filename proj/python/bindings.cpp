#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "hypoflow/collision.hpp"
#include "hypoflow/config.hpp"
#include "hypoflow/errors.hpp"
#include "hypoflow/experiments.hpp"
#include "hypoflow/hermite.hpp"
#include "hypoflow/inequalities.hpp"
#include "hypoflow/mode_analysis.hpp"

namespace py = pybind11;
using namespace hypoflow;

namespace {

py::dict constant_dict(const ConstantReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["d"] = r.d;
  d["lambda_coarse"] = r.lambda_coarse;
  d["lambda_fine"] = r.lambda_fine;
  d["drift"] = r.drift;
  d["ladder_n"] = r.ladder_n;
  d["ladder_lambda"] = r.ladder_lambda;
  d["witness_degree"] = r.witness_degree;
  d["pass"] = r.pass;
  d["verdict"] = r.verdict;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hypoflow, m) {
  m.doc() = "Spectral hypocoercivity lab: experiment runner and selected numerical kernels";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("experiments", [] {
    std::vector<std::string> ids;
    for (const auto& e : experiment_registry()) ids.push_back(e.id);
    return ids;
  }, "Registered experiment ids.");

  m.def("run_experiment_json",
        [](const std::string& id, const std::string& config_text, const std::string& out_dir, std::optional<std::uint64_t> seed) {
          RunManifest man;
          {
            py::gil_scoped_release release;
            man = run_experiment(id, Config::parse(config_text, "<python>"), out_dir, seed);
          }
          return man.to_json().dump();
        },
        py::arg("experiment"), py::arg("config") = "", py::arg("out_dir"), py::arg("seed") = py::none(),
        "Run one experiment and return its manifest as JSON text.");

  m.def("exit_code_for", [](const std::string& status) {
    for (RunStatus s : {RunStatus::Pass, RunStatus::Fail, RunStatus::ConfigError, RunStatus::NumericError})
      if (status_name(s) == status) return exit_code(s);
    throw ConfigError("unknown status '" + status + "'");
  });

  m.def("sigma_index_exact", [](long long q_num, long long q_den, int mm, int d) {
    const Rational r = sigma_index_exact(q_num, q_den, mm, d);
    return py::make_tuple(r.num, r.den);
  }, py::arg("q_num"), py::arg("q_den"), py::arg("m"), py::arg("d"));

  m.def("coercivity_constant", [](const std::string& model, int d, int n) {
    return coercivity_constant(assemble_L(parse_model(model), enumerate_basis(d, n)));
  }, py::arg("model"), py::arg("d"), py::arg("N"));

  m.def("collision_frequency", [](std::vector<double> xi) {
    return collision_frequency_nu(xi, static_cast<int>(xi.size()));
  }, py::arg("xi"));

  m.def("poincare_constant", [](int d, int n) { return constant_dict(poincare_constant(d, n)); }, py::arg("d"), py::arg("N"));
  m.def("korn_constant", [](int d, int n0, int n1) { return constant_dict(korn_constant(d, n0, n1)); },
        py::arg("d"), py::arg("N_coarse"), py::arg("N_fine"));
  m.def("korn_gradient_constant", [](int d, int n0, int n1) { return constant_dict(korn_gradient_constant(d, n0, n1)); },
        py::arg("d"), py::arg("N_coarse"), py::arg("N_fine"));
}
