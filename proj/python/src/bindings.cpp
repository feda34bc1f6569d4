#include "commands.hpp"
#include "config.hpp"

#include "fracheat/discrete_operator.hpp"
#include "fracheat/domain_grid.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/potential_theory.hpp"
#include "fracheat/spectral_solver.hpp"
#include "fracheat/stable_kernel.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using fracheat::cli::json;

namespace {

fracheat::cli::RunConfig config_from(const std::string& config_json) {
  const json doc = config_json.empty() ? json::object() : json::parse(config_json);
  return fracheat::cli::make_config(doc, {});
}

std::string run(const std::string& command, const std::string& config_json, bool write) {
  const auto config = config_from(config_json);
  if (command == "audit-all") {
    py::gil_scoped_release release;
    return fracheat::cli::audit_all(config).summary.report.dump();
  }
  fracheat::cli::Artifacts artifacts;
  {
    py::gil_scoped_release release;
    artifacts = fracheat::cli::run_command(command, config);
  }
  if (write) fracheat::cli::write_artifacts(config.out(), command, config.hash, artifacts);
  return artifacts.report.dump();
}

Eigen::VectorXd interval_eigenvalues(double s, double h, std::size_t m, double a, double b) {
  py::gil_scoped_release release;
  auto grid = std::make_shared<const fracheat::DomainGrid>(
      fracheat::DomainGrid::build(fracheat::Domain::interval(a, b), h));
  auto matrices = std::make_shared<const fracheat::OperatorMatrices>(
      fracheat::assemble(fracheat::SpectralMeasure::fractional_laplacian(1, s), grid));
  return fracheat::eigenpairs(matrices, m).values;
}

}  // namespace

PYBIND11_MODULE(_fracheat, mod) {
  mod.doc() = "Native core of the fracheat package";

  py::register_exception<fracheat::ValidationError>(mod, "ValidationError", PyExc_ValueError);
  py::register_exception<fracheat::NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  mod.def("run", &run, py::arg("command"), py::arg("config_json") = "", py::arg("write") = false);
  mod.def("command_names", &fracheat::cli::command_names);
  mod.def("default_config_json", [] { return fracheat::cli::default_config().dump(); });
  mod.def("config_hash", [](const std::string& config_json) { return config_from(config_json).hash; });

  mod.def("fractional_symbol", [](int n, double s, double xi1, double xi2) {
    const fracheat::SymbolProfile profile(fracheat::SpectralMeasure::fractional_laplacian(n, s));
    return fracheat::symbol(profile, fracheat::Vec2(xi1, n == 1 ? 0.0 : xi2));
  }, py::arg("n"), py::arg("s"), py::arg("xi1"), py::arg("xi2") = 0.0);
  mod.def("operator_normalization", &fracheat::operator_normalization);
  mod.def("riesz_constant", &fracheat::riesz_constant);
  mod.def("heat_kernel", [](double s, double x, double t) {
    return fracheat::KernelProfile(1, s).heat_kernel(x, t);
  });
  mod.def("interval_eigenvalues", &interval_eigenvalues, py::arg("s"), py::arg("h"), py::arg("m"),
          py::arg("a") = -1.0, py::arg("b") = 1.0);
  mod.def("bootstrap", [](int n, const std::string& s) {
    const auto plan = fracheat::bootstrap_exponents(n, s);
    py::dict d;
    d["n"] = plan.n;
    d["s"] = plan.s;
    d["branch"] = fracheat::to_string(plan.branch);
    d["exponents"] = plan.exponents;
    d["exponent_values"] = plan.exponent_values;
    d["critical_exponent"] = plan.critical_exponent;
    d["N"] = plan.steps;
    d["w"] = plan.w;
    d["reduction"] = plan.reduction;
    return d;
  });
}
