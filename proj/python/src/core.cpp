#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "levy/decay.hpp"
#include "levy/density.hpp"
#include "levy/io.hpp"
#include "levy/mc.hpp"
#include "levy/params.hpp"
#include "levy/spectral.hpp"
#include "levy/suite.hpp"

namespace py = pybind11;
using namespace levy;

namespace {

// Reports cross the boundary as JSON text; the Python side decodes them.
std::string dump(const Json& j) { return j.dump(); }

FitFamily family_of(const std::string& s) {
  if (s == "power") return FitFamily::power;
  if (s == "stretched_exp") return FitFamily::stretched_exp;
  if (s == "exp") return FitFamily::exp;
  throw ConfigError("unknown fit family '" + s + "'", "/fit/family");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Levy intensities, non-local Schrodinger spectra and decay diagnostics";
  m.attr("__version__") = kVersion;

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);
  py::register_exception<InconclusiveError>(m, "InconclusiveError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::object err = py::handle(config_error.ptr())(e.what());
      err.attr("pointer") = e.pointer();
      PyErr_SetObject(config_error.ptr(), err.ptr());
    }
  });

  py::class_<LevyModel>(m, "LevyModel")
      .def_property_readonly("dim", &LevyModel::dim)
      .def_property_readonly("diffusion", &LevyModel::diffusion)
      .def_property_readonly("family", [](const LevyModel& x) { return x.profile().family(); })
      .def_readwrite("name", &LevyModel::name)
      .def("nu", &LevyModel::nu_radial, py::arg("r"))
      .def("psi", py::overload_cast<double>(&LevyModel::psi, py::const_), py::arg("k"))
      .def("big_psi", &LevyModel::big_psi, py::arg("r"))
      .def("pruitt_H", &LevyModel::pruitt_H, py::arg("r"))
      .def("tail_mass", &LevyModel::tail_mass, py::arg("s"))
      .def("to_json", [](const LevyModel& x) { return dump(model_to_json(x)); })
      .def("__repr__", [](const LevyModel& x) {
        return "<LevyModel " + x.profile().family() + " d=" + std::to_string(x.dim()) + ">";
      });

  m.def("stable", &presets::stable, py::arg("d"), py::arg("alpha"), py::arg("diffusion") = 0.0);
  m.def("relativistic", &presets::relativistic, py::arg("d"), py::arg("mass"));
  m.def("polynomial", &presets::polynomial, py::arg("d"), py::arg("gamma"), py::arg("delta"), py::arg("diffusion") = 0.0);
  m.def("subexponential", &presets::subexponential, py::arg("d"), py::arg("gamma"), py::arg("c"), py::arg("beta"),
        py::arg("delta"), py::arg("diffusion") = 0.0);
  m.def("exponential", &presets::exponential, py::arg("d"), py::arg("gamma"), py::arg("c"), py::arg("delta"),
        py::arg("diffusion") = 0.0);
  m.def("superexponential", &presets::superexponential, py::arg("d"), py::arg("gamma"), py::arg("c"), py::arg("beta"),
        py::arg("delta"), py::arg("diffusion") = 0.0);
  m.def("model_from_json", [](const std::string& text) { return model_from_json(parse_json(text)); }, py::arg("text"));

  py::class_<Potential>(m, "Potential")
      .def("__call__", &Potential::operator(), py::arg("r"))
      .def_property_readonly("kind", &Potential::kind)
      .def("to_json", [](const Potential& v) { return dump(potential_to_json(v)); });
  m.def("potential_from_json", [](const std::string& text) { return potential_from_json(parse_json(text)); },
        py::arg("text"));

  m.def(
      "spectrum",
      [](const LevyModel& model, const Potential& v, double L, int N, int k, double tol) {
        Hamiltonian H(model, v, Grid1D(L, N));
        SolverOptions o;
        o.tol = tol;
        auto r = k > 1 ? excited_states(H, k, o) : ground_state(H, o);
        Json j = to_json(r);
        j["x"] = r.grid.nodes();
        j["vectors"] = r.vectors;
        return dump(j);
      },
      py::arg("model"), py::arg("potential"), py::arg("L") = 64.0, py::arg("N") = 4096, py::arg("k") = 1,
      py::arg("tol") = 1e-8);
  m.def(
      "dirichlet_mu", [](const LevyModel& model, double r, double L, int N) { return dirichlet_mu(model, r, Grid1D(L, N)); },
      py::arg("model"), py::arg("r"), py::arg("L") = 32.0, py::arg("N") = 2048);

  m.def(
      "transition_density",
      [](const LevyModel& model, double t, const std::vector<double>& x) { return transition_density(model, t, x).values; },
      py::arg("model"), py::arg("t"), py::arg("x"));

  m.def("k1", [](const LevyModel& model, double s) { return dump(to_json(k1(model, s))); }, py::arg("model"), py::arg("s"));
  m.def("k2", &k2, py::arg("model"), py::arg("s1"), py::arg("s2"), py::arg("s3"));
  m.def("jump_paring_audit", [](const LevyModel& model) { return dump(to_json(jump_paring_audit(model))); },
        py::arg("model"));

  m.def(
      "laplace_hitting",
      [](const LevyModel& model, const std::vector<double>& xs, double r, const std::vector<double>& etas, long paths,
         double eps, double dt, double horizon, std::uint64_t seed, int workers) {
        PathConfig c;
        c.n_paths = paths;
        c.epsilon = eps;
        c.dt = dt;
        c.horizon = horizon;
        c.seed = seed;
        c.workers = workers;
        Json out = Json::array();
        for (auto& e : laplace_hitting(model, c, xs, r, etas)) out.push_back(to_json(e));
        return dump(out);
      },
      py::arg("model"), py::arg("xs"), py::arg("r") = 1.0, py::arg("etas") = std::vector<double>{1.0},
      py::arg("paths") = 10000, py::arg("eps") = 0.1, py::arg("dt") = 1e-3, py::arg("horizon") = 50.0,
      py::arg("seed") = 1, py::arg("workers") = 0);

  m.def(
      "fit_decay",
      [](const std::vector<double>& x, const std::vector<double>& phi, double lo, double hi, const std::string& family) {
        FitSpec s;
        s.family = family_of(family);
        return dump(to_json(fit_decay(x, phi, {lo, hi}, s)));
      },
      py::arg("x"), py::arg("phi"), py::arg("lo"), py::arg("hi"), py::arg("family") = "power");
  m.def(
      "tail_ratio",
      [](const std::vector<double>& x, const std::vector<double>& phi, const LevyModel& model, double lo, double hi,
         double cap) { return dump(to_json(tail_ratio(x, phi, model, {lo, hi}, cap))); },
      py::arg("x"), py::arg("phi"), py::arg("model"), py::arg("lo"), py::arg("hi"), py::arg("cap") = 25.0);

  m.def("criterion_title", &criterion_title, py::arg("id"));
  m.def(
      "run_criterion",
      [](int id, int workers) {
        SuiteOptions o;
        o.workers = workers;
        CriterionResult r;
        {
          py::gil_scoped_release release;
          r = run_criterion(id, o);
        }
        return dump(to_json(r));
      },
      py::arg("id"), py::arg("workers") = 0);
}
