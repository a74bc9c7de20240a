// Python bindings for the main operations: graph geometry, spectral
// diagnostics, mode dynamics, soliton profiles, and scenario runs.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "cylflow/geometry.hpp"
#include "cylflow/harness.hpp"

namespace py = pybind11;
using namespace cylflow;

namespace {

// Thin handle: the core passes around shared_ptr<const Grid>, which is not a
// pybind11 holder type.
struct PyGrid {
  GridPtr ptr;
  const Grid& get() const { return *ptr; }
};

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Field field_from_array(const PyGrid& grid, const DoubleArray& arr) {
  const Grid& g = grid.get();
  if (static_cast<std::size_t>(arr.size()) != g.size())
    throw config_error("array size does not match the grid");
  Field f(grid.ptr);
  std::memcpy(f.v.data(), arr.data(), g.size() * sizeof(double));
  return f;
}

py::array_t<double> array_from_field(const Field& f) {
  const Grid& g = *f.grid;
  std::vector<py::ssize_t> shape;
  if (g.spec().k == 2)
    shape = {g.ny(), g.ny(), g.ntheta()};
  else
    shape = {g.ny(), g.ntheta()};
  py::array_t<double> out(shape);
  std::memcpy(out.mutable_data(), f.v.data(), f.v.size() * sizeof(double));
  return out;
}

py::dict mode_state_dict(const ModeState& ms) {
  py::dict d;
  d["tau"] = ms.tau;
  py::list alpha;
  for (double a : ms.alpha) alpha.append(a);
  d["alpha"] = alpha;
  d["Uplus"] = ms.uplus;
  d["U0"] = ms.uzero;
  d["Uminus"] = ms.uminus;
  d["norm2"] = ms.norm2;
  d["S"] = ms.trace();
  d["D"] = ms.det();
  return d;
}

}  // namespace

PYBIND11_MODULE(_cylflow, m) {
  m.doc() = "Renormalized mean-curvature-flow laboratory over generalized cylinders";

  py::register_exception<config_error>(m, "ConfigError");
  py::register_exception<domain_error>(m, "DomainError");
  py::register_exception<input_error>(m, "InputError");
  py::register_exception<solver_error>(m, "SolverError");

  py::class_<PyGrid>(m, "Grid")
      .def(py::init([](int k, int mdim, double R, int ny, int ntheta) {
             return PyGrid{make_grid({k, mdim}, R, ny, ntheta)};
           }),
           py::arg("k"), py::arg("m"), py::arg("R"), py::arg("ny"), py::arg("ntheta"))
      .def_property_readonly("R", [](const PyGrid& g) { return g.get().R(); })
      .def_property_readonly("ny", [](const PyGrid& g) { return g.get().ny(); })
      .def_property_readonly("ntheta", [](const PyGrid& g) { return g.get().ntheta(); })
      .def_property_readonly("hy", [](const PyGrid& g) { return g.get().hy(); })
      .def("y", [](const PyGrid& g, int j) { return g.get().y(j); })
      .def("theta", [](const PyGrid& g, int t) { return g.get().theta(t); });

  m.def(
      "sheet_grid",
      [](double R, int ny, int ntheta) { return PyGrid{make_grid({2, 1}, R, ny, ntheta)}; },
      py::arg("R"), py::arg("ny"), py::arg("ntheta"));

  m.def("evolution_rhs", [](const PyGrid& g, const DoubleArray& v) {
    return array_from_field(evolution_rhs(CylinderGraph(field_from_array(g, v))));
  });
  m.def("mean_curvature", [](const PyGrid& g, const DoubleArray& v) {
    return array_from_field(mean_curvature(CylinderGraph(field_from_array(g, v))));
  });
  m.def("ou_apply", [](const PyGrid& g, const DoubleArray& u) {
    return array_from_field(ou_apply(field_from_array(g, u)));
  });
  m.def("quadratic_form", [](const PyGrid& g, const DoubleArray& u) {
    return array_from_field(quadratic_form(field_from_array(g, u)));
  });
  m.def("expansion_residual", [](const PyGrid& g, const DoubleArray& v) {
    return array_from_field(expansion_residual(CylinderGraph(field_from_array(g, v))));
  });
  m.def("truncate", [](const PyGrid& g, const DoubleArray& u, double rho) {
    return array_from_field(truncate(field_from_array(g, u), rho));
  });
  m.def("chi", &chi);
  m.def("theta_defect", [](const PyGrid& g, const DoubleArray& u, double radius) {
    return theta_defect(field_from_array(g, u), radius);
  });
  m.def("gaussian_area", [](const PyGrid& g, const DoubleArray& v) {
    const GaussianArea a = gaussian_area(CylinderGraph(field_from_array(g, v)));
    return py::make_tuple(a.interior, a.tail, a.total());
  });

  py::class_<SheetDiagnostics>(m, "SheetDiagnostics")
      .def(py::init([](const PyGrid& g, double rho0) {
             return new SheetDiagnostics(g.ptr, rho0);
           }),
           py::arg("grid"), py::arg("rho0"))
      .def("mode_state",
           [](const SheetDiagnostics& d, const PyGrid& g, const DoubleArray& u,
              double tau) { return mode_state_dict(d.mode_state(field_from_array(g, u), tau)); })
      .def("inner",
           [](const SheetDiagnostics& d, const PyGrid& g, const DoubleArray& f,
              const DoubleArray& h) {
             return d.inner(field_from_array(g, f), field_from_array(g, h));
           })
      .def("low_mode_norm2", &SheetDiagnostics::low_mode_norm2);

  m.def("spectral_rhs", [](double a1, double a2, double a3) {
    return spectral_rhs({a1, a2, a3, -1.0});
  });
  m.def("exact_mode_solution", [](double a1, double a2, double a3, double tau0, double tau) {
    const AlphaState s = exact_mode_solution({a1, a2, a3, tau0}, tau);
    return py::make_tuple(s.a1, s.a2, s.a3);
  });
  m.def(
      "integrate_modes",
      [](double a1, double a2, double a3, double tau0, double tau1, int samples,
         double noise_delta) {
        IntegrateOptions io;
        io.samples = samples;
        io.noise_delta = noise_delta;
        const ModeTrajectory traj = integrate_modes({a1, a2, a3, tau0}, tau1, io);
        py::dict d;
        py::list taus, va1, va2, va3;
        for (std::size_t i = 0; i < traj.states.size(); ++i) {
          taus.append(traj.tau[i]);
          va1.append(traj.states[i].a1);
          va2.append(traj.states[i].a2);
          va3.append(traj.states[i].a3);
        }
        d["tau"] = taus;
        d["alpha1"] = va1;
        d["alpha2"] = va2;
        d["alpha3"] = va3;
        const QuantizationMatrix qm = classify_Q(traj);
        py::dict q;
        q["rank"] = qm.rank;
        q["eigs_raw"] = qm.eigs_raw;
        q["eigs_snapped"] = qm.eigs_snapped;
        q["snap_distance"] = qm.snap_distance;
        q["settled"] = qm.settled;
        q["phi"] = qm.phi;
        d["quantization"] = q;
        return d;
      },
      py::arg("a1"), py::arg("a2"), py::arg("a3"), py::arg("tau0"), py::arg("tau1"),
      py::arg("samples") = 400, py::arg("noise_delta") = 0.0);
  m.def("phase_vector_field", [](double x, double y) { return phase_vector_field(x, y); });
  m.def("separatrix_check", []() {
    const SeparatrixReport r = separatrix_check();
    py::dict d;
    d["connector_reached"] = r.connector_reached;
    d["connector_endpoint_error"] = r.connector_endpoint_error;
    d["jacobian_eigs_saddle"] = r.jacobian_eigs_saddle;
    d["jacobian_eigs_source"] = r.jacobian_eigs_source;
    d["reverse_attempts"] = r.reverse_attempts;
    d["reverse_reached_source"] = r.reverse_reached_source;
    d["passed"] = r.passed;
    return d;
  });

  m.def("solve_shrinker", [](double a) {
    const ShrinkerProfile p = solve_shrinker(a);
    py::dict d;
    d["a"] = p.a;
    d["waist"] = p.waist;
    d["endpoint"] = p.endpoint;
    d["y"] = p.y;
    d["u"] = p.u;
    d["residual_fd"] = p.residual_fd;
    return d;
  });
  m.def("solve_bowl", [](double c) {
    const BowlProfile p = solve_bowl(c);
    py::dict d;
    d["c"] = p.c;
    d["r"] = p.r;
    d["h"] = p.h;
    d["residual_fd"] = p.residual_fd;
    return d;
  });

  m.def("run_experiment", [](const std::string& config_json) {
    const ScenarioConfig cfg = parse_scenario(json::parse(config_json));
    const ExperimentResult res = run_experiment(cfg);
    return py::make_tuple(res.passed, res.report.dump());
  });

  m.attr("SQRT2") = constants::sqrt2;
  m.attr("QUANTIZED_EIGENVALUE") = constants::quantized_eigenvalue;
  m.attr("GAUSSIAN_AREA_CYLINDER") = constants::gaussian_area_cylinder;
  m.attr("__version__") = "0.1.0";
}
