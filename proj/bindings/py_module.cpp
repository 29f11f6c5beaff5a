#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "amg/calibration.hpp"
#include "amg/contact.hpp"
#include "amg/elliptic.hpp"
#include "amg/grid.hpp"
#include "amg/pde.hpp"
#include "amg/rigidity.hpp"
#include "amg/runner.hpp"
#include "amg/verify.hpp"
#include "amg/wulff.hpp"

namespace py = pybind11;
using namespace amg;

PYBIND11_MODULE(_amg, m) {
  m.doc() = "Anisotropic minimal graph toolkit";
  m.attr("__version__") = kToolkitVersion;

  py::class_<Integrand>(m, "Integrand")
      .def_static("isotropic", &Integrand::isotropic, py::arg("ambient_dim"))
      .def_static("ellipsoidal", &Integrand::ellipsoidal, py::arg("Q"))
      .def_static("perturbed_isotropic", &Integrand::perturbed_isotropic,
                  py::arg("ambient_dim"), py::arg("amplitude"))
      .def("flipped", &Integrand::flipped)
      .def_property_readonly("ambient_dim", &Integrand::ambient_dim)
      .def_property_readonly("base_dim", &Integrand::base_dim)
      .def("value", &Integrand::value)
      .def("gradient", &Integrand::gradient)
      .def("hessian", &Integrand::hessian)
      .def("tangential_hessian", &Integrand::tangential_hessian)
      .def("wulff_boundary", &Integrand::wulff_boundary)
      .def("graph_value", &Integrand::graph_value)
      .def("graph_gradient", &Integrand::graph_gradient)
      .def("graph_hessian", &Integrand::graph_hessian)
      .def("ellipticity_bounds", &Integrand::ellipticity_bounds,
           py::arg("gradient_bound"), py::arg("direction_samples") = 64,
           py::arg("radial_samples") = 33)
      .def("pucci_lambda", &Integrand::pucci_lambda)
      .def("max_curvature_radius", &Integrand::max_curvature_radius,
           py::arg("samples") = 512)
      .def("min_horizontal_extent", &Integrand::min_horizontal_extent,
           py::arg("samples") = 256);

  m.def("sphere_lattice", &sphere_lattice);
  m.def("tangent_basis", &tangent_basis);

  py::enum_<NodeKind>(m, "NodeKind")
      .value("Outside", NodeKind::Outside)
      .value("Interior", NodeKind::Interior)
      .value("Dirichlet", NodeKind::Dirichlet);

  py::class_<DiscreteGraph>(m, "DiscreteGraph")
      .def_readonly("n", &DiscreteGraph::n)
      .def_readonly("origin", &DiscreteGraph::origin)
      .def_readonly("h", &DiscreteGraph::h)
      .def_readonly("nx", &DiscreteGraph::nx)
      .def_readonly("ny", &DiscreteGraph::ny)
      .def_readonly("w", &DiscreteGraph::w)
      .def_readonly("domain_tag", &DiscreteGraph::domain_tag)
      .def("size", &DiscreteGraph::size)
      .def("pos", &DiscreteGraph::pos)
      .def("in_domain", &DiscreteGraph::in_domain)
      .def("interior", &DiscreteGraph::interior)
      .def("value_range", &DiscreteGraph::value_range)
      .def("interpolate", &DiscreteGraph::interpolate);

  m.def("make_rectangle", &make_rectangle, py::arg("n"), py::arg("origin"),
        py::arg("h"), py::arg("nx"), py::arg("ny"), py::arg("data"));
  m.def("make_domain", &make_domain, py::arg("n"), py::arg("origin"),
        py::arg("h"), py::arg("nx"), py::arg("ny"), py::arg("inside"),
        py::arg("data"), py::arg("tag") = "rectangle");
  m.def("rescale", &rescale);
  m.def("write_csv", &write_csv);
  m.def("write_wgrf", &write_wgrf);
  m.def("read_wgrf", &read_wgrf);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("tol_res", &SolveOptions::tol_res)
      .def_readwrite("tol_step", &SolveOptions::tol_step)
      .def_readwrite("max_iterations", &SolveOptions::max_iterations);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("final_residual", &SolveReport::final_residual)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("max_principle_ok", &SolveReport::max_principle_ok)
      .def_readonly("tol_res", &SolveReport::tol_res);

  m.def("solve_dirichlet", &solve_dirichlet, py::arg("phi"), py::arg("domain"),
        py::arg("options") = SolveOptions{},
        py::arg("use_initial_guess") = false);
  m.def("residual", &residual);

  py::class_<PucciParams>(m, "PucciParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &PucciParams::lambda);
  m.def("pucci_minus", &pucci_minus);

  py::class_<BarrierSpec>(m, "BarrierSpec")
      .def(py::init<double, double, int, Vec>(), py::arg("M"),
           py::arg("delta"), py::arg("n"), py::arg("center") = Vec())
      .def_property_readonly("exponent", &BarrierSpec::exponent)
      .def("value", &BarrierSpec::value)
      .def("radial_value", &BarrierSpec::radial_value)
      .def("hessian", &BarrierSpec::hessian);
  m.def("choose_barrier_exponent", &choose_barrier_exponent, py::arg("params"),
        py::arg("n"), py::arg("delta"), py::arg("radial_samples") = 1000);

  m.def("anisotropic_area", &anisotropic_area, py::arg("phi"), py::arg("g"),
        py::arg("region") = nullptr);
  m.def("competitor_gap", &competitor_gap);

  py::class_<ContactSummary>(m, "ContactSummary")
      .def_readonly("delta", &ContactSummary::delta)
      .def_readonly("r", &ContactSummary::r)
      .def_readonly("num_centers", &ContactSummary::num_centers)
      .def_readonly("num_contacts", &ContactSummary::num_contacts)
      .def_readonly("covered_area", &ContactSummary::covered_area)
      .def_readonly("deficit_sampled", &ContactSummary::deficit_sampled)
      .def_readonly("deficit_ball", &ContactSummary::deficit_ball)
      .def_readonly("max_det", &ContactSummary::max_det);
  py::class_<ContactOptions>(m, "ContactOptions")
      .def(py::init<>())
      .def_readwrite("C2", &ContactOptions::C2)
      .def_readwrite("C3", &ContactOptions::C3);
  m.def(
      "run_contact_experiment",
      [](const Integrand& phi, const DiscreteGraph& g, double delta,
         const ContactOptions& o) {
        return run_contact_experiment(phi, g, delta, o).second;
      },
      py::arg("phi"), py::arg("surface"), py::arg("delta"),
      py::arg("options") = ContactOptions{});

  py::class_<RunOptions>(m, "RunOptions")
      .def(py::init<>())
      .def_readwrite("config_path", &RunOptions::config_path)
      .def_readwrite("out_dir", &RunOptions::out_dir)
      .def_readwrite("seed", &RunOptions::seed)
      .def_readwrite("quiet", &RunOptions::quiet);
  m.def("run_config", &run_config);
}
