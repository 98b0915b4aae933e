#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coherent/coherent_family.hpp"
#include "coherent/errors.hpp"
#include "coherent/io.hpp"
#include "coherent/orbit_dynamics.hpp"
#include "coherent/path_integral.hpp"
#include "coherent/run.hpp"

namespace py = pybind11;
using namespace coherent;

namespace {

LieAlgebraRep spin_rep(const py::object& j) {
  if (py::isinstance<py::str>(j)) return build_spin_rep(Spin::parse(j.cast<std::string>()));
  return build_spin_rep(Spin::from_double(j.cast<double>()));
}

FiducialVector fiducial(const LieAlgebraRep& rep, const Vector& psi) { return FiducialVector::make(rep, psi); }

HamiltonianSchedule schedule_from(const py::object& segments, int algebra_dim) {
  if (py::isinstance<HamiltonianSchedule>(segments)) return segments.cast<HamiltonianSchedule>();
  // [(until, h), ...] starting at t = 0
  std::vector<double> breakpoints{0.0};
  std::vector<RealVector> coefficients;
  for (const auto& item : segments) {
    const auto seg = item.cast<std::pair<double, RealVector>>();
    if (seg.second.size() != algebra_dim) {
      throw Error(ErrorCode::ValidationError, "schedule", "coefficient vector has the wrong length");
    }
    breakpoints.push_back(seg.first);
    coefficients.push_back(seg.second);
  }
  return HamiltonianSchedule::make(std::move(breakpoints), std::move(coefficients));
}

py::dict subalgebra_dict(const IsotropySubalgebra& s) {
  py::dict d;
  d["dim"] = s.dim();
  d["basis"] = s.basis;
  d["singular_values"] = s.singular_values;
  d["threshold"] = s.threshold;
  return d;
}

py::object json_to_python(const io::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_coherent, m) {
  m.doc() = "Generalized coherent states over compact Lie groups";

  static py::exception<Error> error_type(m, "CoherentError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type.ptr())(std::string(e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("operation") = e.operation();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<LieAlgebraRep>(m, "Rep")
      .def_property_readonly("label", &LieAlgebraRep::label)
      .def_property_readonly("algebra_dim", &LieAlgebraRep::algebra_dim)
      .def_property_readonly("rep_dim", &LieAlgebraRep::rep_dim)
      .def_property_readonly("generators", &LieAlgebraRep::generators)
      .def_property_readonly("spin",
                             [](const LieAlgebraRep& r) -> py::object {
                               if (!r.spin()) return py::none();
                               return py::float_(r.spin()->value());
                             })
      .def_property_readonly("structure_constants",
                             [](const LieAlgebraRep& r) {
                               const int n = r.algebra_dim();
                               py::list out;
                               for (int a = 0; a < n; ++a) {
                                 RealMatrix slice(n, n);
                                 for (int b = 0; b < n; ++b)
                                   for (int c = 0; c < n; ++c) slice(b, c) = r.structure_constants()(a, b, c);
                                 out.append(slice);
                               }
                               return out;
                             })
      .def("combine", &LieAlgebraRep::combine)
      .def("__repr__", [](const LieAlgebraRep& r) { return "<Rep " + r.label() + ">"; });

  py::class_<HamiltonianSchedule>(m, "Schedule")
      .def(py::init(&HamiltonianSchedule::make), py::arg("breakpoints"), py::arg("coefficients"))
      .def_static("constant", &HamiltonianSchedule::constant, py::arg("h"), py::arg("t_end"))
      .def_property_readonly("breakpoints", &HamiltonianSchedule::breakpoints)
      .def_property_readonly("coefficients", &HamiltonianSchedule::coefficients);

  m.def("spin_rep", &spin_rep, py::arg("j"), "Spin-j irrep of su(2); j as \"3/2\" or 1.5.");
  m.def("validate_algebra",
        [](std::vector<Matrix> gens, std::string label) { return validate_algebra(std::move(gens), std::move(label)); },
        py::arg("generators"), py::arg("label") = "custom");
  m.def("load_generator_file", [](const std::string& path) { return io::load_generator_file(path); });

  m.def("exp_element", [](const LieAlgebraRep& rep, const RealVector& theta) { return exp_element(rep, theta).matrix(); },
        py::arg("rep"), py::arg("theta"), "exp(-i theta.T)");
  m.def("conjugate_generator",
        [](const LieAlgebraRep& rep, const Matrix& g, const RealVector& v) {
          return conjugate_generator(rep, GroupElement(g, rep.label()), v);
        },
        py::arg("rep"), py::arg("g"), py::arg("v"));
  m.def("haar_quadrature",
        [](const LieAlgebraRep& rep, std::array<int, 3> orders) {
          const HaarQuadrature q = haar_quadrature(rep, {orders[0], orders[1], orders[2]});
          std::vector<Matrix> nodes;
          for (const auto& g : q.nodes) nodes.push_back(g.matrix());
          return py::make_tuple(nodes, q.weights);
        },
        py::arg("rep"), py::arg("orders"));
  m.def("exactness_threshold", [](const LieAlgebraRep& rep) {
    const auto o = exactness_threshold(rep);
    return std::array<int, 3>{o.n_beta, o.n_alpha, o.n_gamma};
  });

  m.def("matsumoto_fiducial", [](const LieAlgebraRep& rep) { return matsumoto_fiducial(rep).amplitudes(); });
  m.def("highest_weight_fiducial", [](const LieAlgebraRep& rep) { return highest_weight_fiducial(rep).amplitudes(); });
  m.def("moment_map", [](const LieAlgebraRep& rep, const Vector& psi) { return moment_map(rep, fiducial(rep, psi)).mu; },
        py::arg("rep"), py::arg("psi"));
  m.def("classify_informative",
        [](const LieAlgebraRep& rep, const Vector& psi) {
          const IsotropyReport r = classify_informative(rep, fiducial(rep, psi));
          py::dict d;
          d["mu"] = r.mu.mu;
          d["state_isotropy"] = subalgebra_dict(r.subalg_state);
          d["moment_isotropy"] = subalgebra_dict(r.subalg_moment);
          d["dims"] = py::make_tuple(r.subalg_state.dim(), r.subalg_moment.dim());
          d["containment_ok"] = r.containment_ok;
          d["informative"] = r.informative;
          return d;
        },
        py::arg("rep"), py::arg("psi"));
  m.def("canonicalize",
        [](const LieAlgebraRep& rep, const Vector& psi) {
          const Canonicalization c = canonicalize(rep, fiducial(rep, psi));
          py::dict d;
          d["rotation"] = c.rotation.matrix();
          d["canonical"] = c.canonical.amplitudes();
          d["moment_norm"] = c.moment_norm;
          return d;
        },
        py::arg("rep"), py::arg("psi"));

  m.def("propagate_quantum",
        [](const LieAlgebraRep& rep, const py::object& schedule, const Vector& psi0, double dt) {
          const QuantumTrajectory q = propagate_quantum(rep, schedule_from(schedule, rep.algebra_dim()), psi0, dt);
          return py::make_tuple(q.times, q.states);
        },
        py::arg("rep"), py::arg("schedule"), py::arg("psi0"), py::arg("dt"));
  m.def("flow_coadjoint",
        [](const LieAlgebraRep& rep, const py::object& schedule, const RealVector& mu0, double dt) {
          const MomentTrajectory c = flow_coadjoint(rep, schedule_from(schedule, rep.algebra_dim()), MomentVector{mu0}, dt);
          return py::make_tuple(c.times, c.mu);
        },
        py::arg("rep"), py::arg("schedule"), py::arg("mu0"), py::arg("dt"));
  m.def("van_hove_check",
        [](const LieAlgebraRep& rep, const Vector& psi, const py::object& schedule, double dt,
           std::optional<double> t_final, double tilt_theta, double tilt_phi, const std::string& chart) {
          VanHoveOptions opt;
          opt.dt = dt;
          opt.t_final = t_final;
          opt.tilt_theta = tilt_theta;
          opt.tilt_phi = tilt_phi;
          if (chart == "south") opt.chart.id = Chart::South;
          else if (chart != "north") throw Error(ErrorCode::InvalidArgument, "van_hove_check", "chart must be north or south");
          const TrajectoryRecord r = van_hove_check(rep, fiducial(rep, psi), schedule_from(schedule, rep.algebra_dim()), opt);
          py::dict d;
          d["times"] = r.times;
          d["mu"] = r.mu;
          d["theta"] = r.theta;
          d["phi"] = r.phi;
          d["action"] = r.action;
          d["fidelity"] = r.fidelity;
          d["phase_residual"] = r.phase_residual;
          d["max_fidelity_deficit"] = r.max_fidelity_deficit();
          d["max_abs_phase_residual"] = r.max_abs_phase_residual();
          return d;
        },
        py::arg("rep"), py::arg("psi"), py::arg("schedule"), py::arg("dt") = 1e-3, py::arg("t_final") = py::none(),
        py::arg("tilt_theta") = 0.0, py::arg("tilt_phi") = 0.0, py::arg("chart") = "north");

  m.def("identity_resolution",
        [](const LieAlgebraRep& rep, const Vector& psi, std::optional<std::array<int, 3>> orders) {
          const QuadratureOrders o =
              orders ? QuadratureOrders{(*orders)[0], (*orders)[1], (*orders)[2]} : exactness_threshold(rep);
          return json_to_python(io::to_json(identity_resolution(rep, fiducial(rep, psi), haar_quadrature(rep, o))));
        },
        py::arg("rep"), py::arg("psi"), py::arg("orders") = py::none());
  m.def("berry_connection",
        [](const LieAlgebraRep& rep, const Vector& psi, int points) {
          return json_to_python(io::to_json(berry_connection(rep, fiducial(rep, psi), default_theta_grid(points))));
        },
        py::arg("rep"), py::arg("psi"), py::arg("points") = 33);
  m.def("dirac_check",
        [](const LieAlgebraRep& rep, const Vector& psi) { return json_to_python(io::to_json(dirac_check(rep, fiducial(rep, psi)))); },
        py::arg("rep"), py::arg("psi"));
  m.def("discrete_propagator",
        [](const LieAlgebraRep& rep, const Vector& psi, const py::object& schedule, const std::vector<int>& slices,
           const std::string& kernel, std::optional<RealVector> g_initial, std::optional<RealVector> g_final,
           std::optional<std::array<int, 3>> orders) {
          KernelMode mode = KernelMode::Exact;
          if (kernel == "first-order") mode = KernelMode::FirstOrder;
          else if (kernel != "exact") throw Error(ErrorCode::InvalidArgument, "discrete_propagator", "kernel must be exact or first-order");
          const QuadratureOrders o =
              orders ? QuadratureOrders{(*orders)[0], (*orders)[1], (*orders)[2]} : exactness_threshold(rep);
          const GroupElement gi = g_initial ? exp_element(rep, *g_initial) : GroupElement::identity(rep);
          const GroupElement gf = g_final ? exp_element(rep, *g_final) : GroupElement::identity(rep);
          const ConvergenceRecord r = discrete_propagator(rep, fiducial(rep, psi), schedule_from(schedule, rep.algebra_dim()),
                                                          gi, gf, slices, haar_quadrature(rep, o), mode);
          py::dict d = json_to_python(io::to_json(r));
          d["amplitudes"] = r.amplitudes;
          d["exact_amplitude"] = r.exact_amplitude;
          return d;
        },
        py::arg("rep"), py::arg("psi"), py::arg("schedule"), py::arg("slice_counts") = std::vector<int>{1, 2, 4, 8},
        py::arg("kernel") = "exact", py::arg("g_initial") = py::none(), py::arg("g_final") = py::none(),
        py::arg("orders") = py::none());
  m.def("fitted_order", &fitted_order, py::arg("slice_counts"), py::arg("errors"));

  m.def("run_config",
        [](const std::string& path, std::optional<std::string> command) {
          RunConfig c = parse_config(path);
          if (command) {
            const auto cmd = command_from_string(*command);
            if (!cmd) throw Error(ErrorCode::ValidationError, "run_config", "unknown command " + *command);
            c.command = *cmd;
          }
          const Report r = run(c);
          return py::make_tuple(json_to_python(r.document), r.exit_code);
        },
        py::arg("path"), py::arg("command") = py::none(),
        "Parse a run config and execute it; returns (report, exit_code).");

  m.attr("__version__") = COHERENT_VERSION;
}
