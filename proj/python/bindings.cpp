#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blackstart/errors.hpp"
#include "blackstart/freq_dynamics.hpp"
#include "blackstart/milp_solver.hpp"
#include "blackstart/nadir.hpp"
#include "blackstart/network.hpp"
#include "blackstart/planner.hpp"
#include "blackstart/report.hpp"
#include "blackstart/restoration_model.hpp"

namespace py = pybind11;
using namespace blackstart;

namespace {

PlannerConfig make_config(const NetworkModel& net, const std::string& mode, std::size_t horizon, double limit_hz,
                          bool ess) {
    PlannerConfig c;
    c.mode = parse_mode(mode);
    c.horizon = horizon;
    c.omega_lim = net.hz_to_pu(-limit_hz);
    c.use_ess = ess;
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Black-start restoration planning with frequency-nadir constraints";

    // Translators run newest first, so the base class goes in first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<PlanningError>(m, "PlanningError", PyExc_RuntimeError);

    py::class_<NetworkModel>(m, "Network")
        .def_readonly("s_sys", &NetworkModel::s_sys)
        .def_readonly("step_minutes", &NetworkModel::step_minutes)
        .def_property_readonly("num_buses", &NetworkModel::num_buses)
        .def_property_readonly("num_lines", &NetworkModel::num_lines)
        .def_property_readonly("num_loads", &NetworkModel::num_loads)
        .def_property_readonly("num_generators", &NetworkModel::num_generators)
        .def_property_readonly("num_ess", &NetworkModel::num_ess)
        .def("hz_to_pu", &NetworkModel::hz_to_pu)
        .def("pu_to_hz", &NetworkModel::pu_to_hz)
        .def("to_json", [](const NetworkModel& n) { return serialize_network(n); });

    m.def("load_network", [](const std::string& path) { return load_network(path); }, py::arg("path"));
    m.def("parse_network", &parse_network, py::arg("text"));

    py::class_<PlanResult>(m, "PlanResult")
        .def_property_readonly("steps", [](const PlanResult& r) { return r.plan.last_step(); })
        .def_property_readonly("complete", [](const PlanResult& r) { return r.plan.complete; })
        .def_property_readonly("delta_p_e", [](const PlanResult& r) {
            std::vector<double> out;
            for (const auto& s : r.plan.steps) out.push_back(s.delta_p_e);
            return out;
        })
        .def_property_readonly("network", [](const PlanResult& r) { return r.network; })
        .def("to_json", [](const PlanResult& r) { return plan_to_json(r.plan); })
        .def("table", [](const PlanResult& r) { return plan_table(r.network, r.plan); })
        .def("check", [](const PlanResult& r, double tol) { return check_plan(r.network, r.plan, tol).feasible(); },
             py::arg("tol") = 1e-6);

    m.def(
        "plan",
        [](const NetworkModel& net, const std::string& mode, std::size_t horizon, double limit_hz, bool ess) {
            py::gil_scoped_release release;
            return plan(net, make_config(net, mode, horizon, limit_hz, ess));
        },
        py::arg("network"), py::arg("mode") = "nadir", py::arg("horizon") = 4, py::arg("limit_hz") = 1.0,
        py::arg("ess") = true);

    py::class_<StepCheck>(m, "StepCheck")
        .def_readonly("step", &StepCheck::step)
        .def_readonly("delta_p_e", &StepCheck::delta_p_e)
        .def_readonly("nadir", &StepCheck::nadir)
        .def_readonly("t_nadir", &StepCheck::t_nadir)
        .def_readonly("violated", &StepCheck::violated);

    py::class_<PlanSimulation>(m, "PlanSimulation")
        .def_readonly("steps", &PlanSimulation::steps)
        .def_readonly("violations", &PlanSimulation::violations)
        .def_readonly("worst_nadir", &PlanSimulation::worst_nadir);

    m.def(
        "simulate",
        [](const PlanResult& r, double limit_hz, double step_s) {
            SimOptions opt;
            opt.step_s = step_s;
            return simulate_plan(r.network, r.plan, r.network.hz_to_pu(-limit_hz), opt);
        },
        py::arg("result"), py::arg("limit_hz") = 1.0, py::arg("step_s") = 0.005);

    m.def(
        "first_window_mps",
        [](const NetworkModel& net, const std::string& mode, std::size_t horizon, double limit_hz, bool ess) {
            return export_mps(first_window_model(net, make_config(net, mode, horizon, limit_hz, ess)));
        },
        py::arg("network"), py::arg("mode") = "nadir", py::arg("horizon") = 4, py::arg("limit_hz") = 1.0,
        py::arg("ess") = true);

    m.def(
        "first_window_objective",
        [](const NetworkModel& net, const std::string& mode, std::size_t horizon, double limit_hz, bool ess) {
            const auto sol = solve_milp(first_window_model(net, make_config(net, mode, horizon, limit_hz, ess)));
            if (!sol.has_solution()) throw PlanningError("first window has no solution");
            return sol.objective;
        },
        py::arg("network"), py::arg("mode") = "nadir", py::arg("horizon") = 4, py::arg("limit_hz") = 1.0,
        py::arg("ess") = true);

    py::class_<NadirPrediction>(m, "NadirPrediction")
        .def_readonly("t_nadir", &NadirPrediction::t_nadir)
        .def_readonly("omega_nadir", &NadirPrediction::omega_nadir)
        .def_readonly("degenerate", &NadirPrediction::degenerate);

    m.def(
        "predict_nadir",
        [](std::vector<double> c, double h_sys, double delta_p_e, std::vector<double> ess_ref,
           std::vector<double> ess_tau) {
            if (c.size() != 3) throw ModelError("expected three aggregate coefficients");
            return predict_nadir({{c[0], c[1], c[2]}, h_sys, std::move(ess_ref), std::move(ess_tau)}, delta_p_e);
        },
        py::arg("coeffs"), py::arg("h_sys"), py::arg("delta_p_e"), py::arg("ess_ref") = std::vector<double>{},
        py::arg("ess_tau") = std::vector<double>{});

    m.def(
        "max_disturbance",
        [](std::vector<double> c, double h_sys, double omega_lim, std::vector<double> ess_ref,
           std::vector<double> ess_tau) {
            if (c.size() != 3) throw ModelError("expected three aggregate coefficients");
            return max_disturbance_nonlinear({{c[0], c[1], c[2]}, h_sys, std::move(ess_ref), std::move(ess_tau)},
                                             omega_lim);
        },
        py::arg("coeffs"), py::arg("h_sys"), py::arg("omega_lim"), py::arg("ess_ref") = std::vector<double>{},
        py::arg("ess_tau") = std::vector<double>{});

    m.def("fnv1a64", [](const std::string& s) { return fnv1a64(s); }, py::arg("data"));
}
