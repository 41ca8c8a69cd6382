#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dnls/experiment.hpp"

namespace py = pybind11;
using namespace dnls;

namespace {

py::dict report_to_dict(const ConditionReport& rep) {
    py::dict d;
    d["condition"] = rep.condition;
    d["verdict"] = to_string(rep.verdict);
    d["holds"] = rep.holds();
    d["margin"] = rep.margin;
    if (rep.constant) d["constant"] = *rep.constant;
    if (rep.witness) {
        py::dict w;
        w["xi"] = rep.witness->xi;
        w["Y"] = rep.witness->Y;
        w["value"] = rep.witness->value;
        d["witness"] = w;
    }
    d["detail"] = rep.detail;
    return d;
}

}  // namespace

PYBIND11_MODULE(_dnlslab, m) {
    m.doc() = "Cubic derivative Schrodinger systems: structural condition "
              "checks, spectral simulation and asymptotic analysis";

    py::class_<MassVector>(m, "MassVector")
        .def(py::init([](std::vector<double> masses) {
                 return MassVector{std::move(masses)};
             }),
             py::arg("masses"))
        .def_readonly("m", &MassVector::m)
        .def("extended", &MassVector::extended, py::arg("k"));

    py::class_<CubicSystem>(m, "CubicSystem")
        .def_property_readonly("n_components", &CubicSystem::n_components)
        .def_property_readonly(
            "masses", [](const CubicSystem& s) { return s.masses().m; })
        .def("evaluate_F",
             [](const CubicSystem& s, const std::vector<cplx>& u,
                const std::vector<cplx>& ux) { return s.evaluate_F(u, ux); },
             py::arg("u"), py::arg("ux"))
        .def("symbol_p",
             [](const CubicSystem& s, double xi, const std::vector<cplx>& Y) {
                 return s.symbol_p(xi, Y);
             },
             py::arg("xi"), py::arg("Y"))
        .def("gauge_weight_one", &CubicSystem::gauge_weight_one);

    m.def("load_model", &load_model, py::arg("path"));
    m.def("single_nls", &single_nls, py::arg("lam"), py::arg("m") = 1.0);
    m.def("dnls_single", &dnls_single, py::arg("m") = 1.0);
    m.def("two_component", &two_component, py::arg("m1"), py::arg("m2"),
          py::arg("lambda1"), py::arg("lambda2"), py::arg("nu1"),
          py::arg("nu2"));
    m.def("coupled_derivative", &coupled_derivative, py::arg("m"),
          py::arg("lambda1"), py::arg("lambda2"), py::arg("lambda3"));
    m.def("null_structure_three", &null_structure_three, py::arg("m"));

    m.def("check_conditions",
          [](const CubicSystem& sys, std::optional<std::string> a_path,
             int xi_points, int sphere_samples, std::uint64_t seed) {
              CheckPlanConfig plan{xi_points, sphere_samples, seed};
              std::optional<HermitianForm> A;
              if (a_path) A = load_hermitian(*a_path);
              const CheckOutcome outcome = run_checks(sys, plan, A);
              py::dict d;
              d["regime"] = outcome.regime;
              d["condition_a"] = outcome.condition_a;
              d["all_hold"] = outcome.all_requested_hold;
              py::list reports;
              for (const ConditionReport& rep : outcome.reports)
                  reports.append(report_to_dict(rep));
              d["reports"] = reports;
              return d;
          },
          py::arg("system"), py::arg("a_matrix_path") = std::nullopt,
          py::arg("xi_points") = 201, py::arg("sphere_samples") = 2000,
          py::arg("seed") = 1);

    m.def("simulate",
          [](const std::string& config_path, const std::string& out_root) {
              const ExperimentConfig cfg = load_experiment_config(config_path);
              const CubicSystem sys = load_model(cfg.model_path);
              const SimulateResult result = simulate_to_dir(sys, cfg, out_root);
              py::dict d;
              d["run_dir"] = result.dir.string();
              d["exit_code"] = result.exit_code;
              d["completed"] = result.trajectory.completed;
              return d;
          },
          py::arg("config_path"), py::arg("out_root") = "runs");

    m.def("kms_verify",
          [](double c0, double c1, double p, double q, double psi2,
             double t_max, int samples) {
              const KmsReport report =
                  kms_verify(KmsInput{c0, c1, p, q, psi2}, t_max, samples);
              py::dict d;
              d["pstar"] = report.pstar;
              d["c2"] = report.c2;
              d["min_margin"] = report.min_margin;
              d["passes"] = report.passes();
              return d;
          },
          py::arg("c0") = 1.0, py::arg("c1") = 0.0, py::arg("p") = 2.0,
          py::arg("q") = 1.25, py::arg("psi2") = 1.0, py::arg("t_max") = 1e6,
          py::arg("samples") = 400);

    m.def("version", &code_version);
}
