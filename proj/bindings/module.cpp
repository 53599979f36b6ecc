#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "divopt/analysis.hpp"
#include "divopt/cli.hpp"
#include "divopt/closed_form.hpp"
#include "divopt/extensions.hpp"
#include "divopt/invariants.hpp"
#include "divopt/mc.hpp"
#include "divopt/model.hpp"
#include "divopt/solver.hpp"

namespace py = pybind11;
using namespace divopt;

namespace {

py::array_t<double> field_to_array(const Field& f) {
    py::array_t<double> out({f.nmu, f.nx});
    std::copy(f.data.begin(), f.data.end(), out.mutable_data());
    return out;
}

Field array_to_field(const py::array_t<double>& arr, const Grid& grid) {
    if (arr.ndim() != 2 || arr.shape(0) != grid.nmu() || arr.shape(1) != grid.nx())
        throw std::invalid_argument("field array must have shape (nmu, nx)");
    Field f(grid);
    auto view = arr.unchecked<2>();
    for (int j = 0; j < grid.nmu(); ++j)
        for (int i = 0; i < grid.nx(); ++i) f(i, j) = view(j, i);
    return f;
}

py::object opt_to_py(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::none();
}

py::array_t<double> optional_curve(const std::vector<std::optional<double>>& curve) {
    py::array_t<double> out(static_cast<py::ssize_t>(curve.size()));
    double* data = out.mutable_data();
    for (std::size_t j = 0; j < curve.size(); ++j)
        data[j] = curve[j] ? *curve[j] : std::numeric_limits<double>::quiet_NaN();
    return out;
}

py::dict extension_to_dict(const ExtensionSolution& sol) {
    py::dict out;
    out["value"] = field_to_array(sol.value);
    out["dividends"] = field_to_array(sol.dividends);
    if (sol.issuance.nx > 0) out["issuance"] = field_to_array(sol.issuance);
    out["boundary_issues"] = sol.boundary_issues;
    out["boundaries"] = sol.boundaries;
    out["report"] = sol.report;
    return out;
}

}  // namespace

PYBIND11_MODULE(_divopt, m) {
    m.doc() = "Optimal dividend policies under stochastically varying profitability";

    py::class_<DriftSpec>(m, "DriftSpec")
        .def_static("ou", &DriftSpec::ou, py::arg("k"), py::arg("mu_bar"), py::arg("sigma_tilde"))
        .def_static("cir", &DriftSpec::cir, py::arg("k"), py::arg("mu_bar"),
                    py::arg("sigma_tilde"), py::arg("a"))
        .def_static(
            "custom",
            [](std::function<double(double)> kappa, std::function<double(double)> sigma_tilde,
               double lo, double hi) {
                return DriftSpec::custom(std::move(kappa), std::move(sigma_tilde),
                                         Interval{lo, hi});
            },
            py::arg("kappa"), py::arg("sigma_tilde"), py::arg("lo"), py::arg("hi"));

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<double, double, double, DriftSpec>(), py::arg("r"), py::arg("sigma"),
             py::arg("rho"), py::arg("drift"))
        .def_readonly("r", &ModelParams::r)
        .def_readonly("sigma", &ModelParams::sigma)
        .def_readonly("rho", &ModelParams::rho)
        .def("kappa", &ModelParams::kappa)
        .def("sigma_tilde", &ModelParams::sigma_tilde);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double x_max, double mu_min, double mu_max, int nx, int nmu,
                         double x_min) {
                 GridSpec s;
                 s.x_max = x_max;
                 s.mu_min = mu_min;
                 s.mu_max = mu_max;
                 s.nx = nx;
                 s.nmu = nmu;
                 s.x_min = x_min;
                 return s;
             }),
             py::arg("x_max"), py::arg("mu_min"), py::arg("mu_max"), py::arg("nx"), py::arg("nmu"),
             py::arg("x_min") = 0.0)
        .def_static("defaults_for", &GridSpec::defaults_for, py::arg("model"),
                    py::arg("nx") = 300, py::arg("nmu") = 300)
        .def_readwrite("x_max", &GridSpec::x_max)
        .def_readwrite("mu_min", &GridSpec::mu_min)
        .def_readwrite("mu_max", &GridSpec::mu_max)
        .def_readwrite("nx", &GridSpec::nx)
        .def_readwrite("nmu", &GridSpec::nmu)
        .def_readwrite("x_min", &GridSpec::x_min);

    py::class_<Grid>(m, "Grid")
        .def_property_readonly("nx", &Grid::nx)
        .def_property_readonly("nmu", &Grid::nmu)
        .def_property_readonly("dx", &Grid::dx)
        .def_property_readonly("dmu", &Grid::dmu)
        .def_property_readonly("xs", [](const Grid& g) { return py::cast(g.xs); })
        .def_property_readonly("mus", [](const Grid& g) { return py::cast(g.mus); });

    m.def("build_grid", &build, py::arg("spec"), py::arg("model"));
    m.def("default_penalization", &default_penalization);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("residual_history", &SolveReport::residual_history)
        .def_readonly("min_increment_history", &SolveReport::min_increment_history)
        .def_readonly("wall_time_seconds", &SolveReport::wall_time_seconds)
        .def_readonly("linear_solver", &SolveReport::linear_solver)
        .def_property_readonly("halt_reason",
                               [](const SolveReport& r) { return to_string(r.halt_reason); })
        .def_property_readonly("converged", &SolveReport::converged);

    py::class_<Boundaries>(m, "Boundaries")
        .def_property_readonly("mus", [](const Boundaries& b) { return py::cast(b.mus); })
        .def_property_readonly("lower", [](const Boundaries& b) { return optional_curve(b.lower); })
        .def_property_readonly("upper", [](const Boundaries& b) { return optional_curve(b.upper); })
        .def_property_readonly("mu_star", [](const Boundaries& b) { return opt_to_py(b.mu_star); })
        .def_property_readonly(
            "issuance_target",
            [](const Boundaries& b) { return optional_curve(b.issuance_target); })
        .def_property_readonly(
            "issuance_threshold",
            [](const Boundaries& b) { return opt_to_py(b.issuance_threshold); })
        .def_readonly("truncation_warning", &Boundaries::truncation_warning)
        .def_readonly("non_contiguous_columns", &Boundaries::non_contiguous_columns);

    m.def(
        "policy_iteration",
        [](const ModelParams& model, const Grid& grid, double K, double tau, int max_iter,
           py::object initial) {
            PolicyField ell0 = initial.is_none()
                                   ? PolicyField(grid, 0.0)
                                   : array_to_field(initial.cast<py::array_t<double>>(), grid);
            Solution sol = policy_iteration(model, grid, K, tau, max_iter, ell0);
            return py::make_tuple(field_to_array(sol.value), field_to_array(sol.policy),
                                  sol.report);
        },
        py::arg("model"), py::arg("grid"), py::arg("K"), py::arg("tau") = 0.0,
        py::arg("max_iter") = 200, py::arg("initial_policy") = py::none());

    m.def(
        "k_continuation",
        [](const ModelParams& model, const Grid& grid, const std::vector<double>& schedule,
           double tau, int max_iter) {
            ContinuationResult res = k_continuation(model, grid, schedule, tau, max_iter);
            py::list values;
            for (const auto& v : res.values) values.append(field_to_array(v));
            return py::make_tuple(res.ks, values, field_to_array(res.final_policy));
        },
        py::arg("model"), py::arg("grid"), py::arg("k_schedule"), py::arg("tau") = 0.0,
        py::arg("max_iter") = 200);

    m.def(
        "extract_boundaries",
        [](const py::array_t<double>& policy, const Grid& grid, double K) {
            return extract_boundaries(array_to_field(policy, grid), grid, K);
        },
        py::arg("policy"), py::arg("grid"), py::arg("K"));

    m.def(
        "classify_point",
        [](const Boundaries& b, double x, double mu) {
            switch (classify_point(b, x, mu)) {
                case Regime::Retain: return "retain";
                case Regime::PayExcess: return "pay_excess";
                case Regime::Liquidate: return "liquidate";
            }
            return "retain";
        },
        py::arg("boundaries"), py::arg("x"), py::arg("mu"));

    m.def(
        "interpolate",
        [](const py::array_t<double>& field, const Grid& grid, double x, double mu) {
            return interpolate(array_to_field(field, grid), grid, x, mu);
        },
        py::arg("field"), py::arg("grid"), py::arg("x"), py::arg("mu"));

    py::class_<DeterministicParams>(m, "DeterministicParams")
        .def(py::init<double, double, double>(), py::arg("r"), py::arg("k"), py::arg("mu_bar"));
    m.def("tau0", &tau0, py::arg("params"), py::arg("mu"));
    m.def("x_b", &x_b, py::arg("params"), py::arg("mu"));
    m.def("deterministic_value", &deterministic_value, py::arg("params"), py::arg("x"),
          py::arg("mu"));
    m.def("deterministic_mu_star", &deterministic_mu_star, py::arg("params"));

    m.def(
        "solve_auxiliary",
        [](const ModelParams& model, const std::vector<double>& mus, double K) {
            AuxiliarySolution sol = solve_auxiliary(model, mus, K);
            return py::make_tuple(py::cast(sol.values), opt_to_py(sol.mu_star),
                                  sol.truncation_warning);
        },
        py::arg("model"), py::arg("mu_nodes"), py::arg("K"));

    py::class_<IssuanceSpec>(m, "IssuanceSpec")
        .def(py::init([](std::function<double(double)> lambda_p,
                         std::function<double(double)> lambda_f) {
                 return IssuanceSpec{std::move(lambda_p), std::move(lambda_f)};
             }),
             py::arg("lambda_p"), py::arg("lambda_f") = nullptr);
    m.def("logistic_cost", &logistic_cost, py::arg("hi"), py::arg("lo"), py::arg("mid"),
          py::arg("scale"));

    py::class_<CreditLineSpec>(m, "CreditLineSpec")
        .def(py::init([](double rho_minus, std::function<double(double)> x_lower) {
                 return CreditLineSpec{rho_minus, std::move(x_lower)};
             }),
             py::arg("rho_minus"), py::arg("x_lower"));

    m.def(
        "solve_proportional_issuance",
        [](const ModelParams& model, const Grid& grid, const IssuanceSpec& spec, double K,
           double tau, int max_iter) {
            return extension_to_dict(
                solve_proportional_issuance(model, grid, spec, K, tau, max_iter));
        },
        py::arg("model"), py::arg("grid"), py::arg("spec"), py::arg("K"), py::arg("tau") = 0.0,
        py::arg("max_iter") = 200);
    m.def(
        "solve_fixed_issuance",
        [](const ModelParams& model, const Grid& grid, const IssuanceSpec& spec, double K,
           double tau, int max_iter) {
            return extension_to_dict(solve_fixed_issuance(model, grid, spec, K, tau, max_iter));
        },
        py::arg("model"), py::arg("grid"), py::arg("spec"), py::arg("K"), py::arg("tau") = 0.0,
        py::arg("max_iter") = 200);
    m.def(
        "solve_credit_line",
        [](const ModelParams& model, const Grid& grid, const CreditLineSpec& spec, double K,
           double tau, int max_iter) {
            return extension_to_dict(solve_credit_line(model, grid, spec, K, tau, max_iter));
        },
        py::arg("model"), py::arg("grid"), py::arg("spec"), py::arg("K"), py::arg("tau") = 0.0,
        py::arg("max_iter") = 200);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init([](int n_paths, double dt, double t_horizon, std::uint64_t seed) {
                 return SimConfig{n_paths, dt, t_horizon, seed};
             }),
             py::arg("n_paths") = 100000, py::arg("dt") = 1e-3, py::arg("t_horizon") = 0.0,
             py::arg("seed") = 1)
        .def_readwrite("n_paths", &SimConfig::n_paths)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_horizon", &SimConfig::t_horizon)
        .def_readwrite("seed", &SimConfig::seed);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("mean", &McEstimate::mean)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("n_ruined", &McEstimate::n_ruined)
        .def_readonly("n_censored", &McEstimate::n_censored);

    m.def("simulate_policy", &simulate_policy, py::arg("model"), py::arg("boundaries"),
          py::arg("x0"), py::arg("mu0"), py::arg("config"), py::arg("threads") = 0,
          py::arg("antithetic") = false, py::call_guard<py::gil_scoped_release>());

    m.def(
        "validate_assumptions",
        [](const ModelParams& model, double lo, double hi, int n_samples) {
            ValidationReport rep = validate_assumptions(model, Interval{lo, hi}, n_samples);
            py::list checks;
            for (const auto& c : rep.checks) {
                py::dict d;
                d["name"] = c.name;
                d["status"] = c.status == AssumptionCheck::Status::Pass      ? "pass"
                              : c.status == AssumptionCheck::Status::Fail    ? "fail"
                                                                             : "not_checked";
                d["offending_mus"] = c.offending_mus;
                d["note"] = c.note;
                checks.append(d);
            }
            return py::make_tuple(rep.all_passed(), checks);
        },
        py::arg("model"), py::arg("mu_lo"), py::arg("mu_hi"), py::arg("n_samples") = 101);

    m.def(
        "run_config_file",
        [](const std::string& path, const std::string& out_dir, int threads) {
            CliOptions opts;
            opts.out_dir = out_dir;
            opts.threads = threads;
            return run_file(path, opts);
        },
        py::arg("path"), py::arg("out_dir") = "", py::arg("threads") = 0);
}
