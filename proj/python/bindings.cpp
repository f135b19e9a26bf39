// pybind11 surface for the core operations: kernel specs, admissibility
// audits, the deterministic and stochastic solvers, objective evaluation and
// scenario execution. Nested reports cross the boundary as JSON-compatible
// dicts.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "crossimpact/scenario.hpp"

namespace py = pybind11;
using namespace crossimpact;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null: return py::none();
        case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer: return py::int_(j.get<long long>());
        case nlohmann::json::value_t::number_unsigned:
            return py::int_(j.get<unsigned long long>());
        case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
        case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto& v : j) out.append(json_to_py(v));
            return out;
        }
        case nlohmann::json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it)
                out[py::str(it.key())] = json_to_py(it.value());
            return out;
        }
        default: return py::none();
    }
}

py::dict report_to_py(const SolveReport& rep) {
    py::dict d;
    d["u"] = rep.strategy.u;
    d["X"] = rep.inventory;
    d["D"] = rep.distortion;
    d["foc_residual_abs"] = rep.foc_residual_abs;
    d["foc_residual_rel"] = rep.foc_residual_rel;
    d["objective"] = json_to_py(breakdown_to_json(rep.objective));
    d["wall_seconds"] = rep.wall_seconds;
    return d;
}

SignalModel ou_model(const Vector& beta, const Vector& I0, const Matrix& noise) {
    return SignalModel::ou(beta, I0, noise);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optimal portfolio execution under transient cross-impact propagators";
    m.attr("__version__") = kLibraryVersion;

    py::register_exception<Error>(m, "CrossImpactError");

    py::class_<Grid>(m, "Grid")
        .def(py::init<int, double>(), py::arg("n"), py::arg("T"))
        .def_readonly("n", &Grid::n)
        .def_readonly("T", &Grid::T)
        .def("dt", &Grid::dt)
        .def("node", &Grid::node);

    py::class_<MarketParams>(m, "MarketParams")
        .def(py::init([](int N, double T, Matrix Lambda, Matrix Sigma, double gamma, double varrho,
                         Matrix Pi, Vector X0) {
                 MarketParams mkt;
                 mkt.N = N;
                 mkt.T = T;
                 mkt.Lambda = std::move(Lambda);
                 mkt.Sigma = std::move(Sigma);
                 mkt.gamma = gamma;
                 mkt.varrho = varrho;
                 mkt.Pi = std::move(Pi);
                 mkt.X0 = std::move(X0);
                 mkt.validate();
                 return mkt;
             }),
             py::arg("N"), py::arg("T"), py::arg("Lambda"), py::arg("Sigma"), py::arg("gamma"),
             py::arg("varrho"), py::arg("Pi"), py::arg("X0"))
        .def_readonly("N", &MarketParams::N)
        .def_readonly("T", &MarketParams::T)
        .def_readonly("gamma", &MarketParams::gamma)
        .def_readonly("varrho", &MarketParams::varrho);

    py::class_<PropagatorSpec>(m, "PropagatorSpec")
        .def_static("zero", &PropagatorSpec::zero, py::arg("N"))
        .def_static("factorized_exp", &PropagatorSpec::factorized_exp, py::arg("C"),
                    py::arg("rho"))
        .def_static("factorized_fractional", &PropagatorSpec::factorized_fractional, py::arg("C"),
                    py::arg("alpha"))
        .def_static("factorized_power_law", &PropagatorSpec::factorized_power_law, py::arg("C"),
                    py::arg("beta"), py::arg("t0"))
        .def_static("matrix_exp", &PropagatorSpec::matrix_exp, py::arg("Cmat"))
        .def_static("permanent", &PropagatorSpec::permanent, py::arg("C"))
        .def_static("from_json",
                    [](const std::string& text, double T) {
                        return spec_from_json(nlohmann::json::parse(text), T);
                    },
                    py::arg("text"), py::arg("T") = 0.0)
        .def_property_readonly("kind",
                               [](const PropagatorSpec& s) { return kernel_kind_name(s.kind); })
        .def_property_readonly("N", [](const PropagatorSpec& s) { return s.N; });

    py::class_<SignalModel>(m, "SignalModel")
        .def_static("none", &SignalModel::none, py::arg("N"))
        .def_static("ou", &ou_model, py::arg("beta"), py::arg("I0"), py::arg("noise_scale"))
        .def_static("deterministic_table", [](const Matrix& table) {
            SignalModel model = SignalModel::deterministic(
                static_cast<int>(table.cols()) - 1, [table](double t) {
                    const int N = static_cast<int>(table.cols()) - 1;
                    if (t <= table(0, 0)) return Vector(table.row(0).tail(N).transpose());
                    const auto last = table.rows() - 1;
                    if (t >= table(last, 0)) return Vector(table.row(last).tail(N).transpose());
                    for (Eigen::Index r = 1; r < table.rows(); ++r)
                        if (t <= table(r, 0)) {
                            const double w =
                                (t - table(r - 1, 0)) / (table(r, 0) - table(r - 1, 0));
                            return Vector(((1.0 - w) * table.row(r - 1).tail(N) +
                                           w * table.row(r).tail(N))
                                              .transpose());
                        }
                    return Vector(table.row(last).tail(N).transpose());
                });
            model.drift_table = table;
            return model;
        });

    py::class_<SignalPath>(m, "SignalPath")
        .def_readonly("I", &SignalPath::I)
        .def_readonly("seed", &SignalPath::seed);

    m.def("simulate_ou_path", &simulate_ou_path, py::arg("model"), py::arg("grid"),
          py::arg("seed"));
    m.def("conditional_future_drift", &conditional_future_drift, py::arg("model"), py::arg("I_t"),
          py::arg("t"), py::arg("r"));
    m.def("g_profile", &g_profile, py::arg("market"), py::arg("model"), py::arg("I_t"),
          py::arg("k"), py::arg("grid"));
    m.def("g_nodes", &g_nodes, py::arg("market"), py::arg("model"), py::arg("grid"));

    m.def("eval_propagator", &eval_propagator, py::arg("spec"), py::arg("t"), py::arg("s"));
    m.def("mirrored_eval", &mirrored_eval, py::arg("spec"), py::arg("t"), py::arg("s"));

    m.def("markowitz", &markowitz, py::arg("Sigma"), py::arg("gamma"), py::arg("I_t"));

    m.def(
        "transient_cost",
        [](const PropagatorSpec& spec, const Matrix& u_cells, const Grid& grid) {
            return transient_cost(spec, u_cells, grid);
        },
        py::arg("spec"), py::arg("u_cells"), py::arg("grid"));

    m.def(
        "audit",
        [](const PropagatorSpec& spec, const Grid& grid, double tol) {
            return json_to_py(admissibility_to_json(audit_kernel(spec, grid, tol)));
        },
        py::arg("spec"), py::arg("grid"), py::arg("tol") = 1e-10);

    m.def(
        "solve_deterministic",
        [](const MarketParams& market, const PropagatorSpec& spec, const Matrix& g,
           const Grid& grid, bool force) {
            SolveOptions opts;
            opts.force = force;
            return report_to_py(solve_deterministic(market, spec, g, grid, opts));
        },
        py::arg("market"), py::arg("spec"), py::arg("g_nodes"), py::arg("grid"),
        py::arg("force") = false);

    m.def(
        "solve_stochastic_path",
        [](const MarketParams& market, const PropagatorSpec& spec, const SignalModel& model,
           const SignalPath& path, const Grid& grid, bool force) {
            SolveOptions opts;
            opts.force = force;
            return report_to_py(solve_stochastic_path(market, spec, model, path, grid, opts));
        },
        py::arg("market"), py::arg("spec"), py::arg("model"), py::arg("path"), py::arg("grid"),
        py::arg("force") = false);

    m.def(
        "solve_stochastic_resolvent",
        [](const MarketParams& market, const PropagatorSpec& spec, const SignalModel& model,
           const SignalPath& path, const Grid& grid, bool force) {
            SolveOptions opts;
            opts.force = force;
            return report_to_py(solve_stochastic_resolvent(market, spec, model, path, grid, opts));
        },
        py::arg("market"), py::arg("spec"), py::arg("model"), py::arg("path"), py::arg("grid"),
        py::arg("force") = false);

    m.def("preset_names", &preset_names);
    m.def("preset_json", &preset_json_text, py::arg("name"));
    m.def(
        "run_scenario_json",
        [](const std::string& text, const std::string& out_dir) {
            auto cfg = parse_scenario(nlohmann::json::parse(text));
            if (!out_dir.empty()) cfg.run.out_dir = out_dir;
            const auto art = run_scenario(cfg);
            py::dict d;
            d["report_path"] = art.report_path.string();
            d["exit_code"] = art.exit_code;
            return d;
        },
        py::arg("config_json"), py::arg("out_dir") = std::string());
}
