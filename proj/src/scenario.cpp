#include "crossimpact/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace crossimpact {

const char* const kLibraryVersion = "0.1.0";

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ConfigParseError(std::string(what) + ": expected an array of row arrays");
    const auto rows = j.size(), cols = j.front().size();
    Matrix M(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols)
            throw ConfigParseError(std::string(what) + ": ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
    }
    return M;
}

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigParseError(std::string(what) + ": expected an array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

template <typename T>
T require(const json& j, const char* key, const char* ctx) {
    if (!j.contains(key))
        throw ConfigParseError(std::string(ctx) + ": missing required field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string(ctx) + ": bad field '" + key + "': " + e.what());
    }
}

ScalarDecay decay_from_json(const json& j) {
    const auto kind = require<std::string>(j, "kind", "decay");
    if (kind == "const") return ScalarDecay::constant(require<double>(j, "c", "decay"));
    if (kind == "exp")
        return ScalarDecay::exponential(require<double>(j, "c", "decay"),
                                        require<double>(j, "rho", "decay"));
    if (kind == "power_law")
        return ScalarDecay::power_law(require<double>(j, "c", "decay"),
                                      require<double>(j, "beta", "decay"),
                                      require<double>(j, "t0", "decay"));
    if (kind == "tabulated") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : j.at("points")) pts.emplace_back(p[0].get<double>(), p[1].get<double>());
        return ScalarDecay::tabulated(std::move(pts));
    }
    throw ConfigParseError("decay: unknown kind '" + kind + "'");
}

json decay_to_json(const ScalarDecay& d) {
    json j;
    switch (d.kind) {
        case ScalarDecay::Kind::Const:
            j["kind"] = "const";
            j["c"] = d.c;
            break;
        case ScalarDecay::Kind::Exp:
            j["kind"] = "exp";
            j["c"] = d.c;
            j["rho"] = d.rho;
            break;
        case ScalarDecay::Kind::PowerLawShifted:
            j["kind"] = "power_law";
            j["c"] = d.c;
            j["beta"] = d.beta;
            j["t0"] = d.t0;
            break;
        case ScalarDecay::Kind::Tabulated: {
            json pts = json::array();
            for (const auto& [t, v] : d.table) pts.push_back(json::array({t, v}));
            j["kind"] = "tabulated";
            j["points"] = std::move(pts);
            break;
        }
    }
    return j;
}

}  // namespace

PropagatorSpec spec_from_json(const json& j, double T_hint) {
    const auto kind = require<std::string>(j, "kind", "kernel");
    try {
        if (kind == "zero") {
            const int N = j.contains("N") ? j.at("N").get<int>() : 0;
            return PropagatorSpec::zero(N > 0 ? N : 1);
        }
        if (kind == "factorized_exp")
            return PropagatorSpec::factorized_exp(matrix_from_json(j.at("C"), "kernel.C"),
                                                  require<double>(j, "rho", "kernel"));
        if (kind == "factorized_fractional")
            return PropagatorSpec::factorized_fractional(matrix_from_json(j.at("C"), "kernel.C"),
                                                         require<double>(j, "alpha", "kernel"));
        if (kind == "factorized_power_law")
            return PropagatorSpec::factorized_power_law(matrix_from_json(j.at("C"), "kernel.C"),
                                                        require<double>(j, "beta", "kernel"),
                                                        require<double>(j, "t0", "kernel"));
        if (kind == "matrix_exp")
            return PropagatorSpec::matrix_exp(matrix_from_json(j.at("Cmat"), "kernel.Cmat"));
        if (kind == "permanent")
            return PropagatorSpec::permanent(matrix_from_json(j.at("C"), "kernel.C"));
        if (kind == "constructed") {
            std::vector<ScalarDecay> gs;
            for (const auto& g : j.at("g_list")) gs.push_back(decay_from_json(g));
            return PropagatorSpec::constructed(matrix_from_json(j.at("Q"), "kernel.Q"),
                                               std::move(gs));
        }
        if (kind == "bond")
            return PropagatorSpec::bond(matrix_from_json(j.at("C"), "kernel.C"),
                                        require<double>(j, "alpha_bond", "kernel"),
                                        decay_from_json(j.at("H")), T_hint);
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string("kernel: ") + e.what());
    }
    throw ConfigParseError("kernel: unknown kind '" + kind + "'");
}

json spec_to_json(const PropagatorSpec& spec) {
    json j;
    j["kind"] = kernel_kind_name(spec.kind);
    switch (spec.kind) {
        case KernelKind::Zero:
            j["N"] = spec.N;
            break;
        case KernelKind::FactorizedExp:
            j["C"] = matrix_to_json(spec.C);
            j["rho"] = spec.rho_decay;
            break;
        case KernelKind::FactorizedFractionalSingular:
            j["C"] = matrix_to_json(spec.C);
            j["alpha"] = spec.alpha;
            break;
        case KernelKind::FactorizedPowerLawShifted:
            j["C"] = matrix_to_json(spec.C);
            j["beta"] = spec.beta_pl;
            j["t0"] = spec.t0;
            break;
        case KernelKind::MatrixExp:
            j["Cmat"] = matrix_to_json(spec.Cmat);
            break;
        case KernelKind::Permanent:
            j["C"] = matrix_to_json(spec.C);
            break;
        case KernelKind::Constructed: {
            j["Q"] = matrix_to_json(spec.Q);
            json gs = json::array();
            for (const auto& g : spec.g_list) gs.push_back(decay_to_json(g));
            j["g_list"] = std::move(gs);
            break;
        }
        case KernelKind::Bond:
            j["C"] = matrix_to_json(spec.C);
            j["alpha_bond"] = spec.alpha_bond;
            j["H"] = decay_to_json(spec.H_inner);
            break;
    }
    return j;
}

namespace {

SignalModel signal_from_json(const json& j, int N) {
    const auto kind = require<std::string>(j, "kind", "signal");
    if (kind == "none") return SignalModel::none(N);
    if (kind == "deterministic") {
        const Matrix table = matrix_from_json(j.at("drift_table"), "signal.drift_table");
        if (table.cols() != N + 1)
            throw ConfigParseError("signal.drift_table rows must be [t, v_1..v_N]");
        SignalModel m = SignalModel::deterministic(N, [table, N](double t) {
            // piecewise-linear interpolation of the drift table, clamped ends
            Vector out(N);
            if (t <= table(0, 0)) return Vector(table.row(0).tail(N).transpose());
            const auto last = table.rows() - 1;
            if (t >= table(last, 0)) return Vector(table.row(last).tail(N).transpose());
            for (Eigen::Index r = 1; r < table.rows(); ++r) {
                if (t <= table(r, 0)) {
                    const double w = (t - table(r - 1, 0)) / (table(r, 0) - table(r - 1, 0));
                    out = ((1.0 - w) * table.row(r - 1).tail(N) + w * table.row(r).tail(N))
                              .transpose();
                    return out;
                }
            }
            return Vector(table.row(last).tail(N).transpose());
        });
        m.drift_table = table;
        return m;
    }
    if (kind == "ou") {
        return SignalModel::ou(vector_from_json(j.at("beta"), "signal.beta"),
                               vector_from_json(j.at("I0"), "signal.I0"),
                               matrix_from_json(j.at("noise_scale"), "signal.noise_scale"));
    }
    throw ConfigParseError("signal: unknown kind '" + kind + "'");
}

json signal_to_json(const SignalModel& m) {
    json j;
    if (m.is_none) {
        j["kind"] = "none";
        return j;
    }
    if (m.kind == SignalModel::Kind::Deterministic) {
        j["kind"] = "deterministic";
        j["drift_table"] = matrix_to_json(m.drift_table);
        return j;
    }
    j["kind"] = "ou";
    j["beta"] = vector_to_json(m.beta_diag);
    j["I0"] = vector_to_json(m.I0);
    j["noise_scale"] = matrix_to_json(m.noise_scale);
    return j;
}

RunMode mode_from_string(const std::string& s) {
    if (s == "solve") return RunMode::Solve;
    if (s == "audit") return RunMode::Audit;
    if (s == "figure-preset") return RunMode::FigurePreset;
    if (s == "sweep") return RunMode::Sweep;
    throw ConfigParseError("run.mode: unknown mode '" + s + "'");
}

const char* mode_to_string(RunMode m) {
    switch (m) {
        case RunMode::Solve: return "solve";
        case RunMode::Audit: return "audit";
        case RunMode::FigurePreset: return "figure-preset";
        case RunMode::Sweep: return "sweep";
    }
    return "solve";
}

SolverChoice solver_from_string(const std::string& s) {
    if (s == "auto") return SolverChoice::Auto;
    if (s == "deterministic") return SolverChoice::Deterministic;
    if (s == "path") return SolverChoice::Path;
    if (s == "resolvent") return SolverChoice::Resolvent;
    throw ConfigParseError("run.solver: unknown solver '" + s + "'");
}

const char* solver_to_string(SolverChoice c) {
    switch (c) {
        case SolverChoice::Auto: return "auto";
        case SolverChoice::Deterministic: return "deterministic";
        case SolverChoice::Path: return "path";
        case SolverChoice::Resolvent: return "resolvent";
    }
    return "auto";
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
    ScenarioConfig cfg;
    try {
        const json& m = doc.at("market");
        cfg.market.N = require<int>(m, "N", "market");
        cfg.market.T = require<double>(m, "T", "market");
        cfg.market.Lambda = matrix_from_json(m.at("Lambda"), "market.Lambda");
        cfg.market.Sigma = matrix_from_json(m.at("Sigma"), "market.Sigma");
        cfg.market.gamma = require<double>(m, "gamma", "market");
        cfg.market.varrho = require<double>(m, "varrho", "market");
        cfg.market.Pi = matrix_from_json(m.at("Pi"), "market.Pi");
        cfg.market.X0 = vector_from_json(m.at("X0"), "market.X0");

        const json& g = doc.at("grid");
        const int n = require<int>(g, "n", "grid");
        if (g.contains("T") && std::abs(g.at("T").get<double>() - cfg.market.T) > 1e-12)
            throw ConfigParseError("grid.T disagrees with market.T");
        cfg.grid = Grid(n, cfg.market.T);

        cfg.kernel = spec_from_json(doc.at("kernel"), cfg.market.T);
        if (cfg.kernel.kind == KernelKind::Zero) cfg.kernel = PropagatorSpec::zero(cfg.market.N);

        cfg.signal = signal_from_json(doc.at("signal"), cfg.market.N);
        // the signal block may carry its own seed; it becomes the default run
        // seed when run.seeds is absent
        std::optional<std::uint64_t> signal_seed;
        if (doc.at("signal").contains("seed"))
            signal_seed = doc.at("signal").at("seed").get<std::uint64_t>();

        if (doc.contains("run")) {
            const json& r = doc.at("run");
            if (r.contains("mode")) cfg.run.mode = mode_from_string(r.at("mode").get<std::string>());
            if (r.contains("solver"))
                cfg.run.solver = solver_from_string(r.at("solver").get<std::string>());
            if (r.contains("seeds"))
                for (const auto& s : r.at("seeds")) cfg.run.seeds.push_back(s.get<std::uint64_t>());
            if (r.contains("out_dir")) cfg.run.out_dir = r.at("out_dir").get<std::string>();
            if (r.contains("force_inadmissible"))
                cfg.run.force_inadmissible = r.at("force_inadmissible").get<bool>();
            if (r.contains("dump_matrices"))
                cfg.run.dump_matrices = r.at("dump_matrices").get<bool>();
        }
        if (doc.contains("name")) cfg.name = doc.at("name").get<std::string>();

        cfg.market.validate();
        cfg.kernel.validate();
        cfg.signal.validate();
        if (cfg.kernel.N != cfg.market.N)
            throw ConfigParseError("kernel dimension disagrees with market.N");
        if (cfg.signal.dim() != cfg.market.N)
            throw ConfigParseError("signal dimension disagrees with market.N");
        if (cfg.run.seeds.empty() && signal_seed) cfg.run.seeds.push_back(*signal_seed);
        if (cfg.run.seeds.empty()) cfg.run.seeds.push_back(1);
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string("config: ") + e.what());
    } catch (const ConfigParseError&) {
        throw;
    } catch (const Error& e) {
        // invalid parameter values inside an otherwise well-formed document
        throw ConfigParseError(std::string("config: ") + e.what());
    }
    return cfg;
}

ScenarioConfig parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailureError("cannot open config file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string("config: ") + e.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const ScenarioConfig& cfg) {
    json doc;
    doc["name"] = cfg.name;
    doc["market"] = {{"N", cfg.market.N},       {"T", cfg.market.T},
                     {"Lambda", matrix_to_json(cfg.market.Lambda)},
                     {"Sigma", matrix_to_json(cfg.market.Sigma)},
                     {"gamma", cfg.market.gamma},
                     {"varrho", cfg.market.varrho},
                     {"Pi", matrix_to_json(cfg.market.Pi)},
                     {"X0", vector_to_json(cfg.market.X0)}};
    doc["grid"] = {{"n", cfg.grid.n}, {"T", cfg.grid.T}};
    doc["kernel"] = spec_to_json(cfg.kernel);
    doc["signal"] = signal_to_json(cfg.signal);
    json seeds = json::array();
    for (auto s : cfg.run.seeds) seeds.push_back(s);
    doc["run"] = {{"mode", mode_to_string(cfg.run.mode)},
                  {"solver", solver_to_string(cfg.run.solver)},
                  {"seeds", std::move(seeds)},
                  {"out_dir", cfg.run.out_dir},
                  {"force_inadmissible", cfg.run.force_inadmissible},
                  {"dump_matrices", cfg.run.dump_matrices}};
    return doc;
}

std::string canonical_dump(const json& doc) { return doc.dump(2) + "\n"; }

json admissibility_to_json(const AdmissibilityReport& report) {
    json j;
    j["structural"] = {{"verdict", structural_verdict_name(report.structural.verdict)},
                       {"reason", report.structural.reason}};
    json g = {{"verdict", grid_verdict_name(report.grid.verdict)},
              {"min_eigenvalue", report.grid.min_eigenvalue},
              {"max_eigenvalue", report.grid.max_eigenvalue},
              {"n", report.grid.grid_n}};
    if (report.grid.witness) {
        g["witness"] = matrix_to_json(*report.grid.witness);
        g["witness_transient_cost"] = *report.grid.witness_cost;
    }
    j["grid"] = std::move(g);
    j["admissible"] = report.admissible();
    return j;
}

json breakdown_to_json(const ObjectiveBreakdown& b) {
    return {{"execution_cost", b.execution_cost},
            {"terminal_book_value", b.terminal_book_value},
            {"transient_cost", b.transient_cost},
            {"temporary_cost", b.temporary_cost},
            {"risk_penalty", b.risk_penalty},
            {"terminal_penalty", b.terminal_penalty},
            {"total", b.total}};
}

// ----------------------------------------------------------------- execution

namespace {

std::filesystem::path resolve_out_dir(const ScenarioConfig& cfg) {
    if (!cfg.run.out_dir.empty()) return cfg.run.out_dir;
    if (const char* env = std::getenv("CROSSIMPACT_OUT_DIR")) return std::filesystem::path(env) / cfg.name;
    return std::filesystem::path("out") / cfg.name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailureError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoFailureError("write failed: " + path.string());
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trajectories_csv(const ScenarioConfig& cfg, const SolveReport& rep,
                             const Matrix& signal_nodes) {
    const int n = cfg.grid.n, N = cfg.market.N;
    std::string out;
    out += "t";
    for (int i = 1; i <= N; ++i) out += ",u_" + std::to_string(i);
    for (int i = 1; i <= N; ++i) out += ",X_" + std::to_string(i);
    for (int i = 1; i <= N; ++i) out += ",D_" + std::to_string(i);
    for (int i = 1; i <= N; ++i) out += ",I_" + std::to_string(i);
    out += "\n";
    for (int k = 0; k <= n; ++k) {
        out += format_g17(cfg.grid.node(k));
        for (int i = 0; i < N; ++i) out += "," + format_g17(rep.strategy.u(k, i));
        for (int i = 0; i < N; ++i) out += "," + format_g17(rep.inventory(k, i));
        for (int i = 0; i < N; ++i) out += "," + format_g17(rep.distortion(k, i));
        for (int i = 0; i < N; ++i) out += "," + format_g17(signal_nodes(k, i));
        out += "\n";
    }
    return out;
}

std::string matrix_csv(const Matrix& M) {
    std::string out;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out += ",";
            out += format_g17(M(i, j));
        }
        out += "\n";
    }
    return out;
}

SolveReport dispatch_solve(const ScenarioConfig& cfg, const SignalPath& path,
                           const SolveOptions& opts) {
    SolverChoice choice = cfg.run.solver;
    if (choice == SolverChoice::Auto)
        choice = cfg.signal.kind == SignalModel::Kind::OU ? SolverChoice::Path
                                                          : SolverChoice::Deterministic;
    switch (choice) {
        case SolverChoice::Deterministic: {
            const Matrix g = g_nodes(cfg.market, cfg.signal, cfg.grid);
            return solve_deterministic(cfg.market, cfg.kernel, g, cfg.grid, opts);
        }
        case SolverChoice::Path:
            return solve_stochastic_path(cfg.market, cfg.kernel, cfg.signal, path, cfg.grid, opts);
        case SolverChoice::Resolvent:
            return solve_stochastic_resolvent(cfg.market, cfg.kernel, cfg.signal, path, cfg.grid,
                                              opts);
        case SolverChoice::Auto:
            break;
    }
    throw Error("unreachable solver choice");
}

}  // namespace

RunArtifacts run_audit(const ScenarioConfig& cfg) {
    RunArtifacts art;
    art.admissibility = audit_kernel(cfg.kernel, cfg.grid);
    const auto out_dir = resolve_out_dir(cfg);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoFailureError("cannot create output directory: " + out_dir.string());

    json report;
    report["library_version"] = kLibraryVersion;
    report["config"] = scenario_to_json(cfg);
    report["admissibility"] = admissibility_to_json(art.admissibility);
    art.report_path = out_dir / "report.json";
    write_text(art.report_path, canonical_dump(report));
    art.exit_code = art.admissibility.admissible() ? kExitOk : kExitInadmissible;
    return art;
}

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
    if (cfg.run.mode == RunMode::Audit) return run_audit(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    RunArtifacts art;
    const auto out_dir = resolve_out_dir(cfg);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoFailureError("cannot create output directory: " + out_dir.string());

    art.admissibility = audit_kernel(cfg.kernel, cfg.grid);
    if (!art.admissibility.admissible() && !cfg.run.force_inadmissible)
        throw InadmissibleKernelError(
            "kernel failed admissibility checks (" + art.admissibility.structural.reason +
            "); rerun with --force-inadmissible to solve anyway");

    SolveOptions opts;
    opts.force = cfg.run.force_inadmissible;
    // the audit above already decided admissibility for this scenario
    opts.check_admissibility = false;

    // seeds solve independently across a worker pool; artifacts are written
    // sequentially afterwards so each file has exactly one writer
    const std::size_t num_seeds = cfg.run.seeds.size();
    std::vector<SignalPath> paths(num_seeds);
    std::vector<SolveReport> reps(num_seeds);
    {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= num_seeds) break;
                const auto seed = cfg.run.seeds[i];
                SignalPath path = cfg.signal.kind == SignalModel::Kind::OU
                                      ? simulate_ou_path(cfg.signal, cfg.grid, seed)
                                      : deterministic_path(cfg.signal, cfg.grid);
                path.seed = seed;
                reps[i] = dispatch_solve(cfg, path, opts);
                paths[i] = std::move(path);
            }
        };
        const std::size_t workers = std::max<std::size_t>(
            1, std::min<std::size_t>(std::thread::hardware_concurrency(), num_seeds));
        std::vector<std::future<void>> futures;
        futures.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            futures.push_back(std::async(std::launch::async, worker));
        for (auto& f : futures) f.get();
    }

    json runs = json::array();
    std::vector<double> totals;
    for (std::size_t idx = 0; idx < num_seeds; ++idx) {
        const auto seed = cfg.run.seeds[idx];
        SolveReport& rep = reps[idx];
        const std::string csv_name = num_seeds == 1
                                         ? "trajectories.csv"
                                         : "trajectories_seed" + std::to_string(seed) + ".csv";
        const auto csv_path = out_dir / csv_name;
        write_text(csv_path, trajectories_csv(cfg, rep, paths[idx].I));
        art.trajectory_paths.push_back(csv_path);

        json r;
        r["seed"] = seed;
        r["objective"] = breakdown_to_json(rep.objective);
        r["foc_residual_abs"] = rep.foc_residual_abs;
        r["foc_residual_rel"] = rep.foc_residual_rel;
        r["wall_seconds"] = rep.wall_seconds;
        r["trajectories"] = csv_name;
        runs.push_back(std::move(r));
        totals.push_back(rep.objective.total);
        art.solves.push_back(std::move(rep));
    }

    if (cfg.run.dump_matrices) {
        const auto sys = assemble_D(cfg.market, cfg.kernel, cfg.grid);
        write_text(out_dir / "matrix_D.csv", matrix_csv(sys.D));
    }

    json report;
    report["library_version"] = kLibraryVersion;
    report["config"] = scenario_to_json(cfg);
    report["admissibility"] = admissibility_to_json(art.admissibility);
    report["runs"] = std::move(runs);
    if (totals.size() > 1) {
        double mean = 0.0;
        for (double v : totals) mean += v;
        mean /= totals.size();
        double var = 0.0;
        for (double v : totals) var += (v - mean) * (v - mean);
        var /= (totals.size() - 1);
        report["objective_mc"] = {{"mean", mean},
                                  {"stderr", std::sqrt(var / totals.size())},
                                  {"num_seeds", totals.size()}};
    }
    report["timing_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    art.report_path = out_dir / "report.json";
    write_text(art.report_path, canonical_dump(report));
    art.exit_code = kExitOk;
    return art;
}

RunArtifacts run_sweep(const ScenarioConfig& base, const std::string& param_path,
                       const std::vector<std::string>& values) {
    if (values.empty()) throw ConfigParseError("sweep: no values given");
    const auto out_dir = resolve_out_dir(base);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoFailureError("cannot create output directory: " + out_dir.string());

    // apply a dotted path like market.gamma / kernel.rho / grid.n
    auto apply = [&](const std::string& value) {
        json doc = scenario_to_json(base);
        json* node = &doc;
        std::stringstream ss(param_path);
        std::string tok;
        std::vector<std::string> toks;
        while (std::getline(ss, tok, '.')) toks.push_back(tok);
        if (toks.empty()) throw ConfigParseError("sweep: empty parameter path");
        for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
            if (!node->contains(toks[i]))
                throw ConfigParseError("sweep: unknown parameter path '" + param_path + "'");
            node = &node->at(toks[i]);
        }
        if (!node->contains(toks.back()))
            throw ConfigParseError("sweep: unknown parameter path '" + param_path + "'");
        json parsed = json::parse(value, nullptr, false);
        (*node)[toks.back()] = parsed.is_discarded() ? json(value) : parsed;
        ScenarioConfig cfg = parse_scenario(doc);
        std::string tag = param_path + "=" + value;
        for (auto& c : tag)
            if (c == '/' || c == '\\' || c == ' ') c = '_';
        cfg.name = base.name + "/" + tag;
        cfg.run.out_dir = (out_dir / tag).string();
        cfg.run.mode = RunMode::Solve;
        return cfg;
    };

    // fan out across a bounded worker pool; one output directory per run
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                       values.size()));
    std::vector<std::future<std::pair<std::string, int>>> futures;
    std::vector<ScenarioConfig> cfgs;
    cfgs.reserve(values.size());
    for (const auto& v : values) cfgs.push_back(apply(v));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        std::pair<std::string, int> last{"", 0};
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfgs.size()) break;
            const auto art = run_scenario(cfgs[i]);
            last = {cfgs[i].run.out_dir, art.exit_code};
        }
        return last;
    };
    futures.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) f.get();

    json summary;
    summary["library_version"] = kLibraryVersion;
    summary["param"] = param_path;
    json vals = json::array();
    for (std::size_t i = 0; i < values.size(); ++i)
        vals.push_back({{"value", values[i]}, {"out_dir", cfgs[i].run.out_dir}});
    summary["values"] = std::move(vals);

    RunArtifacts art;
    art.report_path = out_dir / "sweep_summary.json";
    write_text(art.report_path, canonical_dump(summary));
    art.exit_code = kExitOk;
    return art;
}

// ------------------------------------------------------------------- presets

namespace {

json liquidation_market() {
    return {{"N", 2},
            {"T", 10.0},
            {"Lambda", {{0.03, 0.0}, {0.0, 0.03}}},
            {"Sigma", {{0.0, 0.0}, {0.0, 0.0}}},
            {"gamma", 0.0},
            {"varrho", 4.0},
            {"Pi", {{1.0, 0.0}, {0.0, 1.0}}},
            {"X0", {10.0, 0.0}}};
}

json diag_C() { return {{0.06, 0.0}, {0.0, 0.06}}; }
json full_C() { return {{0.06, 0.05}, {0.05, 0.06}}; }

json kernel_zero() { return {{"kind", "zero"}, {"N", 2}}; }
json kernel_exp(json C) { return {{"kind", "factorized_exp"}, {"C", std::move(C)}, {"rho", 0.5}}; }
json kernel_frac(json C) {
    return {{"kind", "factorized_fractional"}, {"C", std::move(C)}, {"alpha", 0.25}};
}

json signal_none() { return {{"kind", "none"}}; }
json signal_ou(double b1, double b2, double i1, double i2) {
    return {{"kind", "ou"},
            {"beta", {b1, b2}},
            {"I0", {i1, i2}},
            {"noise_scale", {{0.0, 0.0}, {0.0, 0.0}}}};
}

json run_block() {
    return {{"mode", "figure-preset"}, {"solver", "auto"},          {"seeds", {1}},
            {"out_dir", ""},           {"force_inadmissible", false}, {"dump_matrices", false}};
}

json make_preset(const std::string& name, json market, json kernel, json signal, json X0,
                 double gamma, double varrho, json Sigma) {
    json doc;
    doc["name"] = name;
    market["X0"] = std::move(X0);
    market["gamma"] = gamma;
    market["varrho"] = varrho;
    market["Sigma"] = std::move(Sigma);
    doc["market"] = std::move(market);
    doc["grid"] = {{"n", 200}, {"T", 10.0}};
    doc["kernel"] = std::move(kernel);
    doc["signal"] = std::move(signal);
    doc["run"] = run_block();
    return doc;
}

std::map<std::string, json> build_presets() {
    std::map<std::string, json> p;
    const json zero_sigma = {{0.0, 0.0}, {0.0, 0.0}};
    const json fig5_sigma = {{0.04, 0.0}, {0.0, 0.05}};

    // no signal, no cross-impact; zero / exponential / fractional kernels
    p["fig1_zero"] = make_preset("fig1_zero", liquidation_market(), kernel_zero(), signal_none(),
                                 {10.0, 0.0}, 0.0, 4.0, zero_sigma);
    p["fig1_exp"] = make_preset("fig1_exp", liquidation_market(), kernel_exp(diag_C()),
                                signal_none(), {10.0, 0.0}, 0.0, 4.0, zero_sigma);
    p["fig1_frac"] = make_preset("fig1_frac", liquidation_market(), kernel_frac(diag_C()),
                                 signal_none(), {10.0, 0.0}, 0.0, 4.0, zero_sigma);

    // no signal, with cross-impact
    p["fig2_exp"] = make_preset("fig2_exp", liquidation_market(), kernel_exp(full_C()),
                                signal_none(), {10.0, 0.0}, 0.0, 4.0, zero_sigma);
    p["fig2_frac"] = make_preset("fig2_frac", liquidation_market(), kernel_frac(full_C()),
                                 signal_none(), {10.0, 0.0}, 0.0, 4.0, zero_sigma);

    // signals with different alpha decays, fractional kernel, with/without cross
    p["fig3"] = make_preset("fig3", liquidation_market(), kernel_frac(full_C()),
                            signal_ou(0.9, 0.3, 0.5, 0.5), {0.0, 0.0}, 0.0, 4.0, zero_sigma);
    p["fig3_nocross"] = make_preset("fig3_nocross", liquidation_market(), kernel_frac(diag_C()),
                                    signal_ou(0.9, 0.3, 0.5, 0.5), {0.0, 0.0}, 0.0, 4.0,
                                    zero_sigma);
    p["fig4"] = make_preset("fig4", liquidation_market(), kernel_frac(full_C()),
                            signal_ou(0.3, 0.9, 0.5, 0.5), {0.0, 0.0}, 0.0, 4.0, zero_sigma);
    p["fig4_nocross"] = make_preset("fig4_nocross", liquidation_market(), kernel_frac(diag_C()),
                                    signal_ou(0.3, 0.9, 0.5, 0.5), {0.0, 0.0}, 0.0, 4.0,
                                    zero_sigma);

    // Markowitz-tracking portfolio choice with independent assets
    p["fig5_zero"] = make_preset("fig5_zero", liquidation_market(), kernel_zero(),
                                 signal_ou(0.05, 0.3, 0.01, -0.01), {7.5, -7.5}, 5.0, 0.0,
                                 fig5_sigma);
    p["fig5_exp"] = make_preset("fig5_exp", liquidation_market(), kernel_exp(diag_C()),
                                signal_ou(0.05, 0.3, 0.01, -0.01), {7.5, -7.5}, 5.0, 0.0,
                                fig5_sigma);
    p["fig5_frac"] = make_preset("fig5_frac", liquidation_market(), kernel_frac(diag_C()),
                                 signal_ou(0.05, 0.3, 0.01, -0.01), {7.5, -7.5}, 5.0, 0.0,
                                 fig5_sigma);

    // aliases used in the text
    p["fig1"] = p["fig1_exp"];
    p["fig1"]["name"] = "fig1";
    p["fig2"] = p["fig2_exp"];
    p["fig2"]["name"] = "fig2";
    p["fig5"] = p["fig5_exp"];
    p["fig5"]["name"] = "fig5";
    return p;
}

const std::map<std::string, json>& presets() {
    static const std::map<std::string, json> p = build_presets();
    return p;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : presets()) names.push_back(k);
    return names;
}

ScenarioConfig preset_config(const std::string& name) {
    const auto& p = presets();
    auto it = p.find(name);
    if (it == p.end()) throw ConfigParseError("unknown preset '" + name + "'");
    return parse_scenario(it->second);
}

std::string preset_json_text(const std::string& name) {
    const auto& p = presets();
    auto it = p.find(name);
    if (it == p.end()) throw ConfigParseError("unknown preset '" + name + "'");
    return canonical_dump(scenario_to_json(parse_scenario(it->second)));
}

}  // namespace crossimpact
