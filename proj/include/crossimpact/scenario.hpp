#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossimpact/admissibility.hpp"
#include "crossimpact/solver.hpp"

namespace crossimpact {

enum class RunMode { Solve, Audit, FigurePreset, Sweep };

enum class SolverChoice { Auto, Deterministic, Path, Resolvent };

struct RunConfig {
    RunMode mode = RunMode::Solve;
    SolverChoice solver = SolverChoice::Auto;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    bool force_inadmissible = false;
    bool dump_matrices = false;
};

// One scenario = one JSON document: market, kernel, signal, grid, run.
struct ScenarioConfig {
    MarketParams market;
    PropagatorSpec kernel;
    SignalModel signal;
    Grid grid;
    RunConfig run;
    std::string name = "scenario";
};

// --- JSON (de)serialization -------------------------------------------------
// Canonical form: keys sorted (nlohmann default), two-space indent, shortest
// round-trip float formatting. parse(canonical_dump(x)) == x byte-stably.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig parse_scenario_file(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const ScenarioConfig& config);
std::string canonical_dump(const nlohmann::json& doc);

nlohmann::json spec_to_json(const PropagatorSpec& spec);
PropagatorSpec spec_from_json(const nlohmann::json& j, double T_hint);

nlohmann::json admissibility_to_json(const AdmissibilityReport& report);
nlohmann::json breakdown_to_json(const ObjectiveBreakdown& b);

// --- presets -----------------------------------------------------------------
// Checked-in scenario fixtures mirroring the numerical-illustration parameter
// sets; `preset_names()` lists them, `preset_config(name)` returns the parsed
// config.
std::vector<std::string> preset_names();
ScenarioConfig preset_config(const std::string& name);
std::string preset_json_text(const std::string& name);

// --- execution ----------------------------------------------------------------
struct RunArtifacts {
    std::filesystem::path report_path;
    std::vector<std::filesystem::path> trajectory_paths;
    AdmissibilityReport admissibility;
    std::vector<SolveReport> solves;  // one per seed
    int exit_code = 0;
};

// Runs one scenario: audits the kernel, solves per seed, writes
// trajectories.csv (t, u_*, X_*, D_*, I_* at 17 significant digits, LF) and
// report.json (objective breakdown, FOC residual, admissibility report,
// timing, canonical config echo, library version).
RunArtifacts run_scenario(const ScenarioConfig& config);

// Audit only; exit code 0 iff structurally admissible or grid-PSD passes.
RunArtifacts run_audit(const ScenarioConfig& config);

// Parameter sweep: `param_path` is a dotted config path (market.gamma,
// kernel.rho, grid.n, ...); one subdirectory per value, runs fan out across a
// small worker pool, plus a sweep_summary.json.
RunArtifacts run_sweep(const ScenarioConfig& config, const std::string& param_path,
                       const std::vector<std::string>& values);

// Exit codes used by the CLI (distinct per error class).
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigParse = 2;
inline constexpr int kExitInadmissible = 3;
inline constexpr int kExitIo = 4;

extern const char* const kLibraryVersion;

}  // namespace crossimpact
