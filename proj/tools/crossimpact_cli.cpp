// Scenario-driven command-line front end: solve / audit / preset / sweep.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "crossimpact/scenario.hpp"

namespace ci = crossimpact;

namespace {

struct CommonFlags {
    int n = 0;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string out_dir;
    bool force = false;
    bool dump_matrices = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--n", f.n, "Override grid size n");
    cmd->add_option("--seed", f.seed, "Override the signal seed")->each([&](const std::string&) {
        f.has_seed = true;
    });
    cmd->add_option("--out-dir", f.out_dir, "Output directory (default CROSSIMPACT_OUT_DIR)");
    cmd->add_flag("--force-inadmissible", f.force,
                  "Solve even if the kernel fails the admissibility checks");
    cmd->add_flag("--dump-matrices", f.dump_matrices, "Dump the assembled operator matrix as CSV");
}

void apply_common(ci::ScenarioConfig& cfg, const CommonFlags& f) {
    if (f.n > 0) cfg.grid = ci::Grid(f.n, cfg.market.T);
    if (f.has_seed) cfg.run.seeds = {f.seed};
    if (!f.out_dir.empty()) cfg.run.out_dir = f.out_dir;
    if (f.force) cfg.run.force_inadmissible = true;
    if (f.dump_matrices) cfg.run.dump_matrices = true;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ci::ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ci::kExitConfigParse;
    } catch (const ci::InadmissibleKernelError& e) {
        std::cerr << "inadmissible kernel: " << e.what() << "\n";
        return ci::kExitInadmissible;
    } catch (const ci::IoFailureError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return ci::kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ci::kExitFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal portfolio execution under transient cross-impact propagators"};
    app.require_subcommand(1);

    std::string config_path, preset_name, sweep_param;
    std::vector<std::string> sweep_values;
    bool list_presets = false, emit_presets = false;
    std::string emit_dir;
    CommonFlags fsolve, faudit, fpreset, fsweep;

    auto* solve = app.add_subcommand("solve", "Solve the scenario in a config file");
    solve->add_option("config", config_path, "Scenario JSON file")->required();
    add_common(solve, fsolve);

    auto* audit = app.add_subcommand("audit", "Audit the kernel of a scenario for admissibility");
    audit->add_option("config", config_path, "Scenario JSON file")->required();
    add_common(audit, faudit);

    auto* preset = app.add_subcommand("preset", "Run a named figure preset");
    preset->add_option("name", preset_name, "Preset name (see --list)");
    preset->add_flag("--list", list_presets, "List available presets");
    preset->add_flag("--emit", emit_presets, "Write all preset configs as JSON files");
    preset->add_option("--emit-dir", emit_dir, "Directory for --emit (default presets/)");
    add_common(preset, fpreset);

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep over a scenario");
    sweep->add_option("config", config_path, "Scenario JSON file")->required();
    sweep->add_option("--param", sweep_param, "Dotted config path, e.g. market.gamma")->required();
    sweep->add_option("--values", sweep_values, "Values to sweep over")->required()->expected(-1);
    add_common(sweep, fsweep);

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed())
        return guarded([&] {
            auto cfg = ci::parse_scenario_file(config_path);
            cfg.run.mode = ci::RunMode::Solve;
            apply_common(cfg, fsolve);
            const auto art = ci::run_scenario(cfg);
            std::cout << "report: " << art.report_path.string() << "\n";
            return art.exit_code;
        });

    if (audit->parsed())
        return guarded([&] {
            auto cfg = ci::parse_scenario_file(config_path);
            apply_common(cfg, faudit);
            const auto art = ci::run_audit(cfg);
            std::cout << "report: " << art.report_path.string() << "\n";
            std::cout << (art.admissibility.admissible() ? "admissible" : "not admissible")
                      << " (structural: "
                      << ci::structural_verdict_name(art.admissibility.structural.verdict)
                      << ", grid: " << ci::grid_verdict_name(art.admissibility.grid.verdict)
                      << ", min eigenvalue " << art.admissibility.grid.min_eigenvalue << ")\n";
            return art.exit_code;
        });

    if (preset->parsed())
        return guarded([&] {
            if (list_presets) {
                for (const auto& name : ci::preset_names()) std::cout << name << "\n";
                return ci::kExitOk;
            }
            if (emit_presets) {
                const std::filesystem::path dir = emit_dir.empty() ? "presets" : emit_dir;
                std::filesystem::create_directories(dir);
                for (const auto& name : ci::preset_names()) {
                    std::ofstream out(dir / (name + ".json"), std::ios::binary);
                    if (!out) throw ci::IoFailureError("cannot write preset file");
                    out << ci::preset_json_text(name);
                }
                std::cout << "wrote " << ci::preset_names().size() << " presets to " << dir.string()
                          << "\n";
                return ci::kExitOk;
            }
            if (preset_name.empty()) throw ci::ConfigParseError("preset: name required");
            auto cfg = ci::preset_config(preset_name);
            apply_common(cfg, fpreset);
            const auto art = ci::run_scenario(cfg);
            std::cout << "report: " << art.report_path.string() << "\n";
            return art.exit_code;
        });

    if (sweep->parsed())
        return guarded([&] {
            auto cfg = ci::parse_scenario_file(config_path);
            apply_common(cfg, fsweep);
            const auto art = ci::run_sweep(cfg, sweep_param, sweep_values);
            std::cout << "summary: " << art.report_path.string() << "\n";
            return art.exit_code;
        });

    return ci::kExitFailure;
}
