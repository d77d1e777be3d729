// soler2d command line: verify-algebra, run, sweep, report.
// Exit codes: 0 success, 1 check failure, 2 config error, 3 runtime blow-up.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "soler2d/errors.hpp"
#include "soler2d/report.hpp"

namespace {

using soler2d::RunConfig;

int env_threads() {
    if (const char* v = std::getenv("SOLER2D_THREADS")) {
        const int n = std::atoi(v);
        if (n >= 1) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void add_config_flags(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--grid.n", cfg.grid_n, "points per axis (power of two >= 16)");
    cmd.add_option("--grid.L", cfg.grid_l, "half-width of the periodic box");
    cmd.add_option("--sim.dt", cfg.dt, "time step");
    cmd.add_option("--sim.t_end", cfg.t_end, "final time");
    cmd.add_option("--sim.snapshot_stride", cfg.snapshot_stride, "steps per snapshot");
    cmd.add_option("--model.mass", cfg.mass, "mass parameter in [0, 1]");
    cmd.add_option("--data.epsilon", cfg.epsilon, "initial-data amplitude");
    cmd.add_option("--data.direction", cfg.direction, "spinor direction: e1 | diag");
    cmd.add_option("--sobolev.N", cfg.sobolev_n, "regularity index N");
    cmd.add_option("--output.dir", cfg.output_dir, "artifact directory");
    cmd.add_flag("--toggles.companion", cfg.companion, "evolve the companion wave field");
    cmd.add_flag("--toggles.linear_only", cfg.linear_only, "drop the nonlinearity");
    cmd.add_option("--seed", cfg.seed, "rng seed for randomized suites");
    cmd.set_config("--config", "", "key = value config file (dotted keys)");
}

int do_verify(unsigned seed) {
    const auto checks = soler2d::verify_algebra(seed);
    const std::map<std::string, double> tol = {
        {"propagator_unitarity", 1e-12},
        {"propagator_group_law", 1e-11},
    };
    bool ok = true;
    for (const auto& [name, residual] : checks) {
        const auto it = tol.find(name);
        const double lim = (it == tol.end()) ? 1e-10 : it->second;
        const bool pass = residual <= lim;
        ok = ok && pass;
        std::printf("%-28s max residual %.3e  (tol %.0e)  %s\n", name.c_str(),
                    residual, lim, pass ? "ok" : "FAIL");
    }
    return ok ? 0 : 1;
}

int do_run(const RunConfig& cfg) {
    const soler2d::RunSummary sm = soler2d::run_and_write(cfg);
    std::printf("run complete; artifacts in %s\n", cfg.output_dir.c_str());
    std::printf("  charge drift      %.3e\n", sm.charge_drift);
    std::printf("  decay exponent    %+.3f\n", sm.decay_exponent);
    std::printf("  scatter exponent  %+.3f\n", sm.scatter_exponent_high);
    if (sm.trivial_run) std::printf("  trivial run (epsilon = 0)\n");
    return 0;
}

int do_sweep(const std::string& parameter, const std::vector<double>& values,
             const RunConfig& base) {
    const soler2d::SweepResult res =
        soler2d::run_sweep(parameter, values, base, env_threads());
    for (std::size_t j = 0; j < res.values.size(); ++j) {
        const auto& sm = res.summaries[j];
        std::printf("%s = %-8g  weighted sup early %.4e  late %.4e  drift %.2e\n",
                    parameter.c_str(), res.values[j], sm.decay_monitor_early,
                    sm.decay_monitor_late, sm.charge_drift);
    }
    std::printf("uniformity ratio (max late/early): %.3f\n", res.uniformity_ratio);
    for (const auto& msg : res.failures) std::fprintf(stderr, "member failed: %s\n", msg.c_str());
    return res.failures.empty() ? 0 : 1;
}

int do_report(const std::string& dir) {
    const std::filesystem::path file = std::filesystem::path(dir) / "summary.json";
    std::ifstream is(file);
    if (!is) throw soler2d::ConfigError("no summary.json in " + dir + "; run first");
    nlohmann::json js;
    is >> js;
    bool ok = true;
    std::printf("summary of %s\n", dir.c_str());
    for (const auto& [key, val] : js.items()) {
        if (key == "checks" || key == "config") continue;
        std::printf("  %-30s %s\n", key.c_str(), val.dump().c_str());
    }
    for (const auto& [key, val] : js.at("checks").items()) {
        const bool pass = val.get<bool>();
        ok = ok && pass;
        std::printf("  check %-24s %s\n", key.c_str(), pass ? "ok" : "FAIL");
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral simulator for the 2d cubic Dirac (Soler) model"};
    app.require_subcommand(1);

    unsigned verify_seed = 20260823;
    auto* verify = app.add_subcommand("verify-algebra", "exact-identity suites");
    verify->add_option("--seed", verify_seed, "rng seed");

    RunConfig run_cfg;
    auto* run = app.add_subcommand("run", "single run, artifacts to output.dir");
    add_config_flags(*run, run_cfg);

    RunConfig sweep_cfg;
    std::string sweep_param = "mass";
    std::vector<double> sweep_values;
    auto* sweep = app.add_subcommand("sweep", "parallel parameter sweep");
    add_config_flags(*sweep, sweep_cfg);
    sweep->add_option("--parameter", sweep_param, "mass | epsilon");
    sweep->add_option("--values", sweep_values, "sweep values")->required();

    std::string report_dir = "out";
    auto* report = app.add_subcommand("report", "summarize an existing run directory");
    report->add_option("--output.dir", report_dir, "artifact directory");

    try {
        app.parse(argc, argv);
        if (verify->parsed()) return do_verify(verify_seed);
        if (run->parsed()) return do_run(run_cfg);
        if (sweep->parsed()) return do_sweep(sweep_param, sweep_values, sweep_cfg);
        if (report->parsed()) return do_report(report_dir);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const soler2d::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const soler2d::BlowupError& e) {
        std::fprintf(stderr, "blow-up: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
