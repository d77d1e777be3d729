#pragma once

// Run orchestration: evolve, compute all diagnostics, emit CSV/JSON/binary
// artifacts. Shared by the CLI and the python bindings.

#include <string>

#include "soler2d/config.hpp"
#include "soler2d/hyperdiag.hpp"
#include "soler2d/scatter.hpp"

namespace soler2d {

struct RunSummary {
    bool trivial_run = false;
    double charge_drift = 0.0;
    double support_leak = 0.0;
    // decay
    double decay_exponent = 0.0;        // fitted slope of sup|psi|
    double decay_monitor_early = 0.0;   // max weighted sup over [4, 10]
    double decay_monitor_late = 0.0;    // max weighted sup over [10, 50]
    double improved_monitor_early = 0.0;
    double improved_monitor_late = 0.0;
    // energies
    double energy_identity_max_residual = 0.0;
    double energy_bound_min_slack = 0.0;
    bool energy_bound_ok = true;
    double energy_variation = 0.0;      // (max - min)/max of E^D over slices
    // scattering
    double scatter_exponent_high = 0.0;
    double scatter_refinement_delta = 0.0;
    double scatter_tail_bound = 0.0;
    double scatter_sqrt_t_low_first = 0.0;  // sqrt(t) * H^{N-1} error at t ~ 10
    double scatter_sqrt_t_low_last = 0.0;   // same at T
    // ghost
    double ghost_total = 0.0;
    double ghost_tail = 0.0;
    // companion
    double companion_residual = 0.0;    // ||i gamma d Psi - psi|| / ||psi|| at T
};

// Full diagnostics of one finished run (no file output).
struct RunOutput {
    EvolveResult evolved;
    RunSummary summary;
    std::vector<double> slice_s;
    std::vector<double> slice_ed, slice_ep, slice_identity, slice_slack;
    std::vector<double> decay_t, decay_sup, decay_weighted, decay_improved;
    ScatterReport scatter;
    GhostIntegral ghost;
};

RunOutput run_simulation(const RunConfig& cfg);

// run + write energy.csv, decay.csv, scatter.csv, ghost.csv, summary.json and
// the snapshot records with their manifest into cfg.output_dir
RunSummary run_and_write(const RunConfig& cfg);

// relative L2 residual of i gamma^mu d_mu Psi = psi at the last snapshot
double companion_residual(const History& h);

struct SweepResult {
    std::vector<double> values;
    std::vector<RunSummary> summaries;
    std::vector<std::string> failures;      // one message per failed member
    double uniformity_ratio = 0.0;          // max over members of late/early monitor
};

SweepResult run_sweep(const std::string& parameter, const std::vector<double>& values,
                      const RunConfig& base, int max_threads);

// exact-identity suites; returns max residual per named check
std::vector<std::pair<std::string, double>> verify_algebra(unsigned seed);

}  // namespace soler2d
