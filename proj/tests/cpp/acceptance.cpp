// Acceptance gate for the desk-scale verification suite. Runs the standard
// configuration (n = 256, L = 64, t in [2, 50], eps = 0.05) plus a massless
// companion run and a short mass sweep, and prints exactly one PASS/FAIL
// line per acceptance criterion. Exit code 0 iff every criterion passes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "soler2d/report.hpp"

using namespace soler2d;

namespace {

int g_failures = 0;

void report(int index, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", index, what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

SpinorField smooth_random_field(const Grid& g, double mass, double amp,
                                unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SpinorField f = SpinorField::zero(g, 2.0, mass);
    for (int ky = 0; ky < g.n; ++ky)
        for (int kx = 0; kx < g.n; ++kx) {
            const double k2 = g.freq(kx) * g.freq(kx) + g.freq(ky) * g.freq(ky);
            const double w = amp * std::exp(-0.5 * k2);
            const std::size_t idx = static_cast<std::size_t>(ky) * g.n + kx;
            f.c0[idx] = cplx{u(rng), u(rng)} * w;
            f.c1[idx] = cplx{u(rng), u(rng)} * w;
        }
    to_nodal(g, f.c0);
    to_nodal(g, f.c1);
    return f;
}

double field_l2_diff(const SpinorField& a, const SpinorField& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.c0.size(); ++k)
        acc += std::norm(a.c0[k] - b.c0[k]) + std::norm(a.c1[k] - b.c1[k]);
    return std::sqrt(acc) * a.grid.dx();
}

double field_max_diff(const SpinorField& a, const SpinorField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.c0.size(); ++k)
        m = std::max(m, std::max(std::abs(a.c0[k] - b.c0[k]),
                                 std::abs(a.c1[k] - b.c1[k])));
    return m;
}

// Interpolation floor of the sampled bump: its trig interpolant evaluated
// outside the unit ball, where the exact profile vanishes. This is the
// smallest leak any spectral evolution of the sampled data can show.
double bump_truncation_floor(const Grid& g) {
    Plane chi(g.size());
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            chi[static_cast<std::size_t>(iy) * g.n + ix] =
                bump_chi(std::hypot(g.coord(ix), g.coord(iy)));
    to_modal(g, chi);
    const int factor = 4;
    const Plane fine = upsample_from_modal(g, chi, factor);
    const Grid gf{g.n * factor, g.half_width};
    double floor_val = 0.0;
    for (int iy = 0; iy < gf.n; ++iy)
        for (int ix = 0; ix < gf.n; ++ix) {
            if (std::hypot(gf.coord(ix), gf.coord(iy)) < 1.0) continue;
            floor_val = std::max(
                floor_val, std::abs(fine[static_cast<std::size_t>(iy) * gf.n + ix]));
        }
    return floor_val;
}

// Light-weight standard-scale run used for the interior masses of the sweep:
// evolution plus pointwise decay monitors only.
struct DecayMonitors {
    double early = 0.0;  // max over t in [4, 10]
    double late = 0.0;   // max over t in [10, t_end]
};

DecayMonitors decay_monitors_for_mass(double mass) {
    const Grid g{256, 64.0};
    const SpinorField f0 = make_initial_data(g, 0.05, {1.0, 0.0}, mass);
    StepperConfig st;
    st.dt = 0.03125;
    st.t_end = 50.0;
    st.snapshot_every = 32;
    st.accumulate_scattering = false;
    const History h = evolve_to(f0, st).history;
    DecayMonitors m;
    for (const Snapshot& sn : h.snaps) {
        const DecayProfile p = decay_profile(h, sn.t);
        if (sn.t >= 4.0 && sn.t <= 10.0) m.early = std::max(m.early, p.weighted_sup);
        if (sn.t >= 10.0) m.late = std::max(m.late, p.weighted_sup);
    }
    return m;
}

}  // namespace

int main() {
    std::mt19937 rng(20260823);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // ---- criterion 1: exact-algebra identity suite -------------------------
    double algebra_max = 0.0;
    double series_max = 0.0;
    {
        for (const auto& [name, residual] : verify_algebra(20260823)) {
            if (name == "propagator_series_oracle")
                series_max = residual;  // consumed by criterion 2
            else
                algebra_max = std::max(algebra_max, residual);
        }
        report(1, algebra_max <= 1e-10,
               "exact-algebra identities over 2000 random samples per check: max "
               "residual " + num(algebra_max) + " (tol 1e-10)");
    }

    // ---- criterion 2: linear propagator -------------------------------------
    {
        const Grid g{64, 8.0};
        const SpinorField f = smooth_random_field(g, 0.7, 1.0, 11);
        double uni = 0.0;
        for (double t : {0.3, 1.7, -0.9})
            for (int k = 0; k <= 3; ++k) {
                const double n0 = sobolev_norm(f, k);
                uni = std::max(uni, std::abs(sobolev_norm(propagate_dirac(f, t), k) -
                                             n0) / n0);
            }
        const double grp = field_max_diff(propagate_dirac(propagate_dirac(f, 0.9), 0.4),
                                          propagate_dirac(f, 1.3));
        const bool ok = uni <= 1e-12 && grp <= 1e-11 && series_max <= 1e-10;
        report(2, ok,
               "propagator: H^k (k <= 3) unitarity " + num(uni) +
               " (tol 1e-12), group law " + num(grp) +
               " (tol 1e-11), series oracle " + num(series_max) + " (tol 1e-10)");
    }

    // ---- standard run, shared by criteria 3, 4, 6, 7 -----------------------
    std::cerr << "[acceptance] standard run (m = 1)..." << std::endl;
    RunConfig standard;  // defaults pin the standard scale
    const RunOutput run1 = run_simulation(standard);

    // ---- criterion 3: integrator --------------------------------------------
    {
        // Strang self-convergence order on a small smooth problem
        const Grid g{32, 4.0};
        const SpinorField f0 = smooth_random_field(g, 1.0, 0.8, 22);
        const double T = 0.4;
        auto run = [&](double dt) {
            SpinorField f = f0;
            const int steps = static_cast<int>(std::lround(T / dt));
            for (int s = 0; s < steps; ++s) strang_step(f, dt);
            return f;
        };
        const SpinorField ref = run(T / 128.0);
        const double order = std::log2(field_l2_diff(run(T / 16.0), ref) /
                                       field_l2_diff(run(T / 32.0), ref));

        // pointwise invariants of the exact nonlinear substep
        SpinorField inv = smooth_random_field(g, 1.0, 1.3, 33);
        const SpinorField before = inv;
        nonlinear_substep(inv, 0.37);
        double inv_res = 0.0;
        for (std::size_t k = 0; k < inv.c0.size(); ++k) {
            inv_res = std::max(inv_res, std::abs(inv.at(k).norm_sq() -
                                                 before.at(k).norm_sq()));
            inv_res = std::max(inv_res, std::abs(soler_density(inv.at(k)) -
                                                 soler_density(before.at(k))));
        }

        // light-cone confinement against the independent interpolation floor
        const double floor_val = bump_truncation_floor(standard.grid());
        const double leak_bound =
            std::max(1e-10, 0.5 * floor_val * standard.epsilon);
        const double leak = run1.summary.support_leak;

        const bool ok = run1.summary.charge_drift <= 1e-6 && order >= 1.8 &&
                        order <= 2.2 && inv_res <= 1e-13 && leak <= leak_bound;
        report(3, ok,
               "integrator: charge drift " + num(run1.summary.charge_drift) +
               " (tol 1e-6), order " + num(order) +
               " (range [1.8, 2.2]), substep invariants " + num(inv_res) +
               " (tol 1e-13), support leak " + num(leak) + " (floor bound " +
               num(leak_bound) + ")");
    }

    // ---- criterion 4: hyperboloidal energies --------------------------------
    {
        const RunSummary& sm = run1.summary;
        const bool ok = sm.energy_identity_max_residual <= 1e-8 &&
                        sm.energy_bound_ok && sm.energy_variation <= 0.10;
        report(4, ok,
               "energies on s in [2, 9]: identity residual " +
               num(sm.energy_identity_max_residual) +
               " (tol 1e-8), factor-4 bound " +
               std::string(sm.energy_bound_ok ? "never violated" : "VIOLATED") +
               ", E^D variation " + num(sm.energy_variation) + " (tol 0.10)");
    }

    // ---- massless companion run, shared by criteria 5 and 8 ----------------
    std::cerr << "[acceptance] companion run (m = 0)..." << std::endl;
    RunConfig massless = standard;
    massless.mass = 0.0;
    massless.companion = true;
    const RunOutput run0 = run_simulation(massless);

    // ---- criterion 5: unified decay across the mass range ------------------
    {
        std::vector<std::pair<double, DecayMonitors>> sweep;
        sweep.push_back({0.0, {run0.summary.decay_monitor_early,
                               run0.summary.decay_monitor_late}});
        for (double m : {0.25, 0.5, 0.75}) {
            std::cerr << "[acceptance] sweep run (m = " << m << ")..." << std::endl;
            sweep.push_back({m, decay_monitors_for_mass(m)});
        }
        sweep.push_back({1.0, {run1.summary.decay_monitor_early,
                               run1.summary.decay_monitor_late}});
        bool bounded = true;
        double worst_ratio = 0.0;
        for (const auto& [m, mon] : sweep) {
            const double ratio = mon.early > 0.0 ? mon.late / mon.early : 0.0;
            worst_ratio = std::max(worst_ratio, ratio);
            bounded = bounded && mon.early > 0.0 && ratio <= 2.0;
        }
        const double expo = run1.summary.decay_exponent;
        const bool ok = bounded && expo >= -1.2 && expo <= -0.8;
        report(5, ok,
               "decay for m in {0, 0.25, 0.5, 0.75, 1}: worst late/early monitor "
               "ratio " + num(worst_ratio) + " (tol 2), m = 1 sup-decay exponent " +
               num(expo) + " (range [-1.2, -0.8])");
    }

    // ---- criterion 6: scattering --------------------------------------------
    {
        const RunSummary& sm = run1.summary;
        const bool decreasing =
            sm.scatter_sqrt_t_low_first > 0.0 &&
            sm.scatter_sqrt_t_low_last < sm.scatter_sqrt_t_low_first;
        const bool ok = sm.scatter_refinement_delta <= 1e-6 &&
                        sm.scatter_exponent_high <= -0.4 && decreasing;
        report(6, ok,
               "scattering: refinement delta " + num(sm.scatter_refinement_delta) +
               " (tol 1e-6), H^3-error exponent " + num(sm.scatter_exponent_high) +
               " (tol -0.4), sqrt(t)*H^1 error " +
               num(sm.scatter_sqrt_t_low_first) + " -> " +
               num(sm.scatter_sqrt_t_low_last) +
               (decreasing ? " (decreasing)" : " (NOT decreasing)"));
    }

    // ---- criterion 7: ghost-weight integrability ----------------------------
    {
        const RunSummary& sm = run1.summary;
        const bool ok = sm.ghost_total > 0.0 && sm.ghost_tail <= 0.5 * sm.ghost_total;
        report(7, ok,
               "ghost integral: tail over [25, 50] " + num(sm.ghost_tail) +
               " vs total " + num(sm.ghost_total) + " (tail <= 0.5 total)");
    }

    // ---- criterion 8: massless improvement with the companion field --------
    {
        const RunSummary& sm = run0.summary;
        const bool mono = sm.improved_monitor_early > 0.0 &&
                          sm.improved_monitor_late <=
                              4.0 * sm.improved_monitor_early;
        const bool ok = mono && sm.companion_residual <= 1e-3;
        report(8, ok,
               "massless improvement: improved monitor late/early " +
               num(sm.improved_monitor_early > 0.0
                       ? sm.improved_monitor_late / sm.improved_monitor_early
                       : -1.0) +
               " (tol 4), companion relation residual " +
               num(sm.companion_residual) + " (tol 1e-3 at n = 256)");
    }

    // ---- criterion 9: boost commutators on manufactured fields -------------
    {
        const TestField f = [](double t, const Vec2& x) -> Spinor {
            const double e = std::exp(-0.25 * (x.x * x.x + x.y * x.y) - 0.1 * t * t);
            return {cplx{e * (1.0 + 0.3 * x.x), 0.2 * e * t},
                    cplx{0.5 * e * x.y, -e * 0.4}};
        };
        std::vector<std::pair<double, Vec2>> samples;
        for (int k = 0; k < 12; ++k)
            samples.emplace_back(1.0 + 2.0 * 0.5 * (u(rng) + 1.0),
                                 Vec2{u(rng), u(rng)});
        bool ok = true;
        double worst_ratio = 0.0, worst_ext = 0.0;
        for (int a = 1; a <= 2; ++a) {
            const double r1 = commutator_residual(f, a, samples, 0.04);
            const double r2 = commutator_residual(f, a, samples, 0.02);
            const double r3 = commutator_residual(f, a, samples, 0.01);
            const double ratio = r1 / r2;
            const double ext = std::abs(16.0 * r3 - r2) / 15.0;
            worst_ratio = std::max(worst_ratio, std::abs(ratio - 16.0));
            worst_ext = std::max(worst_ext, ext);
            ok = ok && ratio >= 13.0 && ratio <= 19.0 && ext <= 1e-8;
        }
        report(9, ok,
               "commutators: h^4 refinement ratio within 16 +/- " +
               num(worst_ratio) + " (tol 3), extrapolated residual " +
               num(worst_ext) + " (tol 1e-8)");
    }

    if (g_failures == 0) {
        std::printf("all 9 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", g_failures);
    return 1;
}
