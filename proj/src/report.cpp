#include "soler2d/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "soler2d/errors.hpp"
#include "soler2d/io.hpp"

namespace soler2d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ExponentFit fit_or_empty(const std::vector<double>& ts, const std::vector<double>& vs) {
    std::vector<std::pair<double, double>> series;
    for (std::size_t j = 0; j < ts.size(); ++j)
        if (vs[j] > 0.0) series.emplace_back(ts[j], vs[j]);
    try {
        return fit_exponent(series);
    } catch (const std::invalid_argument&) {
        return {};
    }
}

double window_max(const std::vector<double>& ts, const std::vector<double>& vs,
                  double lo, double hi) {
    double m = 0.0;
    for (std::size_t j = 0; j < ts.size(); ++j)
        if (ts[j] >= lo && ts[j] <= hi && std::isfinite(vs[j])) m = std::max(m, vs[j]);
    return m;
}

}  // namespace

double companion_residual(const History& h) {
    if (h.wave_snaps.empty())
        throw ConfigError("companion_residual: history has no companion field");
    const WaveSnapshot& w = h.wave_snaps.back();
    const Snapshot& sn = h.snaps.back();
    const Grid& g = h.grid;
    const Plane d1p0 = spectral_derivative(g, w.p0, 0);
    const Plane d1p1 = spectral_derivative(g, w.p1, 0);
    const Plane d2p0 = spectral_derivative(g, w.p0, 1);
    const Plane d2p1 = spectral_derivative(g, w.p1, 1);
    const cplx i{0.0, 1.0};
    double res = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < w.p0.size(); ++k) {
        // i g^mu d_mu Psi, componentwise in the fixed representation
        const cplx r0 = i * w.q0[k] - d1p1[k] + i * d2p1[k] - sn.c0[k];
        const cplx r1 = -i * w.q1[k] - d1p0[k] - i * d2p0[k] - sn.c1[k];
        res += std::norm(r0) + std::norm(r1);
        ref += std::norm(sn.c0[k]) + std::norm(sn.c1[k]);
    }
    if (ref == 0.0) return 0.0;
    return std::sqrt(res / ref);
}

RunOutput run_simulation(const RunConfig& cfg) {
    cfg.validate();
    RunOutput out;
    const Grid g = cfg.grid();
    const SpinorField psi0 =
        make_initial_data(g, cfg.epsilon, cfg.direction_spinor(), cfg.mass);
    out.evolved = evolve_to(psi0, cfg.stepper());
    const History& h = out.evolved.history;

    RunSummary& sm = out.summary;
    sm.trivial_run = (cfg.epsilon == 0.0);
    sm.charge_drift = out.evolved.max_charge_drift;
    sm.support_leak = out.evolved.max_support_leak;

    // hyperboloidal slices within the admissible window
    const double s_max = std::min(9.0, std::sqrt(2.0 * h.t_max() - 1.0));
    double ed_min = std::numeric_limits<double>::infinity(), ed_max = 0.0;
    sm.energy_bound_min_slack = std::numeric_limits<double>::infinity();
    std::vector<double> s_values;
    for (double s = 2.0; s <= s_max + 1e-12; s += 0.5) s_values.push_back(s);
    for (const HyperSlice& slice : sample_hyperboloids(h, s_values, false)) {
        const double s = slice.s;
        const double ed = energy_D(slice);
        const EnergyBoundReport bound = energy_bound_check(slice);
        out.slice_s.push_back(s);
        out.slice_ed.push_back(ed);
        out.slice_ep.push_back(energy_plus(slice));
        out.slice_identity.push_back(energy_identity_residual(slice));
        out.slice_slack.push_back(bound.slack);
        sm.energy_identity_max_residual =
            std::max(sm.energy_identity_max_residual, out.slice_identity.back());
        sm.energy_bound_min_slack = std::min(sm.energy_bound_min_slack, bound.slack);
        sm.energy_bound_ok = sm.energy_bound_ok && bound.ok;
        ed_min = std::min(ed_min, ed);
        ed_max = std::max(ed_max, ed);
    }
    sm.energy_variation = (ed_max > 0.0) ? (ed_max - ed_min) / ed_max : 0.0;
    if (out.slice_s.empty()) sm.energy_bound_min_slack = 0.0;

    // pointwise decay monitors at snapshot times
    const bool improved = cfg.companion && cfg.mass == 0.0 && !h.wave_snaps.empty();
    for (const Snapshot& sn : h.snaps) {
        const DecayProfile p = decay_profile(h, sn.t);
        out.decay_t.push_back(sn.t);
        out.decay_sup.push_back(p.sup_abs);
        out.decay_weighted.push_back(p.weighted_sup);
        out.decay_improved.push_back(improved ? improved_decay_profile(h, sn.t) : kNaN);
    }
    sm.decay_exponent = fit_or_empty(out.decay_t, out.decay_sup).slope;
    sm.decay_monitor_early = window_max(out.decay_t, out.decay_weighted, 4.0, 10.0);
    sm.decay_monitor_late =
        window_max(out.decay_t, out.decay_weighted, 10.0, h.t_max());
    if (improved) {
        sm.improved_monitor_early =
            window_max(out.decay_t, out.decay_improved, 4.0, 10.0);
        sm.improved_monitor_late =
            window_max(out.decay_t, out.decay_improved, 10.0, h.t_max());
    }

    // scattering state and convergence curve
    if (h.snaps.size() >= 5) {
        const ScatteringState st = scattering_state(h);
        sm.scatter_refinement_delta = st.refinement_delta;
        sm.scatter_tail_bound = st.tail_bound;
        out.scatter = convergence_curve(h, st.psi_plus, cfg.sobolev_n);
        sm.scatter_exponent_high = out.scatter.fit_high.slope;
        for (std::size_t j = 0; j < out.scatter.times.size(); ++j) {
            const double t = out.scatter.times[j];
            if (t >= 10.0 && sm.scatter_sqrt_t_low_first == 0.0)
                sm.scatter_sqrt_t_low_first = std::sqrt(t) * out.scatter.err_low[j];
        }
        if (!out.scatter.times.empty())
            sm.scatter_sqrt_t_low_last =
                std::sqrt(out.scatter.times.back()) * out.scatter.err_low.back();
    }

    out.ghost = ghost_integral(h);
    sm.ghost_total = out.ghost.total;
    sm.ghost_tail = out.ghost.tail;

    if (improved) sm.companion_residual = companion_residual(h);
    return out;
}

RunSummary run_and_write(const RunConfig& cfg) {
    const RunOutput out = run_simulation(cfg);
    const RunSummary& sm = out.summary;
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    write_history(dir, out.evolved.history);

    {
        std::vector<std::vector<double>> rows;
        for (std::size_t j = 0; j < out.slice_s.size(); ++j)
            rows.push_back({out.slice_s[j], out.slice_ed[j], out.slice_ep[j],
                            out.slice_identity[j], out.slice_slack[j]});
        write_csv(dir / "energy.csv",
                  {"s", "E_D", "E_plus", "identity_residual", "bound_slack"}, rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t j = 0; j < out.decay_t.size(); ++j)
            rows.push_back({out.decay_t[j], out.decay_sup[j], out.decay_weighted[j],
                            out.decay_improved[j]});
        write_csv(dir / "decay.csv",
                  {"t", "sup_abs", "weighted_sup", "improved_weighted_sup"}, rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t j = 0; j < out.scatter.times.size(); ++j)
            rows.push_back({out.scatter.times[j], out.scatter.err_high[j],
                            out.scatter.err_low[j],
                            std::sqrt(out.scatter.times[j]) * out.scatter.err_low[j]});
        write_csv(dir / "scatter.csv",
                  {"t", "err_high", "err_low", "sqrt_t_err_low"}, rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t j = 0; j < out.ghost.times.size(); ++j)
            rows.push_back({out.ghost.times[j], out.ghost.integrand[j],
                            out.ghost.cumulative[j]});
        write_csv(dir / "ghost.csv", {"t", "integrand", "cumulative"}, rows);
    }

    nlohmann::json js;
    js["config"] = {{"grid_n", cfg.grid_n},       {"grid_l", cfg.grid_l},
                    {"dt", cfg.dt},               {"t_end", cfg.t_end},
                    {"snapshot_stride", cfg.snapshot_stride},
                    {"mass", cfg.mass},           {"epsilon", cfg.epsilon},
                    {"direction", cfg.direction}, {"sobolev_n", cfg.sobolev_n},
                    {"companion", cfg.companion}, {"linear_only", cfg.linear_only},
                    {"seed", cfg.seed}};
    js["trivial_run"] = sm.trivial_run;
    js["charge_drift"] = sm.charge_drift;
    js["support_leak"] = sm.support_leak;
    js["decay_exponent"] = sm.decay_exponent;
    js["decay_monitor_early"] = sm.decay_monitor_early;
    js["decay_monitor_late"] = sm.decay_monitor_late;
    js["improved_monitor_early"] = sm.improved_monitor_early;
    js["improved_monitor_late"] = sm.improved_monitor_late;
    js["energy_identity_max_residual"] = sm.energy_identity_max_residual;
    js["energy_bound_min_slack"] = sm.energy_bound_min_slack;
    js["energy_bound_ok"] = sm.energy_bound_ok;
    js["energy_variation"] = sm.energy_variation;
    js["scatter_exponent_high"] = sm.scatter_exponent_high;
    js["scatter_refinement_delta"] = sm.scatter_refinement_delta;
    js["scatter_tail_bound"] = sm.scatter_tail_bound;
    js["scatter_sqrt_t_low_first"] = sm.scatter_sqrt_t_low_first;
    js["scatter_sqrt_t_low_last"] = sm.scatter_sqrt_t_low_last;
    js["ghost_total"] = sm.ghost_total;
    js["ghost_tail"] = sm.ghost_tail;
    js["companion_residual"] = sm.companion_residual;
    js["checks"] = {
        {"decay_monitor_bounded",
         sm.decay_monitor_early == 0.0 ||
             sm.decay_monitor_late <= 2.0 * sm.decay_monitor_early},
        {"energy_bound_ok", sm.energy_bound_ok},
        {"ghost_tail_ok", sm.ghost_tail <= 0.5 * sm.ghost_total || sm.ghost_total == 0.0},
    };
    std::ofstream os(dir / "summary.json");
    os << js.dump(2) << "\n";
    return sm;
}

SweepResult run_sweep(const std::string& parameter, const std::vector<double>& values,
                      const RunConfig& base, int max_threads) {
    if (parameter != "mass" && parameter != "epsilon")
        throw ConfigError("sweep parameter must be 'mass' or 'epsilon'");
    if (values.empty()) throw ConfigError("sweep needs a nonempty value list");
    if (max_threads < 1) max_threads = 1;

    // mass sweeps re-run with the diagonal direction to rule out
    // representation artifacts; the monitors take the worse of the two
    std::vector<RunConfig> members;
    for (double v : values) {
        RunConfig cfg = base;
        if (parameter == "mass")
            cfg.mass = v;
        else
            cfg.epsilon = v;
        cfg.validate();
        cfg.direction = "e1";
        members.push_back(cfg);
        if (parameter == "mass") {
            cfg.direction = "diag";
            members.push_back(cfg);
        }
    }

    std::vector<RunSummary> raw(members.size());
    std::vector<std::string> errs(members.size());
    for (std::size_t begin = 0; begin < members.size();
         begin += static_cast<std::size_t>(max_threads)) {
        const std::size_t end =
            std::min(members.size(), begin + static_cast<std::size_t>(max_threads));
        std::vector<std::future<void>> batch;
        for (std::size_t j = begin; j < end; ++j)
            batch.push_back(std::async(std::launch::async, [&, j] {
                try {
                    raw[j] = run_simulation(members[j]).summary;
                } catch (const std::exception& e) {
                    errs[j] = e.what();
                }
            }));
        for (auto& f : batch) f.get();
    }

    SweepResult res;
    res.values = values;
    const std::size_t per = (parameter == "mass") ? 2 : 1;
    for (std::size_t v = 0; v < values.size(); ++v) {
        RunSummary agg{};
        bool have = false;
        for (std::size_t d = 0; d < per; ++d) {
            const std::size_t j = v * per + d;
            if (!errs[j].empty()) {
                res.failures.push_back(parameter + "=" + std::to_string(values[v]) +
                                       ": " + errs[j]);
                continue;
            }
            if (!have) {
                agg = raw[j];
                have = true;
            } else {
                agg.decay_monitor_early =
                    std::max(agg.decay_monitor_early, raw[j].decay_monitor_early);
                agg.decay_monitor_late =
                    std::max(agg.decay_monitor_late, raw[j].decay_monitor_late);
                agg.charge_drift = std::max(agg.charge_drift, raw[j].charge_drift);
            }
        }
        res.summaries.push_back(agg);
        if (have && agg.decay_monitor_early > 0.0)
            res.uniformity_ratio = std::max(
                res.uniformity_ratio, agg.decay_monitor_late / agg.decay_monitor_early);
    }
    return res;
}

std::vector<std::pair<std::string, double>> verify_algebra(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.1, 10.0);
    auto rand_spinor = [&]() -> Spinor {
        return {{unit(rng), unit(rng)}, {unit(rng), unit(rng)}};
    };
    auto rand_interior = [&](double& t) -> Vec2 {
        t = pos(rng) + 1.0;
        // uniform direction, radius strictly inside the cone
        const double ang = M_PI * unit(rng);
        const double r = 0.95 * t * 0.5 * (unit(rng) + 1.0);
        return {r * std::cos(ang), r * std::sin(ang)};
    };
    constexpr int kSamples = 2000;
    const GammaRep g = build_gamma_rep();

    std::vector<std::pair<std::string, double>> out;

    {  // anticommutation relations against the (+,-,-) metric
        const Matrix2 gam[3] = {g.g0, g.g1, g.g2};
        const double eta[3] = {1.0, -1.0, -1.0};
        double res = 0.0;
        for (int mu = 0; mu < 3; ++mu)
            for (int nu = 0; nu < 3; ++nu) {
                const Matrix2 anti = gam[mu] * gam[nu] + gam[nu] * gam[mu];
                const Matrix2 want =
                    identity2() * cplx{(mu == nu) ? 2.0 * eta[mu] : 0.0, 0.0};
                res = std::max(res, (anti - want).max_abs());
            }
        res = std::max(res, (g.g0 - g.g0.adjoint()).max_abs());
        res = std::max(res, (gamma0_gamma(1) - gamma0_gamma(1).adjoint()).max_abs());
        res = std::max(res, (gamma0_gamma(2) - gamma0_gamma(2).adjoint()).max_abs());
        out.emplace_back("clifford_relations", res);
    }
    {  // soler density is real and matches |a|^2 - |b|^2
        double res = 0.0;
        for (int k = 0; k < kSamples; ++k) {
            const Spinor psi = rand_spinor();
            const cplx q = inner(psi, g.g0.apply(psi));
            res = std::max(res, std::abs(q.imag()));
            res = std::max(res, std::abs(q.real() - soler_density(psi)));
        }
        out.emplace_back("soler_density", res);
    }
    {  // four-term hyperboloidal decomposition sums to psi* g0 phi
        double sum_res = 0.0, pp_res = 0.0;
        for (int k = 0; k < kSamples; ++k) {
            const Spinor psi = rand_spinor(), phi = rand_spinor();
            double t;
            const Vec2 x = rand_interior(t);
            const auto terms = decompose_bilinear_hyper(psi, phi, x, t);
            const cplx total = terms[0] + terms[1] + terms[2] + terms[3];
            sum_res = std::max(sum_res, std::abs(total - inner(psi, g.g0.apply(phi))));
            // (psi)_+* g0 (phi)_+ = (s^2/t^2) psi* g0 phi
            const double s_sq = t * t - x.x * x.x - x.y * x.y;
            const cplx lhs = inner(proj_hyper(psi, x, t, +1),
                                   g.g0.apply(proj_hyper(phi, x, t, +1)));
            pp_res = std::max(
                pp_res, std::abs(lhs - (s_sq / (t * t)) * inner(psi, g.g0.apply(phi))));
        }
        out.emplace_back("hyper_decomposition_sum", sum_res);
        out.emplace_back("hyper_plus_plus_identity", pp_res);
    }
    {  // radial decomposition: three terms sum to psi* g0 phi; (+,+) vanishes
        double sum_res = 0.0, pp_res = 0.0;
        for (int k = 0; k < kSamples; ++k) {
            const Spinor psi = rand_spinor(), phi = rand_spinor();
            double t;
            Vec2 x = rand_interior(t);
            if (x.norm() == 0.0) x.x = 0.5;
            const auto terms = decompose_bilinear_radial(psi, phi, x);
            const cplx total = terms[0] + terms[1] + terms[2];
            sum_res = std::max(sum_res, std::abs(total - inner(psi, g.g0.apply(phi))));
            pp_res = std::max(pp_res, std::abs(inner(proj_radial(psi, x, +1),
                                                     g.g0.apply(proj_radial(phi, x, +1)))));
        }
        out.emplace_back("radial_decomposition_sum", sum_res);
        out.emplace_back("radial_plus_plus_vanishes", pp_res);
    }
    {  // pointwise ghost-weight identity
        double res = 0.0;
        for (int k = 0; k < kSamples; ++k) {
            const Spinor psi = rand_spinor();
            const Vec2 x{3.0 * unit(rng), 3.0 * unit(rng)};
            const double t = pos(rng);
            res = std::max(res, ghost_identity_residual(psi, x, t));
        }
        out.emplace_back("ghost_identity", res);
    }
    {  // mode-level propagator: unitarity, group law, series oracle
        double uni = 0.0, grp = 0.0, ser = 0.0;
        std::uniform_real_distribution<double> mdist(0.0, 1.0);
        for (int k = 0; k < kSamples; ++k) {
            const Vec2 xi{4.0 * unit(rng), 4.0 * unit(rng)};
            const double m = mdist(rng);
            const double t1 = 2.0 * unit(rng), t2 = 2.0 * unit(rng);
            const Matrix2 u1 = dirac_exponential(xi, m, t1);
            const Matrix2 u2 = dirac_exponential(xi, m, t2);
            uni = std::max(uni, (u1.adjoint() * u1 - identity2()).max_abs());
            grp = std::max(grp,
                           (u1 * u2 - dirac_exponential(xi, m, t1 + t2)).max_abs());
            // 40-term Taylor series of exp(i ts M); sampled where the
            // truncation tail sits far below the tolerance
            const Vec2 xs{2.0 * unit(rng), 2.0 * unit(rng)};
            const double ts = unit(rng);
            const Matrix2 M = dirac_symbol(xs, m);
            Matrix2 series = identity2(), pw = identity2();
            for (int j = 1; j <= 40; ++j) {
                pw = pw * M * (cplx{0.0, 1.0} * (ts / j));
                series = series + pw;
            }
            ser = std::max(ser, (dirac_exponential(xs, m, ts) - series).max_abs());
        }
        out.emplace_back("propagator_unitarity", uni);
        out.emplace_back("propagator_group_law", grp);
        out.emplace_back("propagator_series_oracle", ser);
    }
    return out;
}

}  // namespace soler2d
