#include "soler2d/scatter.hpp"

#include <cmath>

#include "soler2d/errors.hpp"

namespace soler2d {

namespace {

// - i * accumulated integral, added to psi(t0); accumulators live in modal space
SpinorField assemble_state(const History& h, const Plane& acc0, const Plane& acc1) {
    const cplx i{0.0, 1.0};
    SpinorField out = SpinorField::zero(h.grid, h.t0, h.mass);
    out.c0 = acc0;
    out.c1 = acc1;
    to_nodal(h.grid, out.c0);
    to_nodal(h.grid, out.c1);
    for (std::size_t k = 0; k < out.c0.size(); ++k) {
        out.c0[k] = h.snaps.front().c0[k] - i * out.c0[k];
        out.c1[k] = h.snaps.front().c1[k] - i * out.c1[k];
    }
    return out;
}

double l2_distance(const SpinorField& a, const SpinorField& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.c0.size(); ++k)
        acc += std::norm(a.c0[k] - b.c0[k]) + std::norm(a.c1[k] - b.c1[k]);
    return std::sqrt(acc) * a.grid.dx();
}

double tail_from_norms(const std::vector<double>& times, const std::vector<double>& norms,
                       double from) {
    // trapezoid over the recorded ||F|| series
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
        if (times[j] < from) continue;
        acc += 0.5 * (norms[j] + norms[j + 1]) * (times[j + 1] - times[j]);
    }
    return acc;
}

// Simpson over snapshots; fallback route when no dense accumulators exist
SpinorField simpson_over_snapshots(const History& h, int stride) {
    const std::size_t count = (h.snaps.size() - 1) / stride + 1;
    if (count < 5 || (count - 1) % 2 != 0)
        throw ConfigError("scattering_state: need >= 5 snapshots and an even interval count");
    const double step = h.snap_dt * stride;
    Plane acc0(h.grid.size(), cplx{}), acc1(h.grid.size(), cplx{});
    Plane f0, f1;
    for (std::size_t j = 0; j < count; ++j) {
        const Snapshot& sn = h.snaps[j * stride];
        SpinorField psi = SpinorField::zero(h.grid, sn.t, h.mass);
        psi.c0 = sn.c0;
        psi.c1 = sn.c1;
        nonlinearity_field(psi, f0, f1);
        to_modal(h.grid, f0);
        to_modal(h.grid, f1);
        double w = (j == 0 || j == count - 1) ? step / 3.0
                   : (j % 2 == 1)             ? 4.0 * step / 3.0
                                              : 2.0 * step / 3.0;
        const int n = h.grid.n;
        const double back = h.t0 - sn.t;
        for (int ky = 0; ky < n; ++ky) {
            const double fy = h.grid.freq(ky);
            for (int kx = 0; kx < n; ++kx) {
                const Vec2 xi{h.grid.freq(kx), fy};
                const Matrix2 u = dirac_exponential(xi, h.mass, back);
                const std::size_t idx = static_cast<std::size_t>(ky) * n + kx;
                const Spinor v = u.apply({f0[idx], -f1[idx]});
                acc0[idx] += w * v.a;
                acc1[idx] += w * v.b;
            }
        }
    }
    return assemble_state(h, acc0, acc1);
}

}  // namespace

ScatteringState scattering_state(const History& h) {
    if (h.snaps.size() < 5)
        throw ConfigError("scattering_state: need at least 5 snapshots");
    ScatteringState out{SpinorField::zero(h.grid, h.t0, h.mass), 0.0, 0.0};
    if (h.linear) {
        // F was dropped during the run, so the Duhamel term vanishes exactly
        out.psi_plus.c0 = h.snaps.front().c0;
        out.psi_plus.c1 = h.snaps.front().c1;
        return out;
    }
    if (h.duhamel) {
        const DuhamelAccum& acc = *h.duhamel;
        if (!acc.coarse0.empty()) {
            // Richardson extrapolation of the h / 2h Simpson pair; the
            // refinement delta is the increment of the final refinement step
            Plane ext0(acc.fine0.size()), ext1(acc.fine1.size());
            for (std::size_t k = 0; k < ext0.size(); ++k) {
                ext0[k] = (16.0 * acc.fine0[k] - acc.coarse0[k]) / 15.0;
                ext1[k] = (16.0 * acc.fine1[k] - acc.coarse1[k]) / 15.0;
            }
            out.psi_plus = assemble_state(h, ext0, ext1);
            out.refinement_delta =
                l2_distance(out.psi_plus, assemble_state(h, acc.fine0, acc.fine1));
        } else {
            out.psi_plus = assemble_state(h, acc.fine0, acc.fine1);
        }
        out.tail_bound = tail_from_norms(acc.f_norm_times, acc.f_norms,
                                         h.t_max() / 2.0);
        return out;
    }
    out.psi_plus = simpson_over_snapshots(h, 1);
    if ((h.snaps.size() - 1) % 4 == 0) {
        const SpinorField coarse = simpson_over_snapshots(h, 2);
        out.refinement_delta = l2_distance(out.psi_plus, coarse);
    }
    // snapshot-resolution tail estimate
    std::vector<double> ts, ns;
    Plane f0, f1;
    for (const Snapshot& sn : h.snaps) {
        double fn = 0.0;
        for (std::size_t k = 0; k < sn.c0.size(); ++k) {
            const double rho = std::norm(sn.c0[k]) - std::norm(sn.c1[k]);
            fn += rho * rho * (std::norm(sn.c0[k]) + std::norm(sn.c1[k]));
        }
        ts.push_back(sn.t);
        ns.push_back(std::sqrt(fn) * h.grid.dx());
    }
    out.tail_bound = tail_from_norms(ts, ns, h.t_max() / 2.0);
    return out;
}

ScatterReport convergence_curve(const History& h, const SpinorField& psi_plus,
                                int sobolev_n) {
    ScatterReport rep;
    const int k_high = sobolev_n + 1, k_low = sobolev_n - 1;
    for (const Snapshot& sn : h.snaps) {
        const SpinorField linear = propagate_dirac(psi_plus, sn.t - h.t0);
        SpinorField diff = SpinorField::zero(h.grid, sn.t, h.mass);
        for (std::size_t k = 0; k < sn.c0.size(); ++k) {
            diff.c0[k] = sn.c0[k] - linear.c0[k];
            diff.c1[k] = sn.c1[k] - linear.c1[k];
        }
        rep.times.push_back(sn.t);
        rep.err_high.push_back(sobolev_norm(diff, k_high));
        rep.err_low.push_back(sobolev_norm(diff, k_low));
    }
    auto fit_or_zero = [&](const std::vector<double>& errs) -> ExponentFit {
        std::vector<std::pair<double, double>> series;
        for (std::size_t j = 0; j < rep.times.size(); ++j)
            if (errs[j] > 0.0) series.emplace_back(rep.times[j], errs[j]);
        try {
            return fit_exponent(series);
        } catch (const std::invalid_argument&) {
            return {};  // degenerate (e.g. linear run: errors at machine zero)
        }
    };
    rep.fit_high = fit_or_zero(rep.err_high);
    rep.fit_low = fit_or_zero(rep.err_low);
    return rep;
}

GhostIntegral ghost_integral(const History& h) {
    GhostIntegral out;
    const Grid& g = h.grid;
    for (const Snapshot& sn : h.snaps) {
        double acc = 0.0;
        for (int iy = 0; iy < g.n; ++iy) {
            const double y = g.coord(iy);
            for (int ix = 0; ix < g.n; ++ix) {
                const double x = g.coord(ix);
                const std::size_t idx = static_cast<std::size_t>(iy) * g.n + ix;
                const Spinor minus =
                    proj_radial({sn.c0[idx], sn.c1[idx]}, {x, y}, -1);
                const double r = std::hypot(x, y);
                const double jb = 1.0 + (r - sn.t) * (r - sn.t);  // <tau - r>^2
                acc += minus.norm_sq() / jb;
            }
        }
        out.times.push_back(sn.t);
        out.integrand.push_back(acc * g.dx() * g.dx());
    }
    const double t_half = h.t_max() / 2.0;
    double cum = 0.0;
    out.cumulative.push_back(0.0);
    for (std::size_t j = 0; j + 1 < out.times.size(); ++j) {
        const double piece = 0.5 * (out.integrand[j] + out.integrand[j + 1]) *
                             (out.times[j + 1] - out.times[j]);
        cum += piece;
        out.cumulative.push_back(cum);
        if (out.times[j] >= t_half) out.tail += piece;
    }
    out.total = cum;
    return out;
}

double ghost_identity_residual(const Spinor& psi, const Vec2& x, double t) {
    const double r = x.norm();
    const double denom = 1.0 + (r - t) * (r - t);
    const double dq_t = -1.0 / denom;
    const Matrix2 g01 = gamma0_gamma(1), g02 = gamma0_gamma(2);
    double lhs = -dq_t * psi.norm_sq();
    if (r > 0.0) {
        const Spinor gpsi =
            (x.x / r) * g01.apply(psi) + (x.y / r) * g02.apply(psi);
        lhs -= (1.0 / denom) * std::real(inner(psi, gpsi));
    }
    const double rhs = 0.5 / denom * proj_radial(psi, x, -1).norm_sq();
    return std::abs(lhs - rhs);
}

}  // namespace soler2d
