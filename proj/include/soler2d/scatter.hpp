#pragma once

// Constant-time-slice asymptotics: the Duhamel scattering state, Sobolev-norm
// convergence curves, and ghost-weight space-time integrals.

#include "soler2d/evolve.hpp"
#include "soler2d/hyperdiag.hpp"

namespace soler2d {

struct ScatteringState {
    SpinorField psi_plus;       // asymptotic profile referenced to t0
    double refinement_delta;    // L2 distance between fine and coarse quadrature
    double tail_bound;          // int_{T/2}^{T} ||F|| dtau
};

// psi+ = psi(t0) - i int_{t0}^{T} S(t0 - tau) g0 F(psi(tau)) dtau.
// Uses the dense Simpson accumulators recorded during the run when available,
// otherwise composite Simpson over the snapshots (needs >= 5 and an even
// interval count).
ScatteringState scattering_state(const History& h);

struct ScatterReport {
    std::vector<double> times;
    std::vector<double> err_high;   // H^{N+1}
    std::vector<double> err_low;    // H^{N-1}
    ExponentFit fit_high;
    ExponentFit fit_low;
};

ScatterReport convergence_curve(const History& h, const SpinorField& psi_plus,
                                int sobolev_n = 2);

struct GhostIntegral {
    double total = 0.0;              // int_{t0}^{T} ||[psi]_- / <tau - r>||^2 dtau
    double tail = 0.0;               // same over [T/2, T]
    std::vector<double> times;
    std::vector<double> integrand;   // per snapshot
    std::vector<double> cumulative;
};

GhostIntegral ghost_integral(const History& h);

// pointwise check of -(dq/dt) psi*psi - (dq/dxj) psi* g0 g^j psi
//                       = 1/2 <r-t>^{-2} |[psi]_-|^2  with q = arctan(r - t)
double ghost_identity_residual(const Spinor& psi, const Vec2& x, double t);

}  // namespace soler2d
