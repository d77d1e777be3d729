#pragma once

// Hyperboloidal-foliation diagnostics: slices of the history on H_s, the
// energies E^D / E^+ / E_con, vector-field application, commutator checks on
// analytic test fields, and pointwise decay monitors.

#include <functional>

#include "soler2d/evolve.hpp"

namespace soler2d {

struct SlicePoint {
    Vec2 x;
    double t;       // sqrt(s^2 + |x|^2)
    Spinor value;
    Spinor dt;      // time derivative
    Spinor dx1;     // spatial derivatives
    Spinor dx2;
};

struct HyperSlice {
    double s = 2.0;
    double cell = 0.25;  // quadrature weight dx^2 comes from here
    std::vector<SlicePoint> points;
};

// Field and derivative samples on H_s, interpolated in time from the recorded
// snapshots (interaction-picture Hermite refined to sub-snapshot nodes).
// Admissible range: 2 <= s <= sqrt(2 t_max - 1). Sampling happens on a
// trig-interpolated refinement of coarse grids so the slice quadrature stays
// spectrally accurate at the desk scale.
HyperSlice sample_hyperboloid(const History& h, double s);

// Batch variant sharing the per-node interpolation work across slices; the
// energy quadratures only need values, so spatial-derivative samples can be
// skipped.
std::vector<HyperSlice> sample_hyperboloids(const History& h,
                                            const std::vector<double>& s_list,
                                            bool with_derivatives = true);

// Same restriction for the companion wave field.
HyperSlice sample_companion_hyperboloid(const History& h, double s);

double energy_D(const HyperSlice& slice);
double energy_plus(const HyperSlice& slice);

// | E^D - (1/2 int (s/t)^2 |psi|^2 + 1/2 E^+) | / max(E^D, floor)
double energy_identity_residual(const HyperSlice& slice);

struct EnergyBoundReport {
    double lhs = 0.0;      // ||(s/t) psi|| + ||(psi)_-||
    double rhs = 0.0;      // 4 sqrt(E^D)
    double slack = 0.0;    // rhs - lhs
    bool ok = true;        // lhs <= rhs + 1e-8
};
EnergyBoundReport energy_bound_check(const HyperSlice& slice);

// E_con = int sum_a |s dbar_a u|^2 + |Ku + u|^2 dx on a companion slice,
// with K = s d_s + 2 x_a dbar_a and s d_s = (s^2/t) d_t.
double conformal_energy(const HyperSlice& slice);

enum class VectorFieldId { D0, D1, D2, L1, L2, Lhat1, Lhat2, L0, Omega12 };

// Evaluates the chosen field on the interpolated history at a grid point x.
Spinor apply_vectorfield(const History& h, VectorFieldId id, double t, const Vec2& x);

// Analytic C^inf test field psi(t, x) for finite-difference commutator checks.
using TestField = std::function<Spinor(double, const Vec2&)>;

// max_{sample points} |[Lhat_a, i gamma^mu d_mu] f| with 4th-order centered
// differences of step h; O(h^4) for smooth f.
double commutator_residual(const TestField& f, int a,
                           const std::vector<std::pair<double, Vec2>>& samples,
                           double h);

// max residual of [d_alpha, L_a] f = (known first-order expression) f
double commutator_first_order_residual(const TestField& f, int alpha, int a,
                                       const std::vector<std::pair<double, Vec2>>& samples,
                                       double h);

struct DecayProfile {
    double sup_abs = 0.0;
    double weighted_sup = 0.0;  // sup |psi| (t^{1/2}(t-r)^{1/2} + m t)
};
DecayProfile decay_profile(const History& h, double t);

// sup_{r <= t/2} |psi| t^{1/2}(t-r)^{3/2} / (ln t)^2; massless companion runs only
double improved_decay_profile(const History& h, double t);

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms residual of the log-log fit
};

// least squares on (ln t, ln v); samples with t < t_min are discarded
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& series,
                         double t_min = 10.0);

}  // namespace soler2d
