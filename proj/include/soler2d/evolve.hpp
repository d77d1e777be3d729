#pragma once

// Strang-split time integration of the Soler model, snapshot history with
// dense-in-time Hermite evaluation, the companion wave field, and the dense
// Duhamel accumulators feeding the scattering analysis.

#include <optional>
#include <vector>

#include "soler2d/grid.hpp"
#include "soler2d/propagator.hpp"

namespace soler2d {

struct StepperConfig {
    double dt = 0.125;
    double t_end = 50.0;
    int snapshot_every = 8;   // snapshot stride in steps
    bool companion = false;   // evolve the Bournaveas wave field (m = 0 only)
    bool linear_only = false; // drop the nonlinearity entirely
    bool accumulate_scattering = true;

    void validate(const Grid& g) const;  // throws ConfigError
};

// exact pointwise flow of the split nonlinearity: psi <- exp(-i rho tau g0) psi
void nonlinear_substep(SpinorField& f, double tau);

// one second-order step: N(dt/2) S(dt) N(dt/2)
void strang_step(SpinorField& f, double dt, bool linear_only = false);

// equation-derived d/dt psi (spectral in space); linear_only drops the
// cubic term so slopes stored by linear runs match the free flow exactly
SpinorField time_derivative(const SpinorField& f, bool linear_only = false);

// F(psi) evaluated pointwise into two planes
void nonlinearity_field(const SpinorField& f, Plane& out0, Plane& out1);

struct Snapshot {
    double t;
    Plane c0, c1;    // psi
    Plane d0, d1;    // d/dt psi, from the equation
};

struct WaveSnapshot {
    double t;
    Plane p0, p1;    // Psi
    Plane q0, q1;    // d/dt Psi
};

// Simpson sums of S(t0 - tau) g0 F(psi(tau)) accumulated at full step
// resolution during the run; "coarse" skips every other sample so the
// scattering state can be checked for quadrature stability.
struct DuhamelAccum {
    Plane fine0, fine1;
    Plane coarse0, coarse1;
    std::vector<double> f_norm_times;  // step times
    std::vector<double> f_norms;       // ||F(psi)||_L2 per step
};

class History {
  public:
    Grid grid;
    double mass = 1.0;
    double t0 = 2.0;
    double snap_dt = 1.0;
    bool linear = false;   // nonlinearity was dropped during the run
    std::vector<Snapshot> snaps;
    std::vector<WaveSnapshot> wave_snaps;       // empty unless companion run
    std::optional<DuhamelAccum> duhamel;

    double t_max() const { return snaps.empty() ? t0 : snaps.back().t; }

    // dense-in-time field at arbitrary t within coverage
    SpinorField field_at(double t) const;
    ScalarSpinorPair wave_at(double t) const;

    // single bracketing interval for t
    std::size_t bracket(double t) const;
};

struct EvolveResult {
    History history;
    double max_charge_drift = 0.0;   // relative
    double max_support_leak = 0.0;   // max |psi| outside the light-cone margin
};

EvolveResult evolve_to(const SpinorField& psi0, const StepperConfig& cfg);

// Dense-in-time evaluation of a recorded history. Snapshots are Hermite
// blended in the interaction picture: phi(tau) = e^{-i(tau - t_j)M} psi_hat
// varies only at the slow nonlinear rate, so the blend stays accurate for
// high spatial modes where plain nodal Hermite at the snapshot stride fails.
// Caches the modal data of the current bracketing interval.
class TimeInterpolator {
  public:
    explicit TimeInterpolator(const History& h) : h_(h) {}

    // either output may be null; slope is the equation time derivative
    void eval(double t, SpinorField* value, SpinorField* slope) const;

  private:
    const History& h_;
    mutable std::size_t interval_ = static_cast<std::size_t>(-1);
    mutable Plane p0_[2], dp0_[2], p1_[2], dp1_[2];  // modal interaction data
};

// Integrates Box Psi = -F(psi(t)) with data Psi(t0) = 0, Psi_t(t0) = -i g0 psi0
// by Strang splitting of the exact wave group around trapezoidal source kicks.
// Fills history.wave_snaps. Massless histories only.
void evolve_companion(History& history, double dt);

}  // namespace soler2d
