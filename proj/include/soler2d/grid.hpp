#pragma once

// Uniform periodic grid on [-L, L)^2, discrete Fourier analysis, quadrature,
// Sobolev norms and the compactly supported bump initial data.

#include <complex>
#include <vector>

#include "soler2d/clifford.hpp"

namespace soler2d {

using Plane = std::vector<cplx>;  // n*n values, row-major: index = iy*n + ix

struct Grid {
    int n = 256;            // points per axis, power of two, >= 16
    double half_width = 64; // L; domain is [-L, L)^2

    double dx() const { return 2.0 * half_width / n; }
    double coord(int i) const { return -half_width + i * dx(); }
    // signed wavenumber for FFT bin k
    double freq(int k) const {
        const int s = (k < n / 2) ? k : k - n;
        return M_PI / half_width * s;
    }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    bool operator==(const Grid& o) const = default;

    void validate() const;  // throws ConfigError
};

struct SpinorField {
    Grid grid;
    double time = 2.0;
    double mass = 1.0;
    Plane c0, c1;  // spinor components on the grid

    static SpinorField zero(const Grid& g, double t = 2.0, double m = 1.0);
    Spinor at(std::size_t idx) const { return {c0[idx], c1[idx]}; }
    void set(std::size_t idx, const Spinor& s) { c0[idx] = s.a; c1[idx] = s.b; }
};

// Companion wave field and its time derivative on the same grid.
struct ScalarSpinorPair {
    Grid grid;
    double time = 2.0;
    Plane p0, p1;  // Psi
    Plane q0, q1;  // d/dt Psi

    static ScalarSpinorPair zero(const Grid& g, double t = 2.0);
};

// In-place DFT between nodal values and modal coefficients c_k with the
// convention f(x) = sum_k c_k e^{i xi_k . (x + L)} — modes anchored at the
// first grid point (forward carries the 1/n^2). Multiplier operators and
// norms are insensitive to the anchoring phase.
void to_modal(const Grid& g, Plane& p);
void to_nodal(const Grid& g, Plane& p);

Plane spectral_derivative(const Grid& g, const Plane& p, int axis);

// Zero-padded trig interpolation of modal coefficients onto a factor-times
// finer grid; exact evaluation of the underlying trig polynomial.
Plane upsample_from_modal(const Grid& g, const Plane& modal, int factor);

double l2_norm(const SpinorField& f);
double sobolev_norm(const SpinorField& f, int order);

// rectangle rule; spectrally accurate for smooth periodic integrands
double integrate(const Grid& g, const std::vector<double>& values);

// smooth bump: chi(r) = exp(1 - 1/(1-r^2)) inside the unit ball, 0 outside
double bump_chi(double r);

// psi_0(x) = eps * chi(|x|) * direction at t0 = 2
SpinorField make_initial_data(const Grid& g, double eps, const Spinor& direction,
                              double mass);

}  // namespace soler2d
