#pragma once

// Exact Fourier-multiplier groups: the linear Dirac propagator S(t) and the
// homogeneous wave propagator driving the companion field.

#include "soler2d/grid.hpp"

namespace soler2d {

// Symbol of the Dirac generator at mode xi: M(xi) = -g0 g^a xi_a + m g0.
// Hermitian with M^2 = (|xi|^2 + m^2) I.
Matrix2 dirac_symbol(const Vec2& xi, double mass);

// e^{it M(xi)} = cos(lambda t) I + i sin(lambda t)/lambda M(xi)
Matrix2 dirac_exponential(const Vec2& xi, double mass, double t);

// S(t) applied mode-wise in Fourier space; unitary on every H^k.
SpinorField propagate_dirac(const SpinorField& f, double t);

// In-place variant on modal data (both component planes already modal).
void propagate_dirac_modal(const Grid& g, double mass, double t, Plane& a, Plane& b);

// Homogeneous wave group on (Psi, Psi_t), componentwise:
//   Psi_hat   <-  cos(|xi| t) Psi_hat + sinc * t * Psi_t_hat
//   Psi_t_hat <- -|xi| sin(|xi| t) Psi_hat + cos(|xi| t) Psi_t_hat
ScalarSpinorPair propagate_wave(const ScalarSpinorPair& pair, double t);

}  // namespace soler2d
