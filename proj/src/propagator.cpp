#include "soler2d/propagator.hpp"

#include <cmath>

namespace soler2d {

namespace {
constexpr double kLambdaFloor = 1e-14;
}

Matrix2 dirac_symbol(const Vec2& xi, double mass) {
    // -xi_1 g0g1 - xi_2 g0g2 + m g0 in the fixed representation
    const cplx i{0.0, 1.0};
    return {mass, -i * xi.x - xi.y, i * xi.x - xi.y, -mass};
}

Matrix2 dirac_exponential(const Vec2& xi, double mass, double t) {
    const double lambda = std::sqrt(xi.x * xi.x + xi.y * xi.y + mass * mass);
    const Matrix2 m = dirac_symbol(xi, mass);
    const cplx i{0.0, 1.0};
    if (lambda < kLambdaFloor) return identity2() + (i * t) * m;
    const double c = std::cos(lambda * t);
    const double s = std::sin(lambda * t) / lambda;
    Matrix2 out = identity2() * cplx{c, 0.0};
    return out + (i * s) * m;
}

void propagate_dirac_modal(const Grid& g, double mass, double t, Plane& a, Plane& b) {
    const int n = g.n;
    for (int ky = 0; ky < n; ++ky) {
        const double fy = g.freq(ky);
        for (int kx = 0; kx < n; ++kx) {
            const Vec2 xi{g.freq(kx), fy};
            const Matrix2 u = dirac_exponential(xi, mass, t);
            const std::size_t idx = static_cast<std::size_t>(ky) * n + kx;
            const Spinor v = u.apply({a[idx], b[idx]});
            a[idx] = v.a;
            b[idx] = v.b;
        }
    }
}

SpinorField propagate_dirac(const SpinorField& f, double t) {
    SpinorField out = f;
    to_modal(out.grid, out.c0);
    to_modal(out.grid, out.c1);
    propagate_dirac_modal(out.grid, out.mass, t, out.c0, out.c1);
    to_nodal(out.grid, out.c0);
    to_nodal(out.grid, out.c1);
    out.time = f.time + t;
    return out;
}

ScalarSpinorPair propagate_wave(const ScalarSpinorPair& pair, double t) {
    ScalarSpinorPair out = pair;
    const Grid& g = out.grid;
    to_modal(g, out.p0);
    to_modal(g, out.p1);
    to_modal(g, out.q0);
    to_modal(g, out.q1);
    const int n = g.n;
    for (int ky = 0; ky < n; ++ky) {
        const double fy = g.freq(ky);
        for (int kx = 0; kx < n; ++kx) {
            const double fx = g.freq(kx);
            const double w = std::hypot(fx, fy);
            const double c = std::cos(w * t);
            const double s = (w < kLambdaFloor) ? t : std::sin(w * t) / w;
            const std::size_t idx = static_cast<std::size_t>(ky) * n + kx;
            for (auto [p, q] : {std::pair<Plane*, Plane*>{&out.p0, &out.q0},
                                std::pair<Plane*, Plane*>{&out.p1, &out.q1}}) {
                const cplx u = (*p)[idx], v = (*q)[idx];
                (*p)[idx] = c * u + s * v;
                (*q)[idx] = -w * w * s * u + c * v;
            }
        }
    }
    to_nodal(g, out.p0);
    to_nodal(g, out.p1);
    to_nodal(g, out.q0);
    to_nodal(g, out.q1);
    out.time = pair.time + t;
    return out;
}

}  // namespace soler2d
