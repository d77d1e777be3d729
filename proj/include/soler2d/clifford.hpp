#pragma once

// 2+1 dimensional Clifford algebra on 2-component spinors, the plus/minus
// projector decompositions and the cubic Soler nonlinearity. Everything here
// is a pure function on value types.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace soler2d {

using cplx = std::complex<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const { return std::hypot(x, y); }
};

struct Spinor {
    cplx a{};
    cplx b{};

    Spinor operator+(const Spinor& o) const { return {a + o.a, b + o.b}; }
    Spinor operator-(const Spinor& o) const { return {a - o.a, b - o.b}; }
    Spinor operator*(cplx s) const { return {a * s, b * s}; }
    Spinor operator*(double s) const { return {a * s, b * s}; }
    double norm_sq() const { return std::norm(a) + std::norm(b); }
    double norm() const { return std::sqrt(norm_sq()); }
};

inline Spinor operator*(cplx s, const Spinor& v) { return v * s; }
inline Spinor operator*(double s, const Spinor& v) { return v * s; }

// <u, v> = u* v (conjugate-linear in the first slot).
inline cplx inner(const Spinor& u, const Spinor& v) {
    return std::conj(u.a) * v.a + std::conj(u.b) * v.b;
}

struct Matrix2 {
    // row-major entries
    cplx m00{}, m01{}, m10{}, m11{};

    Spinor apply(const Spinor& v) const {
        return {m00 * v.a + m01 * v.b, m10 * v.a + m11 * v.b};
    }
    Matrix2 operator*(const Matrix2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    Matrix2 operator+(const Matrix2& o) const {
        return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11};
    }
    Matrix2 operator-(const Matrix2& o) const {
        return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
    }
    Matrix2 operator*(cplx s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }
    Matrix2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }
    double max_abs() const {
        return std::max(std::max(std::abs(m00), std::abs(m01)),
                        std::max(std::abs(m10), std::abs(m11)));
    }
};

inline Matrix2 operator*(cplx s, const Matrix2& m) { return m * s; }

inline Matrix2 identity2() { return {1.0, 0.0, 0.0, 1.0}; }

struct GammaRep {
    Matrix2 g0, g1, g2;
};

// Fixed representation: g0 = sigma3, g1 = i sigma1, g2 = i sigma2.
inline GammaRep build_gamma_rep() {
    const cplx i{0.0, 1.0};
    GammaRep g;
    g.g0 = {1.0, 0.0, 0.0, -1.0};
    g.g1 = {0.0, i, i, 0.0};
    g.g2 = {0.0, 1.0, -1.0, 0.0};
    return g;
}

// g0*g1 and g0*g2, both Hermitian. Used by every projector below.
inline Matrix2 gamma0_gamma(int axis) {
    const cplx i{0.0, 1.0};
    if (axis == 1) return {0.0, i, -i, 0.0};
    return {0.0, 1.0, 1.0, 0.0};
}

// psi* g0 psi; real by construction, equals |a|^2 - |b|^2 in this representation.
inline double soler_density(const Spinor& psi) {
    return std::norm(psi.a) - std::norm(psi.b);
}

// F(psi) = (psi* g0 psi) psi
inline Spinor nonlinearity(const Spinor& psi) {
    return psi * soler_density(psi);
}

// (psi)_{+-} = psi +- (x_a/t) g0 g^a psi, the hyperboloidal projectors.
inline Spinor proj_hyper(const Spinor& psi, const Vec2& x, double t, int sign) {
    if (t <= 0.0) throw std::domain_error("proj_hyper: requires t > 0");
    const cplx i{0.0, 1.0};
    const double u = x.x / t, v = x.y / t;
    // (u*G01 + v*G02) psi with G01 = [[0,i],[-i,0]], G02 = [[0,1],[1,0]]
    const Spinor m{u * i * psi.b + v * psi.b, -u * i * psi.a + v * psi.a};
    return sign >= 0 ? psi + m : psi - m;
}

// [psi]_{+-} = psi +- (x_j/r) g0 g^j psi, the radial projectors.
// At x = 0 the radial direction is undefined; both signs return psi.
inline Spinor proj_radial(const Spinor& psi, const Vec2& x, int sign) {
    const double r = x.norm();
    if (r == 0.0) return psi;
    const cplx i{0.0, 1.0};
    const double u = x.x / r, v = x.y / r;
    const Spinor m{u * i * psi.b + v * psi.b, -u * i * psi.a + v * psi.a};
    return sign >= 0 ? psi + m : psi - m;
}

// The four terms of Psi* g0 Phi = (1/4)[(-,-) + (-,+) + (+,-) + (s^2/t^2) full]
inline std::array<cplx, 4> decompose_bilinear_hyper(const Spinor& psi, const Spinor& phi,
                                                    const Vec2& x, double t) {
    if (t <= 0.0 || x.norm() >= t)
        throw std::domain_error("decompose_bilinear_hyper: point outside interior of cone");
    const double s_sq = t * t - (x.x * x.x + x.y * x.y);
    const Matrix2 g0 = build_gamma_rep().g0;
    const Spinor pm = proj_hyper(psi, x, t, -1), pp = proj_hyper(psi, x, t, +1);
    const Spinor fm = proj_hyper(phi, x, t, -1), fp = proj_hyper(phi, x, t, +1);
    return {0.25 * inner(pm, g0.apply(fm)), 0.25 * inner(pm, g0.apply(fp)),
            0.25 * inner(pp, g0.apply(fm)),
            0.25 * (s_sq / (t * t)) * inner(psi, g0.apply(phi))};
}

// Radial analogue; the (+,+) term vanishes identically so only three survive.
inline std::array<cplx, 3> decompose_bilinear_radial(const Spinor& psi, const Spinor& phi,
                                                     const Vec2& x) {
    if (x.norm() == 0.0)
        throw std::domain_error("decompose_bilinear_radial: requires |x| > 0");
    const Matrix2 g0 = build_gamma_rep().g0;
    const Spinor pm = proj_radial(psi, x, -1), pp = proj_radial(psi, x, +1);
    const Spinor fm = proj_radial(phi, x, -1), fp = proj_radial(phi, x, +1);
    return {0.25 * inner(pm, g0.apply(fm)), 0.25 * inner(pm, g0.apply(fp)),
            0.25 * inner(pp, g0.apply(fm))};
}

}  // namespace soler2d
