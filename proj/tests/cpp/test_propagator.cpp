#include <doctest.h>

#include <cmath>
#include <random>

#include "soler2d/propagator.hpp"

using namespace soler2d;

namespace {

std::mt19937 rng(24680);

double rand_real(double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng);
}

// 40-term Taylor series of e^{itM}; accurate well below 1e-10 for |t|*lambda <~ 3
Matrix2 series_exponential(const Vec2& xi, double mass, double t) {
    const Matrix2 m = dirac_symbol(xi, mass);
    Matrix2 acc = identity2();
    Matrix2 term = identity2();
    const cplx it{0.0, t};
    for (int k = 1; k <= 40; ++k) {
        term = term * m * (it / static_cast<double>(k));
        acc = acc + term;
    }
    return acc;
}

SpinorField random_smooth_field(const Grid& g, double mass) {
    SpinorField f = SpinorField::zero(g, 2.0, mass);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int ky = 0; ky < g.n; ++ky)
        for (int kx = 0; kx < g.n; ++kx) {
            const double k2 = g.freq(kx) * g.freq(kx) + g.freq(ky) * g.freq(ky);
            const double w = std::exp(-0.25 * k2);
            const std::size_t idx = static_cast<std::size_t>(ky) * g.n + kx;
            f.c0[idx] = cplx{u(rng), u(rng)} * w;
            f.c1[idx] = cplx{u(rng), u(rng)} * w;
        }
    to_nodal(g, f.c0);
    to_nodal(g, f.c1);
    return f;
}

double field_max_diff(const SpinorField& a, const SpinorField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.c0.size(); ++k)
        m = std::max(m, std::max(std::abs(a.c0[k] - b.c0[k]),
                                 std::abs(a.c1[k] - b.c1[k])));
    return m;
}

}  // namespace

TEST_CASE("dirac symbol is Hermitian with M^2 = lambda^2 I") {
    for (int k = 0; k < 200; ++k) {
        const Vec2 xi{rand_real(-6, 6), rand_real(-6, 6)};
        const double mass = rand_real(0, 1);
        const Matrix2 m = dirac_symbol(xi, mass);
        CHECK((m.adjoint() - m).max_abs() <= 1e-14);
        const double lam_sq = xi.x * xi.x + xi.y * xi.y + mass * mass;
        CHECK((m * m - lam_sq * identity2()).max_abs() <= 1e-12);
    }
}

TEST_CASE("dirac exponential closed form") {
    CHECK((dirac_exponential({0, 0}, 0.0, 1.7) - identity2()).max_abs() <= 1e-15);
    // xi = 0, m = 1: e^{it g0} = diag(e^{it}, e^{-it})
    const double t = 0.9;
    const Matrix2 u = dirac_exponential({0, 0}, 1.0, t);
    CHECK(std::abs(u.m00 - std::polar(1.0, t)) <= 1e-14);
    CHECK(std::abs(u.m11 - std::polar(1.0, -t)) <= 1e-14);
    CHECK(std::abs(u.m01) + std::abs(u.m10) <= 1e-15);

    for (int k = 0; k < 400; ++k) {
        const Vec2 xi{rand_real(-8, 8), rand_real(-8, 8)};
        const double mass = rand_real(0, 1), dur = rand_real(-3, 3);
        const Matrix2 e = dirac_exponential(xi, mass, dur);
        CHECK((e * e.adjoint() - identity2()).max_abs() <= 1e-13);  // unitary
    }
    // series oracle on the region where 40 terms converge far below 1e-10
    for (int k = 0; k < 400; ++k) {
        const Vec2 xi{rand_real(-2, 2), rand_real(-2, 2)};
        const double mass = rand_real(0, 1), dur = rand_real(-1, 1);
        const Matrix2 e = dirac_exponential(xi, mass, dur);
        CHECK((e - series_exponential(xi, mass, dur)).max_abs() <= 1e-10);
    }
}

TEST_CASE("dirac propagator: identity, inverse, unitarity, group law") {
    const Grid g{64, 8.0};
    const SpinorField f = random_smooth_field(g, 0.7);

    CHECK(field_max_diff(propagate_dirac(f, 0.0), f) <= 1e-12);
    CHECK(field_max_diff(propagate_dirac(propagate_dirac(f, 1.3), -1.3), f) <= 1e-11);

    for (int k = 0; k <= 3; ++k) {
        const double before = sobolev_norm(f, k);
        const double after = sobolev_norm(propagate_dirac(f, 2.1), k);
        CHECK(std::abs(after - before) <= 1e-12 * before);
    }

    for (int trial = 0; trial < 5; ++trial) {
        const double t1 = rand_real(-2, 2), t2 = rand_real(-2, 2);
        const SpinorField once = propagate_dirac(f, t1 + t2);
        const SpinorField twice = propagate_dirac(propagate_dirac(f, t1), t2);
        CHECK(field_max_diff(once, twice) <= 1e-11);
    }
}

TEST_CASE("dirac propagator commutes with spectral derivatives") {
    const Grid g{64, 8.0};
    const SpinorField f = random_smooth_field(g, 0.3);
    const double t = 1.1;
    for (int axis = 0; axis < 2; ++axis) {
        SpinorField df = f;
        df.c0 = spectral_derivative(g, f.c0, axis);
        df.c1 = spectral_derivative(g, f.c1, axis);
        const SpinorField a = propagate_dirac(df, t);
        SpinorField b = propagate_dirac(f, t);
        b.c0 = spectral_derivative(g, b.c0, axis);
        b.c1 = spectral_derivative(g, b.c1, axis);
        CHECK(field_max_diff(a, b) <= 1e-11);
    }
}

TEST_CASE("massless plane wave follows the analytic dispersion") {
    // single mode xi0: exact solution psi_hat(t) = e^{itM} psi_hat(0) with
    // e^{itM} = cos(|xi| t) I + i sin(|xi| t)/|xi| M built here from scratch
    const Grid g{32, 4.0};
    SpinorField f = SpinorField::zero(g, 2.0, 0.0);
    const double xi1 = g.freq(3), xi2 = g.freq(2);
    const Spinor amp{0.6, cplx{0.1, -0.3}};
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const cplx phase = std::polar(1.0, xi1 * g.coord(ix) + xi2 * g.coord(iy));
            const std::size_t idx = static_cast<std::size_t>(iy) * g.n + ix;
            f.c0[idx] = amp.a * phase;
            f.c1[idx] = amp.b * phase;
        }
    const double t = 0.8;
    const SpinorField evolved = propagate_dirac(f, t);
    const double lam = std::hypot(xi1, xi2);
    // hand-built symbol: M = -g0 g^a xi_a = [[0, -i xi1 - xi2], [i xi1 - xi2, 0]]
    const cplx i{0.0, 1.0};
    const Matrix2 m{0.0, -i * xi1 - xi2, i * xi1 - xi2, 0.0};
    const Matrix2 u = std::cos(lam * t) * identity2() +
                      (i * std::sin(lam * t) / lam) * m;
    const Spinor expect = u.apply(amp);
    for (int iy = 0; iy < g.n; iy += 5)
        for (int ix = 0; ix < g.n; ix += 5) {
            const cplx phase = std::polar(1.0, xi1 * g.coord(ix) + xi2 * g.coord(iy));
            const std::size_t idx = static_cast<std::size_t>(iy) * g.n + ix;
            CHECK(std::abs(evolved.c0[idx] - expect.a * phase) <= 1e-11);
            CHECK(std::abs(evolved.c1[idx] - expect.b * phase) <= 1e-11);
        }
}

TEST_CASE("wave propagator: identity, zero mode, single-mode closed form, energy") {
    const Grid g{32, 4.0};
    ScalarSpinorPair w = ScalarSpinorPair::zero(g);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        w.p0[k] = cplx{u(rng), u(rng)};
        w.q0[k] = cplx{u(rng), u(rng)};
        w.p1[k] = cplx{u(rng), u(rng)};
        w.q1[k] = cplx{u(rng), u(rng)};
    }
    const ScalarSpinorPair same = propagate_wave(w, 0.0);
    double d0 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        d0 = std::max({d0, std::abs(same.p0[k] - w.p0[k]), std::abs(same.q0[k] - w.q0[k])});
    CHECK(d0 <= 1e-12);

    // zero mode: Psi += Psi_t * t
    ScalarSpinorPair zm = ScalarSpinorPair::zero(g);
    const cplx c{0.4, -0.2};
    for (std::size_t k = 0; k < g.size(); ++k) zm.q0[k] = c;
    const ScalarSpinorPair zt = propagate_wave(zm, 1.7);
    for (std::size_t k = 0; k < g.size(); k += 97) {
        CHECK(std::abs(zt.p0[k] - c * 1.7) <= 1e-13);
        CHECK(std::abs(zt.q0[k] - c) <= 1e-13);
    }

    // standing single mode: cos/sin closed form
    ScalarSpinorPair sm = ScalarSpinorPair::zero(g);
    const double xi1 = g.freq(4), xi2 = g.freq(1);
    const double om = std::hypot(xi1, xi2);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            sm.p0[static_cast<std::size_t>(iy) * g.n + ix] =
                std::polar(1.0, xi1 * g.coord(ix) + xi2 * g.coord(iy));
    const double t = 0.6;
    const ScalarSpinorPair st = propagate_wave(sm, t);
    for (int iy = 0; iy < g.n; iy += 5)
        for (int ix = 0; ix < g.n; ix += 5) {
            const std::size_t idx = static_cast<std::size_t>(iy) * g.n + ix;
            CHECK(std::abs(st.p0[idx] - std::cos(om * t) * sm.p0[idx]) <= 1e-12);
            CHECK(std::abs(st.q0[idx] + om * std::sin(om * t) * sm.p0[idx]) <= 1e-12);
        }

    // discrete wave energy sum(|xi|^2 |Psi_hat|^2 + |Psi_t_hat|^2) conserved
    auto wave_energy = [&](const ScalarSpinorPair& pair) {
        Plane p = pair.p0, q = pair.q0;
        to_modal(g, p);
        to_modal(g, q);
        double acc = 0.0;
        for (int ky = 0; ky < g.n; ++ky)
            for (int kx = 0; kx < g.n; ++kx) {
                const double k2 = g.freq(kx) * g.freq(kx) + g.freq(ky) * g.freq(ky);
                const std::size_t idx = static_cast<std::size_t>(ky) * g.n + kx;
                acc += k2 * std::norm(p[idx]) + std::norm(q[idx]);
            }
        return acc;
    };
    const double e0 = wave_energy(w);
    const double e1 = wave_energy(propagate_wave(w, 2.3));
    CHECK(e1 == doctest::Approx(e0).epsilon(1e-12));
}
