#include "soler2d/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "soler2d/errors.hpp"

namespace soler2d {

namespace {

// One pair of unnormalized c2c plans per grid size. Plans are created with
// FFTW_UNALIGNED so they can execute on any buffer.
class FftPlans {
  public:
    explicit FftPlans(int n) : n_(n) {
        std::vector<cplx> scratch(static_cast<std::size_t>(n) * n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    ~FftPlans() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    void forward(Plane& p) const {
        auto* buf = reinterpret_cast<fftw_complex*>(p.data());
        fftw_execute_dft(fwd_, buf, buf);
        const double scale = 1.0 / (static_cast<double>(n_) * n_);
        for (auto& v : p) v *= scale;
    }
    void backward(Plane& p) const {
        auto* buf = reinterpret_cast<fftw_complex*>(p.data());
        fftw_execute_dft(bwd_, buf, buf);
    }

  private:
    int n_;
    fftw_plan fwd_, bwd_;
};

const FftPlans& plans_for(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<FftPlans>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftPlans>(n);
    return *slot;
}

void check_shape(const Grid& g, const Plane& p) {
    if (p.size() != g.size())
        throw std::invalid_argument("plane shape does not match grid");
}

}  // namespace

void Grid::validate() const {
    if (n < 16 || (n & (n - 1)) != 0)
        throw ConfigError("grid.n must be a power of two >= 16");
    if (half_width <= 0.0) throw ConfigError("grid.L must be positive");
}

SpinorField SpinorField::zero(const Grid& g, double t, double m) {
    SpinorField f;
    f.grid = g;
    f.time = t;
    f.mass = m;
    f.c0.assign(g.size(), cplx{});
    f.c1.assign(g.size(), cplx{});
    return f;
}

ScalarSpinorPair ScalarSpinorPair::zero(const Grid& g, double t) {
    ScalarSpinorPair p;
    p.grid = g;
    p.time = t;
    p.p0.assign(g.size(), cplx{});
    p.p1.assign(g.size(), cplx{});
    p.q0.assign(g.size(), cplx{});
    p.q1.assign(g.size(), cplx{});
    return p;
}

void to_modal(const Grid& g, Plane& p) {
    check_shape(g, p);
    plans_for(g.n).forward(p);
}

void to_nodal(const Grid& g, Plane& p) {
    check_shape(g, p);
    plans_for(g.n).backward(p);
}

Plane spectral_derivative(const Grid& g, const Plane& p, int axis) {
    check_shape(g, p);
    Plane out = p;
    to_modal(g, out);
    const cplx i{0.0, 1.0};
    const int n = g.n;
    for (int ky = 0; ky < n; ++ky) {
        const double fy = g.freq(ky);
        for (int kx = 0; kx < n; ++kx) {
            const double f = (axis == 0) ? g.freq(kx) : fy;
            out[static_cast<std::size_t>(ky) * n + kx] *= i * f;
        }
    }
    to_nodal(g, out);
    return out;
}

Plane upsample_from_modal(const Grid& g, const Plane& modal, int factor) {
    check_shape(g, modal);
    if (factor < 1) throw std::invalid_argument("upsample factor must be >= 1");
    const Grid fine{g.n * factor, g.half_width};
    if (factor == 1) {
        Plane out = modal;
        to_nodal(fine, out);
        return out;
    }
    Plane out(fine.size(), cplx{});
    const int n = g.n;
    auto fine_bin = [&](int k) {
        const int s = (k < n / 2) ? k : k - n;  // signed coarse frequency index
        return s >= 0 ? s : fine.n + s;
    };
    for (int ky = 0; ky < n; ++ky) {
        const std::size_t fy = static_cast<std::size_t>(fine_bin(ky)) * fine.n;
        for (int kx = 0; kx < n; ++kx)
            out[fy + fine_bin(kx)] = modal[static_cast<std::size_t>(ky) * n + kx];
    }
    to_nodal(fine, out);
    return out;
}

double l2_norm(const SpinorField& f) {
    double acc = 0.0;
    for (std::size_t k = 0; k < f.c0.size(); ++k)
        acc += std::norm(f.c0[k]) + std::norm(f.c1[k]);
    return std::sqrt(acc * f.grid.dx() * f.grid.dx());
}

double sobolev_norm(const SpinorField& f, int order) {
    if (order < 0) throw std::invalid_argument("sobolev_norm: order must be >= 0");
    Plane a = f.c0, b = f.c1;
    to_modal(f.grid, a);
    to_modal(f.grid, b);
    const int n = f.grid.n;
    const double measure = (2.0 * f.grid.half_width) * (2.0 * f.grid.half_width);
    double acc = 0.0;
    for (int ky = 0; ky < n; ++ky) {
        const double fy = f.grid.freq(ky);
        for (int kx = 0; kx < n; ++kx) {
            const double fx = f.grid.freq(kx);
            const double w = std::pow(1.0 + fx * fx + fy * fy, order);
            const std::size_t idx = static_cast<std::size_t>(ky) * n + kx;
            acc += w * (std::norm(a[idx]) + std::norm(b[idx]));
        }
    }
    return std::sqrt(measure * acc);
}

double integrate(const Grid& g, const std::vector<double>& values) {
    if (values.size() != g.size())
        throw std::invalid_argument("integrate: shape mismatch");
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc * g.dx() * g.dx();
}

double bump_chi(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

SpinorField make_initial_data(const Grid& g, double eps, const Spinor& direction,
                              double mass) {
    g.validate();
    if (eps < 0.0) throw ConfigError("epsilon must be nonnegative");
    if (std::abs(direction.norm() - 1.0) > 1e-12)
        throw ConfigError("initial spinor direction must be a unit vector");
    if (g.dx() > 0.5)
        throw ConfigError("grid too coarse to resolve the unit bump (need dx <= 0.5)");
    if (mass < 0.0 || mass > 1.0) throw ConfigError("mass must lie in [0, 1]");

    SpinorField f = SpinorField::zero(g, 2.0, mass);
    for (int iy = 0; iy < g.n; ++iy) {
        const double y = g.coord(iy);
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = g.coord(ix);
            const double amp = eps * bump_chi(std::hypot(x, y));
            const std::size_t idx = static_cast<std::size_t>(iy) * g.n + ix;
            f.c0[idx] = amp * direction.a;
            f.c1[idx] = amp * direction.b;
        }
    }
    return f;
}

}  // namespace soler2d
