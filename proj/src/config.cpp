#include "soler2d/config.hpp"

#include <cmath>

#include "soler2d/errors.hpp"

namespace soler2d {

StepperConfig RunConfig::stepper() const {
    StepperConfig s;
    s.dt = dt;
    s.t_end = t_end;
    s.snapshot_every = snapshot_stride;
    s.companion = companion;
    s.linear_only = linear_only;
    return s;
}

Spinor RunConfig::direction_spinor() const {
    if (direction == "e1") return {1.0, 0.0};
    if (direction == "diag") {
        const double r = 1.0 / std::sqrt(2.0);
        return {r, r};
    }
    throw ConfigError("data.direction must be 'e1' or 'diag', got '" + direction + "'");
}

void RunConfig::validate() const {
    grid().validate();
    stepper().validate(grid());
    direction_spinor();
    if (mass < 0.0 || mass > 1.0) throw ConfigError("model.mass must lie in [0, 1]");
    if (epsilon < 0.0) throw ConfigError("data.epsilon must be nonnegative");
    if (sobolev_n < 1 || sobolev_n > 3)
        throw ConfigError("sobolev.N must lie in [1, 3]");
    if (companion && mass != 0.0)
        throw ConfigError("companion runs require model.mass = 0");
}

}  // namespace soler2d
