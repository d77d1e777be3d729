#pragma once

#include <string>

#include "soler2d/evolve.hpp"

namespace soler2d {

struct RunConfig {
    int grid_n = 256;
    double grid_l = 64.0;
    double dt = 0.03125;
    double t_end = 50.0;
    int snapshot_stride = 32;    // steps per snapshot
    double mass = 1.0;
    double epsilon = 0.05;
    std::string direction = "e1";  // "e1" or "diag" = (1,1)/sqrt(2)
    int sobolev_n = 2;
    std::string output_dir = "out";
    bool companion = false;
    bool linear_only = false;
    unsigned seed = 20260823;

    Grid grid() const { return {grid_n, grid_l}; }
    StepperConfig stepper() const;
    Spinor direction_spinor() const;
    void validate() const;  // throws ConfigError
};

}  // namespace soler2d
