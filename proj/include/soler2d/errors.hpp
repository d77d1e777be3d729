#pragma once

#include <stdexcept>
#include <string>

namespace soler2d {

// Invalid user-supplied configuration (grid too coarse, bad mass, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The field left the perturbative regime during time integration.
struct BlowupError : std::runtime_error {
    explicit BlowupError(const std::string& what) : std::runtime_error(what) {}
};

// Internal consistency violation (support wrap-around and the like).
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace soler2d
