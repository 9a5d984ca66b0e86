#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "gbsde/driver.hpp"
#include "gbsde/solver.hpp"

namespace gbsde::detail {

inline void reject_wrong_family(const DriverSpec& driver, const char* where) {
    if (driver.family == DriverFamily::geometric) {
        throw std::invalid_argument(std::string(where) +
                                    ": geometric drivers are solved by solve_gbsde");
    }
    if (driver.family == DriverFamily::two_driver) {
        throw std::invalid_argument(std::string(where) +
                                    ": two-driver pairs are solved by solve_twodriver");
    }
    if (!driver.f) {
        throw std::invalid_argument(std::string(where) + ": driver has no evaluation function");
    }
}

struct ImplicitOutcome {
    double y = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = true;
};

/// y = mean + f(t, y, z) dt by fixed point; switches to half-step damping
/// once the residual stops shrinking. On the positive domain iterates are
/// clamped at the positivity floor.
inline ImplicitOutcome solve_implicit(const DriverSpec& driver, double t, double mean,
                                      std::span<const double> z, double dt,
                                      const SolverConfig& config) {
    const bool positive = driver.y_domain == YDomain::positive;
    const double floor = config.positivity_floor;
    const auto clamp = [&](double v) { return positive ? std::max(v, floor) : v; };

    ImplicitOutcome out;
    double y = clamp(mean);
    double prev = std::numeric_limits<double>::infinity();
    bool damped = false;
    for (int it = 1; it <= config.max_iterations; ++it) {
        const double g = clamp(mean + driver.f(t, y, z) * dt);
        const double r = g - y;
        const double ar = std::abs(r);
        out.iterations = it;
        out.residual = ar;
        if (ar <= config.tolerance * std::max(1.0, std::abs(g))) {
            out.y = g;
            return out;
        }
        if (ar >= prev) damped = true;
        prev = ar;
        y = damped ? clamp(y + 0.5 * r) : g;
    }
    out.y = y;
    out.converged = false;
    return out;
}

} // namespace gbsde::detail
