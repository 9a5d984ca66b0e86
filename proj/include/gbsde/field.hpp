#pragma once

#include <string>
#include <vector>

#include "gbsde/time_grid.hpp"

namespace gbsde {

enum class FieldKind { lattice, ensemble };

struct SolveDiagnostics {
    int max_fixed_point_iterations = 0;
    double max_fixed_point_residual = 0.0;
    bool positive = false;
    bool converged = true;
    std::vector<double> regression_rms;      // per step, regression methods only
    double max_z_square_time_integral = 0.0; // max over paths/nodes of sum z^2 dt
};

/// Discrete solution (Y, Z) of a backward equation, on a lattice (ragged
/// per-level storage) or on a path ensemble (per-path rows).
struct SolutionField {
    FieldKind kind = FieldKind::lattice;
    TimeGrid grid = TimeGrid::uniform(1.0, 1);
    int zdim = 1;

    // Lattice storage: y[i] has i+1 entries for i = 0..N, z[i] likewise for
    // i = 0..N-1 (z at the last level is not defined by the recursion).
    std::vector<std::vector<double>> y_levels;
    std::vector<std::vector<double>> z_levels;

    // Ensemble storage: y(m, i) = y_paths[m*(N+1)+i], z(m, i, k) likewise.
    int paths = 0;
    std::vector<double> y_paths;
    std::vector<double> z_paths;

    std::string driver_name;
    std::vector<std::string> lineage;
    SolveDiagnostics diagnostics;

    double y0() const {
        return kind == FieldKind::lattice ? y_levels.front().front() : y_paths.front();
    }
    double y_at(int level, int j) const { return y_levels[static_cast<std::size_t>(level)][static_cast<std::size_t>(j)]; }
    double z_at(int level, int j) const { return z_levels[static_cast<std::size_t>(level)][static_cast<std::size_t>(j)]; }

    double ensemble_y(int m, int i) const {
        return y_paths[static_cast<std::size_t>(m) * (static_cast<std::size_t>(grid.steps()) + 1) + static_cast<std::size_t>(i)];
    }
    double ensemble_z(int m, int i, int k = 0) const {
        return z_paths[(static_cast<std::size_t>(m) * static_cast<std::size_t>(grid.steps()) + static_cast<std::size_t>(i)) * static_cast<std::size_t>(zdim) + static_cast<std::size_t>(k)];
    }
};

} // namespace gbsde
