#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gbsde/time_grid.hpp"

namespace gbsde {

/// Recombining binomial lattice for a 1-d Brownian state. Node (i, j) with
/// j in 0..i carries state w(i,j) = (2j - i) * sqrt(dt); up and down moves
/// have probability 1/2. Requires a uniform grid.
class Lattice {
public:
    static Lattice build(const TimeGrid& grid, int dim = 1);

    const TimeGrid& grid() const { return grid_; }
    int steps() const { return grid_.steps(); }
    double dt() const { return dt_; }
    double sqrt_dt() const { return sqrt_dt_; }
    int nodes_at(int level) const { return level + 1; }
    double state(int level, int j) const { return (2 * j - level) * sqrt_dt_; }

    std::vector<double> terminal_states() const;

    /// Binomial weights 2^-m * C(m, k) for the m-step subtree.
    static std::vector<double> binomial_weights(int m);

    /// Conditional expectation of a terminal functional from node (level, j)
    /// by direct binomial weighting; independent of the backward solvers.
    double subtree_expectation(int level, int j,
                               const std::function<double(double)>& terminal_of_state) const;

private:
    Lattice(TimeGrid grid, double dt) : grid_(std::move(grid)), dt_(dt), sqrt_dt_(std::sqrt(dt)) {}
    TimeGrid grid_;
    double dt_;
    double sqrt_dt_;
};

} // namespace gbsde
