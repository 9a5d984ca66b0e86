#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gbsde/time_grid.hpp"

namespace gbsde {

/// Seeded Monte Carlo ensemble of Brownian paths. Each path is generated
/// from its own counter-derived stream, so regeneration from
/// (seed, grid, dim, paths) is bit-identical and independent of thread count.
class PathEnsemble {
public:
    static PathEnsemble generate(const TimeGrid& grid, int dim, int paths, std::uint64_t seed,
                                 bool parallel = true);

    const TimeGrid& grid() const { return grid_; }
    int steps() const { return grid_.steps(); }
    int dim() const { return dim_; }
    int paths() const { return paths_; }
    std::uint64_t seed() const { return seed_; }

    /// dW for (path m, step i, coordinate k).
    double increment(int m, int i, int k = 0) const {
        return dw_[(static_cast<std::size_t>(m) * steps_count_ + i) * dim_u_ + k];
    }
    /// W_{t_i} for (path m, node i, coordinate k).
    double state(int m, int i, int k = 0) const {
        return w_[(static_cast<std::size_t>(m) * (steps_count_ + 1) + i) * dim_u_ + k];
    }
    std::span<const double> state_vec(int m, int i) const {
        return {&w_[(static_cast<std::size_t>(m) * (steps_count_ + 1) + i) * dim_u_], dim_u_};
    }

private:
    PathEnsemble(TimeGrid grid, int dim, int paths, std::uint64_t seed);
    TimeGrid grid_;
    int dim_;
    int paths_;
    std::uint64_t seed_;
    std::size_t steps_count_;
    std::size_t dim_u_;
    std::vector<double> dw_; // paths x steps x dim
    std::vector<double> w_;  // paths x (steps+1) x dim
};

} // namespace gbsde
