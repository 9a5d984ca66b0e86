#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbsde/kernels.hpp"
#include "gbsde/solver.hpp"
#include "solver_detail.hpp"

namespace gbsde {

namespace {

// Fills rows 0..level-1 of out from row `level`; z rows alongside.
void backward_fill(const Lattice& lattice, int level, const DriverSpec& driver,
                   const SolverConfig& config, SolutionField& out) {
    const double dt = lattice.dt();
    const double two_sqrt_dt = 2.0 * lattice.sqrt_dt();
    auto& diag = out.diagnostics;

    std::vector<int> iters(static_cast<std::size_t>(level) + 1);
    std::vector<double> resid(static_cast<std::size_t>(level) + 1);
    std::vector<unsigned char> ok(static_cast<std::size_t>(level) + 1, 1);

    for (int i = level - 1; i >= 0; --i) {
        const auto& up = out.y_levels[static_cast<std::size_t>(i) + 1];
        auto& yrow = out.y_levels[static_cast<std::size_t>(i)];
        auto& zrow = out.z_levels[static_cast<std::size_t>(i)];
        yrow.assign(static_cast<std::size_t>(i) + 1, 0.0);
        zrow.assign(static_cast<std::size_t>(i) + 1, 0.0);
        const double t = lattice.grid().t(i);
        kernels::parallel_for(i + 1, config.parallel && i + 1 >= 64, [&](std::int64_t j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            const double yu = up[ju + 1];
            const double yd = up[ju];
            const double z = (yu - yd) / two_sqrt_dt;
            const double mean = 0.5 * (yu + yd);
            const detail::ImplicitOutcome node =
                detail::solve_implicit(driver, t, mean, std::span<const double>(&z, 1), dt, config);
            yrow[ju] = node.y;
            zrow[ju] = z;
            iters[ju] = node.iterations;
            resid[ju] = node.residual;
            ok[ju] = node.converged ? 1 : 0;
        });
        double zsq_max = 0.0;
        for (int j = 0; j <= i; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            if (!ok[ju]) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "implicit node solve did not converge at level %d node %d "
                              "(driver %s, residual %.3g)",
                              i, j, driver.name.c_str(), resid[ju]);
                throw std::runtime_error(buf);
            }
            diag.max_fixed_point_iterations = std::max(diag.max_fixed_point_iterations, iters[ju]);
            diag.max_fixed_point_residual = std::max(diag.max_fixed_point_residual, resid[ju]);
            zsq_max = std::max(zsq_max, zrow[ju] * zrow[ju]);
        }
        // Per-level max bounds the pathwise sum from above.
        diag.max_z_square_time_integral += zsq_max * dt;
    }
}

void finalize_positivity(SolutionField& out) {
    bool positive = true;
    for (const auto& row : out.y_levels) {
        for (double v : row) positive = positive && v > 0.0;
    }
    out.diagnostics.positive = positive;
}

} // namespace

SolutionField solve_lattice(const Lattice& lattice, const TerminalCondition& terminal,
                            const DriverSpec& driver, const SolverConfig& config) {
    detail::reject_wrong_family(driver, "solve_lattice");
    if (terminal.dim() != 1) {
        throw std::invalid_argument("solve_lattice: terminal must read a 1-d state");
    }

    const int n = lattice.steps();
    SolutionField out;
    out.kind = FieldKind::lattice;
    out.grid = lattice.grid();
    out.zdim = 1;
    out.driver_name = driver.name;
    out.lineage = driver.lineage;
    out.y_levels.resize(static_cast<std::size_t>(n) + 1);
    out.z_levels.resize(static_cast<std::size_t>(n));
    auto& top = out.y_levels[static_cast<std::size_t>(n)];
    top.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        top[static_cast<std::size_t>(j)] = terminal(lattice.state(n, j));
    }
    backward_fill(lattice, n, driver, config, out);
    finalize_positivity(out);
    return out;
}

SolutionField solve_lattice_from_slice(const Lattice& lattice, int level,
                                       std::span<const double> slice, const DriverSpec& driver,
                                       const SolverConfig& config) {
    detail::reject_wrong_family(driver, "solve_lattice_from_slice");
    if (level < 0 || level > lattice.steps()) {
        throw std::invalid_argument("solve_lattice_from_slice: level out of range");
    }
    if (slice.size() != static_cast<std::size_t>(level) + 1) {
        throw std::invalid_argument("solve_lattice_from_slice: slice needs level+1 values");
    }

    SolutionField out;
    out.kind = FieldKind::lattice;
    out.grid = lattice.grid();
    out.zdim = 1;
    out.driver_name = driver.name;
    out.lineage = driver.lineage;
    out.y_levels.resize(static_cast<std::size_t>(level) + 1);
    out.z_levels.resize(static_cast<std::size_t>(level));
    out.y_levels[static_cast<std::size_t>(level)].assign(slice.begin(), slice.end());
    backward_fill(lattice, level, driver, config, out);
    finalize_positivity(out);
    return out;
}

} // namespace gbsde
