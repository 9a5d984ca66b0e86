#pragma once

#include <cstdint>
#include <span>

#include "gbsde/driver.hpp"
#include "gbsde/ensemble.hpp"
#include "gbsde/field.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/terminal.hpp"

namespace gbsde {

struct SolverConfig {
    double tolerance = 1e-12;      // implicit fixed-point stopping tolerance
    int max_iterations = 200;      // per implicit node/path solve
    int basis_degree = 4;          // global polynomial basis for regression
    double positivity_floor = 1e-12; // guards log/exp and y-divisions on the positive domain
    bool parallel = true;          // OpenMP kernels; false selects the serial reference path
};

/// Backward solve on the lattice for ordinary or LN-Q drivers.
/// Per node: z(i,j) = (y(i+1,j+1) - y(i+1,j)) / (2 sqrt(dt)), then y(i,j)
/// solves y = (y_up + y_down)/2 + f(t_i, y, z) dt by damped fixed point
/// (damping 0.5 once the iteration stops contracting). Throws on
/// non-convergence naming level and node. Geometric or two-driver input is
/// rejected with a pointer to the dedicated routine.
SolutionField solve_lattice(const Lattice& lattice, const TerminalCondition& terminal,
                            const DriverSpec& driver, const SolverConfig& config = {});

/// Same backward recursion started from a given value slice at `level`.
/// Restarting from a solved field's slice reproduces the field bitwise,
/// which is the discrete flow property.
SolutionField solve_lattice_from_slice(const Lattice& lattice, int level,
                                       std::span<const double> slice, const DriverSpec& driver,
                                       const SolverConfig& config = {});

/// Least-squares Monte Carlo backward Euler on a path ensemble with a global
/// polynomial basis in the state (all monomials of total degree <=
/// basis_degree, standardized per step). Z is regressed from
/// Y_{i+1} dW_i / dt; Y_i solves the implicit per-path equation after
/// projection. Throws on rank-deficient regression naming the step.
SolutionField solve_lsmc(const PathEnsemble& ensemble, const TerminalCondition& terminal,
                         const DriverSpec& driver, const SolverConfig& config = {});

/// Geometric equations, always via the log-domain route: transform the
/// driver with gbsde_to_ordinary, solve the ln X terminal problem, map back.
/// Requires a strictly positive terminal and returns a positive field.
SolutionField solve_gbsde(const Lattice& lattice, const TerminalCondition& terminal,
                          const DriverSpec& geometric, const SolverConfig& config = {});
SolutionField solve_gbsde(const PathEnsemble& ensemble, const TerminalCondition& terminal,
                          const DriverSpec& geometric, const SolverConfig& config = {});

struct TwoDriverSolution {
    SolutionField primary;  // (Y, Z) of the original pair
    SolutionField reduced;  // (Y, V) of the reduced equation, V = g2(t, Y, Z)
};

/// Two-driver solve via reduction: twodriver_reduce, then the quadratic
/// transform, then the ordinary solve; both coordinates returned with
/// Z = g2_inverse(t, Y, V) recovered nodewise.
TwoDriverSolution solve_twodriver(const Lattice& lattice, const TerminalCondition& terminal,
                                  const DriverSpec& two_driver, const SolverConfig& config = {});
TwoDriverSolution solve_twodriver(const PathEnsemble& ensemble, const TerminalCondition& terminal,
                                  const DriverSpec& two_driver, const SolverConfig& config = {});

/// Independent dynamic-programming oracle for the drift-robust gamma-norm:
/// maximizes the X^gamma expectation over per-node drifts mu in a uniform
/// grid on [-bound, bound] with tilted up-probability (1 + mu sqrt(dt))/2,
/// then takes the 1/gamma root. Shares no code with the backward solvers.
/// Requires bound * sqrt(dt) < 1.
SolutionField robust_oracle(const Lattice& lattice, const TerminalCondition& terminal,
                            double gamma, double bound, int drift_grid = 2);

} // namespace gbsde
