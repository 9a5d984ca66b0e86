#pragma once

#include <span>
#include <vector>

#include "gbsde/field.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/report.hpp"
#include "gbsde/time_grid.hpp"

namespace gbsde {

/// Piecewise comparison scale used by the a-priori growth bound:
///   psi(x) = (x - 2) / ln 4            for 0 <= x <= 2,
///   psi(x) = ln(ln x) - ln(ln 2)       for x > 2.
/// Continuous at 2 with value 0; strictly increasing. Throws on x < 0.
double psi(double x);

/// Exact inverse: psi_inv(v) = 2 + v ln 4 for v <= 0, 2^(e^v) for v > 0.
double psi_inv(double v);

/// Nodewise a-priori bound field: at level i the value at node (i, j) is the
/// conditional expectation of psi_inv(psi(X) + integral of beta over
/// [t_i, T]), computed by plain backward averaging. The terminal values must
/// be those of the solved equation's payoff.
std::vector<std::vector<double>> bihari_bound(const Lattice& lattice,
                                              std::span<const double> terminal_values,
                                              const TimeFunction& beta);

/// Certifies low <= high nodewise up to additive slack on matching lattice
/// grids. Throws std::invalid_argument on mismatched discretizations.
/// The report records the worst margin (min over nodes of high - low + slack)
/// and witnesses for violations.
PropertyReport comparison_certificate(const SolutionField& low, const SolutionField& high,
                                      double slack);

} // namespace gbsde
