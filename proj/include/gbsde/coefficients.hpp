#pragma once

#include <optional>
#include <vector>

#include "gbsde/time_grid.hpp"

namespace gbsde {

/// Growth-coefficient bundle (alpha, beta, gamma, delta) attached to a driver:
/// alpha, beta, gamma are nonnegative functions of time, delta weighs the
/// quadratic-in-z term, eta optionally weighs a signed linear-in-z term.
/// A = integral of alpha and B = integral of beta over [0, horizon] are
/// cached at construction; moment audits consume them.
struct CoefficientBundle {
    TimeFunction alpha, beta, gamma;
    double delta = 0.0;
    std::optional<std::vector<double>> eta;
    double horizon = 0.0;
    double A = 0.0;
    double B = 0.0;

    static CoefficientBundle zero(double horizon = 1.0);
    static CoefficientBundle make(TimeFunction alpha, TimeFunction beta, TimeFunction gamma,
                                  double delta, double horizon);
    static CoefficientBundle constants(double alpha, double beta, double gamma,
                                       double delta, double horizon);

    /// Throws std::invalid_argument naming the offending coefficient.
    void validate() const;

    /// Bundle for the reduced equation of a two-driver pair with volatility
    /// lower-bound constant K: (alpha, beta, gamma/K, delta/K^2).
    CoefficientBundle reduced_by(double K) const;
};

} // namespace gbsde
