#include "gbsde/coefficients.hpp"

#include <stdexcept>

namespace gbsde {

CoefficientBundle CoefficientBundle::zero(double horizon) {
    return make(TimeFunction::constant(0.0), TimeFunction::constant(0.0),
                TimeFunction::constant(0.0), 0.0, horizon);
}

CoefficientBundle CoefficientBundle::make(TimeFunction alpha, TimeFunction beta, TimeFunction gamma,
                                          double delta, double horizon) {
    CoefficientBundle b;
    b.alpha = std::move(alpha);
    b.beta = std::move(beta);
    b.gamma = std::move(gamma);
    b.delta = delta;
    b.horizon = horizon;
    b.A = b.alpha.integral(0.0, horizon);
    b.B = b.beta.integral(0.0, horizon);
    return b;
}

CoefficientBundle CoefficientBundle::constants(double alpha, double beta, double gamma,
                                               double delta, double horizon) {
    return make(TimeFunction::constant(alpha), TimeFunction::constant(beta),
                TimeFunction::constant(gamma), delta, horizon);
}

void CoefficientBundle::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("coefficient bundle: horizon must be positive");
    if (delta < 0.0) throw std::invalid_argument("coefficient bundle: delta must be nonnegative");
    const int probes = 257;
    for (int i = 0; i < probes; ++i) {
        const double t = horizon * i / (probes - 1);
        if (alpha(t) < 0.0) throw std::invalid_argument("coefficient bundle: alpha negative at sampled time");
        if (beta(t) < 0.0) throw std::invalid_argument("coefficient bundle: beta negative at sampled time");
        if (gamma(t) < 0.0) throw std::invalid_argument("coefficient bundle: gamma negative at sampled time");
    }
}

CoefficientBundle CoefficientBundle::reduced_by(double K) const {
    if (!(K > 0.0)) throw std::invalid_argument("coefficient bundle: reduction needs K > 0");
    CoefficientBundle b = make(alpha, beta, gamma.scaled(1.0 / K), delta / (K * K), horizon);
    b.eta = eta;
    return b;
}

} // namespace gbsde
