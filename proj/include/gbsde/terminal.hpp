#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

namespace gbsde {

enum class Positivity { strictly_positive, bounded_below, unrestricted };

/// Terminal payoff X = phi(W_T). Carries positivity metadata so solvers can
/// reject log-domain input that is not strictly positive, and a nominal
/// moment order used by moment diagnostics.
class TerminalCondition {
public:
    using Fn = std::function<double(std::span<const double>)>;

    static TerminalCondition make(std::string name, int dim, Fn phi, Positivity pos,
                                  double lower_bound = 0.0, double moment_order = 2.0);

    // Config-grammar primitives. exp_of_state and power_of_state read the
    // first state coordinate; the rest compose an existing payoff.
    static TerminalCondition constant_payoff(double value);
    static TerminalCondition exp_of_state(double sigma);          // exp(sigma * w)
    static TerminalCondition power_of_state(double p, double scale); // scale * |w|^p
    TerminalCondition affine(double a, double b) const;           // a*X + b
    TerminalCondition clamp(double lo, double hi) const;

    // Pointwise combinators used by axiom audits.
    TerminalCondition scaled(double xi) const;                    // xi * X
    TerminalCondition powered(double eta) const;                  // X^eta
    static TerminalCondition geometric_mix(const TerminalCondition& x,
                                           const TerminalCondition& y, double lambda);
    static TerminalCondition sum(const TerminalCondition& x, const TerminalCondition& y);

    double operator()(std::span<const double> w) const { return phi_(w); }
    double operator()(double w) const { return phi_(std::span<const double>(&w, 1)); }

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    Positivity positivity() const { return positivity_; }
    double lower_bound() const { return lower_bound_; }
    double moment_order() const { return moment_order_; }

private:
    std::string name_;
    int dim_ = 1;
    Fn phi_;
    Positivity positivity_ = Positivity::unrestricted;
    double lower_bound_ = 0.0;
    double moment_order_ = 2.0;
};

} // namespace gbsde
