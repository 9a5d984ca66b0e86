#include "gbsde/terminal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gbsde {

TerminalCondition TerminalCondition::make(std::string name, int dim, Fn phi, Positivity pos,
                                          double lower_bound, double moment_order) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("terminal: dim must be 1..3");
    TerminalCondition x;
    x.name_ = std::move(name);
    x.dim_ = dim;
    x.phi_ = std::move(phi);
    x.positivity_ = pos;
    x.lower_bound_ = lower_bound;
    x.moment_order_ = moment_order;
    return x;
}

TerminalCondition TerminalCondition::constant_payoff(double value) {
    const Positivity pos = value > 0.0 ? Positivity::strictly_positive : Positivity::unrestricted;
    return make("const(" + std::to_string(value) + ")", 1,
                [value](std::span<const double>) { return value; }, pos, std::min(value, 0.0));
}

TerminalCondition TerminalCondition::exp_of_state(double sigma) {
    return make("exp_wT(" + std::to_string(sigma) + ")", 1,
                [sigma](std::span<const double> w) { return std::exp(sigma * w[0]); },
                Positivity::strictly_positive, 0.0);
}

TerminalCondition TerminalCondition::power_of_state(double p, double scale) {
    return make("power_wT(" + std::to_string(p) + ")", 1,
                [p, scale](std::span<const double> w) { return scale * std::pow(std::abs(w[0]), p); },
                Positivity::unrestricted, 0.0);
}

TerminalCondition TerminalCondition::affine(double a, double b) const {
    auto inner = phi_;
    Positivity pos = Positivity::unrestricted;
    double lb = 0.0;
    if (a > 0.0 && b >= 0.0 && positivity_ == Positivity::strictly_positive)
        pos = Positivity::strictly_positive;
    else if (a >= 0.0) {
        pos = Positivity::bounded_below;
        lb = a * lower_bound_ + b;
    }
    return make("affine(" + std::to_string(a) + "," + std::to_string(b) + ")." + name_, dim_,
                [a, b, inner](std::span<const double> w) { return a * inner(w) + b; }, pos, lb,
                moment_order_);
}

TerminalCondition TerminalCondition::clamp(double lo, double hi) const {
    if (!(lo <= hi)) throw std::invalid_argument("terminal clamp: need lo <= hi");
    auto inner = phi_;
    const Positivity pos = lo > 0.0 ? Positivity::strictly_positive : Positivity::bounded_below;
    return make("clamp(" + std::to_string(lo) + "," + std::to_string(hi) + ")." + name_, dim_,
                [lo, hi, inner](std::span<const double> w) { return std::clamp(inner(w), lo, hi); },
                pos, lo, moment_order_);
}

TerminalCondition TerminalCondition::scaled(double xi) const {
    if (!(xi > 0.0)) throw std::invalid_argument("terminal scale: factor must be positive");
    auto inner = phi_;
    return make("scaled(" + std::to_string(xi) + ")." + name_, dim_,
                [xi, inner](std::span<const double> w) { return xi * inner(w); }, positivity_,
                xi * lower_bound_, moment_order_);
}

TerminalCondition TerminalCondition::powered(double eta) const {
    auto inner = phi_;
    if (positivity_ != Positivity::strictly_positive)
        throw std::invalid_argument("terminal power: payoff must be strictly positive");
    return make("pow(" + std::to_string(eta) + ")." + name_, dim_,
                [eta, inner](std::span<const double> w) { return std::pow(inner(w), eta); },
                Positivity::strictly_positive, 0.0, moment_order_);
}

TerminalCondition TerminalCondition::geometric_mix(const TerminalCondition& x,
                                                   const TerminalCondition& y, double lambda) {
    if (x.positivity_ != Positivity::strictly_positive ||
        y.positivity_ != Positivity::strictly_positive)
        throw std::invalid_argument("terminal geometric mix: payoffs must be strictly positive");
    auto fx = x.phi_;
    auto fy = y.phi_;
    return make("gmix(" + std::to_string(lambda) + ")", std::max(x.dim_, y.dim_),
                [fx, fy, lambda](std::span<const double> w) {
                    return std::pow(fx(w), lambda) * std::pow(fy(w), 1.0 - lambda);
                },
                Positivity::strictly_positive, 0.0, std::max(x.moment_order_, y.moment_order_));
}

TerminalCondition TerminalCondition::sum(const TerminalCondition& x, const TerminalCondition& y) {
    auto fx = x.phi_;
    auto fy = y.phi_;
    auto nonneg = [](const TerminalCondition& t) {
        return t.positivity_ == Positivity::strictly_positive ||
               (t.positivity_ == Positivity::bounded_below && t.lower_bound_ >= 0.0);
    };
    Positivity pos = Positivity::unrestricted;
    if ((x.positivity_ == Positivity::strictly_positive && nonneg(y)) ||
        (y.positivity_ == Positivity::strictly_positive && nonneg(x)))
        pos = Positivity::strictly_positive;
    return make("sum(" + x.name_ + "," + y.name_ + ")", std::max(x.dim_, y.dim_),
                [fx, fy](std::span<const double> w) { return fx(w) + fy(w); }, pos,
                x.lower_bound_ + y.lower_bound_, std::max(x.moment_order_, y.moment_order_));
}

} // namespace gbsde
