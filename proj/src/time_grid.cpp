#include "gbsde/time_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace gbsde {

TimeGrid TimeGrid::uniform(double horizon, int steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("time grid: horizon must be positive");
    if (steps < 1) throw std::invalid_argument("time grid: need at least one step");
    std::vector<double> nodes(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
        nodes[static_cast<std::size_t>(i)] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    nodes.back() = horizon;
    return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 2) throw std::invalid_argument("time grid: need at least two nodes");
    if (nodes.front() != 0.0) throw std::invalid_argument("time grid: must start at 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("time grid: nodes must increase");
    return TimeGrid(std::move(nodes));
}

bool TimeGrid::uniform_spacing(double rel_tol) const {
    const double want = (horizon() - t(0)) / steps();
    for (int i = 0; i < steps(); ++i)
        if (std::abs(dt(i) - want) > rel_tol * want) return false;
    return true;
}

TimeGrid TimeGrid::tail_from(int first) const {
    if (first < 0 || first >= steps()) throw std::invalid_argument("time grid: bad tail start");
    // Absolute node values are kept so sub-solves evaluate drivers at the
    // same times as the parent problem.
    std::vector<double> nodes(nodes_.begin() + first, nodes_.end());
    return TimeGrid(std::move(nodes));
}

TimeFunction TimeFunction::constant(double c) {
    TimeFunction f;
    f.kind_ = Kind::constant_value;
    f.value_ = c;
    return f;
}

TimeFunction TimeFunction::piecewise(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() != values.size() + 1)
        throw std::invalid_argument("piecewise coefficient: need one more knot than values");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw std::invalid_argument("piecewise coefficient: knots must increase");
    TimeFunction f;
    f.kind_ = Kind::piecewise_steps;
    f.knots_ = std::move(knots);
    f.values_ = std::move(values);
    return f;
}

TimeFunction TimeFunction::of(std::function<double(double)> fn) {
    TimeFunction f;
    f.kind_ = Kind::callable;
    f.fn_ = std::move(fn);
    return f;
}

double TimeFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::constant_value:
            return value_;
        case Kind::piecewise_steps: {
            if (t <= knots_.front()) return scale_ * values_.front();
            if (t >= knots_.back()) return scale_ * values_.back();
            std::size_t lo = 0, hi = knots_.size() - 1;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                (knots_[mid] <= t ? lo : hi) = mid;
            }
            return scale_ * values_[lo];
        }
        case Kind::callable:
            return scale_ * fn_(t);
    }
    return 0.0;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < panels; i += 2) odd += f(a + i * h);
    for (int i = 2; i < panels; i += 2) even += f(a + i * h);
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

} // namespace

double TimeFunction::integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    if (b == a) return 0.0;
    switch (kind_) {
        case Kind::constant_value:
            return value_ * (b - a);
        case Kind::piecewise_steps: {
            double acc = 0.0;
            for (std::size_t k = 0; k < values_.size(); ++k) {
                const double lo = std::max(a, knots_[k]);
                const double hi = std::min(b, knots_[k + 1]);
                if (hi > lo) acc += scale_ * values_[k] * (hi - lo);
            }
            // Step functions extend flat beyond their knots.
            if (a < knots_.front()) acc += scale_ * values_.front() * (std::min(b, knots_.front()) - a);
            if (b > knots_.back()) acc += scale_ * values_.back() * (b - std::max(a, knots_.back()));
            return acc;
        }
        case Kind::callable: {
            auto g = [this](double t) { return scale_ * fn_(t); };
            int panels = 64;
            double prev = simpson(g, a, b, panels);
            for (int round = 0; round < 16; ++round) {
                panels *= 2;
                const double next = simpson(g, a, b, panels);
                if (std::abs(next - prev) <= 1e-12 * std::max(1.0, std::abs(next))) return next;
                prev = next;
            }
            return prev;
        }
    }
    return 0.0;
}

TimeFunction TimeFunction::scaled(double c) const {
    TimeFunction f = *this;
    if (f.kind_ == Kind::constant_value) {
        f.value_ *= c;
    } else {
        f.scale_ *= c;
    }
    return f;
}

} // namespace gbsde
