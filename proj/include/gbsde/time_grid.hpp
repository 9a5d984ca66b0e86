#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gbsde {

/// Partition 0 = t_0 < t_1 < ... < t_N = T of the solve horizon.
class TimeGrid {
public:
    static TimeGrid uniform(double horizon, int steps);
    static TimeGrid from_nodes(std::vector<double> nodes);

    int steps() const { return static_cast<int>(nodes_.size()) - 1; }
    double horizon() const { return nodes_.back(); }
    double t(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    double dt(int i) const { return nodes_[static_cast<std::size_t>(i) + 1] - nodes_[static_cast<std::size_t>(i)]; }
    std::span<const double> nodes() const { return nodes_; }

    bool uniform_spacing(double rel_tol = 1e-12) const;

    /// Sub-grid [t_first, T]; node values are kept, not re-based.
    TimeGrid tail_from(int first) const;

private:
    explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
    std::vector<double> nodes_;
};

/// Deterministic scalar coefficient of time. Integrals are exact for the
/// constant and piecewise forms and use adaptive Simpson otherwise.
class TimeFunction {
public:
    TimeFunction() : kind_(Kind::constant_value), value_(0.0) {}

    static TimeFunction constant(double c);
    /// Left-continuous step function: value values[k] on [knots[k], knots[k+1]).
    static TimeFunction piecewise(std::vector<double> knots, std::vector<double> values);
    static TimeFunction of(std::function<double(double)> fn);

    double operator()(double t) const;
    double integral(double a, double b) const;

    bool is_constant() const { return kind_ == Kind::constant_value; }
    double constant_value() const { return value_; }

    TimeFunction scaled(double c) const;

private:
    enum class Kind { constant_value, piecewise_steps, callable };
    Kind kind_;
    double value_ = 0.0;
    std::vector<double> knots_, values_;
    std::function<double(double)> fn_;
    double scale_ = 1.0;
};

} // namespace gbsde
