#include "gbsde/lattice.hpp"

#include <stdexcept>
#include <string>

#include "gbsde/kernels.hpp"

namespace gbsde {

Lattice Lattice::build(const TimeGrid& grid, int dim) {
    if (dim != 1)
        throw std::invalid_argument("lattice: the recombining tree is one-dimensional; got dim=" +
                                    std::to_string(dim));
    if (!grid.uniform_spacing())
        throw std::invalid_argument("lattice: requires a uniformly spaced time grid");
    // t(0) need not be 0: sub-problems solve on the tail of a parent grid.
    return Lattice(grid, (grid.horizon() - grid.t(0)) / grid.steps());
}

std::vector<double> Lattice::terminal_states() const {
    const int N = steps();
    std::vector<double> s(static_cast<std::size_t>(N) + 1);
    for (int j = 0; j <= N; ++j) s[static_cast<std::size_t>(j)] = state(N, j);
    return s;
}

std::vector<double> Lattice::binomial_weights(int m) {
    // w_k = C(m, k) 2^-m by the ratio recurrence; stable in double for the
    // depths used here.
    std::vector<double> w(static_cast<std::size_t>(m) + 1);
    double cur = std::ldexp(1.0, -m);
    for (int k = 0; k <= m; ++k) {
        w[static_cast<std::size_t>(k)] = cur;
        if (k < m) cur *= static_cast<double>(m - k) / static_cast<double>(k + 1);
    }
    return w;
}

double Lattice::subtree_expectation(int level, int j,
                                    const std::function<double(double)>& terminal_of_state) const {
    const int m = steps() - level;
    if (m < 0 || j < 0 || j > level) throw std::invalid_argument("lattice: node out of range");
    const auto w = binomial_weights(m);
    std::vector<double> terms(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k)
        terms[static_cast<std::size_t>(k)] =
            w[static_cast<std::size_t>(k)] * terminal_of_state(state(steps(), j + k));
    return kernels::pairwise_sum(terms);
}

} // namespace gbsde
