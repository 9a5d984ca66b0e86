#include "gbsde/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace gbsde {

double psi(double x) {
    if (!(x >= 0.0)) throw std::domain_error("psi: needs x >= 0");
    static const double ln4 = std::log(4.0);
    static const double lnln2 = std::log(std::log(2.0));
    if (x <= 2.0) return (x - 2.0) / ln4;
    return std::log(std::log(x)) - lnln2;
}

double psi_inv(double v) {
    static const double ln4 = std::log(4.0);
    static const double ln2 = std::log(2.0);
    if (!(v >= -2.0 / ln4)) throw std::domain_error("psi_inv: v below psi(0)");
    if (v <= 0.0) return 2.0 + v * ln4;
    return std::exp(std::exp(v) * ln2); // 2^(e^v)
}

std::vector<std::vector<double>> bihari_bound(const Lattice& lattice,
                                              std::span<const double> terminal_values,
                                              const TimeFunction& beta) {
    const int n = lattice.steps();
    if (terminal_values.size() != static_cast<std::size_t>(n) + 1) {
        throw std::invalid_argument("bihari_bound: terminal values must cover the last level");
    }
    const double horizon = lattice.grid().horizon();
    for (int k = 0; k <= 64; ++k) {
        const double t = horizon * k / 64.0;
        if (!(beta(t) >= 0.0)) {
            throw std::invalid_argument("bihari_bound: beta must be nonnegative");
        }
    }

    std::vector<double> psi_x(terminal_values.size());
    for (std::size_t j = 0; j < terminal_values.size(); ++j) psi_x[j] = psi(terminal_values[j]);

    std::vector<std::vector<double>> bound(static_cast<std::size_t>(n) + 1);
    std::vector<double> work(terminal_values.size());
    for (int i = n; i >= 0; --i) {
        const double b = beta.integral(lattice.grid().t(i), horizon);
        for (std::size_t j = 0; j < psi_x.size(); ++j) work[j] = psi_inv(psi_x[j] + b);
        // average the transformed terminal down to level i
        for (int m = n; m > i; --m) {
            for (int j = 0; j < m; ++j) {
                work[static_cast<std::size_t>(j)] =
                    0.5 * (work[static_cast<std::size_t>(j)] + work[static_cast<std::size_t>(j) + 1]);
            }
        }
        bound[static_cast<std::size_t>(i)].assign(work.begin(), work.begin() + i + 1);
    }
    return bound;
}

PropertyReport comparison_certificate(const SolutionField& low, const SolutionField& high,
                                      double slack) {
    if (low.kind != high.kind) {
        throw std::invalid_argument("comparison_certificate: fields use different discretizations");
    }
    if (low.grid.steps() != high.grid.steps() ||
        low.grid.horizon() != high.grid.horizon()) {
        throw std::invalid_argument("comparison_certificate: fields use different grids");
    }

    PropertyReport report;
    report.id = "comparison";
    report.worst_margin = std::numeric_limits<double>::infinity();
    constexpr std::size_t max_witnesses = 8;

    const auto record = [&](double t, double lo, double hi, const char* where, std::size_t i,
                            std::size_t j) {
        const double margin = hi - lo + slack;
        report.worst_margin = std::min(report.worst_margin, margin);
        if (margin < 0.0) {
            report.passed = false;
            if (report.witnesses.size() < max_witnesses) {
                char buf[112];
                std::snprintf(buf, sizeof buf, "%s (%zu, %zu): low %.17g > high %.17g", where, i, j,
                              lo, hi);
                report.witnesses.push_back(Witness{t, lo, hi, margin, buf});
            }
        }
    };

    if (low.kind == FieldKind::lattice) {
        if (low.y_levels.size() != high.y_levels.size()) {
            throw std::invalid_argument("comparison_certificate: fields have different depths");
        }
        for (std::size_t i = 0; i < low.y_levels.size(); ++i) {
            const double t = low.grid.t(static_cast<int>(i));
            for (std::size_t j = 0; j < low.y_levels[i].size(); ++j) {
                record(t, low.y_levels[i][j], high.y_levels[i][j], "level/node", i, j);
            }
        }
    } else {
        if (low.paths != high.paths) {
            throw std::invalid_argument("comparison_certificate: fields have different path counts");
        }
        const std::size_t nn = static_cast<std::size_t>(low.grid.steps()) + 1;
        for (std::size_t m = 0; m < static_cast<std::size_t>(low.paths); ++m) {
            for (std::size_t i = 0; i < nn; ++i) {
                record(low.grid.t(static_cast<int>(i)), low.y_paths[m * nn + i],
                       high.y_paths[m * nn + i], "path/time", m, i);
            }
        }
    }

    char buf[120];
    std::snprintf(buf, sizeof buf, "nodewise low <= high + %.3g; worst margin %.3g", slack,
                  report.worst_margin);
    report.notes = buf;
    return report;
}

} // namespace gbsde
