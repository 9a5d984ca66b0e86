#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gbsde/solver.hpp"
#include "gbsde/transforms.hpp"

namespace gbsde {

namespace {

void require_geometric(const DriverSpec& driver, const char* where) {
    if (driver.family != DriverFamily::geometric) {
        throw std::invalid_argument(std::string(where) + ": expects a geometric driver, got " +
                                    to_string(driver.family));
    }
}

TerminalCondition log_terminal(const TerminalCondition& x, const char* where) {
    if (x.positivity() != Positivity::strictly_positive) {
        throw std::invalid_argument(std::string(where) +
                                    ": log-domain route needs a strictly positive terminal");
    }
    const std::string who = where;
    TerminalCondition::Fn phi = [x, who](std::span<const double> w) {
        const double v = x(w);
        if (!(v > 0.0)) {
            throw std::domain_error(who + ": terminal sample is not strictly positive");
        }
        return std::log(v);
    };
    return TerminalCondition::make("ln(" + x.name() + ")", x.dim(), std::move(phi),
                                   Positivity::unrestricted, 0.0, x.moment_order());
}

} // namespace

SolutionField solve_gbsde(const Lattice& lattice, const TerminalCondition& terminal,
                          const DriverSpec& geometric, const SolverConfig& config) {
    require_geometric(geometric, "solve_gbsde");
    const DriverSpec ordinary = gbsde_to_ordinary(geometric);
    const SolutionField logfield =
        solve_lattice(lattice, log_terminal(terminal, "solve_gbsde"), ordinary, config);
    return push_ordinary_to_gbsde(logfield);
}

SolutionField solve_gbsde(const PathEnsemble& ensemble, const TerminalCondition& terminal,
                          const DriverSpec& geometric, const SolverConfig& config) {
    require_geometric(geometric, "solve_gbsde");
    const DriverSpec ordinary = gbsde_to_ordinary(geometric);
    const SolutionField logfield =
        solve_lsmc(ensemble, log_terminal(terminal, "solve_gbsde"), ordinary, config);
    return push_ordinary_to_gbsde(logfield);
}

namespace {

// Shared tail of the two-driver chain: recover Z = g2_inverse(t, Y, V).
TwoDriverSolution recover_primary(SolutionField vfield, const DriverSpec& two_driver) {
    TwoDriverSolution out;
    out.reduced = vfield;
    out.primary = std::move(vfield);
    out.primary.lineage.push_back("recover_z_from_v");
    SolutionField& p = out.primary;
    if (p.kind == FieldKind::lattice) {
        for (std::size_t i = 0; i < p.z_levels.size(); ++i) {
            const double t = p.grid.t(static_cast<int>(i));
            for (std::size_t j = 0; j < p.z_levels[i].size(); ++j) {
                p.z_levels[i][j] = two_driver.g2_inverse(t, p.y_levels[i][j], p.z_levels[i][j]);
            }
        }
    } else {
        const std::size_t n = static_cast<std::size_t>(p.grid.steps());
        const std::size_t zd = static_cast<std::size_t>(p.zdim);
        for (std::size_t m = 0; m < static_cast<std::size_t>(p.paths); ++m) {
            for (std::size_t i = 0; i < n; ++i) {
                const double t = p.grid.t(static_cast<int>(i));
                const double y = p.y_paths[m * (n + 1) + i];
                for (std::size_t k = 0; k < zd; ++k) {
                    double& z = p.z_paths[(m * n + i) * zd + k];
                    z = two_driver.g2_inverse(t, y, z);
                }
            }
        }
    }
    return out;
}

} // namespace

TwoDriverSolution solve_twodriver(const Lattice& lattice, const TerminalCondition& terminal,
                                  const DriverSpec& two_driver, const SolverConfig& config) {
    const DriverSpec reduced = twodriver_reduce(two_driver);
    const DriverSpec quadratic = lnq_to_quadratic(reduced);
    const SolutionField logfield =
        solve_lattice(lattice, log_terminal(terminal, "solve_twodriver"), quadratic, config);
    return recover_primary(push_quadratic_to_lnq(logfield), two_driver);
}

TwoDriverSolution solve_twodriver(const PathEnsemble& ensemble, const TerminalCondition& terminal,
                                  const DriverSpec& two_driver, const SolverConfig& config) {
    const DriverSpec reduced = twodriver_reduce(two_driver);
    const DriverSpec quadratic = lnq_to_quadratic(reduced);
    const SolutionField logfield =
        solve_lsmc(ensemble, log_terminal(terminal, "solve_twodriver"), quadratic, config);
    return recover_primary(push_quadratic_to_lnq(logfield), two_driver);
}

SolutionField robust_oracle(const Lattice& lattice, const TerminalCondition& terminal,
                            double gamma, double bound, int drift_grid) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("robust_oracle: gamma must be >= 1");
    if (!(bound >= 0.0)) throw std::invalid_argument("robust_oracle: bound must be >= 0");
    if (drift_grid < 1) throw std::invalid_argument("robust_oracle: drift grid needs a point");
    const int n = lattice.steps();
    const double s = lattice.sqrt_dt();
    if (!(bound * s < 1.0)) {
        throw std::invalid_argument(
            "robust_oracle: bound*sqrt(dt) must be < 1 to keep probabilities inside (0,1)");
    }

    std::vector<double> drifts;
    if (drift_grid == 1) {
        drifts.push_back(0.0);
    } else {
        for (int l = 0; l < drift_grid; ++l) {
            drifts.push_back(-bound + 2.0 * bound * l / (drift_grid - 1));
        }
    }

    SolutionField out;
    out.kind = FieldKind::lattice;
    out.grid = lattice.grid();
    out.zdim = 1;
    out.driver_name = "robust_oracle";
    out.y_levels.resize(static_cast<std::size_t>(n) + 1);

    // DP in the gamma-th power domain; the value coordinate is the root.
    std::vector<double> u(static_cast<std::size_t>(n) + 1);
    auto& top = out.y_levels[static_cast<std::size_t>(n)];
    top.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        const double x = terminal(lattice.state(n, j));
        if (!(x >= 0.0)) {
            throw std::domain_error("robust_oracle: terminal must be nonnegative");
        }
        top[static_cast<std::size_t>(j)] = x;
        u[static_cast<std::size_t>(j)] = std::pow(x, gamma);
    }

    for (int i = n - 1; i >= 0; --i) {
        auto& row = out.y_levels[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(i) + 1);
        for (int j = 0; j <= i; ++j) {
            const double up = u[static_cast<std::size_t>(j) + 1];
            const double dn = u[static_cast<std::size_t>(j)];
            double best = -std::numeric_limits<double>::infinity();
            for (double mu : drifts) {
                const double p = 0.5 * (1.0 + mu * s);
                best = std::max(best, p * up + (1.0 - p) * dn);
            }
            u[static_cast<std::size_t>(j)] = best;
            row[static_cast<std::size_t>(j)] = std::pow(best, 1.0 / gamma);
        }
    }

    bool positive = true;
    for (const auto& row : out.y_levels) {
        for (double v : row) positive = positive && v > 0.0;
    }
    out.diagnostics.positive = positive;
    return out;
}

} // namespace gbsde
