#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "gbsde/kernels.hpp"
#include "gbsde/solver.hpp"
#include "solver_detail.hpp"

namespace gbsde {

namespace {

constexpr int max_basis = 64;

// All monomial exponent tuples with total degree <= degree, graded order.
std::vector<std::array<int, 3>> monomial_exponents(int dim, int degree) {
    std::vector<std::array<int, 3>> exps;
    for (int g = 0; g <= degree; ++g) {
        if (dim == 1) {
            exps.push_back({g, 0, 0});
        } else if (dim == 2) {
            for (int a = g; a >= 0; --a) exps.push_back({a, g - a, 0});
        } else {
            for (int a = g; a >= 0; --a) {
                for (int b = g - a; b >= 0; --b) exps.push_back({a, b, g - a - b});
            }
        }
    }
    return exps;
}

void eval_basis(const double* x, int dim, const std::vector<std::array<int, 3>>& exps,
                double* out) {
    for (std::size_t k = 0; k < exps.size(); ++k) {
        double v = 1.0;
        for (int c = 0; c < dim; ++c) {
            for (int e = 0; e < exps[k][c]; ++e) v *= x[c];
        }
        out[k] = v;
    }
}

// In-place lower Cholesky of the k x k matrix a; returns the failing row on a
// non-positive pivot, -1 on success. Pivot threshold is relative to the
// largest diagonal so standardized bases fail only when genuinely degenerate.
int cholesky(std::vector<double>& a, int k) {
    double dmax = 0.0;
    for (int i = 0; i < k; ++i) dmax = std::max(dmax, a[static_cast<std::size_t>(i) * k + i]);
    const double tiny = 1e-13 * std::max(dmax, 1.0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<std::size_t>(i) * k + j];
            for (int l = 0; l < j; ++l) {
                s -= a[static_cast<std::size_t>(i) * k + l] * a[static_cast<std::size_t>(j) * k + l];
            }
            if (i == j) {
                if (!(s > tiny)) return i;
                a[static_cast<std::size_t>(i) * k + i] = std::sqrt(s);
            } else {
                a[static_cast<std::size_t>(i) * k + j] = s / a[static_cast<std::size_t>(j) * k + j];
            }
        }
    }
    return -1;
}

// Solves L L^T x = b in place.
void cholesky_solve(const std::vector<double>& l, int k, std::vector<double>& b) {
    for (int i = 0; i < k; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) s -= l[static_cast<std::size_t>(i) * k + j] * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * k + i];
    }
    for (int i = k - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) s -= l[static_cast<std::size_t>(j) * k + i] * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * k + i];
    }
}

} // namespace

SolutionField solve_lsmc(const PathEnsemble& ensemble, const TerminalCondition& terminal,
                         const DriverSpec& driver, const SolverConfig& config) {
    detail::reject_wrong_family(driver, "solve_lsmc");
    const int n = ensemble.steps();
    const int d = ensemble.dim();
    const int paths = ensemble.paths();
    if (terminal.dim() > d) {
        throw std::invalid_argument("solve_lsmc: terminal reads more coordinates than the ensemble has");
    }
    if (config.basis_degree < 0 || config.basis_degree > 8) {
        throw std::invalid_argument("solve_lsmc: basis degree must be in [0, 8]");
    }

    const auto exps = monomial_exponents(d, config.basis_degree);
    if (exps.size() > static_cast<std::size_t>(max_basis)) {
        throw std::invalid_argument("solve_lsmc: basis larger than 64 functions");
    }
    const int k_full = static_cast<int>(exps.size());
    const std::vector<std::array<int, 3>> exps_const = {{0, 0, 0}};

    const std::size_t np = static_cast<std::size_t>(paths);
    const std::size_t nu = static_cast<std::size_t>(n);
    const std::size_t du = static_cast<std::size_t>(d);

    SolutionField out;
    out.kind = FieldKind::ensemble;
    out.grid = ensemble.grid();
    out.zdim = d;
    out.paths = paths;
    out.driver_name = driver.name;
    out.lineage = driver.lineage;
    out.y_paths.assign(np * (nu + 1), 0.0);
    out.z_paths.assign(np * nu * du, 0.0);
    out.diagnostics.regression_rms.assign(nu, 0.0);

    kernels::parallel_for(paths, config.parallel, [&](std::int64_t m) {
        out.y_paths[static_cast<std::size_t>(m) * (nu + 1) + nu] =
            terminal(ensemble.state_vec(static_cast<int>(m), n));
    });

    std::vector<double> fits(np);
    std::vector<double> zsq_int(np, 0.0);
    std::vector<int> iters(np);
    std::vector<double> resid(np);
    std::vector<unsigned char> okv(np);

    for (int i = n - 1; i >= 0; --i) {
        const double t = ensemble.grid().t(i);
        const double dt = ensemble.grid().dt(i);
        const bool constant_only = i == 0;
        const auto& basis = constant_only ? exps_const : exps;
        const int k = constant_only ? 1 : k_full;
        const double scale = constant_only ? 1.0 : 1.0 / std::sqrt(t);
        const std::size_t ku = static_cast<std::size_t>(k);
        const std::size_t targets = 1 + du; // continuation, then z components
        const std::size_t row_len = ku * ku + ku * targets;

        auto standardized = [&](std::size_t m, double* x) {
            for (int c = 0; c < d; ++c) {
                x[c] = constant_only ? 0.0 : ensemble.state(static_cast<int>(m), i, c) * scale;
            }
        };

        std::vector<double> sums(row_len);
        kernels::deterministic_sum_rows(
            np, row_len, config.parallel,
            [&](std::size_t m, std::span<double> row) {
                double x[3];
                double phi[max_basis];
                standardized(m, x);
                eval_basis(x, d, basis, phi);
                const double ynext = out.y_paths[m * (nu + 1) + static_cast<std::size_t>(i) + 1];
                for (std::size_t a = 0; a < ku; ++a) {
                    for (std::size_t b = 0; b < ku; ++b) row[a * ku + b] = phi[a] * phi[b];
                }
                double* rhs = row.data() + ku * ku;
                for (std::size_t a = 0; a < ku; ++a) rhs[a] = phi[a] * ynext;
                for (std::size_t c = 0; c < du; ++c) {
                    const double target =
                        ynext * ensemble.increment(static_cast<int>(m), i, static_cast<int>(c)) / dt;
                    for (std::size_t a = 0; a < ku; ++a) rhs[ku + c * ku + a] = phi[a] * target;
                }
            },
            sums);

        std::vector<double> gram(ku * ku);
        for (std::size_t a = 0; a < ku * ku; ++a) gram[a] = sums[a] / static_cast<double>(paths);
        const int bad = cholesky(gram, k);
        if (bad >= 0) {
            char buf[120];
            std::snprintf(buf, sizeof buf,
                          "solve_lsmc: regression basis is rank-deficient at step %d (pivot %d)", i,
                          bad);
            throw std::runtime_error(buf);
        }
        std::vector<std::vector<double>> betas(targets, std::vector<double>(ku));
        for (std::size_t tgt = 0; tgt < targets; ++tgt) {
            for (std::size_t a = 0; a < ku; ++a) {
                betas[tgt][a] = sums[ku * ku + tgt * ku + a] / static_cast<double>(paths);
            }
            cholesky_solve(gram, k, betas[tgt]);
        }

        kernels::parallel_for(paths, config.parallel, [&](std::int64_t mi) {
            const std::size_t m = static_cast<std::size_t>(mi);
            double x[3];
            double phi[max_basis];
            standardized(m, x);
            eval_basis(x, d, basis, phi);
            double cont = 0.0;
            for (std::size_t a = 0; a < ku; ++a) cont += betas[0][a] * phi[a];
            double zv[3] = {0.0, 0.0, 0.0};
            for (std::size_t c = 0; c < du; ++c) {
                for (std::size_t a = 0; a < ku; ++a) zv[c] += betas[1 + c][a] * phi[a];
            }
            const detail::ImplicitOutcome node =
                detail::solve_implicit(driver, t, cont, std::span<const double>(zv, du), dt, config);
            out.y_paths[m * (nu + 1) + static_cast<std::size_t>(i)] = node.y;
            double zz = 0.0;
            for (std::size_t c = 0; c < du; ++c) {
                out.z_paths[(m * nu + static_cast<std::size_t>(i)) * du + c] = zv[c];
                zz += zv[c] * zv[c];
            }
            zsq_int[m] += zz * dt;
            fits[m] = cont;
            iters[m] = node.iterations;
            resid[m] = node.residual;
            okv[m] = node.converged ? 1 : 0;
        });

        for (std::size_t m = 0; m < np; ++m) {
            if (!okv[m]) {
                char buf[140];
                std::snprintf(buf, sizeof buf,
                              "solve_lsmc: implicit step did not converge at step %d path %zu "
                              "(residual %.3g)",
                              i, m, resid[m]);
                throw std::runtime_error(buf);
            }
            out.diagnostics.max_fixed_point_iterations =
                std::max(out.diagnostics.max_fixed_point_iterations, iters[m]);
            out.diagnostics.max_fixed_point_residual =
                std::max(out.diagnostics.max_fixed_point_residual, resid[m]);
        }

        const double sq_sum = kernels::deterministic_sum(np, config.parallel, [&](std::size_t m) {
            const double r = out.y_paths[m * (nu + 1) + static_cast<std::size_t>(i) + 1] - fits[m];
            return r * r;
        });
        out.diagnostics.regression_rms[static_cast<std::size_t>(i)] =
            std::sqrt(sq_sum / static_cast<double>(paths));
    }

    double zmax = 0.0;
    bool positive = true;
    for (std::size_t m = 0; m < np; ++m) zmax = std::max(zmax, zsq_int[m]);
    for (double v : out.y_paths) positive = positive && v > 0.0;
    out.diagnostics.max_z_square_time_integral = zmax;
    out.diagnostics.positive = positive;
    return out;
}

} // namespace gbsde
