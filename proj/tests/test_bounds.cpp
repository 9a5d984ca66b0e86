#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gbsde/bounds.hpp"
#include "gbsde/catalog.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/solver.hpp"
#include "gbsde/terminal.hpp"

using namespace gbsde;

TEST_CASE("psi hits its closed-form anchor values") {
    CHECK(psi(0.0) == doctest::Approx(-2.0 / std::log(4.0)).epsilon(1e-15));
    CHECK(psi(2.0) == 0.0);
    CHECK(psi(std::exp(1.0)) ==
          doctest::Approx(-std::log(std::log(2.0))).epsilon(1e-14));
    CHECK(psi_inv(0.0) == 2.0);
    CHECK(psi_inv(1.0) ==
          doctest::Approx(std::pow(2.0, std::exp(1.0))).epsilon(1e-14));
    CHECK_THROWS_AS(psi(-0.5), std::domain_error);
    CHECK_THROWS_AS(psi_inv(-2.0), std::domain_error);
}

TEST_CASE("psi is continuous across the branch point") {
    const double below = psi(std::nextafter(2.0, 0.0));
    const double above = psi(std::nextafter(2.0, 3.0));
    CHECK(std::abs(below) <= 1e-15);
    CHECK(std::abs(above) <= 1e-15);
    CHECK(std::abs(above - below) <= 1e-15);
    const double ib = psi_inv(std::nextafter(0.0, -1.0));
    const double ia = psi_inv(std::nextafter(0.0, 1.0));
    CHECK(std::abs(ia - ib) <= 1e-14);
}

TEST_CASE("psi round-trips its inverse across the whole range") {
    // Log-spaced sweep of [1e-6, 1e6] plus the branch neighborhood.
    for (int k = 0; k <= 1200; ++k) {
        const double x = std::pow(10.0, -6.0 + k * 0.01);
        const double rt = psi_inv(psi(x));
        CHECK(std::abs(rt - x) <= 1e-12 * (1.0 + x));
    }
    for (double x : {0.0, 1.9999999, 2.0, 2.0000001}) {
        CHECK(std::abs(psi_inv(psi(x)) - x) <= 1e-12);
    }
    for (int k = 0; k <= 100; ++k) {
        const double v = -1.4 + k * (3.0 + 1.4) / 100.0;
        CHECK(std::abs(psi(psi_inv(v)) - v) <= 1e-12 * (1.0 + std::abs(v)));
    }
}

TEST_CASE("psi is strictly increasing") {
    double prev = psi(0.0);
    for (int k = 1; k <= 10000; ++k) {
        const double x = 1e6 * std::pow(static_cast<double>(k) / 10000.0, 3.0);
        const double cur = psi(x);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("bihari bound with zero beta is the plain conditional expectation") {
    const int n = 24;
    auto lat = Lattice::build(TimeGrid::uniform(1.0, n));
    std::vector<double> terminal(n + 1);
    for (int j = 0; j <= n; ++j) terminal[j] = std::exp(lat.state(n, j));
    auto bound = bihari_bound(lat, terminal, TimeFunction::constant(0.0));
    for (int i = 0; i <= n; i += 4) {
        for (int j = 0; j <= i; ++j) {
            const double expect =
                lat.subtree_expectation(i, j, [](double w) { return std::exp(w); });
            CHECK(bound[i][j] == doctest::Approx(expect).epsilon(1e-13));
        }
    }
}

TEST_CASE("bihari bound of a constant payoff is explicit") {
    const int n = 16;
    auto lat = Lattice::build(TimeGrid::uniform(1.0, n));
    std::vector<double> terminal(n + 1, 2.0);
    auto bound = bihari_bound(lat, terminal, TimeFunction::constant(1.0));
    // psi(2) = 0, so the bound at level i is psi_inv(T - t_i) at every node.
    for (int i = 0; i <= n; ++i) {
        const double expect = psi_inv(1.0 - lat.grid().t(i));
        for (int j = 0; j <= i; ++j)
            CHECK(bound[i][j] == doctest::Approx(expect).epsilon(1e-13));
    }
    CHECK(bound[0][0] ==
          doctest::Approx(std::pow(2.0, std::exp(1.0))).epsilon(1e-13));
}

TEST_CASE("bihari bound grows with beta") {
    const int n = 20;
    auto lat = Lattice::build(TimeGrid::uniform(1.0, n));
    std::vector<double> terminal(n + 1);
    for (int j = 0; j <= n; ++j) terminal[j] = std::exp(lat.state(n, j));
    auto b0 = bihari_bound(lat, terminal, TimeFunction::constant(0.0));
    auto b1 = bihari_bound(lat, terminal, TimeFunction::constant(1.0));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j) CHECK(b1[i][j] >= b0[i][j]);
}

TEST_CASE("bihari bound validates its inputs") {
    auto lat = Lattice::build(TimeGrid::uniform(1.0, 8));
    std::vector<double> wrong(4, 1.0);
    CHECK_THROWS_AS(bihari_bound(lat, wrong, TimeFunction::constant(0.0)),
                    std::invalid_argument);
    std::vector<double> ok(9, 1.0);
    CHECK_THROWS_AS(bihari_bound(lat, ok, TimeFunction::constant(-1.0)),
                    std::invalid_argument);
}

TEST_CASE("bihari bound dominates the log_star solution field") {
    // The driver grows like beta * y ln(1+y) <= beta-hat * y(1 + |ln y|)
    // with beta-hat = beta * ln3/ln2, which feeds the comparison scale.
    const int n = 40;
    const double beta = 0.5;
    auto lat = Lattice::build(TimeGrid::uniform(1.0, n));
    auto terminal = TerminalCondition::exp_of_state(1.0);
    auto field = solve_gbsde(lat, terminal, catalog_get("log_star", {{"beta", "0.5"}}),
                             SolverConfig{});
    std::vector<double> tv(n + 1);
    for (int j = 0; j <= n; ++j) tv[j] = terminal(lat.state(n, j));
    auto bound =
        bihari_bound(lat, tv, TimeFunction::constant(beta * log_star_bound_scale()));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= i; ++j)
            CHECK(field.y_at(i, j) <= bound[i][j] * (1.0 + 1e-12));
}

TEST_CASE("comparison certificate passes ordered fields and reports margins") {
    auto lat = Lattice::build(TimeGrid::uniform(1.0, 16));
    DriverSpec zero;
    zero.family = DriverFamily::ordinary;
    zero.name = "zero";
    zero.f = [](double, double, std::span<const double>) { return 0.0; };
    zero.coeffs = CoefficientBundle::zero();
    auto lo_t = TerminalCondition::exp_of_state(1.0);
    auto hi_t = lo_t.affine(1.0, 0.1);
    auto lo = solve_lattice(lat, lo_t, zero, SolverConfig{});
    auto hi = solve_lattice(lat, hi_t, zero, SolverConfig{});

    auto pass = comparison_certificate(lo, hi, 0.0);
    CHECK(pass.passed);
    CHECK(pass.worst_margin == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(pass.witnesses.empty());

    auto fail = comparison_certificate(hi, lo, 0.0);
    CHECK_FALSE(fail.passed);
    CHECK(fail.worst_margin == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK_FALSE(fail.witnesses.empty());
    CHECK(fail.witnesses.size() <= 8);
    CHECK(fail.witnesses.front().what.find("low") != std::string::npos);

    // Slack big enough to absorb the violation flips the verdict.
    CHECK(comparison_certificate(hi, lo, 0.2).passed);
}

TEST_CASE("comparison certificate rejects mismatched discretizations") {
    DriverSpec zero;
    zero.family = DriverFamily::ordinary;
    zero.name = "zero";
    zero.f = [](double, double, std::span<const double>) { return 0.0; };
    zero.coeffs = CoefficientBundle::zero();
    auto t = TerminalCondition::exp_of_state(1.0);
    auto a = solve_lattice(Lattice::build(TimeGrid::uniform(1.0, 8)), t, zero, SolverConfig{});
    auto b = solve_lattice(Lattice::build(TimeGrid::uniform(1.0, 16)), t, zero, SolverConfig{});
    CHECK_THROWS_AS(comparison_certificate(a, b, 0.0), std::invalid_argument);

    auto ens = PathEnsemble::generate(TimeGrid::uniform(1.0, 8), 1, 100, 1, true);
    auto c = solve_lsmc(ens, t, zero, SolverConfig{});
    CHECK_THROWS_AS(comparison_certificate(a, c, 0.0), std::invalid_argument);
}
