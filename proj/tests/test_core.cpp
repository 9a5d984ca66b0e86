#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gbsde/coefficients.hpp"
#include "gbsde/ensemble.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/terminal.hpp"
#include "gbsde/time_grid.hpp"

using namespace gbsde;

TEST_CASE("uniform grid exposes exact nodes and spacing") {
    auto g = TimeGrid::uniform(2.0, 8);
    CHECK(g.steps() == 8);
    CHECK(g.horizon() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.t(0) == 0.0);
    CHECK(g.t(8) == 2.0);
    CHECK(g.dt(3) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.uniform_spacing());
}

TEST_CASE("explicit nodes preserve values and detect non-uniform spacing") {
    auto g = TimeGrid::from_nodes({0.0, 0.1, 0.3, 1.0});
    CHECK(g.steps() == 3);
    CHECK(g.t(2) == 0.3);
    CHECK(g.dt(2) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_FALSE(g.uniform_spacing());
    CHECK_THROWS_AS(TimeGrid::from_nodes({0.0, 0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("tail_from keeps absolute node values") {
    auto g = TimeGrid::uniform(1.0, 4);
    auto tail = g.tail_from(2);
    CHECK(tail.steps() == 2);
    CHECK(tail.t(0) == g.t(2));
    CHECK(tail.t(2) == g.t(4));
    CHECK(tail.horizon() == g.horizon());
}

TEST_CASE("time functions integrate exactly on their knot structure") {
    auto c = TimeFunction::constant(3.0);
    CHECK(c.is_constant());
    CHECK(c.constant_value() == 3.0);
    CHECK(c(0.7) == 3.0);
    CHECK(c.integral(0.25, 1.75) == doctest::Approx(4.5).epsilon(1e-15));

    auto pw = TimeFunction::piecewise({0.0, 0.5, 1.0}, {1.0, 3.0});
    CHECK(pw(0.2) == 1.0);
    CHECK(pw(0.8) == 3.0);
    CHECK(pw.integral(0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(pw.integral(0.25, 0.75) == doctest::Approx(0.25 + 0.75).epsilon(1e-14));
    CHECK_FALSE(pw.is_constant());

    auto s = TimeFunction::of([](double t) { return std::sin(t); });
    const double got = s.integral(0.0, std::numbers::pi);
    CHECK(got == doctest::Approx(2.0).epsilon(1e-9));

    auto sc = pw.scaled(2.0);
    CHECK(sc(0.2) == 2.0);
    CHECK(sc.integral(0.0, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("coefficient bundles cache integrals and reduce by volatility bound") {
    auto b = CoefficientBundle::constants(0.5, 2.0, 1.0, 0.25, 2.0);
    CHECK(b.A == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.B == doctest::Approx(4.0).epsilon(1e-15));
    b.validate();

    auto r = b.reduced_by(2.0);
    CHECK(r.gamma(0.3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.delta == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(r.alpha(0.3) == 0.5);
    CHECK(r.beta(0.3) == 2.0);
    CHECK_THROWS_AS(b.reduced_by(0.0), std::invalid_argument);

    auto bad = CoefficientBundle::constants(-0.1, 0.0, 0.0, 0.0, 1.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("terminal factories evaluate and carry positivity metadata") {
    auto e = TerminalCondition::exp_of_state(0.5);
    const double w = 0.8;
    CHECK(e(w) == doctest::Approx(std::exp(0.4)).epsilon(1e-15));
    CHECK(e.positivity() == Positivity::strictly_positive);

    auto p = TerminalCondition::power_of_state(2.0, 3.0);
    CHECK(p(-2.0) == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(p.positivity() == Positivity::unrestricted);

    auto c = TerminalCondition::constant_payoff(1.0);
    CHECK(c(123.0) == 1.0);
    CHECK(c.positivity() == Positivity::strictly_positive);
    CHECK(TerminalCondition::constant_payoff(-1.0).positivity() == Positivity::unrestricted);
}

TEST_CASE("terminal combinators compose values and positivity") {
    auto e = TerminalCondition::exp_of_state(1.0);

    auto a = e.affine(2.0, 0.5);
    CHECK(a(0.3) == doctest::Approx(2.0 * std::exp(0.3) + 0.5).epsilon(1e-15));
    CHECK(a.positivity() == Positivity::strictly_positive);

    auto neg = TerminalCondition::power_of_state(1.0, 1.0).affine(1.0, -5.0);
    CHECK(neg.positivity() == Positivity::bounded_below);
    CHECK(neg.lower_bound() == doctest::Approx(-5.0).epsilon(1e-15));

    auto cl = e.clamp(0.5, 4.0);
    CHECK(cl(10.0) == 4.0);
    CHECK(cl(-10.0) == 0.5);
    CHECK(cl(0.0) == 1.0);
    CHECK(cl.positivity() == Positivity::strictly_positive);
    CHECK(e.clamp(0.0, 1.0).positivity() == Positivity::bounded_below);
    CHECK_THROWS_AS(e.clamp(2.0, 1.0), std::invalid_argument);

    auto sc = e.scaled(3.0);
    CHECK(sc(0.2) == doctest::Approx(3.0 * std::exp(0.2)).epsilon(1e-15));
    CHECK_THROWS_AS(e.scaled(0.0), std::invalid_argument);

    auto pw = e.powered(2.0);
    CHECK(pw(0.4) == doctest::Approx(std::exp(0.8)).epsilon(1e-15));
    CHECK_THROWS_AS(TerminalCondition::power_of_state(1.0, 1.0).powered(2.0),
                    std::invalid_argument);

    auto gm = TerminalCondition::geometric_mix(e, TerminalCondition::constant_payoff(4.0), 0.5);
    CHECK(gm(0.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(gm.positivity() == Positivity::strictly_positive);

    auto sm = TerminalCondition::sum(e, TerminalCondition::constant_payoff(1.0));
    CHECK(sm(0.0) == 2.0);
    CHECK(sm.positivity() == Positivity::strictly_positive);
}

TEST_CASE("lattice nodes are symmetric and weights are exact") {
    auto lat = Lattice::build(TimeGrid::uniform(1.0, 16));
    CHECK(lat.steps() == 16);
    CHECK(lat.dt() == doctest::Approx(1.0 / 16).epsilon(1e-15));
    for (int i = 0; i <= 16; ++i) {
        CHECK(lat.nodes_at(i) == i + 1);
        for (int j = 0; j <= i; ++j) {
            // Reflection j -> i-j flips the sign of the walk.
            CHECK(lat.state(i, j) == doctest::Approx(-lat.state(i, i - j)).epsilon(1e-15));
        }
    }
    for (int m : {0, 1, 2, 5, 20}) {
        auto w = Lattice::binomial_weights(m);
        CHECK(static_cast<int>(w.size()) == m + 1);
        double tot = 0.0;
        for (double x : w) tot += x;
        CHECK(tot == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("subtree expectation reproduces closed-form lognormal moments") {
    const int n = 64;
    auto lat = Lattice::build(TimeGrid::uniform(1.0, n));
    // E[exp(W_T)] on the lattice from the root equals prod cosh(sqrt(dt)).
    const double got = lat.subtree_expectation(0, 0, [](double w) { return std::exp(w); });
    const double expect = std::pow(std::cosh(lat.sqrt_dt()), n);
    CHECK(got == doctest::Approx(expect).epsilon(1e-13));
    // Constant functions are reproduced exactly from every node.
    for (int j = 0; j <= 5; ++j)
        CHECK(lat.subtree_expectation(5, j, [](double) { return 2.5; }) ==
              doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("path ensembles regenerate bitwise and match serial generation") {
    auto g = TimeGrid::uniform(1.0, 8);
    auto a = PathEnsemble::generate(g, 2, 5000, 42, true);
    auto b = PathEnsemble::generate(g, 2, 5000, 42, true);
    auto s = PathEnsemble::generate(g, 2, 5000, 42, false);
    for (std::size_t m = 0; m < 5000; m += 97) {
        for (int i = 0; i <= 8; ++i) {
            for (int k = 0; k < 2; ++k) {
                const double x = a.state(m, i, k), y = b.state(m, i, k), z = s.state(m, i, k);
                CHECK(std::memcmp(&x, &y, sizeof(double)) == 0);
                CHECK(std::memcmp(&x, &z, sizeof(double)) == 0);
            }
        }
    }
    auto c = PathEnsemble::generate(g, 2, 5000, 43, true);
    CHECK(c.state(0, 8, 0) != a.state(0, 8, 0));
}

TEST_CASE("path ensemble moments match Brownian motion") {
    const std::size_t paths = 200000;
    auto g = TimeGrid::uniform(1.0, 1);
    auto e = PathEnsemble::generate(g, 2, paths, 7, true);
    double m1 = 0.0, m2 = 0.0, cross = 0.0;
    for (std::size_t m = 0; m < paths; ++m) {
        const double w0 = e.state(m, 1, 0), w1 = e.state(m, 1, 1);
        m1 += w0;
        m2 += w0 * w0;
        cross += w0 * w1;
    }
    m1 /= paths;
    m2 /= paths;
    cross /= paths;
    const double se = 1.0 / std::sqrt(static_cast<double>(paths));
    CHECK(std::abs(m1) < 4.0 * se);
    CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0) * se);
    CHECK(std::abs(cross) < 4.0 * se);
}

TEST_CASE("Monte Carlo error for a smooth payoff scales like one over sqrt paths") {
    auto g = TimeGrid::uniform(1.0, 1);
    const double truth = std::exp(0.5);
    std::vector<double> logm, logrmse;
    for (std::size_t paths : {std::size_t{1000}, std::size_t{10000}, std::size_t{100000},
                              std::size_t{1000000}}) {
        double sq = 0.0;
        const int reps = 16;
        for (int r = 0; r < reps; ++r) {
            auto e = PathEnsemble::generate(g, 1, paths, 100 + r, true);
            double mean = 0.0;
            for (std::size_t m = 0; m < paths; ++m) mean += std::exp(e.state(m, 1, 0));
            mean /= static_cast<double>(paths);
            sq += (mean - truth) * (mean - truth);
        }
        logm.push_back(std::log(static_cast<double>(paths)));
        logrmse.push_back(0.5 * std::log(sq / reps));
    }
    // Least-squares slope of log rmse against log paths.
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < logm.size(); ++i) {
        mx += logm[i];
        my += logrmse[i];
    }
    mx /= logm.size();
    my /= logm.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < logm.size(); ++i) {
        num += (logm[i] - mx) * (logrmse[i] - my);
        den += (logm[i] - mx) * (logm[i] - mx);
    }
    const double slope = num / den;
    CHECK(slope > -0.6);
    CHECK(slope < -0.4);
}
