#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "gbsde/catalog.hpp"
#include "gbsde/driver.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/solver.hpp"
#include "gbsde/terminal.hpp"
#include "gbsde/transforms.hpp"

using namespace gbsde;

namespace {

// Halton points over [0,1]^3 mapped to (t, y, z) in [0,1] x [0.1,10] x [-5,5].
double radical_inverse(unsigned base, unsigned long long i) {
    double r = 0.0, f = 1.0 / base;
    for (++i; i > 0; i /= base) {
        r += f * static_cast<double>(i % base);
        f /= base;
    }
    return r;
}

struct Point {
    double t, y, z;
};

std::vector<Point> sample_points(std::size_t count) {
    std::vector<Point> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u0 = radical_inverse(2, i);
        const double u1 = radical_inverse(3, i);
        const double u2 = radical_inverse(5, i);
        pts.push_back({u0, 0.1 * std::pow(100.0, u1), 10.0 * u2 - 5.0});
    }
    return pts;
}

DriverSpec gamma_norm(double gamma) {
    return catalog_get("gamma_norm", {{"gamma", std::to_string(gamma)}});
}

} // namespace

TEST_CASE("geometric <-> ordinary transforms invert each other pointwise") {
    auto geo = gamma_norm(2.0);
    auto back = ordinary_to_gbsde(gbsde_to_ordinary(geo));
    for (const auto& p : sample_points(1000)) {
        const double a = geo.eval(p.t, p.y, p.z);
        const double b = back.eval(p.t, p.y, p.z);
        CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
    }
    CHECK(back.family == DriverFamily::geometric);
}

TEST_CASE("geometric <-> lnq transforms invert each other pointwise") {
    auto geo = catalog_get("log_star", {{"beta", "0.5"}});
    auto lnq = gbsde_to_lnq(geo);
    CHECK(lnq.family == DriverFamily::lnq);
    // Recover the geometric driver: f(t,y,z) = g(t,y,y*z)/y.
    for (const auto& p : sample_points(1000)) {
        const double g = lnq.eval(p.t, p.y, p.y * p.z);
        const double f = geo.eval(p.t, p.y, p.z);
        CHECK(std::abs(g / p.y - f) <= 1e-12 * (1.0 + std::abs(f)));
    }
}

TEST_CASE("lnq <-> quadratic transforms invert each other pointwise") {
    auto lnq = gbsde_to_lnq(gamma_norm(2.0));
    auto quad = lnq_to_quadratic(lnq);
    CHECK(quad.family == DriverFamily::ordinary);
    auto back = quadratic_to_lnq(quad);
    CHECK(back.family == DriverFamily::lnq);
    for (const auto& p : sample_points(1000)) {
        const double a = lnq.eval(p.t, p.y, p.z);
        const double b = back.eval(p.t, p.y, p.z);
        CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("quadratic weight gains one half under log-domain transforms") {
    auto geo = gamma_norm(2.0);
    const double d0 = geo.coeffs.delta;
    CHECK(gbsde_to_ordinary(geo).coeffs.delta == doctest::Approx(d0 + 0.5).epsilon(1e-15));
    auto lnq = gbsde_to_lnq(geo);
    CHECK(lnq.coeffs.delta == doctest::Approx(d0).epsilon(1e-15));
    CHECK(lnq_to_quadratic(lnq).coeffs.delta == doctest::Approx(d0 + 0.5).epsilon(1e-15));
}

TEST_CASE("transform lineage names the route taken") {
    auto geo = gamma_norm(2.0);
    auto has = [](const DriverSpec& d, const std::string& what) {
        for (const auto& step : d.lineage)
            if (step.find(what) != std::string::npos) return true;
        return false;
    };
    CHECK(has(gbsde_to_ordinary(geo), "gbsde_to_ordinary"));
    CHECK(has(gbsde_to_lnq(geo), "gbsde_to_lnq"));
}

TEST_CASE("two_driver_form reduction recovers the lnq driver") {
    auto geo = gamma_norm(2.0);
    auto two = two_driver_form(geo);
    CHECK(two.family == DriverFamily::two_driver);
    REQUIRE(two.K.has_value());
    CHECK(*two.K == doctest::Approx(1.0).epsilon(1e-12));
    auto reduced = twodriver_reduce(two);
    CHECK(reduced.family == DriverFamily::lnq);
    auto lnq = gbsde_to_lnq(geo);
    for (const auto& p : sample_points(500)) {
        const double a = reduced.eval(p.t, p.y, p.z);
        const double b = lnq.eval(p.t, p.y, p.z);
        CHECK(std::abs(a - b) <= 1e-11 * (1.0 + std::abs(b)));
    }
}

TEST_CASE("twodriver_reduce certifies the volatility lower bound") {
    auto geo = gamma_norm(2.0);
    auto two = two_driver_form(geo);
    // g2 = 3*y*z admits K = 3; the certified constant must reach it.
    DriverSpec scaled = two;
    scaled.g2 = [](double, double y, double z) { return 3.0 * y * z; };
    scaled.g2_inverse = [](double, double y, double v) { return v / (3.0 * y); };
    scaled.K = 3.0;
    auto red = twodriver_reduce(scaled);
    REQUIRE(red.K.has_value());
    CHECK(*red.K >= 3.0 * (1.0 - 1e-9));
    // Reduced bundle rescales gamma by 1/K and delta by 1/K^2.
    CHECK(red.coeffs.gamma(0.5) ==
          doctest::Approx(two.coeffs.gamma(0.5) / 3.0).epsilon(1e-9));
    CHECK(red.coeffs.delta == doctest::Approx(two.coeffs.delta / 9.0).epsilon(1e-9));
}

TEST_CASE("twodriver_reduce rejects a broken inverse with a witness") {
    auto two = two_driver_form(gamma_norm(2.0));
    DriverSpec broken = two;
    broken.g2_inverse = [](double, double y, double v) { return v / (2.0 * y); };
    CHECK_THROWS_AS(twodriver_reduce(broken), std::invalid_argument);
    try {
        twodriver_reduce(broken);
    } catch (const std::invalid_argument& e) {
        // The witness names the sample point that failed the round trip.
        CHECK(std::string(e.what()).find("t=") != std::string::npos);
    }
}

TEST_CASE("twodriver_reduce rejects a degenerate volatility map") {
    auto two = two_driver_form(gamma_norm(2.0));
    DriverSpec flat = two;
    // Saturating g2 violates |g2| >= K*y*|z| for large z.
    flat.g2 = [](double, double y, double z) { return y * std::tanh(z); };
    flat.g2_inverse = [](double, double y, double v) {
        const double r = std::clamp(v / y, -1.0 + 1e-12, 1.0 - 1e-12);
        return std::atanh(r);
    };
    flat.K = 1.0;
    CHECK_THROWS_AS(twodriver_reduce(flat), std::invalid_argument);
}

TEST_CASE("field push-forwards are mutually inverse on a solved lattice") {
    auto lat = Lattice::build(TimeGrid::uniform(1.0, 32));
    auto terminal = TerminalCondition::exp_of_state(1.0);
    auto field = solve_gbsde(lat, terminal, gamma_norm(2.0), SolverConfig{});

    auto ord = push_gbsde_to_ordinary(field);
    auto back = push_ordinary_to_gbsde(ord);
    for (int i = 0; i <= 32; i += 8) {
        for (int j = 0; j <= i; ++j) {
            CHECK(back.y_at(i, j) ==
                  doctest::Approx(field.y_at(i, j)).epsilon(1e-13));
            if (i < 32)
                CHECK(back.z_at(i, j) ==
                      doctest::Approx(field.z_at(i, j)).epsilon(1e-13));
        }
    }

    auto lnq = push_gbsde_to_lnq(field);
    for (int j = 0; j <= 16; ++j) {
        CHECK(lnq.y_at(16, j) == doctest::Approx(field.y_at(16, j)).epsilon(1e-15));
        CHECK(lnq.z_at(16, j) ==
              doctest::Approx(field.y_at(16, j) * field.z_at(16, j)).epsilon(1e-13));
    }

    auto quad = push_lnq_to_quadratic(lnq);
    auto lnq_back = push_quadratic_to_lnq(quad);
    for (int j = 0; j <= 16; ++j) {
        CHECK(lnq_back.y_at(16, j) == doctest::Approx(lnq.y_at(16, j)).epsilon(1e-13));
        CHECK(lnq_back.z_at(16, j) == doctest::Approx(lnq.z_at(16, j)).epsilon(1e-13));
    }
}

TEST_CASE("pushed ordinary field solves the transformed equation") {
    // Solving the transformed driver directly on the log terminal must agree
    // with pushing the geometric solution, node for node.
    auto lat = Lattice::build(TimeGrid::uniform(1.0, 64));
    auto geo = gamma_norm(2.0);
    auto field = solve_gbsde(lat, TerminalCondition::exp_of_state(1.0), geo, SolverConfig{});
    auto pushed = push_gbsde_to_ordinary(field);

    auto log_terminal = TerminalCondition::make(
        "w", 1, [](std::span<const double> w) { return w[0]; }, Positivity::unrestricted,
        -1e300);
    auto direct = solve_lattice(lat, log_terminal, gbsde_to_ordinary(geo), SolverConfig{});
    for (int i = 0; i <= 64; i += 16) {
        for (int j = 0; j <= i; ++j) {
            CHECK(std::abs(pushed.y_at(i, j) - direct.y_at(i, j)) <= 1e-12);
        }
    }
}

TEST_CASE("family preconditions are enforced") {
    auto geo = gamma_norm(2.0);
    auto ord = gbsde_to_ordinary(geo);
    CHECK_THROWS_AS(gbsde_to_ordinary(ord), std::invalid_argument);
    CHECK_THROWS_AS(ordinary_to_gbsde(geo), std::invalid_argument);
    CHECK_THROWS_AS(gbsde_to_lnq(ord), std::invalid_argument);
    CHECK_THROWS_AS(twodriver_reduce(geo), std::invalid_argument);
    CHECK_THROWS_AS(two_driver_form(ord), std::invalid_argument);
}
