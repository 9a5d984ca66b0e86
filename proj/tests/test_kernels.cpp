#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "gbsde/kernels.hpp"

namespace {

// Mixed-magnitude data that makes accumulation order visible in the low bits.
std::vector<double> adversarial_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double mag = std::pow(10.0, 12.0 * u - 6.0);
        xs[i] = ((rng() & 1u) ? mag : -mag);
    }
    return xs;
}

long double reference_sum(const std::vector<double>& xs) {
    long double acc = 0.0L;
    for (double x : xs) acc += static_cast<long double>(x);
    return acc;
}

} // namespace

TEST_CASE("pairwise_sum tracks a long-double reference on ill-conditioned data") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto xs = adversarial_values(200000, seed);
        const double got = gbsde::kernels::pairwise_sum(xs);
        const long double ref = reference_sum(xs);
        long double scale = 0.0L;
        for (double x : xs) scale += std::fabs(static_cast<long double>(x));
        const double rel = static_cast<double>(std::fabs(got - ref) / scale);
        CHECK(rel < 1e-14);
    }
}

TEST_CASE("pairwise_sum beats left-to-right accumulation on a harmonic tail") {
    // 1/i in increasing i: naive accumulation loses the small terms late.
    const std::size_t n = 1u << 20;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = 1.0 / static_cast<double>(i + 1);
    const long double ref = reference_sum(xs);
    double naive = 0.0;
    for (double x : xs) naive += x;
    const double pw = gbsde::kernels::pairwise_sum(xs);
    const double err_naive = static_cast<double>(std::fabs(naive - ref));
    const double err_pw = static_cast<double>(std::fabs(pw - ref));
    CHECK(err_pw <= err_naive);
    CHECK(err_pw / static_cast<double>(ref) < 1e-15);
}

TEST_CASE("deterministic_sum is bitwise equal between parallel and serial") {
    for (std::size_t n : {std::size_t{1}, std::size_t{31}, std::size_t{32}, std::size_t{33},
                          std::size_t{2047}, std::size_t{2048}, std::size_t{2049},
                          std::size_t{100000}}) {
        auto xs = adversarial_values(n, 1000 + n);
        auto value_at = [&](std::size_t i) { return xs[i]; };
        const double par = gbsde::kernels::deterministic_sum(n, true, value_at);
        const double ser = gbsde::kernels::serial::deterministic_sum(n, value_at);
        CHECK(std::memcmp(&par, &ser, sizeof(double)) == 0);
        // Repeat runs reproduce the exact same bits.
        const double again = gbsde::kernels::deterministic_sum(n, true, value_at);
        CHECK(std::memcmp(&par, &again, sizeof(double)) == 0);
    }
}

TEST_CASE("deterministic_sum matches the long-double reference to rounding") {
    auto xs = adversarial_values(50000, 7);
    auto value_at = [&](std::size_t i) { return xs[i]; };
    const double got = gbsde::kernels::deterministic_sum(xs.size(), true, value_at);
    const long double ref = reference_sum(xs);
    long double scale = 0.0L;
    for (double x : xs) scale += std::fabs(static_cast<long double>(x));
    CHECK(static_cast<double>(std::fabs(got - ref) / scale) < 1e-14);
}

TEST_CASE("deterministic_sum_rows is bitwise equal between parallel and serial") {
    const std::size_t k = 7;
    for (std::size_t n : {std::size_t{5}, std::size_t{2048}, std::size_t{6000}}) {
        auto base = adversarial_values(n * k, 31 + n);
        auto row_at = [&](std::size_t i, std::span<double> out) {
            for (std::size_t j = 0; j < k; ++j) out[j] = base[i * k + j];
        };
        std::vector<double> par(k), ser(k);
        gbsde::kernels::deterministic_sum_rows(n, k, true, row_at, par);
        gbsde::kernels::serial::deterministic_sum_rows(n, k, row_at, ser);
        CHECK(std::memcmp(par.data(), ser.data(), k * sizeof(double)) == 0);
    }
}

TEST_CASE("deterministic_sum_rows sums each column accurately") {
    const std::size_t n = 9000, k = 3;
    auto base = adversarial_values(n * k, 99);
    auto row_at = [&](std::size_t i, std::span<double> out) {
        for (std::size_t j = 0; j < k; ++j) out[j] = base[i * k + j];
    };
    std::vector<double> got(k);
    gbsde::kernels::deterministic_sum_rows(n, k, true, row_at, got);
    for (std::size_t j = 0; j < k; ++j) {
        long double ref = 0.0L, scale = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            ref += static_cast<long double>(base[i * k + j]);
            scale += std::fabs(static_cast<long double>(base[i * k + j]));
        }
        CHECK(static_cast<double>(std::fabs(got[j] - ref) / scale) < 1e-13);
    }
}

TEST_CASE("parallel_for visits every index exactly once") {
    const std::size_t n = 10007;
    std::vector<std::atomic<int>> hits(n);
    for (auto& h : hits) h.store(0);
    gbsde::kernels::parallel_for(n, true, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (std::size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
    gbsde::kernels::parallel_for(n, false, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (std::size_t i = 0; i < n; ++i) CHECK(hits[i].load() == 2);
}
