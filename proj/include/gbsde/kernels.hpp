#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gbsde::kernels {

// Reductions use fixed-order pairwise summation over fixed-size chunks, so
// results are bit-identical for any thread count and for the serial path.

inline constexpr std::size_t chunk_size = 2048;

inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n <= 32) {
        double acc = 0.0;
        for (double x : xs) acc += x;
        return acc;
    }
    const std::size_t mid = n / 2;
    return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

/// body(i) for i in [0, n), in parallel when requested. Each index must write
/// only its own outputs.
template <class Body>
void parallel_for(std::int64_t n, bool parallel, Body&& body) {
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) body(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) body(i);
    }
}

namespace detail {

template <class ValueAt>
void chunk_partials(std::size_t n, bool parallel, ValueAt&& value_at, std::vector<double>& partial) {
    const std::size_t nc = (n + chunk_size - 1) / chunk_size;
    partial.assign(nc, 0.0);
    parallel_for(static_cast<std::int64_t>(nc), parallel, [&](std::int64_t c) {
        const std::size_t lo = static_cast<std::size_t>(c) * chunk_size;
        const std::size_t hi = lo + chunk_size < n ? lo + chunk_size : n;
        double buf[chunk_size];
        for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = value_at(i);
        partial[static_cast<std::size_t>(c)] = pairwise_sum(std::span<const double>(buf, hi - lo));
    });
}

} // namespace detail

/// Deterministic sum of value_at(0..n-1), parallel over chunks.
template <class ValueAt>
double deterministic_sum(std::size_t n, bool parallel, ValueAt&& value_at) {
    if (n == 0) return 0.0;
    std::vector<double> partial;
    detail::chunk_partials(n, parallel, value_at, partial);
    return pairwise_sum(partial);
}

/// Deterministic sum of k-component rows: row_at(i, out) fills out[0..k).
/// Used for regression Gram/right-hand-side assembly.
template <class RowAt>
void deterministic_sum_rows(std::size_t n, std::size_t k, bool parallel, RowAt&& row_at,
                            std::span<double> out) {
    const std::size_t nc = (n + chunk_size - 1) / chunk_size;
    std::vector<double> partial(nc * k, 0.0);
    parallel_for(static_cast<std::int64_t>(nc), parallel, [&](std::int64_t c) {
        const std::size_t lo = static_cast<std::size_t>(c) * chunk_size;
        const std::size_t hi = lo + chunk_size < n ? lo + chunk_size : n;
        std::vector<double> row(k);
        double* acc = &partial[static_cast<std::size_t>(c) * k];
        for (std::size_t i = lo; i < hi; ++i) {
            row_at(i, std::span<double>(row));
            for (std::size_t j = 0; j < k; ++j) acc[j] += row[j];
        }
    });
    std::vector<double> column(nc);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t c = 0; c < nc; ++c) column[c] = partial[c * k + j];
        out[j] = pairwise_sum(column);
    }
}

/// Serial reference implementations: the same chunked pairwise order with no
/// OpenMP involvement. Tests assert bitwise agreement with the parallel path.
namespace serial {

template <class ValueAt>
double deterministic_sum(std::size_t n, ValueAt&& value_at) {
    return kernels::deterministic_sum(n, false, value_at);
}

template <class RowAt>
void deterministic_sum_rows(std::size_t n, std::size_t k, RowAt&& row_at, std::span<double> out) {
    kernels::deterministic_sum_rows(n, k, false, row_at, out);
}

} // namespace serial

} // namespace gbsde::kernels
