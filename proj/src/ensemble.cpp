#include "gbsde/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gbsde/kernels.hpp"

namespace gbsde {

namespace {

// splitmix64; each path derives its own stream from (seed, path index) so
// generation order and thread count cannot change the draw.
struct Stream {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; } // [0, 1)
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t path) {
    Stream s{seed ^ (path * 0xD1B54A32D192ED03ull + 0x9E3779B97F4A7C15ull)};
    return s.next();
}

// Box-Muller pair source over the path's stream.
struct NormalSource {
    Stream stream;
    bool has_spare = false;
    double spare = 0.0;
    double next() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        const double u1 = 1.0 - stream.u01(); // (0, 1]
        const double u2 = stream.u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    }
};

} // namespace

PathEnsemble::PathEnsemble(TimeGrid grid, int dim, int paths, std::uint64_t seed)
    : grid_(std::move(grid)),
      dim_(dim),
      paths_(paths),
      seed_(seed),
      steps_count_(static_cast<std::size_t>(grid_.steps())),
      dim_u_(static_cast<std::size_t>(dim)) {
    dw_.resize(static_cast<std::size_t>(paths_) * steps_count_ * dim_u_);
    w_.resize(static_cast<std::size_t>(paths_) * (steps_count_ + 1) * dim_u_);
}

PathEnsemble PathEnsemble::generate(const TimeGrid& grid, int dim, int paths, std::uint64_t seed,
                                    bool parallel) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("ensemble: dim must be 1..3");
    if (paths < 1) throw std::invalid_argument("ensemble: need at least one path");
    PathEnsemble e(grid, dim, paths, seed);
    const std::size_t n = e.steps_count_;
    const std::size_t d = e.dim_u_;
    kernels::parallel_for(paths, parallel, [&](std::int64_t m) {
        NormalSource g{Stream{mix(seed, static_cast<std::uint64_t>(m))}, false, 0.0};
        const std::size_t dw_base = static_cast<std::size_t>(m) * n * d;
        const std::size_t w_base = static_cast<std::size_t>(m) * (n + 1) * d;
        for (std::size_t k = 0; k < d; ++k) e.w_[w_base + k] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sdt = std::sqrt(e.grid_.dt(static_cast<int>(i)));
            for (std::size_t k = 0; k < d; ++k) {
                const double inc = g.next() * sdt;
                e.dw_[dw_base + i * d + k] = inc;
                e.w_[w_base + (i + 1) * d + k] = e.w_[w_base + i * d + k] + inc;
            }
        }
    });
    return e;
}

} // namespace gbsde
