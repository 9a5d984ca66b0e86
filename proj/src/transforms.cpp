#include "gbsde/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace gbsde {

const char* to_string(DriverFamily family) {
    switch (family) {
        case DriverFamily::ordinary: return "ordinary";
        case DriverFamily::lnq: return "lnq";
        case DriverFamily::geometric: return "geometric";
        case DriverFamily::two_driver: return "two_driver";
    }
    return "unknown";
}

DriverSpec DriverSpec::with_lineage(std::string step) const {
    DriverSpec out = *this;
    out.lineage.push_back(std::move(step));
    return out;
}

namespace {

constexpr std::size_t max_zdim = 8;

double z_norm_sq(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

void require_family(const DriverSpec& spec, DriverFamily family, const char* where) {
    if (spec.family != family) {
        throw std::invalid_argument(std::string(where) + ": expects a " + to_string(family) +
                                    " driver, got " + to_string(spec.family));
    }
}

std::size_t clamp_dim(std::span<const double> z) {
    return std::min<std::size_t>(z.size(), max_zdim);
}

} // namespace

DriverSpec gbsde_to_ordinary(const DriverSpec& geometric) {
    require_family(geometric, DriverFamily::geometric, "gbsde_to_ordinary");
    DriverSpec out = geometric.with_lineage("gbsde_to_ordinary");
    out.family = DriverFamily::ordinary;
    out.y_domain = YDomain::free;
    out.coeffs.delta += 0.5;
    ScalarDriver f = geometric.f;
    out.f = [f](double t, double y, std::span<const double> z) {
        return f(t, std::exp(y), z) + 0.5 * z_norm_sq(z);
    };
    return out;
}

DriverSpec ordinary_to_gbsde(const DriverSpec& ordinary) {
    require_family(ordinary, DriverFamily::ordinary, "ordinary_to_gbsde");
    DriverSpec out = ordinary.with_lineage("ordinary_to_gbsde");
    out.family = DriverFamily::geometric;
    out.y_domain = YDomain::positive;
    out.coeffs.delta += 0.5;
    out.allows_negative_driver = true; // subtracting |z|^2/2 loses any sign guarantee
    ScalarDriver f = ordinary.f;
    out.f = [f](double t, double y, std::span<const double> z) {
        return f(t, std::log(y), z) - 0.5 * z_norm_sq(z);
    };
    return out;
}

DriverSpec gbsde_to_lnq(const DriverSpec& geometric) {
    require_family(geometric, DriverFamily::geometric, "gbsde_to_lnq");
    DriverSpec out = geometric.with_lineage("gbsde_to_lnq");
    out.family = DriverFamily::lnq;
    out.y_domain = YDomain::positive;
    ScalarDriver f = geometric.f;
    out.f = [f](double t, double y, std::span<const double> z) {
        double scaled[max_zdim];
        const std::size_t n = clamp_dim(z);
        for (std::size_t k = 0; k < n; ++k) scaled[k] = z[k] / y;
        return y * f(t, y, std::span<const double>(scaled, n));
    };
    return out;
}

DriverSpec lnq_to_quadratic(const DriverSpec& lnq) {
    require_family(lnq, DriverFamily::lnq, "lnq_to_quadratic");
    DriverSpec out = lnq.with_lineage("lnq_to_quadratic");
    out.family = DriverFamily::ordinary;
    out.y_domain = YDomain::free;
    out.coeffs.delta += 0.5;
    ScalarDriver g = lnq.f;
    out.f = [g](double t, double y, std::span<const double> z) {
        const double ey = std::exp(y);
        double scaled[max_zdim];
        const std::size_t n = clamp_dim(z);
        for (std::size_t k = 0; k < n; ++k) scaled[k] = z[k] * ey;
        return std::exp(-y) * g(t, ey, std::span<const double>(scaled, n)) + 0.5 * z_norm_sq(z);
    };
    return out;
}

DriverSpec quadratic_to_lnq(const DriverSpec& quadratic) {
    require_family(quadratic, DriverFamily::ordinary, "quadratic_to_lnq");
    DriverSpec out = quadratic.with_lineage("quadratic_to_lnq");
    out.family = DriverFamily::lnq;
    out.y_domain = YDomain::positive;
    out.coeffs.delta += 0.5;
    ScalarDriver g = quadratic.f;
    out.f = [g](double t, double y, std::span<const double> z) {
        const double ly = std::log(y);
        double scaled[max_zdim];
        const std::size_t n = clamp_dim(z);
        for (std::size_t k = 0; k < n; ++k) scaled[k] = z[k] / y;
        const std::span<const double> zs(scaled, n);
        return y * (g(t, ly, zs) - 0.5 * z_norm_sq(zs));
    };
    return out;
}

DriverSpec twodriver_reduce(const DriverSpec& two_driver) {
    require_family(two_driver, DriverFamily::two_driver, "twodriver_reduce");
    if (!two_driver.g1 || !two_driver.g2 || !two_driver.g2_inverse) {
        throw std::invalid_argument("twodriver_reduce: needs g1, g2 and g2_inverse");
    }

    const double T = two_driver.coeffs.horizon > 0.0 ? two_driver.coeffs.horizon : 1.0;
    const double ys[] = {0.1, 0.17783, 0.31623, 0.56234, 1.0, 1.77828, 3.16228, 5.62341, 10.0};
    const double zs[] = {-5.0, -2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0, 5.0};
    double k_sampled = std::numeric_limits<double>::infinity();

    for (int it = 0; it <= 4; ++it) {
        const double t = T * it / 4.0;
        for (double y : ys) {
            for (double z : zs) {
                const double v = two_driver.g2(t, y, z);
                const double back = two_driver.g2_inverse(t, y, v);
                if (!(std::abs(back - z) <= 1e-9 * std::max(1.0, std::abs(z)))) {
                    char buf[200];
                    std::snprintf(buf, sizeof buf,
                                  "twodriver_reduce: g2_inverse does not invert g2 at "
                                  "t=%.6g y=%.6g z=%.6g (round trip %.17g)",
                                  t, y, z, back);
                    throw std::invalid_argument(buf);
                }
                k_sampled = std::min(k_sampled, std::abs(v) / (y * std::abs(z)));
            }
        }
    }
    if (!(k_sampled > 0.0)) {
        throw std::invalid_argument("twodriver_reduce: g2 vanishes at a sampled point, no "
                                    "positive lower bound K exists");
    }
    // A declared K is the guarantee; sampling only cross-checks it. Without a
    // declaration the sampled minimum is the largest K the samples certify.
    double k_certified = k_sampled;
    if (two_driver.K) {
        if (*two_driver.K > k_sampled + 1e-12) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "twodriver_reduce: declared K=%.6g exceeds sampled bound %.6g",
                          *two_driver.K, k_sampled);
            throw std::invalid_argument(buf);
        }
        k_certified = *two_driver.K;
    }

    DriverSpec out = two_driver.with_lineage("twodriver_reduce");
    out.family = DriverFamily::lnq;
    out.y_domain = YDomain::positive;
    out.K = k_certified;
    out.coeffs = two_driver.coeffs.reduced_by(k_certified);
    ScalarDriver g1 = two_driver.g1;
    VolatilityMap g2_inverse = two_driver.g2_inverse;
    out.f = [g1, g2_inverse](double t, double y, std::span<const double> v) {
        const double z = g2_inverse(t, y, v[0]);
        return g1(t, y, std::span<const double>(&z, 1));
    };
    out.g1 = {};
    out.g2 = {};
    out.g2_inverse = {};
    return out;
}

DriverSpec two_driver_form(const DriverSpec& geometric) {
    require_family(geometric, DriverFamily::geometric, "two_driver_form");
    DriverSpec out = geometric.with_lineage("two_driver_form");
    out.family = DriverFamily::two_driver;
    out.y_domain = YDomain::positive;
    out.K = 1.0;
    ScalarDriver f = geometric.f;
    out.g1 = [f](double t, double y, std::span<const double> z) { return y * f(t, y, z); };
    out.g2 = [](double, double y, double z) { return y * z; };
    out.g2_inverse = [](double, double y, double v) { return v / y; };
    out.f = {};
    return out;
}

namespace {

template <class YMap, class ZMap>
SolutionField map_field(const SolutionField& in, const char* step, bool positive_out, YMap ymap,
                        ZMap zmap) {
    SolutionField out = in;
    out.lineage.push_back(step);
    if (in.kind == FieldKind::lattice) {
        for (std::size_t i = 0; i < in.y_levels.size(); ++i) {
            for (std::size_t j = 0; j < in.y_levels[i].size(); ++j) {
                out.y_levels[i][j] = ymap(in.y_levels[i][j]);
            }
        }
        for (std::size_t i = 0; i < in.z_levels.size(); ++i) {
            for (std::size_t j = 0; j < in.z_levels[i].size(); ++j) {
                out.z_levels[i][j] = zmap(in.y_levels[i][j], in.z_levels[i][j]);
            }
        }
    } else {
        const std::size_t np = static_cast<std::size_t>(in.paths);
        const std::size_t n = static_cast<std::size_t>(in.grid.steps());
        const std::size_t zd = static_cast<std::size_t>(in.zdim);
        for (std::size_t m = 0; m < np; ++m) {
            for (std::size_t i = 0; i <= n; ++i) {
                out.y_paths[m * (n + 1) + i] = ymap(in.y_paths[m * (n + 1) + i]);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double yi = in.y_paths[m * (n + 1) + i];
                for (std::size_t k = 0; k < zd; ++k) {
                    out.z_paths[(m * n + i) * zd + k] = zmap(yi, in.z_paths[(m * n + i) * zd + k]);
                }
            }
        }
    }
    out.diagnostics.positive = positive_out;
    return out;
}

double ln_checked(double y) {
    if (!(y > 0.0)) {
        throw std::domain_error("push-forward: field must be strictly positive before taking "
                                "logarithms");
    }
    return std::log(y);
}

} // namespace

SolutionField push_gbsde_to_ordinary(const SolutionField& geometric_field) {
    return map_field(geometric_field, "push_gbsde_to_ordinary", false, ln_checked,
                     [](double, double z) { return z; });
}

SolutionField push_ordinary_to_gbsde(const SolutionField& ordinary_field) {
    return map_field(ordinary_field, "push_ordinary_to_gbsde", true,
                     [](double y) { return std::exp(y); }, [](double, double z) { return z; });
}

SolutionField push_gbsde_to_lnq(const SolutionField& geometric_field) {
    return map_field(geometric_field, "push_gbsde_to_lnq", true,
                     [](double y) { return (void)ln_checked(y), y; },
                     [](double y, double z) { return y * z; });
}

SolutionField push_lnq_to_quadratic(const SolutionField& lnq_field) {
    return map_field(lnq_field, "push_lnq_to_quadratic", false, ln_checked,
                     [](double y, double z) { return z / y; });
}

SolutionField push_quadratic_to_lnq(const SolutionField& quadratic_field) {
    return map_field(quadratic_field, "push_quadratic_to_lnq", true,
                     [](double y) { return std::exp(y); },
                     [](double y, double z) { return std::exp(y) * z; });
}

} // namespace gbsde
