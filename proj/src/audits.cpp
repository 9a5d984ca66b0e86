#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "gbsde/catalog.hpp"
#include "gbsde/kernels.hpp"
#include "gbsde/report.hpp"
#include "gbsde/transforms.hpp"

namespace gbsde {

// ---- report serialization ---------------------------------------------------

nlohmann::json to_json(const Witness& w) {
    return {{"t", w.t}, {"y", w.y}, {"z", w.z}, {"margin", w.margin}, {"what", w.what}};
}

namespace {

nlohmann::json witness_array(const std::vector<Witness>& ws) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& w : ws) arr.push_back(to_json(w));
    return arr;
}

} // namespace

nlohmann::json PropertyReport::to_json() const {
    return {{"id", id},
            {"passed", passed},
            {"worst_margin", worst_margin},
            {"witnesses", witness_array(witnesses)},
            {"notes", notes}};
}

nlohmann::json AssumptionAudit::to_json() const {
    return {{"assumption", assumption_id},
            {"driver", driver_name},
            {"verdict", verdict()},
            {"worst_margin", worst_margin},
            {"witnesses", witness_array(witnesses)},
            {"notes", notes},
            {"details", details}};
}

nlohmann::json AxiomReport::to_json() const {
    return {{"axiom", axiom},
            {"driver", driver_name},
            {"instances", instances},
            {"violations", violations},
            {"passed", passed()},
            {"worst_margin", worst_margin},
            {"slack", slack},
            {"witnesses", witness_array(witnesses)},
            {"notes", notes}};
}

// ---- quasi-random sampling ---------------------------------------------------

namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
    double f = 1.0;
    double r = 0.0;
    while (i != 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// Halton point, skipping the all-zero index.
double halton(std::uint64_t index, int dim) {
    static constexpr unsigned bases[] = {2, 3, 5, 7, 11, 13};
    return radical_inverse(index + 1, bases[dim]);
}

struct SamplePoint {
    double t;
    double y;
    double z;
};

SamplePoint sample_point(std::uint64_t index, const GrowthWindow& window) {
    const double u0 = halton(index, 0);
    const double u1 = halton(index, 1);
    const double u2 = halton(index, 2);
    return {u0 * window.t_max,
            window.y_min * std::pow(window.y_max / window.y_min, u1),
            (2.0 * u2 - 1.0) * window.z_abs};
}

// Relative slack absorbing evaluation round-off so tight bounds pass with
// zero margin instead of failing at the last ulp.
constexpr double audit_slack = 1e-9;

constexpr std::size_t max_witnesses = 8;

void record_violation(AssumptionAudit& audit, const SamplePoint& p, double margin,
                      const char* what) {
    audit.passed = false;
    if (audit.witnesses.size() < max_witnesses) {
        audit.witnesses.push_back(Witness{p.t, p.y, p.z, margin, what});
    }
}

double bound_h1(const CoefficientBundle& c, double t, double y, double z) {
    return c.alpha(t) * y + c.beta(t) * y * std::abs(std::log(y)) + c.delta * z * z / y;
}

} // namespace

AssumptionAudit validate_growth(const DriverSpec& driver, const std::string& assumption_id,
                                const GrowthWindow& window) {
    AssumptionAudit audit;
    audit.assumption_id = assumption_id;
    audit.driver_name = driver.name;
    audit.worst_margin = std::numeric_limits<double>::infinity();
    audit.details["samples"] = window.samples;
    audit.details["window"] = {{"t_max", window.t_max},
                               {"y_min", window.y_min},
                               {"y_max", window.y_max},
                               {"z_abs", window.z_abs}};

    if (assumption_id == "G2") {
        if (driver.family != DriverFamily::two_driver) {
            throw std::invalid_argument("validate_growth: G2 applies to two-driver pairs");
        }
        double k_min = std::numeric_limits<double>::infinity();
        for (int s = 0; s < window.samples; ++s) {
            SamplePoint p = sample_point(static_cast<std::uint64_t>(s), window);
            if (std::abs(p.z) < 1e-3) p.z = p.z < 0.0 ? -1e-3 : 1e-3;
            const double v = driver.g2(p.t, p.y, p.z);
            const double back = driver.g2_inverse(p.t, p.y, v);
            const double inv_err = std::abs(back - p.z);
            if (inv_err > 1e-9 * std::max(1.0, std::abs(p.z))) {
                record_violation(audit, p, -inv_err, "g2_inverse round trip exceeds 1e-9");
            }
            k_min = std::min(k_min, std::abs(v) / (p.y * std::abs(p.z)));
        }
        audit.details["certified_K"] = k_min;
        if (driver.K) {
            audit.details["declared_K"] = *driver.K;
            const double margin = k_min - *driver.K;
            audit.worst_margin = margin;
            if (margin < -audit_slack * std::max(1.0, *driver.K)) {
                record_violation(audit, SamplePoint{0, 0, 0}, margin,
                                 "sampled |g2|/(y|z|) falls below the declared K");
            }
        } else {
            audit.worst_margin = k_min;
            if (!(k_min > 0.0)) {
                record_violation(audit, SamplePoint{0, 0, 0}, k_min, "g2 vanishes off z = 0");
            }
        }
        audit.notes = "g2 invertibility and volatility lower bound";
        return audit;
    }

    // Remaining ids bound a scalar driver; reduce composite families first.
    DriverSpec spec = driver;
    if (assumption_id == "G1") {
        if (driver.family != DriverFamily::two_driver) {
            throw std::invalid_argument("validate_growth: G1 applies to two-driver pairs");
        }
        spec = twodriver_reduce(driver);
        audit.notes = "reduced two-driver pair; bound uses (alpha, beta, gamma/K, delta/K^2)";
    } else if (driver.family == DriverFamily::geometric && assumption_id != "increasing_y") {
        spec = gbsde_to_lnq(driver);
        audit.notes = "geometric driver audited in reduced LN-Q form";
    } else if (driver.family == DriverFamily::two_driver) {
        spec = twodriver_reduce(driver);
        audit.notes = "two-driver pair audited in reduced LN-Q form";
    }

    if (assumption_id == "nonneg" && spec.allows_negative_driver) {
        audit.skipped = true;
        audit.worst_margin = 0.0;
        audit.notes = "documented exemption: this driver is allowed to be negative";
        return audit;
    }

    const auto& c = spec.coeffs;
    const std::vector<double> eta =
        c.eta ? *c.eta : std::vector<double>{0.0};

    enum class Kind { nonneg, h1, h1p, h1pp, a, ap, g1, increasing } kind;
    if (assumption_id == "nonneg") kind = Kind::nonneg;
    else if (assumption_id == "H1") kind = Kind::h1;
    else if (assumption_id == "H1'") kind = Kind::h1p;
    else if (assumption_id == "H1''") kind = Kind::h1pp;
    else if (assumption_id == "A") kind = Kind::a;
    else if (assumption_id == "A'") kind = Kind::ap;
    else if (assumption_id == "G1") kind = Kind::h1p;
    else if (assumption_id == "increasing_y") kind = Kind::increasing;
    else throw std::invalid_argument("validate_growth: unknown assumption '" + assumption_id + "'");

    for (int s = 0; s < window.samples; ++s) {
        const SamplePoint p = sample_point(static_cast<std::uint64_t>(s), window);
        const double g = spec.eval(p.t, p.y, p.z);

        if (kind == Kind::increasing) {
            const double y2 =
                window.y_min * std::pow(window.y_max / window.y_min,
                                        halton(static_cast<std::uint64_t>(s), 3));
            const double lo = std::min(p.y, y2);
            const double hi = std::max(p.y, y2);
            const double margin = spec.eval(p.t, hi, p.z) - spec.eval(p.t, lo, p.z);
            audit.worst_margin = std::min(audit.worst_margin, margin);
            if (margin < -audit_slack * std::max(1.0, std::abs(g))) {
                record_violation(audit, SamplePoint{p.t, hi, p.z}, margin,
                                 "driver decreases between sampled y values");
            }
            continue;
        }

        double h = bound_h1(c, p.t, p.y, p.z);
        switch (kind) {
            case Kind::h1p: h += c.gamma(p.t) * std::abs(p.z); break;
            case Kind::h1pp: h += c.gamma(p.t) * std::abs(p.z) + eta[0] * p.z; break;
            case Kind::a: h += c.gamma(p.t) * std::abs(p.z); break;
            case Kind::ap: h = c.alpha(p.t) * p.y + c.beta(p.t) * p.y * std::abs(std::log(p.y)) +
                                c.delta * p.y * p.z * p.z;
                break;
            default: break;
        }
        const double tol = audit_slack * std::max({1.0, std::abs(g), std::abs(h)});

        if (kind == Kind::nonneg) {
            audit.worst_margin = std::min(audit.worst_margin, g);
            if (g < -tol) record_violation(audit, p, g, "driver is negative at sampled point");
            continue;
        }

        const double low_margin = kind == Kind::a ? h - std::abs(g) : g;
        const double up_margin = kind == Kind::a ? low_margin : h - g;
        const double margin = std::min(low_margin, up_margin);
        audit.worst_margin = std::min(audit.worst_margin, margin);
        if (kind != Kind::a && g < -tol) {
            record_violation(audit, p, g, "driver is negative at sampled point");
        } else if (up_margin < -tol) {
            record_violation(audit, p, up_margin, "driver exceeds the growth bound");
        }
    }
    return audit;
}

AssumptionAudit check_convexity(const DriverSpec& driver, const std::string& mode,
                                const GrowthWindow& window) {
    AssumptionAudit audit;
    audit.assumption_id = "convexity:" + mode;
    audit.driver_name = driver.name;
    audit.worst_margin = std::numeric_limits<double>::infinity();
    audit.details["samples"] = window.samples;

    DriverSpec spec = driver;
    if (mode == "perspective") {
        if (driver.family == DriverFamily::geometric) spec = gbsde_to_lnq(driver);
        else if (driver.family == DriverFamily::two_driver) spec = twodriver_reduce(driver);
        else if (driver.family != DriverFamily::lnq) {
            throw std::invalid_argument(
                "check_convexity: perspective mode needs a geometric, LN-Q, or two-driver input");
        }
        audit.notes = "joint convexity of the reduced (y, v) evaluation";
    } else if (mode == "joint" || mode == "GA") {
        if (driver.family == DriverFamily::two_driver) spec = twodriver_reduce(driver);
        // Geometric mixing of a geometric driver is joint convexity of its
        // log-domain ordinary form; the |z|^2/2 correction belongs to the
        // mixed evaluation, so transform instead of sampling f directly.
        if (mode == "GA" && driver.family == DriverFamily::geometric) {
            spec = gbsde_to_ordinary(driver);
            audit.notes = "log-domain joint convexity of the transformed driver";
        }
    } else {
        throw std::invalid_argument("check_convexity: unknown mode '" + mode + "'");
    }

    const bool geometric_mix = mode == "GA";
    const bool log_y = geometric_mix && driver.family == DriverFamily::geometric;
    const double lambdas_fixed[] = {0.25, 0.5, 0.75};

    for (int s = 0; s < window.samples; ++s) {
        const std::uint64_t idx = static_cast<std::uint64_t>(s);
        const double t = halton(idx, 0) * window.t_max;
        const double y1 = window.y_min * std::pow(window.y_max / window.y_min, halton(idx, 1));
        const double y2 = window.y_min * std::pow(window.y_max / window.y_min, halton(idx, 2));
        const double z1 = (2.0 * halton(idx, 3) - 1.0) * window.z_abs;
        const double z2 = (2.0 * halton(idx, 4) - 1.0) * window.z_abs;

        const double f1 = spec.eval(t, log_y ? std::log(y1) : y1, z1);
        const double f2 = spec.eval(t, log_y ? std::log(y2) : y2, z2);

        const auto test_lambda = [&](double lambda) {
            const double ym = geometric_mix ? std::pow(y1, lambda) * std::pow(y2, 1.0 - lambda)
                                            : lambda * y1 + (1.0 - lambda) * y2;
            const double zm = lambda * z1 + (1.0 - lambda) * z2;
            const double mixed = spec.eval(t, log_y ? std::log(ym) : ym, zm);
            const double hull = lambda * f1 + (1.0 - lambda) * f2;
            const double margin = hull - mixed;
            audit.worst_margin = std::min(audit.worst_margin, margin);
            if (margin < -audit_slack * std::max({1.0, std::abs(hull), std::abs(mixed)})) {
                char buf[120];
                std::snprintf(buf, sizeof buf,
                              "convexity gap at lambda=%.4g, pair y=(%.4g, %.4g) z=(%.4g, %.4g)",
                              lambda, y1, y2, z1, z2);
                record_violation(audit, SamplePoint{t, ym, zm}, margin, buf);
            }
        };

        for (double lambda : lambdas_fixed) test_lambda(lambda);
        if (s < 100) test_lambda(halton(idx, 5));
    }
    return audit;
}

AssumptionAudit moment_report(const TerminalCondition& terminal, const CoefficientBundle& bundle,
                              double p, double delta, const PathEnsemble& ensemble) {
    AssumptionAudit audit;
    audit.assumption_id = "G3-moments";
    audit.driver_name = terminal.name();
    const double q = p * (2.0 * delta + 1.0) * (std::exp(bundle.B) + 1.0);
    audit.details["required_order"] = q;
    audit.details["B"] = bundle.B;

    const int n = ensemble.steps();
    const std::size_t paths = static_cast<std::size_t>(ensemble.paths());
    std::vector<double> logs;
    logs.reserve(paths);
    std::size_t nonpositive = 0;
    for (std::size_t m = 0; m < paths; ++m) {
        const double x = terminal(ensemble.state_vec(static_cast<int>(m), n));
        if (x > 0.0) logs.push_back(std::log(x));
        else ++nonpositive;
    }
    audit.details["nonpositive_samples"] = nonpositive;
    if (logs.size() < 1000) {
        audit.inconclusive = true;
        audit.notes = "fewer than 1000 positive samples; tail diagnostic not meaningful";
        return audit;
    }

    // Raw moment estimate, assembled in shifted log domain to survive
    // overflow; reliability flag from the standard-error bar.
    double lmax = -std::numeric_limits<double>::infinity();
    for (double l : logs) lmax = std::max(lmax, q * l);
    const double mean_shifted = kernels::deterministic_sum(logs.size(), false, [&](std::size_t i) {
                                    return std::exp(q * logs[i] - lmax);
                                }) /
                                static_cast<double>(logs.size());
    const double var_shifted =
        kernels::deterministic_sum(logs.size(), false,
                                   [&](std::size_t i) {
                                       const double d = std::exp(q * logs[i] - lmax) - mean_shifted;
                                       return d * d;
                                   }) /
        static_cast<double>(logs.size());
    const double se_shifted = std::sqrt(var_shifted / static_cast<double>(logs.size()));
    const double ln_estimate = lmax + std::log(mean_shifted);
    audit.details["ln_estimate"] = ln_estimate;
    audit.details["estimate"] = std::exp(ln_estimate);
    audit.details["relative_se"] = se_shifted / mean_shifted;
    const bool reliable = se_shifted * 10.0 < mean_shifted * (10.0 - 1.0) &&
                          mean_shifted - se_shifted > mean_shifted / 10.0;
    audit.details["estimate_reliable"] = reliable;

    // Log-domain mean-excess tail diagnostic: the reciprocal mean excess of
    // ln X beyond a high threshold estimates the exponential tail index.
    // A thinning tail (index growing with the threshold) supports moments of
    // every order; a flat profile is Pareto-like with that index.
    std::sort(logs.begin(), logs.end());
    if (logs.front() == logs.back()) {
        audit.passed = true;
        audit.worst_margin = std::numeric_limits<double>::infinity();
        audit.notes = "payoff is constant on the sample; every moment is finite";
        return audit;
    }
    const auto tail_index = [&](double quantile) {
        const std::size_t cut = static_cast<std::size_t>(quantile * static_cast<double>(logs.size()));
        const double u = logs[cut];
        double excess = 0.0;
        std::size_t count = 0;
        for (std::size_t i = cut; i < logs.size(); ++i) {
            if (logs[i] > u) {
                excess += logs[i] - u;
                ++count;
            }
        }
        return count == 0 ? std::numeric_limits<double>::infinity()
                          : static_cast<double>(count) / excess;
    };
    const double lam1 = tail_index(0.95);
    const double lam2 = tail_index(0.99);
    audit.details["tail_index_95"] = lam1;
    audit.details["tail_index_99"] = lam2;

    if (lam2 >= 1.1 * lam1) {
        audit.passed = true;
        audit.worst_margin = lam2 / lam1 - 1.1;
        audit.notes = "log-payoff tail thins with the threshold; moments of every order supported";
    } else if (std::min(lam1, lam2) > q) {
        audit.passed = true;
        audit.worst_margin = std::min(lam1, lam2) - q;
        audit.notes = "flat log-tail, but the index clears the required order";
    } else if (std::max(lam1, lam2) <= q) {
        audit.passed = false;
        audit.worst_margin = std::max(lam1, lam2) - q;
        char buf[120];
        std::snprintf(buf, sizeof buf,
                      "flat log-tail index %.3g at the 99%% threshold is below required order %.3g",
                      lam2, q);
        audit.witnesses.push_back(
            Witness{bundle.horizon, lam2, q, audit.worst_margin, buf});
        audit.notes = "empirical moment of the required order diverges";
    } else {
        audit.inconclusive = true;
        audit.worst_margin = std::min(lam1, lam2) - q;
        audit.notes = "tail index straddles the required order; estimate unreliable";
    }
    if (!reliable && audit.passed) {
        audit.notes += "; raw moment estimate flagged unreliable (error bar spans an order of "
                       "magnitude), verdict from the tail diagnostic";
    }
    return audit;
}

} // namespace gbsde
