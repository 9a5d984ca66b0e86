#pragma once

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gbsde/coefficients.hpp"

namespace gbsde {

/// Equation families. "geometric" drivers act on the multiplicative form
/// (driver and volatility both normalized by the value), "lnq" drivers are
/// ordinary drivers with positive-value domain and possibly quadratic z/y
/// growth, "two_driver" pairs feed the output of a z-driver into a y-driver.
enum class DriverFamily { ordinary, lnq, geometric, two_driver };

enum class YDomain { free, positive };

/// Scalar driver evaluation f(t, y, z); z may be multi-dimensional.
using ScalarDriver = std::function<double(double, double, std::span<const double>)>;
/// Scalar-volatility map used by the two-driver family (1-d z).
using VolatilityMap = std::function<double(double, double, double)>;

const char* to_string(DriverFamily family);

struct DriverSpec {
    DriverFamily family = DriverFamily::ordinary;
    std::string name;
    ScalarDriver f; // ordinary / lnq / geometric evaluation

    // Two-driver parts; g2 must be invertible in z, g2_inverse its inverse.
    ScalarDriver g1;
    VolatilityMap g2;
    VolatilityMap g2_inverse;
    std::optional<double> K; // certified lower-bound constant |g2| >= K*y*|z|

    CoefficientBundle coeffs;
    YDomain y_domain = YDomain::free;

    /// The conditional-expectation driver is allowed to be negative; growth
    /// audits skip the nonnegativity clause when this is set.
    bool allows_negative_driver = false;

    /// Transform provenance, oldest first. Transforms append, never rewrite.
    std::vector<std::string> lineage;

    /// Audit expectations documented by the catalog (e.g. "H1", "GA").
    std::set<std::string> assumption_tags;

    double eval(double t, double y, double z) const {
        return f(t, y, std::span<const double>(&z, 1));
    }

    DriverSpec with_lineage(std::string step) const;
};

} // namespace gbsde
