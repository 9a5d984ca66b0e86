#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gbsde/driver.hpp"
#include "gbsde/ensemble.hpp"
#include "gbsde/report.hpp"
#include "gbsde/terminal.hpp"

namespace gbsde {

// ---- driver catalog --------------------------------------------------------

/// Martingale driver: geometric family, f = 0.
DriverSpec zero_driver(double horizon = 1.0);

/// Conditional-expectation driver f = -|z|^2/2 (the value is the exponential
/// of the conditionally expected log-payoff). The only catalog entry allowed
/// to be negative; growth audits skip the nonnegativity clause for it.
DriverSpec conditional_expectation_driver(double horizon = 1.0);

/// Gamma-norm driver f = (gamma-1)/2 |z|^2, gamma >= 1. Solves to the
/// conditional gamma-moment root E[X^gamma | F_t]^(1/gamma).
DriverSpec gamma_norm_driver(double gamma, double horizon = 1.0);

/// Drift-robust gamma-norm driver f = bound*|z| + (gamma-1)/2 |z|^2.
/// Solves to the supremum of gamma-norm values over drifts |mu| <= bound.
DriverSpec robust_gamma_norm_driver(double gamma, double bound, double horizon = 1.0);

/// Star-shaped driver f(t, y) = beta(t) * ln(1 + y); increasing in y,
/// geometrically-arithmetically convex, not positively homogeneous.
DriverSpec log_star_driver(TimeFunction beta, double horizon = 1.0);

/// Scale factor c with beta(t) y ln(1+y) <= c * beta(t) * max(2 ln 2, y ln y)
/// for all y > 0; equality at y = 2. Used when feeding the log_star driver's
/// beta into the a-priori bound machinery.
double log_star_bound_scale();

struct CatalogEntry {
    std::string name;
    std::string params_doc;
    std::string family;
    std::vector<std::string> assumptions; // audits the entry is documented to pass
    std::string summary;
};

std::vector<CatalogEntry> catalog();

/// Construct a catalog driver from its name and JSON parameters; numeric
/// parameters may be JSON numbers or decimal strings. Throws on unknown
/// names or invalid parameters.
DriverSpec catalog_get(const std::string& name, const nlohmann::json& params,
                       double horizon = 1.0);

/// Inline driver from a sum of term forms, for configs and planted audit
/// counterexamples. Forms: const, y, y_sq, y_log1p (y*ln(1+y)), log1p_y
/// (ln(1+y)), sqrt_y, abs_z, z_sq, z_sq_over_y.
DriverSpec inline_driver(DriverFamily family, const nlohmann::json& terms, double horizon = 1.0);

// ---- structural audits ------------------------------------------------------

/// Sampling window for audits. y is sampled log-uniformly, z uniformly,
/// t uniformly; points come from a Halton sequence so audits are
/// deterministic.
struct GrowthWindow {
    double t_max = 1.0;
    double y_min = 0.1, y_max = 10.0;
    double z_abs = 5.0;
    int samples = 4096;
};

/// Checks a growth assumption by sampling. Supported ids:
///   "nonneg"  driver >= 0 (skipped for the exempt entry),
///   "H1"      0 <= g <= alpha y + beta y |ln y| + delta z^2/y   (LN-Q form),
///   "H1'"     H1 plus gamma(t)|z|,
///   "H1''"    H1 plus eta . z (signed),
///   "A"       |g| <= alpha y + beta y |ln y| + gamma(t) z + delta z^2/y,
///   "A'"      0 <= g <= alpha y + beta y |ln y| + delta y z^2,
///   "G1"      growth of the y-driver of a two-driver pair after reduction,
///   "G2"      invertibility of g2 plus |g2| >= K y |z| with certified K,
///   "increasing_y"  monotone nondecreasing in y on sampled ordered pairs.
/// Geometric drivers are reduced to LN-Q form first. Reports never throw on
/// violations; they carry witnesses.
AssumptionAudit validate_growth(const DriverSpec& driver, const std::string& assumption_id,
                                const GrowthWindow& window = {});

/// Convexity audit. Modes: "joint" (midpoint and lambda-convexity in (y,z)),
/// "GA" (geometric mixing in y, arithmetic in z), "perspective" (joint
/// convexity of the reduced (y, v) map of the two-driver form).
/// Lambda grid {0.25, 0.5, 0.75} plus 100 Halton lambdas.
AssumptionAudit check_convexity(const DriverSpec& driver, const std::string& mode,
                                const GrowthWindow& window = {});

/// Moment diagnostic: estimates E[X^q] with q = p (2 delta + 1)(e^B + 1) on
/// the ensemble's terminal states. The finiteness verdict comes from a
/// log-domain mean-excess tail diagnostic (a flat excess profile with index
/// below q indicates a divergent moment); the raw estimate and its standard
/// error are reported, flagged unreliable when the error bar spans an order
/// of magnitude.
AssumptionAudit moment_report(const TerminalCondition& terminal, const CoefficientBundle& bundle,
                              double p, double delta, const PathEnsemble& ensemble);

} // namespace gbsde
