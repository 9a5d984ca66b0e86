#include "gbsde/catalog.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gbsde {

namespace {

double z_norm_sq(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

DriverSpec geometric_base(std::string name, CoefficientBundle coeffs) {
    DriverSpec spec;
    spec.family = DriverFamily::geometric;
    spec.name = std::move(name);
    spec.coeffs = std::move(coeffs);
    spec.y_domain = YDomain::positive;
    return spec;
}

} // namespace

DriverSpec zero_driver(double horizon) {
    DriverSpec spec = geometric_base("zero", CoefficientBundle::zero(horizon));
    spec.f = [](double, double, std::span<const double>) { return 0.0; };
    spec.assumption_tags = {"nonneg", "H1", "GA", "joint"};
    return spec;
}

DriverSpec conditional_expectation_driver(double horizon) {
    DriverSpec spec =
        geometric_base("geom_cond_exp", CoefficientBundle::constants(0, 0, 0, 0.5, horizon));
    spec.f = [](double, double, std::span<const double> z) { return -0.5 * z_norm_sq(z); };
    spec.allows_negative_driver = true;
    spec.assumption_tags = {"A", "GA"};
    return spec;
}

DriverSpec gamma_norm_driver(double gamma, double horizon) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("gamma_norm: gamma must be >= 1");
    DriverSpec spec = geometric_base(
        "gamma_norm", CoefficientBundle::constants(0, 0, 0, 0.5 * (gamma - 1.0), horizon));
    const double half = 0.5 * (gamma - 1.0);
    spec.f = [half](double, double, std::span<const double> z) { return half * z_norm_sq(z); };
    spec.assumption_tags = {"nonneg", "H1", "perspective"};
    return spec;
}

DriverSpec robust_gamma_norm_driver(double gamma, double bound, double horizon) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("robust_gamma_norm: gamma must be >= 1");
    if (!(bound >= 0.0)) throw std::invalid_argument("robust_gamma_norm: bound must be >= 0");
    DriverSpec spec = geometric_base(
        "robust_gamma_norm",
        CoefficientBundle::constants(0, 0, bound, 0.5 * (gamma - 1.0), horizon));
    const double half = 0.5 * (gamma - 1.0);
    spec.f = [half, bound](double, double, std::span<const double> z) {
        const double nsq = z_norm_sq(z);
        return bound * std::sqrt(nsq) + half * nsq;
    };
    spec.assumption_tags = {"nonneg", "H1'"};
    return spec;
}

DriverSpec log_star_driver(TimeFunction beta, double horizon) {
    // ln(1+y) <= ln 2 + |ln y| for every y > 0 (tight at y = 1), so the
    // reduced form y ln(1+y) is covered by alpha = beta ln 2 with the same
    // beta.
    static const double ln2 = std::log(2.0);
    CoefficientBundle coeffs = CoefficientBundle::make(beta.scaled(ln2), beta,
                                                       TimeFunction::constant(0.0), 0.0, horizon);
    DriverSpec spec = geometric_base("log_star", std::move(coeffs));
    spec.f = [beta](double t, double y, std::span<const double>) {
        return beta(t) * std::log1p(y);
    };
    spec.assumption_tags = {"nonneg", "H1", "GA", "increasing_y"};
    return spec;
}

double log_star_bound_scale() { return std::log(3.0) / std::log(2.0); }

std::vector<CatalogEntry> catalog() {
    return {
        {"zero", "none", "geometric", {"nonneg", "H1", "GA", "joint"},
         "martingale driver; the value is the conditional expectation"},
        {"geom_cond_exp", "none", "geometric", {"A", "GA"},
         "f = -|z|^2/2; exponential of the conditionally expected log-payoff; "
         "GA-convex with equality; exempt from the nonnegativity audit"},
        {"gamma_norm", "gamma >= 1", "geometric", {"nonneg", "H1", "perspective"},
         "f = (gamma-1)/2 |z|^2; conditional gamma-moment root"},
        {"robust_gamma_norm", "gamma >= 1, bound >= 0", "geometric", {"nonneg", "H1'"},
         "f = bound |z| + (gamma-1)/2 |z|^2; drift-robust gamma-norm"},
        {"log_star", "beta >= 0 (constant or piecewise)", "geometric",
         {"nonneg", "H1", "GA", "increasing_y"},
         "f = beta(t) ln(1+y); star-shaped, increasing in y, GA-convex"},
    };
}

namespace {

double number_param(const nlohmann::json& params, const char* key) {
    if (!params.contains(key)) {
        throw std::invalid_argument(std::string("catalog_get: missing parameter '") + key + "'");
    }
    const auto& v = params.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::size_t used = 0;
        const std::string s = v.get<std::string>();
        const double parsed = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(std::string("catalog_get: parameter '") + key +
                                        "' is not a decimal number");
        }
        return parsed;
    }
    throw std::invalid_argument(std::string("catalog_get: parameter '") + key +
                                "' must be a number or decimal string");
}

TimeFunction time_function_param(const nlohmann::json& params, const char* key) {
    if (!params.contains(key)) {
        throw std::invalid_argument(std::string("catalog_get: missing parameter '") + key + "'");
    }
    const auto& v = params.at(key);
    if (v.is_object() && v.contains("knots") && v.contains("values")) {
        return TimeFunction::piecewise(v.at("knots").get<std::vector<double>>(),
                                       v.at("values").get<std::vector<double>>());
    }
    return TimeFunction::constant(number_param(params, key));
}

} // namespace

DriverSpec catalog_get(const std::string& name, const nlohmann::json& params, double horizon) {
    if (name == "zero") return zero_driver(horizon);
    if (name == "geom_cond_exp") return conditional_expectation_driver(horizon);
    if (name == "gamma_norm") return gamma_norm_driver(number_param(params, "gamma"), horizon);
    if (name == "robust_gamma_norm") {
        return robust_gamma_norm_driver(number_param(params, "gamma"),
                                        number_param(params, "bound"), horizon);
    }
    if (name == "log_star") return log_star_driver(time_function_param(params, "beta"), horizon);
    if (name == "custom") {
        if (!params.contains("family") || !params.contains("terms")) {
            throw std::invalid_argument("catalog_get: custom driver needs 'family' and 'terms'");
        }
        const std::string fam = params.at("family").get<std::string>();
        DriverFamily family;
        if (fam == "ordinary") family = DriverFamily::ordinary;
        else if (fam == "lnq") family = DriverFamily::lnq;
        else if (fam == "geometric") family = DriverFamily::geometric;
        else throw std::invalid_argument("catalog_get: custom family must be ordinary|lnq|geometric");
        return inline_driver(family, params.at("terms"), horizon);
    }
    throw std::invalid_argument("catalog_get: unknown driver '" + name + "'");
}

namespace {

enum class TermForm { constant, y, y_sq, y_log1p, log1p_y, sqrt_y, abs_z, z_sq, z_sq_over_y };

TermForm term_form(const std::string& key) {
    if (key == "const") return TermForm::constant;
    if (key == "y") return TermForm::y;
    if (key == "y_sq") return TermForm::y_sq;
    if (key == "y_log1p") return TermForm::y_log1p;
    if (key == "log1p_y") return TermForm::log1p_y;
    if (key == "sqrt_y") return TermForm::sqrt_y;
    if (key == "abs_z") return TermForm::abs_z;
    if (key == "z_sq") return TermForm::z_sq;
    if (key == "z_sq_over_y") return TermForm::z_sq_over_y;
    throw std::invalid_argument("inline_driver: unknown term form '" + key + "'");
}

double term_value(TermForm form, double y, std::span<const double> z) {
    switch (form) {
        case TermForm::constant: return 1.0;
        case TermForm::y: return y;
        case TermForm::y_sq: return y * y;
        case TermForm::y_log1p: return y * std::log1p(y);
        case TermForm::log1p_y: return std::log1p(y);
        case TermForm::sqrt_y: return std::sqrt(y);
        case TermForm::abs_z: return std::sqrt(z_norm_sq(z));
        case TermForm::z_sq: return z_norm_sq(z);
        case TermForm::z_sq_over_y: return z_norm_sq(z) / y;
    }
    return 0.0;
}

} // namespace

DriverSpec inline_driver(DriverFamily family, const nlohmann::json& terms, double horizon) {
    if (family == DriverFamily::two_driver) {
        throw std::invalid_argument("inline_driver: two-driver pairs cannot be inlined");
    }
    if (!terms.is_object() || terms.empty()) {
        throw std::invalid_argument("inline_driver: terms must be a non-empty object");
    }

    std::vector<std::pair<TermForm, double>> parsed;
    std::string label;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    static const double ln2 = std::log(2.0);
    for (const auto& [key, value] : terms.items()) {
        const TermForm form = term_form(key);
        const double coef = value.is_string() ? std::stod(value.get<std::string>())
                                              : value.get<double>();
        parsed.emplace_back(form, coef);
        if (!label.empty()) label += ",";
        label += key;
        // Bundle gets only the exactly-representable contributions; forms the
        // growth frame cannot express (const, y_sq, sqrt_y at small y) add
        // nothing, so the growth audit fails honestly for them.
        const double c = std::abs(coef);
        switch (form) {
            case TermForm::y: alpha += c; break;
            case TermForm::y_log1p: alpha += c * ln2; beta += c; break;
            case TermForm::log1p_y: alpha += c; break; // ln(1+y) <= y
            case TermForm::abs_z: gamma += c; break;
            case TermForm::z_sq:
            case TermForm::z_sq_over_y: delta += c; break;
            default: break;
        }
    }

    DriverSpec spec;
    spec.family = family;
    spec.name = "inline(" + label + ")";
    spec.coeffs = CoefficientBundle::constants(alpha, beta, gamma, delta, horizon);
    spec.y_domain = family == DriverFamily::ordinary ? YDomain::free : YDomain::positive;
    spec.f = [parsed](double, double y, std::span<const double> z) {
        double s = 0.0;
        for (const auto& [form, coef] : parsed) s += coef * term_value(form, y, z);
        return s;
    };
    return spec;
}

} // namespace gbsde
