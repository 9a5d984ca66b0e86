#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace gbsde {

/// A sampled counterexample: where a checked inequality failed and by how
/// much. margin < 0 means violation.
struct Witness {
    double t = 0.0;
    double y = 0.0;
    double z = 0.0;
    double margin = 0.0;
    std::string what;
};

struct PropertyReport {
    std::string id;
    bool passed = true;
    double worst_margin = 0.0; // most negative margin seen; >= 0 when passed
    std::vector<Witness> witnesses;
    std::string notes;

    nlohmann::json to_json() const;
};

/// Growth / structural assumption audit for a driver. Verdict states:
/// passed, failed (witnessed), inconclusive (heavy-tail estimates), or
/// skipped (documented exemption, reason in notes).
struct AssumptionAudit {
    std::string assumption_id;
    std::string driver_name;
    bool passed = true;
    bool skipped = false;
    bool inconclusive = false;
    double worst_margin = 0.0;
    std::vector<Witness> witnesses;
    std::string notes;
    nlohmann::json details;

    std::string verdict() const {
        return skipped ? "skipped" : inconclusive ? "inconclusive" : passed ? "pass" : "fail";
    }
    nlohmann::json to_json() const;
};

/// Axiom audit over an instance set.
struct AxiomReport {
    std::string axiom;
    std::string driver_name;
    int instances = 0;
    int violations = 0;
    double worst_margin = 0.0;
    double slack = 0.0;
    std::vector<Witness> witnesses;
    std::string notes;

    bool passed() const { return violations == 0; }
    nlohmann::json to_json() const;
};

nlohmann::json to_json(const Witness& w);

} // namespace gbsde
