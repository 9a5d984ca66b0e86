#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace gbsde {

/// FNV-1a 64-bit hash, printed as 16 hex digits. Applied to the exact config
/// bytes so reruns of the same file carry the same hash.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string hash_hex(std::uint64_t h);

/// Parsed experiment configuration. Numeric leaves may be JSON numbers or
/// decimal strings; strings are preferred where bit-exactness matters.
struct ExperimentConfig {
    std::string experiment; // solve | convergence | oracle-compare | audit-driver |
                            // audit-axioms | lebesgue
    std::string label;
    nlohmann::json raw;
    std::string config_hash;

    static ExperimentConfig load(const std::filesystem::path& file);
    static ExperimentConfig from_json(nlohmann::json j, std::string hash);
};

struct RunOutcome {
    bool solves_converged = true;
    bool audits_failed = false;
    std::vector<std::filesystem::path> outputs;
};

/// Runs one experiment, writing CSV outputs (header line "# schema=1", then
/// "# config=<hash>") plus a .meta.json sidecar per output and a
/// run_manifest.json. CSV bytes are deterministic: a rerun of the same
/// config into a fresh directory produces byte-identical CSV files.
RunOutcome run_experiment(const ExperimentConfig& config,
                          const std::filesystem::path& out_dir);

/// Human-readable description of the config grammar and output schema.
std::string schema_text();

} // namespace gbsde
