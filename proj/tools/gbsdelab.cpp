#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "gbsde/catalog.hpp"
#include "gbsde/experiment.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path, std::string out_dir, bool strict_flag) {
    gbsde::ExperimentConfig config;
    try {
        config = gbsde::ExperimentConfig::load(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    const bool strict = strict_flag || (config.raw.contains("strict") &&
                                        config.raw.at("strict").is_boolean() &&
                                        config.raw.at("strict").get<bool>());
    if (out_dir.empty()) {
        if (config.raw.contains("output_dir") && config.raw.at("output_dir").is_string())
            out_dir = config.raw.at("output_dir").get<std::string>();
        else if (const char* root = std::getenv("GBSDE_OUTPUT_ROOT"))
            out_dir = (fs::path(root) / config.label).string();
        else
            out_dir = (fs::path("runs") / config.label).string();
    }

    gbsde::RunOutcome outcome;
    try {
        outcome = gbsde::run_experiment(config, out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s: %s\n", config.label.c_str(), e.what());
        return 3;
    }

    std::printf("%s (%s) -> %s\n", config.label.c_str(), config.config_hash.c_str(),
                out_dir.c_str());
    for (const fs::path& p : outcome.outputs) std::printf("  wrote %s\n", p.string().c_str());
    if (!outcome.solves_converged) std::printf("  solver did not converge\n");
    if (outcome.audits_failed)
        std::printf("  audits failed%s\n", strict ? " (strict: nonzero exit)" : " (data, not exit)");
    return outcome.solves_converged && !(strict && outcome.audits_failed) ? 0 : 1;
}

int cmd_catalog() {
    std::printf("%-18s %-10s %-34s %s\n", "name", "family", "parameters", "documented audits");
    for (const gbsde::CatalogEntry& entry : gbsde::catalog()) {
        std::string tags;
        for (const std::string& t : entry.assumptions) {
            if (!tags.empty()) tags += ", ";
            tags += t;
        }
        std::printf("%-18s %-10s %-34s %s\n", entry.name.c_str(), entry.family.c_str(),
                    entry.params_doc.c_str(), tags.c_str());
        std::printf("%-18s %s\n", "", entry.summary.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for geometric and two-driver backward equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool strict = false;
    CLI::App* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "JSON experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--out", out_dir,
                    "output directory (default: config output_dir, then "
                    "$GBSDE_OUTPUT_ROOT/<label>, then ./runs/<label>)");
    run->add_flag("--strict", strict, "audit failures make the exit status nonzero");

    CLI::App* cat = app.add_subcommand("catalog", "list catalog drivers with assumption tags");
    CLI::App* schema = app.add_subcommand("schema", "print the config grammar and output schema");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, out_dir, strict);
    if (cat->parsed()) return cmd_catalog();
    if (schema->parsed()) {
        std::fputs(gbsde::schema_text().c_str(), stdout);
        return 0;
    }
    return 0;
}
