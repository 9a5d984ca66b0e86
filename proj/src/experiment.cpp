#include "gbsde/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbsde/catalog.hpp"
#include "gbsde/ensemble.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/risk_measure.hpp"
#include "gbsde/solver.hpp"
#include "gbsde/terminal.hpp"
#include "gbsde/transforms.hpp"

namespace gbsde {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
    throw std::invalid_argument("config: " + what);
}

// Numeric leaves may be JSON numbers or decimal strings (the latter keep the
// config byte-exact for seeds and tolerances).
double as_number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string& s = v.get_ref<const std::string&>();
        std::size_t used = 0;
        double parsed = 0.0;
        try {
            parsed = std::stod(s, &used);
        } catch (const std::exception&) {
            config_error(where + ": '" + s + "' is not a number");
        }
        if (used != s.size()) config_error(where + ": '" + s + "' is not a number");
        return parsed;
    }
    config_error(where + ": expected a number or decimal string");
}

double number_field(const json& obj, const std::string& key, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        config_error("missing numeric field '" + key + "'");
    }
    return as_number(obj.at(key), "field '" + key + "'");
}

int int_field(const json& obj, const std::string& key, std::optional<int> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        config_error("missing integer field '" + key + "'");
    }
    const double v = as_number(obj.at(key), "field '" + key + "'");
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) config_error("field '" + key + "' must be an integer");
    return i;
}

std::uint64_t seed_field(const json& obj, const std::string& key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_string()) {
        try {
            return std::stoull(v.get_ref<const std::string&>());
        } catch (const std::exception&) {
            config_error("field '" + key + "' is not a seed");
        }
    }
    config_error("field '" + key + "' must be an unsigned integer or decimal string");
}

bool bool_field(const json& obj, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) config_error("field '" + key + "' must be a boolean");
    return obj.at(key).get<bool>();
}

const json& object_field(const json& obj, const std::string& key) {
    if (!obj.contains(key)) config_error("missing object field '" + key + "'");
    if (!obj.at(key).is_object()) config_error("field '" + key + "' must be an object");
    return obj.at(key);
}

TerminalCondition parse_terminal(const json& t) {
    if (!t.is_object() || !t.contains("form") || !t.at("form").is_string())
        config_error("terminal: expected an object with a 'form' string");
    const std::string form = t.at("form").get<std::string>();
    if (form == "exp_wT") return TerminalCondition::exp_of_state(number_field(t, "sigma"));
    if (form == "power_wT")
        return TerminalCondition::power_of_state(number_field(t, "p"),
                                                 number_field(t, "scale", 1.0));
    if (form == "const") return TerminalCondition::constant_payoff(number_field(t, "value"));
    if (form == "affine")
        return parse_terminal(object_field(t, "of"))
            .affine(number_field(t, "a"), number_field(t, "b"));
    if (form == "clamp")
        return parse_terminal(object_field(t, "of"))
            .clamp(number_field(t, "lo"), number_field(t, "hi"));
    config_error("terminal: unknown form '" + form +
                 "' (expected exp_wT, power_wT, affine, clamp, const)");
}

TerminalCondition terminal_field(const json& cfg) {
    if (!cfg.contains("terminal")) config_error("missing 'terminal'");
    return parse_terminal(cfg.at("terminal"));
}

DriverSpec parse_driver(const json& cfg) {
    if (!cfg.contains("driver")) config_error("missing 'driver'");
    const json& d = cfg.at("driver");
    if (d.is_string()) return catalog_get(d.get<std::string>(), json::object());
    if (d.is_object()) {
        if (!d.contains("name") || !d.at("name").is_string())
            config_error("driver: expected a 'name' string");
        return catalog_get(d.at("name").get<std::string>(),
                           d.contains("params") ? d.at("params") : json::object());
    }
    config_error("driver: expected a catalog name or an object {name, params}");
}

SolverConfig parse_solver(const json& cfg) {
    SolverConfig s;
    if (!cfg.contains("solver")) return s;
    const json& j = cfg.at("solver");
    if (!j.is_object()) config_error("'solver' must be an object");
    s.tolerance = number_field(j, "tolerance", s.tolerance);
    s.max_iterations = int_field(j, "max_iterations", s.max_iterations);
    s.basis_degree = int_field(j, "basis_degree", s.basis_degree);
    s.positivity_floor = number_field(j, "positivity_floor", s.positivity_floor);
    s.parallel = bool_field(j, "parallel", s.parallel);
    return s;
}

std::string method_field(const json& cfg) {
    if (!cfg.contains("solver") || !cfg.at("solver").contains("method")) return "lattice";
    const json& m = cfg.at("solver").at("method");
    if (!m.is_string()) config_error("solver.method must be a string");
    const std::string method = m.get<std::string>();
    if (method != "lattice" && method != "lsmc")
        config_error("solver.method must be 'lattice' or 'lsmc'");
    return method;
}

TimeGrid grid_field(const json& cfg) {
    const json& g = object_field(cfg, "grid");
    const double horizon = number_field(g, "horizon");
    const int steps = int_field(g, "steps");
    if (!(horizon > 0.0) || steps < 1) config_error("grid: horizon must be > 0 and steps >= 1");
    return TimeGrid::uniform(horizon, steps);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Collects the files of one run so the manifest never lists orphans.
struct RunWriter {
    const ExperimentConfig& cfg;
    fs::path dir;
    RunOutcome outcome;
    json meta_common;

    RunWriter(const ExperimentConfig& c, fs::path d) : cfg(c), dir(std::move(d)) {
        fs::create_directories(dir);
        meta_common = {{"config_hash", cfg.config_hash},
                       {"experiment", cfg.experiment},
                       {"label", cfg.label}};
    }

    void write_bytes(const fs::path& name, const std::string& bytes) {
        const fs::path full = dir / name;
        std::ofstream out(full, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write output file " + full.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) throw std::runtime_error("failed writing output file " + full.string());
        outcome.outputs.push_back(full);
    }

    void write_csv(const fs::path& name, const std::string& header, const std::string& body,
                   json meta) {
        std::string csv = "# schema=1\n# config=" + cfg.config_hash + "\n" + header + "\n" + body;
        write_bytes(name, csv);
        meta.update(meta_common);
        write_bytes(fs::path(name).concat(".meta.json"), meta.dump(2) + "\n");
    }

    void write_json(const fs::path& name, json payload) {
        payload.update(meta_common);
        write_bytes(name, payload.dump(2) + "\n");
    }
};

json residual_summary(const SolveDiagnostics& d) {
    return {{"max_fixed_point_iterations", d.max_fixed_point_iterations},
            {"max_fixed_point_residual", d.max_fixed_point_residual},
            {"converged", d.converged},
            {"positive", d.positive},
            {"max_z_square_time_integral", d.max_z_square_time_integral}};
}

void append_lattice_rows(std::string& body, const SolutionField& f, const Lattice& lattice) {
    const int n = lattice.steps();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= i; ++j) {
            body += std::to_string(i);
            body += ',';
            body += std::to_string(j);
            body += ',';
            body += fmt(lattice.state(i, j));
            body += ',';
            body += fmt(f.y_at(i, j));
            for (int k = 0; k < f.zdim; ++k) {
                body += ',';
                body += fmt(i < n ? f.z_at(i, j) : std::numeric_limits<double>::quiet_NaN());
            }
            body += '\n';
        }
    }
}

void append_ensemble_rows(std::string& body, const SolutionField& f, const PathEnsemble& paths) {
    const int n = paths.steps();
    for (int m = 0; m < paths.paths(); ++m) {
        for (int i = 0; i <= n; ++i) {
            body += std::to_string(i);
            body += ',';
            body += std::to_string(m);
            body += ',';
            body += fmt(paths.state(m, i, 0));
            body += ',';
            body += fmt(f.ensemble_y(m, i));
            for (int k = 0; k < f.zdim; ++k) {
                body += ',';
                body += fmt(i < n ? f.ensemble_z(m, i, k)
                                  : std::numeric_limits<double>::quiet_NaN());
            }
            body += '\n';
        }
    }
}

std::string field_header(const SolutionField& f) {
    std::string h = "time_index,node_or_path_index,state,y";
    for (int k = 0; k < f.zdim; ++k) h += ",z" + std::to_string(k);
    return h;
}

json lineage_json(const SolutionField& f) {
    json j = json::array();
    for (const auto& step : f.lineage) j.push_back(step);
    return j;
}

// ---- experiment kinds ---------------------------------------------------

void run_solve(RunWriter& w) {
    const json& cfg = w.cfg.raw;
    const DriverSpec driver = parse_driver(cfg);
    const TerminalCondition terminal = terminal_field(cfg);
    const SolverConfig solver = parse_solver(cfg);
    const std::string method = method_field(cfg);
    const TimeGrid grid = grid_field(cfg);
    const std::uint64_t seed = seed_field(cfg, "seed", 1);

    SolutionField field;
    std::optional<SolutionField> reduced;
    std::string body;
    if (method == "lattice") {
        const Lattice lattice = Lattice::build(grid);
        if (driver.family == DriverFamily::geometric)
            field = solve_gbsde(lattice, terminal, driver, solver);
        else if (driver.family == DriverFamily::two_driver) {
            auto two = solve_twodriver(lattice, terminal, driver, solver);
            field = std::move(two.primary);
            reduced = std::move(two.reduced);
        } else
            field = solve_lattice(lattice, terminal, driver, solver);
        append_lattice_rows(body, field, lattice);
    } else {
        const json& e = object_field(cfg, "ensemble");
        const int paths = int_field(e, "paths");
        const int dim = int_field(e, "dim", 1);
        const PathEnsemble ensemble =
            PathEnsemble::generate(grid, dim, paths, seed_field(e, "seed", seed), solver.parallel);
        if (driver.family == DriverFamily::geometric)
            field = solve_gbsde(ensemble, terminal, driver, solver);
        else if (driver.family == DriverFamily::two_driver) {
            auto two = solve_twodriver(ensemble, terminal, driver, solver);
            field = std::move(two.primary);
            reduced = std::move(two.reduced);
        } else
            field = solve_lsmc(ensemble, terminal, driver, solver);
        append_ensemble_rows(body, field, ensemble);
    }

    w.outcome.solves_converged = field.diagnostics.converged;
    json meta = {{"driver", field.driver_name},
                 {"driver_lineage", lineage_json(field)},
                 {"terminal", terminal.name()},
                 {"method", method},
                 {"seed", seed},
                 {"y0", field.y0()},
                 {"residuals", residual_summary(field.diagnostics)}};
    w.write_csv("solution.csv", field_header(field), body, meta);
    if (reduced) {
        std::string rbody;
        if (method == "lattice") {
            const Lattice lattice = Lattice::build(grid);
            append_lattice_rows(rbody, *reduced, lattice);
        }
        // Reduced ensemble fields share the primary's paths; re-exporting the
        // states would need the ensemble again, so only lattice runs export
        // the reduced coordinate.
        if (!rbody.empty()) {
            json rmeta = {{"driver", reduced->driver_name},
                          {"driver_lineage", lineage_json(*reduced)},
                          {"residuals", residual_summary(reduced->diagnostics)}};
            w.write_csv("solution_reduced.csv", field_header(*reduced), rbody, rmeta);
        }
    }
}

double oracle_params(const DriverSpec& driver, const json& params, double& bound) {
    // The dynamic-programming oracle covers the gamma-norm family; its
    // parameters are read from the driver reference so the two routes can
    // never drift apart.
    if (driver.name.rfind("gamma_norm", 0) == 0) {
        bound = 0.0;
        return number_field(params, "gamma", 1.0);
    }
    if (driver.name.rfind("robust_gamma_norm", 0) == 0) {
        bound = number_field(params, "bound");
        return number_field(params, "gamma", 1.0);
    }
    config_error("oracle routes require a gamma_norm or robust_gamma_norm driver; got '" +
                 driver.name + "'");
}

void run_convergence(RunWriter& w) {
    const json& cfg = w.cfg.raw;
    const DriverSpec driver = parse_driver(cfg);
    const TerminalCondition terminal = terminal_field(cfg);
    const SolverConfig solver = parse_solver(cfg);
    const double horizon = number_field(object_field(cfg, "grid"), "horizon");
    if (!cfg.contains("steps_list") || !cfg.at("steps_list").is_array() ||
        cfg.at("steps_list").empty())
        config_error("convergence: needs a non-empty 'steps_list' array");
    const double reference = number_field(cfg, "reference");
    std::string route = "solve";
    if (cfg.contains("route")) {
        route = cfg.at("route").get<std::string>();
        if (route != "solve" && route != "gamma_oracle")
            config_error("convergence: route must be 'solve' or 'gamma_oracle'");
    }

    double bound = 0.0;
    double gamma = 1.0;
    if (route == "gamma_oracle") {
        const json params = cfg.at("driver").is_object() && cfg.at("driver").contains("params")
                                ? cfg.at("driver").at("params")
                                : json::object();
        gamma = oracle_params(driver, params, bound);
    }
    const int drift_grid = int_field(cfg, "oracle_drift_grid", 2);

    std::string body;
    double prev_err = 0.0;
    int prev_steps = 0;
    bool converged = true;
    for (const json& sv : cfg.at("steps_list")) {
        const int steps = static_cast<int>(as_number(sv, "steps_list entry"));
        const Lattice lattice = Lattice::build(TimeGrid::uniform(horizon, steps));
        SolutionField field;
        if (route == "gamma_oracle")
            field = robust_oracle(lattice, terminal, gamma, bound, drift_grid);
        else if (driver.family == DriverFamily::geometric)
            field = solve_gbsde(lattice, terminal, driver, solver);
        else
            field = solve_lattice(lattice, terminal, driver, solver);
        converged = converged && field.diagnostics.converged;
        const double y0 = field.y0();
        const double err = std::abs(y0 - reference);
        const double order = prev_steps > 0 && err > 0.0 && prev_err > 0.0
                                 ? std::log(err / prev_err) /
                                       std::log(static_cast<double>(steps) / prev_steps)
                                 : std::numeric_limits<double>::quiet_NaN();
        body += std::to_string(steps) + ',' + fmt(y0) + ',' + fmt(err) + ',' + fmt(order) + '\n';
        prev_err = err;
        prev_steps = steps;
    }
    w.outcome.solves_converged = converged;
    json meta = {{"driver", driver.name},
                 {"terminal", terminal.name()},
                 {"route", route},
                 {"reference", reference}};
    w.write_csv("convergence.csv", "steps,y0,abs_error,observed_order", body, meta);
}

void run_oracle_compare(RunWriter& w) {
    const json& cfg = w.cfg.raw;
    const DriverSpec driver = parse_driver(cfg);
    if (driver.family != DriverFamily::geometric)
        config_error("oracle-compare: driver must be geometric");
    const TerminalCondition terminal = terminal_field(cfg);
    const SolverConfig solver = parse_solver(cfg);
    const TimeGrid grid = grid_field(cfg);
    const Lattice lattice = Lattice::build(grid);

    const json params = cfg.at("driver").is_object() && cfg.at("driver").contains("params")
                            ? cfg.at("driver").at("params")
                            : json::object();
    double bound = 0.0;
    const double gamma = oracle_params(driver, params, bound);
    const int drift_grid = int_field(cfg, "oracle_drift_grid", 2);
    const double oracle_y0 = robust_oracle(lattice, terminal, gamma, bound, drift_grid).y0();

    std::vector<std::string> routes = {"gbsde", "twodriver"};
    if (cfg.contains("routes")) {
        routes.clear();
        for (const json& r : cfg.at("routes")) routes.push_back(r.get<std::string>());
    }

    std::string body;
    bool converged = true;
    for (const std::string& route : routes) {
        SolutionField field;
        if (route == "gbsde")
            field = solve_gbsde(lattice, terminal, driver, solver);
        else if (route == "twodriver")
            field = solve_twodriver(lattice, terminal, two_driver_form(driver), solver).primary;
        else
            config_error("oracle-compare: unknown route '" + route + "'");
        converged = converged && field.diagnostics.converged;
        const double y0 = field.y0();
        const double gap = std::abs(y0 - oracle_y0) / std::abs(oracle_y0);
        body += route + ',' + std::to_string(lattice.steps()) + ',' + fmt(y0) + ',' +
                fmt(oracle_y0) + ',' + fmt(gap) + '\n';
    }
    w.outcome.solves_converged = converged;
    json meta = {{"driver", driver.name},
                 {"terminal", terminal.name()},
                 {"gamma", gamma},
                 {"bound", bound},
                 {"drift_grid", drift_grid}};
    w.write_csv("oracle_compare.csv", "route,steps,y0,oracle_y0,rel_gap", body, meta);
}

void run_audit_driver(RunWriter& w) {
    const json& cfg = w.cfg.raw;
    const DriverSpec driver = parse_driver(cfg);

    GrowthWindow window;
    if (cfg.contains("window")) {
        const json& win = cfg.at("window");
        window.t_max = number_field(win, "t_max", window.t_max);
        window.y_min = number_field(win, "y_min", window.y_min);
        window.y_max = number_field(win, "y_max", window.y_max);
        window.z_abs = number_field(win, "z_abs", window.z_abs);
        window.samples = int_field(win, "samples", window.samples);
    }

    std::vector<AssumptionAudit> audits;
    if (cfg.contains("growth"))
        for (const json& id : cfg.at("growth"))
            audits.push_back(validate_growth(driver, id.get<std::string>(), window));
    if (cfg.contains("convexity"))
        for (const json& mode : cfg.at("convexity"))
            audits.push_back(check_convexity(driver, mode.get<std::string>(), window));
    if (cfg.contains("moments")) {
        const json& m = cfg.at("moments");
        const TerminalCondition terminal = terminal_field(cfg);
        const TimeGrid grid = grid_field(cfg);
        const PathEnsemble ensemble =
            PathEnsemble::generate(grid, 1, int_field(m, "paths", 20000),
                                   seed_field(m, "seed", seed_field(cfg, "seed", 1)), true);
        audits.push_back(moment_report(terminal, driver.coeffs, number_field(m, "p", 2.0),
                                       driver.coeffs.delta, ensemble));
    }
    if (audits.empty())
        config_error("audit-driver: nothing requested (add 'growth', 'convexity', or 'moments')");

    std::string body;
    json detail = json::array();
    for (const AssumptionAudit& a : audits) {
        if (a.verdict() == "fail") w.outcome.audits_failed = true;
        body += a.assumption_id + ',' + a.driver_name + ',' + a.verdict() + ',' +
                fmt(a.worst_margin) + '\n';
        detail.push_back(a.to_json());
    }
    w.write_csv("driver_audits.csv", "assumption,driver,verdict,worst_margin", body,
                json{{"driver", driver.name}});
    w.write_json("driver_audits.json", json{{"audits", detail}});
}

void run_audit_axioms(RunWriter& w) {
    const json& cfg = w.cfg.raw;
    const DriverSpec driver = parse_driver(cfg);
    const SolverConfig solver = parse_solver(cfg);
    const Lattice lattice = Lattice::build(grid_field(cfg));
    const std::uint64_t seed = seed_field(cfg, "seed", 1);
    const int count = int_field(cfg, "instances", 12);
    if (!cfg.contains("axioms") || !cfg.at("axioms").is_array() || cfg.at("axioms").empty())
        config_error("audit-axioms: needs a non-empty 'axioms' array");

    std::string body;
    json detail = json::array();
    std::uint64_t axiom_index = 0;
    for (const json& name : cfg.at("axioms")) {
        const auto axiom = axiom_from_string(name.get<std::string>());
        if (!axiom) config_error("audit-axioms: unknown axiom '" + name.get<std::string>() + "'");
        AxiomReport report;
        if (*axiom == Axiom::lebesgue) {
            std::vector<double> levels = {2, 4, 8, 16, 32};
            if (cfg.contains("levels")) {
                levels.clear();
                for (const json& v : cfg.at("levels"))
                    levels.push_back(as_number(v, "levels entry"));
            }
            report = lebesgue_check(driver, terminal_field(cfg), levels, lattice, solver);
        } else {
            const auto instances =
                random_instances(*axiom, count, seed + 0x9E3779B97F4A7C15ULL * axiom_index);
            report = audit_axiom(driver, *axiom, instances, lattice, solver);
        }
        ++axiom_index;
        if (!report.passed()) w.outcome.audits_failed = true;
        body += report.axiom + ',' + std::to_string(report.instances) + ',' +
                std::to_string(report.violations) + ',' + fmt(report.worst_margin) + ',' +
                (report.passed() ? "true" : "false") + '\n';
        detail.push_back(report.to_json());
    }
    w.write_csv("axiom_audits.csv", "axiom,instances,violations,worst_margin,passed", body,
                json{{"driver", driver.name}, {"seed", seed}, {"instances", count}});
    w.write_json("axiom_audits.json", json{{"reports", detail}});
}

void run_lebesgue(RunWriter& w) {
    const json& cfg = w.cfg.raw;
    const DriverSpec driver = parse_driver(cfg);
    const TerminalCondition terminal = terminal_field(cfg);
    const SolverConfig solver = parse_solver(cfg);
    const Lattice lattice = Lattice::build(grid_field(cfg));

    std::vector<double> levels = {2, 4, 8, 16, 32};
    if (cfg.contains("levels")) {
        levels.clear();
        for (const json& v : cfg.at("levels")) levels.push_back(as_number(v, "levels entry"));
    }
    const AxiomReport report = lebesgue_check(driver, terminal, levels, lattice, solver);
    if (!report.passed()) w.outcome.audits_failed = true;

    const double y_full = solve_gbsde(lattice, terminal, driver, solver).y0();
    std::string body;
    for (double level : levels) {
        const double y_n =
            solve_gbsde(lattice, terminal.clamp(1.0 / level, level), driver, solver).y0();
        body += fmt(level) + ',' + fmt(y_n) + ',' + fmt(std::abs(y_n - y_full)) + '\n';
    }
    w.write_csv("lebesgue.csv", "clamp_level,y0_clamped,gap", body,
                json{{"driver", driver.name}, {"terminal", terminal.name()}, {"y0", y_full}});
    w.write_json("lebesgue.json", json{{"report", report.to_json()}});
}

} // namespace

ExperimentConfig ExperimentConfig::load(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    json parsed;
    try {
        parsed = json::parse(bytes);
    } catch (const json::parse_error& e) {
        // byte offset -> line number for a usable diagnostic
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < bytes.size(); ++i)
            if (bytes[i] == '\n') ++line;
        throw std::invalid_argument("config: " + file.string() + ":" + std::to_string(line) +
                                    ": " + e.what());
    }
    return from_json(std::move(parsed), hash_hex(fnv1a64(bytes.data(), bytes.size())));
}

ExperimentConfig ExperimentConfig::from_json(json j, std::string hash) {
    if (!j.is_object()) config_error("top level must be a JSON object");
    if (!j.contains("experiment") || !j.at("experiment").is_string())
        config_error("missing 'experiment' kind");
    ExperimentConfig cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    const bool known = cfg.experiment == "solve" || cfg.experiment == "convergence" ||
                       cfg.experiment == "oracle-compare" || cfg.experiment == "audit-driver" ||
                       cfg.experiment == "audit-axioms" || cfg.experiment == "lebesgue";
    if (!known)
        config_error("unknown experiment kind '" + cfg.experiment +
                     "' (expected solve, convergence, oracle-compare, audit-driver, "
                     "audit-axioms, or lebesgue)");
    cfg.label = j.value("label", cfg.experiment);
    cfg.config_hash = std::move(hash);
    cfg.raw = std::move(j);
    return cfg;
}

RunOutcome run_experiment(const ExperimentConfig& config, const fs::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    RunWriter writer(config, out_dir);

    if (config.experiment == "solve") run_solve(writer);
    else if (config.experiment == "convergence") run_convergence(writer);
    else if (config.experiment == "oracle-compare") run_oracle_compare(writer);
    else if (config.experiment == "audit-driver") run_audit_driver(writer);
    else if (config.experiment == "audit-axioms") run_audit_axioms(writer);
    else run_lebesgue(writer);

    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    json manifest = {{"schema", 1},
                     {"wall_time_ms", wall_ms},
                     {"solves_converged", writer.outcome.solves_converged},
                     {"audits_failed", writer.outcome.audits_failed}};
    json files = json::array();
    for (const fs::path& p : writer.outcome.outputs) files.push_back(p.filename().string());
    manifest["outputs"] = files;
    writer.write_json("run_manifest.json", manifest);
    return writer.outcome;
}

std::string schema_text() {
    return R"(experiment config (JSON object)
  experiment   one of: solve | convergence | oracle-compare | audit-driver |
               audit-axioms | lebesgue
  label        optional run name; defaults to the experiment kind
  seed         optional unsigned seed (number or decimal string); default 1
  strict       optional bool; audit failures fail the run exit status
  driver       catalog name, or {name, params}; params are numbers or decimal
               strings (see `catalog` for names and parameters)
  terminal     payoff grammar:
                 {form: exp_wT, sigma}          exp(sigma * w_T)
                 {form: power_wT, p, scale}     scale * |w_T|^p
                 {form: const, value}           constant
                 {form: affine, of, a, b}       a * inner + b
                 {form: clamp, of, lo, hi}      clamp(inner, lo, hi)
  grid         {horizon, steps}
  ensemble     {paths, dim?, seed?}     (lsmc method and moment audits)
  solver       {method: lattice|lsmc, tolerance, max_iterations, basis_degree,
                positivity_floor, parallel}

kind-specific fields
  convergence    steps_list: [N...]; reference: numeric oracle value;
                 route: solve | gamma_oracle; oracle_drift_grid (int)
  oracle-compare routes: subset of [gbsde, twodriver]; oracle_drift_grid
  audit-driver   growth: [nonneg|H1|H1'|H1''|A|A'|G1|G2|increasing_y...];
                 convexity: [joint|GA|perspective...];
                 moments: {p, paths, seed}; window: {t_max,y_min,y_max,z_abs,samples}
  audit-axioms   axioms: [monotone|pos_hom|star_shaped|mult_convex|normalized|
                 time_consistent|lebesgue|cash_additive|cash_superadditive|
                 mult_pos_hom...]; instances (int); levels (lebesgue clamps)
  lebesgue       levels: [n...] with n > 1 increasing

numeric leaves may be JSON numbers or decimal strings; strings keep seeds and
tolerances byte-exact.

outputs
  every CSV starts with `# schema=1` and `# config=<hash of config bytes>`;
  CSV bytes are deterministic for a given config. Each CSV has a .meta.json
  sidecar (driver lineage, residual summary, wall time lives only here) and
  every run writes run_manifest.json listing all artifacts.
  solve           solution.csv: time_index,node_or_path_index,state,y,z...
  convergence     convergence.csv: steps,y0,abs_error,observed_order
  oracle-compare  oracle_compare.csv: route,steps,y0,oracle_y0,rel_gap
  audit-driver    driver_audits.csv + driver_audits.json
  audit-axioms    axiom_audits.csv + axiom_audits.json
  lebesgue        lebesgue.csv: clamp_level,y0_clamped,gap (+ lebesgue.json)

exit status: 0 iff all solves converged and no hard errors; audit failures
flip the exit only when strict is set.
)";
}

} // namespace gbsde
