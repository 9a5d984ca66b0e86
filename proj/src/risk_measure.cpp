#include "gbsde/risk_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "gbsde/transforms.hpp"

namespace gbsde {

DynamicEvaluation return_from_monetary(const DynamicEvaluation& monetary) {
    if (monetary.kind != EvaluationKind::monetary)
        throw std::invalid_argument("return_from_monetary: input is already a return evaluation");
    DynamicEvaluation out;
    out.kind = EvaluationKind::return_kind;
    out.field = push_ordinary_to_gbsde(monetary.field);
    out.lineage = monetary.lineage.empty() ? "exp" : monetary.lineage + " -> exp";
    return out;
}

DynamicEvaluation monetary_from_return(const DynamicEvaluation& return_eval) {
    if (return_eval.kind != EvaluationKind::return_kind)
        throw std::invalid_argument("monetary_from_return: input is already a monetary evaluation");
    DynamicEvaluation out;
    out.kind = EvaluationKind::monetary;
    out.field = push_gbsde_to_ordinary(return_eval.field);
    out.lineage = return_eval.lineage.empty() ? "ln" : return_eval.lineage + " -> ln";
    return out;
}

const char* to_string(Axiom a) {
    switch (a) {
        case Axiom::monotone: return "monotone";
        case Axiom::pos_hom: return "pos_hom";
        case Axiom::star_shaped: return "star_shaped";
        case Axiom::mult_convex: return "mult_convex";
        case Axiom::normalized: return "normalized";
        case Axiom::time_consistent: return "time_consistent";
        case Axiom::lebesgue: return "lebesgue";
        case Axiom::cash_additive: return "cash_additive";
        case Axiom::cash_superadditive: return "cash_superadditive";
        case Axiom::mult_pos_hom: return "mult_pos_hom";
    }
    return "unknown";
}

std::optional<Axiom> axiom_from_string(const std::string& s) {
    for (Axiom a : {Axiom::monotone, Axiom::pos_hom, Axiom::star_shaped, Axiom::mult_convex,
                    Axiom::normalized, Axiom::time_consistent, Axiom::lebesgue,
                    Axiom::cash_additive, Axiom::cash_superadditive, Axiom::mult_pos_hom}) {
        if (s == to_string(a)) return a;
    }
    return std::nullopt;
}

namespace {

double scalar_of(const AxiomInstance& inst, const char* axiom) {
    if (inst.scalars.empty())
        throw std::invalid_argument(std::string("audit_axiom: ") + axiom +
                                    " instances need one scalar");
    return inst.scalars.front();
}

const TerminalCondition& pair_of(const AxiomInstance& inst, const char* axiom) {
    if (!inst.X2)
        throw std::invalid_argument(std::string("audit_axiom: ") + axiom +
                                    " instances need a payoff pair");
    return *inst.X2;
}

TerminalCondition log_of(const TerminalCondition& x) {
    if (x.positivity() != Positivity::strictly_positive)
        throw std::invalid_argument("audit_axiom: payoff '" + x.name() +
                                    "' is not strictly positive, its log evaluation is undefined");
    return TerminalCondition::make(
        "ln(" + x.name() + ")", x.dim(),
        [x](std::span<const double> w) {
            const double v = x(w);
            if (!(v > 0.0))
                throw std::domain_error("audit_axiom: payoff sample is not positive");
            return std::log(v);
        },
        Positivity::unrestricted, -std::numeric_limits<double>::infinity(), x.moment_order());
}

} // namespace

std::vector<AxiomInstance> random_instances(Axiom axiom, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    // a * exp(sigma w) + b: strictly positive, log-Lipschitz with constant
    // |sigma| <= 1.2 so lattice values stay in a numerically friendly range.
    const auto payoff = [&] {
        const double a = 0.5 * std::pow(4.0, u01());
        const double sigma = (u01() < 0.5 ? -1.0 : 1.0) * (0.2 + u01());
        const double b = 0.5 * u01();
        return TerminalCondition::exp_of_state(sigma).affine(a, b);
    };

    std::vector<AxiomInstance> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        AxiomInstance inst;
        switch (axiom) {
            case Axiom::monotone:
                inst.X = payoff();
                inst.X2 = TerminalCondition::sum(inst.X, payoff());
                break;
            case Axiom::pos_hom:
                inst.X = payoff();
                inst.scalars = {0.25 * std::pow(16.0, u01())};
                break;
            case Axiom::star_shaped:
                inst.X = payoff();
                inst.scalars = {0.1 + 0.9 * u01()};
                break;
            case Axiom::mult_convex:
                inst.X = payoff();
                inst.X2 = payoff();
                inst.scalars = {0.1 + 0.8 * u01()};
                break;
            case Axiom::normalized:
                inst.X = TerminalCondition::constant_payoff(1.0);
                break;
            case Axiom::time_consistent:
            case Axiom::lebesgue:
                inst.X = payoff();
                break;
            case Axiom::cash_additive:
                inst.X = payoff();
                inst.scalars = {2.0 * u01() - 1.0};
                break;
            case Axiom::cash_superadditive:
                inst.X = payoff();
                inst.scalars = {u01()};
                break;
            case Axiom::mult_pos_hom:
                inst.X = payoff();
                inst.scalars = {0.4 + 1.8 * u01()};
                break;
        }
        out.push_back(std::move(inst));
    }
    return out;
}

AxiomReport audit_axiom(const DriverSpec& geometric, Axiom axiom,
                        const std::vector<AxiomInstance>& instances, const Lattice& lattice,
                        const SolverConfig& config) {
    if (geometric.family != DriverFamily::geometric)
        throw std::invalid_argument(std::string("audit_axiom: driver must be geometric; got ") +
                                    to_string(geometric.family));
    if (axiom == Axiom::lebesgue)
        throw std::invalid_argument(
            "audit_axiom: the Lebesgue property is a limit statement; use lebesgue_check");

    const DriverSpec ord = gbsde_to_ordinary(geometric);
    const int n = lattice.steps();

    AxiomReport report;
    report.axiom = to_string(axiom);
    report.driver_name = geometric.name;
    report.instances = static_cast<int>(instances.size());
    const bool exact = axiom == Axiom::normalized || axiom == Axiom::time_consistent;
    report.slack = exact ? 0.0 : 10.0 * config.tolerance;
    report.worst_margin = std::numeric_limits<double>::infinity();
    report.notes = "margins taken in the log domain (relative for the return evaluation); "
                   "checked at every lattice node";

    const auto solve_log = [&](const TerminalCondition& x) {
        return solve_lattice(lattice, log_of(x), ord, config);
    };

    for (std::size_t idx = 0; idx < instances.size(); ++idx) {
        const AxiomInstance& inst = instances[idx];
        bool violated = false;
        const auto record = [&](int level, int j, double value, double margin, const char* what) {
            report.worst_margin = std::min(report.worst_margin, margin);
            if (margin < -report.slack) {
                violated = true;
                if (report.witnesses.size() < 8)
                    report.witnesses.push_back(Witness{lattice.grid().t(level), value,
                                                       lattice.state(level, j), margin, what});
            }
        };
        const auto nodewise = [&](const auto& margin_at, const char* what) {
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= i; ++j) record(i, j, margin_at(i, j).first,
                                                    margin_at(i, j).second, what);
        };

        switch (axiom) {
            case Axiom::monotone: {
                const auto f1 = solve_log(inst.X);
                const auto f2 = solve_log(pair_of(inst, "monotone"));
                nodewise(
                    [&](int i, int j) {
                        return std::pair(f1.y_at(i, j), f2.y_at(i, j) - f1.y_at(i, j));
                    },
                    "larger payoff evaluated lower");
                break;
            }
            case Axiom::pos_hom: {
                const double xi = scalar_of(inst, "pos_hom");
                if (!(xi > 0.0))
                    throw std::invalid_argument("audit_axiom: pos_hom scaling must be positive");
                const auto s = solve_log(inst.X);
                const auto v = solve_log(inst.X.scaled(xi));
                const double lxi = std::log(xi);
                nodewise(
                    [&](int i, int j) {
                        return std::pair(v.y_at(i, j),
                                         -std::abs(v.y_at(i, j) - s.y_at(i, j) - lxi));
                    },
                    "deterministic scaling breaks positive homogeneity");

                // Node-measurable scaling at an interior time: the scaled
                // subtree value must match the scaled slice value (flow
                // property plus homogeneity).
                const int k = std::max(1, n / 2);
                const Lattice sub = Lattice::build(lattice.grid().tail_from(k));
                for (int j = 0; j <= k; ++j) {
                    const double wkj = lattice.state(k, j);
                    const double xij = xi * (0.75 + 0.25 * std::tanh(wkj));
                    const TerminalCondition shifted = TerminalCondition::make(
                        "node-scaled " + inst.X.name(), 1,
                        [x = inst.X, wkj, xij](std::span<const double> w) {
                            const double ws = w[0] + wkj;
                            return xij * x(std::span<const double>(&ws, 1));
                        },
                        Positivity::strictly_positive);
                    const auto vk = solve_lattice(sub, log_of(shifted), ord, config);
                    const double margin =
                        -std::abs(vk.y0() - std::log(xij) - s.y_at(k, j));
                    record(k, j, vk.y0(), margin,
                           "node-measurable scaling breaks the flow/homogeneity identity");
                }
                break;
            }
            case Axiom::star_shaped: {
                const double eta = scalar_of(inst, "star_shaped");
                if (!(eta > 0.0) || eta > 1.0)
                    throw std::invalid_argument(
                        "audit_axiom: star_shaped scaling must lie in (0, 1]");
                const auto s = solve_log(inst.X);
                const auto v = solve_log(inst.X.scaled(eta));
                const double leta = std::log(eta);
                nodewise(
                    [&](int i, int j) {
                        return std::pair(v.y_at(i, j), s.y_at(i, j) + leta - v.y_at(i, j));
                    },
                    "down-scaled payoff evaluated above the scaled evaluation");
                break;
            }
            case Axiom::mult_convex: {
                const double lambda = scalar_of(inst, "mult_convex");
                if (!(lambda > 0.0) || !(lambda < 1.0))
                    throw std::invalid_argument(
                        "audit_axiom: mult_convex weight must lie in (0, 1)");
                const TerminalCondition& x2 = pair_of(inst, "mult_convex");
                const auto f1 = solve_log(inst.X);
                const auto f2 = solve_log(x2);
                const auto fm = solve_log(TerminalCondition::geometric_mix(inst.X, x2, lambda));
                nodewise(
                    [&](int i, int j) {
                        return std::pair(fm.y_at(i, j),
                                         lambda * f1.y_at(i, j) + (1.0 - lambda) * f2.y_at(i, j) -
                                             fm.y_at(i, j));
                    },
                    "geometric mix evaluated above the multiplicative hull");
                break;
            }
            case Axiom::normalized: {
                const auto f = solve_log(TerminalCondition::constant_payoff(1.0));
                nodewise(
                    [&](int i, int j) {
                        return std::pair(f.y_at(i, j), -std::abs(f.y_at(i, j)));
                    },
                    "unit payoff does not evaluate to one");
                break;
            }
            case Axiom::time_consistent: {
                const auto full = solve_log(inst.X);
                const int k = 1 + static_cast<int>(idx) % std::max(1, n - 1);
                const auto restart =
                    solve_lattice_from_slice(lattice, k, full.y_levels[static_cast<std::size_t>(k)],
                                             ord, config);
                for (int i = 0; i <= k; ++i)
                    for (int j = 0; j <= i; ++j)
                        record(i, j, restart.y_at(i, j),
                               -std::abs(restart.y_at(i, j) - full.y_at(i, j)),
                               "restart from an interior slice deviates from the flow identity");
                break;
            }
            case Axiom::cash_additive:
            case Axiom::cash_superadditive: {
                const double m = scalar_of(inst, report.axiom.c_str());
                if (axiom == Axiom::cash_superadditive && m < 0.0)
                    throw std::invalid_argument(
                        "audit_axiom: cash_superadditive shifts must be nonnegative");
                const auto s = solve_log(inst.X);
                const auto v = solve_log(inst.X.scaled(std::exp(m)));
                nodewise(
                    [&](int i, int j) {
                        const double gap = v.y_at(i, j) - s.y_at(i, j) - m;
                        return std::pair(v.y_at(i, j),
                                         axiom == Axiom::cash_additive ? -std::abs(gap) : gap);
                    },
                    axiom == Axiom::cash_additive
                        ? "cash shift is not additive for the monetary evaluation"
                        : "cash shift gained less than its face value");
                break;
            }
            case Axiom::mult_pos_hom: {
                const double eta = scalar_of(inst, "mult_pos_hom");
                if (!(eta > 0.0))
                    throw std::invalid_argument("audit_axiom: mult_pos_hom power must be positive");
                const auto s = solve_log(inst.X);
                const auto v = solve_log(inst.X.powered(eta));
                nodewise(
                    [&](int i, int j) {
                        return std::pair(v.y_at(i, j),
                                         -std::abs(v.y_at(i, j) - eta * s.y_at(i, j)));
                    },
                    "powered payoff breaks multiplicative positive homogeneity");
                break;
            }
            case Axiom::lebesgue: break; // rejected above
        }
        if (violated) ++report.violations;
    }
    if (instances.empty()) report.worst_margin = 0.0;
    return report;
}

AxiomReport lebesgue_check(const DriverSpec& geometric, const TerminalCondition& terminal,
                           const std::vector<double>& levels, const Lattice& lattice,
                           const SolverConfig& config) {
    if (geometric.family != DriverFamily::geometric)
        throw std::invalid_argument(std::string("lebesgue_check: driver must be geometric; got ") +
                                    to_string(geometric.family));
    if (levels.size() < 2)
        throw std::invalid_argument("lebesgue_check: need at least two clamp levels");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (!(levels[k] > 1.0))
            throw std::invalid_argument("lebesgue_check: clamp levels must exceed 1");
        if (k > 0 && !(levels[k] > levels[k - 1]))
            throw std::invalid_argument("lebesgue_check: clamp levels must be strictly increasing");
    }

    const double y_full = solve_gbsde(lattice, terminal, geometric, config).y0();
    std::vector<double> gaps;
    gaps.reserve(levels.size());
    for (double level : levels) {
        const double y_n =
            solve_gbsde(lattice, terminal.clamp(1.0 / level, level), geometric, config).y0();
        gaps.push_back(std::abs(y_n - y_full));
    }

    AxiomReport report;
    report.axiom = "lebesgue";
    report.driver_name = geometric.name;
    report.instances = static_cast<int>(levels.size());
    report.slack = 10.0 * config.tolerance;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < levels.size(); ++k) {
        const double margin = gaps[k - 1] - gaps[k];
        report.worst_margin = std::min(report.worst_margin, margin);
        if (margin < -report.slack) {
            ++report.violations;
            if (report.witnesses.size() < 8) {
                char what[96];
                std::snprintf(what, sizeof what, "clamp gap grew from level %g to level %g",
                              levels[k - 1], levels[k]);
                report.witnesses.push_back(Witness{0.0, gaps[k], levels[k], margin, what});
            }
        }
    }
    char note[160];
    std::snprintf(note, sizeof note,
                  "gap at the tightest clamp %.3g, at the widest %.3g; final level %g", gaps.front(),
                  gaps.back(), levels.back());
    report.notes = note;
    return report;
}

} // namespace gbsde
