#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gbsde/driver.hpp"
#include "gbsde/field.hpp"
#include "gbsde/lattice.hpp"
#include "gbsde/report.hpp"
#include "gbsde/solver.hpp"
#include "gbsde/terminal.hpp"

namespace gbsde {

enum class EvaluationKind { monetary, return_kind };

/// A dynamic evaluation: the solved field of a backward equation read as a
/// conditional risk/return functional of its terminal payoff.
struct DynamicEvaluation {
    EvaluationKind kind = EvaluationKind::return_kind;
    SolutionField field;
    std::string lineage;
};

/// Monetary -> return correspondence: exponentiate nodewise. The monetary
/// evaluation must have been solved on the log payoff for the result to be
/// the return evaluation of the original payoff.
DynamicEvaluation return_from_monetary(const DynamicEvaluation& monetary);

/// Return -> monetary: logarithm nodewise; requires a positive field.
DynamicEvaluation monetary_from_return(const DynamicEvaluation& return_eval);

enum class Axiom {
    monotone,
    pos_hom,
    star_shaped,
    mult_convex,
    normalized,
    time_consistent,
    lebesgue,
    cash_additive,
    cash_superadditive,
    mult_pos_hom,
};

const char* to_string(Axiom a);
std::optional<Axiom> axiom_from_string(const std::string& s);

/// One audit instance: a payoff (pairs for binary axioms) plus the scalars
/// the axiom quantifies over.
struct AxiomInstance {
    TerminalCondition X = TerminalCondition::constant_payoff(1.0);
    std::optional<TerminalCondition> X2;
    std::vector<double> scalars; // xi / eta / lambda values, axiom-dependent
};

/// Deterministic seeded instance set: payoffs a*exp(sigma w)+b with
/// parameters drawn from the given seed, paired where the axiom needs pairs.
std::vector<AxiomInstance> random_instances(Axiom axiom, int count, std::uint64_t seed);

/// Audits one axiom of the return evaluation induced by a geometric driver
/// on the lattice. Violations are counted only beyond the slack
/// (10 x solver tolerance by default); reports carry witnesses and never
/// throw on violations. F_t-measurable scalings for pos_hom are bounded
/// functions of the node state applied at an interior time via subtree
/// re-solves (the flow property); cash axioms audit the associated monetary
/// evaluation through the exp/log correspondence.
AxiomReport audit_axiom(const DriverSpec& geometric, Axiom axiom,
                        const std::vector<AxiomInstance>& instances, const Lattice& lattice,
                        const SolverConfig& config = {});

/// Clamp-approximation check: levels n give X_n = clamp(X, 1/n, n); reports
/// the gap sequence |Y0(X_n) - Y0(X)|, whether it decreases monotonically,
/// and the final gap.
AxiomReport lebesgue_check(const DriverSpec& geometric, const TerminalCondition& terminal,
                           const std::vector<double>& levels, const Lattice& lattice,
                           const SolverConfig& config = {});

} // namespace gbsde
