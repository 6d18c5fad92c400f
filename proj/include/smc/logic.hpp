#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smc/formula.hpp"
#include "smc/hypothesis.hpp"
#include "smc/model.hpp"
#include "smc/simulation.hpp"

namespace smc {

/// Error bounds attached to a (possibly statistical) truth value:
/// type1 bounds claiming false when the formula holds, type2 claiming true
/// when it does not. Exact evaluations carry (0, 0).
struct ErrorPair {
    double type1 = 0.0;
    double type2 = 0.0;

    friend bool operator==(const ErrorPair&, const ErrorPair&) = default;
};

enum class CompositionMode {
    Optimistic,    // conjunction: (min type1, max type2)
    Conservative,  // conjunction: (max type1, max type2)
};

/// Verifying !psi with (a, b) amounts to verifying psi with (b, a).
ErrorPair compose_negation(ErrorPair e);
ErrorPair compose_conjunction(std::span<const ErrorPair> operands, CompositionMode mode);
/// De Morgan over compose_conjunction.
ErrorPair compose_disjunction(std::span<const ErrorPair> operands, CompositionMode mode);

struct StateVerdict {
    bool holds = false;
    ErrorPair errors;
};

struct PathVerdict {
    bool holds = false;
    ErrorPair errors;
};

/// Where a nested check is being made: the stream path of the trace being
/// evaluated and the position on it.
struct EvalSite {
    std::span<const std::uint64_t> trace_path;
    std::uint64_t position = 0;
};

/// Decides nested probabilistic operators. Implemented by the orchestrator.
class ProbChecker {
  public:
    virtual ~ProbChecker() = default;
    virtual StateVerdict check(const ProbNode& node, StateId state, const EvalSite& site) = 0;
};

struct EvalContext {
    const ValidatedModel* model = nullptr;
    CompositionMode mode = CompositionMode::Optimistic;
    /// Required only when a Prob node is reached.
    ProbChecker* checker = nullptr;
    std::span<const std::uint64_t> trace_path;
};

/// Simulation depth for the outermost path formulas; nested Prob nodes run
/// their own simulations and do not contribute.
DepthBound required_depth(const PathFormula& p, ModelKind kind, std::uint64_t hard_cap = kDefaultHardCap);
DepthBound required_depth(const Formula& f, ModelKind kind, std::uint64_t hard_cap = kDefaultHardCap);

StateVerdict eval_state(const Formula& f, StateId state, const EvalContext& ctx, std::uint64_t position = 0);

/// Evaluates a bounded path formula on a finite trace. Absorbed traces are
/// extended by self-loops; a truncated trace that ends before the formula
/// is decided raises TraceTooShort.
PathVerdict eval_path(const PathFormula& p, const Trace& trace, const EvalContext& ctx);

/// The errors eval_state reports for f, given the strength every nested
/// Prob node is checked with. Independent of the state.
ErrorPair formula_errors(const Formula& f, const Strength& leaf, CompositionMode mode);

/// Componentwise maximum of the errors eval_path can report for p over all
/// decision points.
ErrorPair path_error_bound(const PathFormula& p, const Strength& leaf, CompositionMode mode);

}  // namespace smc
