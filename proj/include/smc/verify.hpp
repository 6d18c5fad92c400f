#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smc/formula.hpp"
#include "smc/hypothesis.hpp"
#include "smc/logic.hpp"
#include "smc/model.hpp"
#include "smc/simulation.hpp"

namespace smc {

struct VerifyConfig {
    Strength strength{0.01, 0.01};
    double delta = 0.05;
    Method method = Method::Sprt;
    std::uint64_t seed = 0;
    std::int64_t max_samples = kDefaultMaxSamples;
    /// Nested operators (any depth); unset fields default to the outer values.
    std::optional<double> inner_alpha, inner_beta, inner_delta;
    CompositionMode composition = CompositionMode::Optimistic;
    /// Reuse nested results per (Prob node, state) within one verification.
    bool memoize = true;
    /// Worker threads for drawing top-level samples.
    unsigned threads = 1;
    std::uint64_t hard_cap = kDefaultHardCap;

    Strength inner_strength() const;
    double inner_delta_or_default() const;
};

/// Thresholds for an outer test whose per-path checks err with (alpha', beta'):
/// p0'' = (theta+delta)(1-alpha'), p1'' = 1-(1-(theta-delta))(1-beta'),
/// with theta +- delta clamped to [0, 1]. Throws RegionCollapsed unless p0'' > p1''.
Region nested_thresholds(double theta, double delta, double alpha_inner, double beta_inner);

/// One probabilistic operator of the verified formula.
struct CheckStats {
    int node_id = 0;
    int level = 0;  // 0 = outermost
    double theta = 0.0;
    double delta = 0.0;
    Region region;     // before adjustment
    Region effective;  // after nested_thresholds
    Strength strength;
    ErrorPair inner_errors;
    std::int64_t tests = 0;
    std::int64_t samples = 0;
    std::int64_t memo_hits = 0;
    std::int64_t accepted_h0 = 0;
};

struct LevelStats {
    int level = 0;
    std::int64_t tests = 0;
    std::int64_t samples = 0;
};

struct BlackboxStats {
    std::int64_t n = 0;
    std::int64_t c = 0;
    std::int64_t successes = 0;
    double theta = 0.0;
    double type1 = 0.0;  // P[Bin(n,theta) <= c]
    double type2 = 0.0;  // 1 - P[Bin(n,theta) <= c]
};

struct Report {
    Hypothesis verdict = Hypothesis::H0;
    FormulaPtr formula;
    /// Composed error bounds of the verdict; (0, 0) for exact answers.
    ErrorPair errors;
    bool exact = false;
    Method method = Method::Sprt;
    CompositionMode composition = CompositionMode::Optimistic;
    std::uint64_t seed = 0;
    std::vector<CheckStats> checks;
    std::vector<LevelStats> levels;
    std::optional<BlackboxStats> blackbox;
    std::vector<std::string> warnings;
    double elapsed_seconds = 0.0;

    bool holds() const { return verdict == Hypothesis::H0; }
};

/// Statistically decides `formula` at the model's initial state.
///
/// Outermost Prob nodes are tested with (strength, delta, method); nested
/// ones with the inner parameters and always with SPRT. Boolean structure
/// above the Prob nodes is evaluated propositionally and its errors
/// composed. Purely propositional formulas are evaluated exactly.
Report verify(const ValidatedModel& model, const FormulaPtr& formula, const VerifyConfig& config);

/// argmin over c in [-1, n] of |P[Bin(n,theta) <= c] - 0.5|; ties (within
/// 1e-12) go to the smaller c.
std::int64_t choose_blackbox_c(std::int64_t n, double theta);

/// SSP without indifference region over a fixed set of traces: n is the
/// trace count and c = choose_blackbox_c(n, theta). Labels come from `model`.
Report verify_blackbox(const std::vector<Trace>& traces, const ValidatedModel& model, const PathFormula& path,
                       double theta);

/// As above for a formula `P>=theta [ path ]` or its negation.
Report verify_blackbox(const std::vector<Trace>& traces, const ValidatedModel& model, const FormulaPtr& formula);

}  // namespace smc
