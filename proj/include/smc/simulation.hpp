#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "smc/formula.hpp"
#include "smc/model.hpp"
#include "smc/random.hpp"

namespace smc {

struct TraceStep {
    StateId state;
    double entry_time = 0.0;

    friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// A finite execution prefix.
///
/// `truncated` is set when sampling stopped because the depth or time bound
/// was reached; the execution continues beyond the last step and is only
/// known up to `horizon` (a step count for step bounds, a time for time
/// bounds). An untruncated trace ended in an absorbing state and stays there
/// forever.
struct Trace {
    std::vector<TraceStep> steps;
    bool truncated = true;
    double horizon = 0.0;

    std::size_t size() const noexcept { return steps.size(); }
    StateId state(std::size_t i) const { return steps[i].state; }

    friend bool operator==(const Trace&, const Trace&) = default;
};

inline constexpr std::uint64_t kDefaultHardCap = 1'000'000;

struct DepthBound {
    Bound kind = Steps{0};
    std::uint64_t hard_cap = kDefaultHardCap;

    friend bool operator==(const DepthBound&, const DepthBound&) = default;
};

/// Draws one execution from `from`. A pure function of its arguments.
///
/// DTMC: exactly k transitions, draw j picks transition j through the
/// cumulative row distribution. CTMC: draw 2j picks the jump target with
/// probability rate/R(s), draw 2j+1 the sojourn -ln(1-u)/R(s); stops at an
/// absorbing state, after k jumps (step bound) or at the first jump past t
/// (time bound, that jump is not recorded).
Trace sample_path(const ValidatedModel& model, StateId from, const SampleKey& key, const DepthBound& bound);

/// Trace text: one trace per line. DTMC lines hold state ids; CTMC lines
/// hold `state@time` tokens with non-decreasing times. '#' starts a comment.
std::vector<Trace> parse_traces(std::string_view text, ModelKind kind);
std::vector<Trace> load_traces(const std::string& path, ModelKind kind);
std::string render_trace(const Trace& trace, ModelKind kind);

}  // namespace smc
