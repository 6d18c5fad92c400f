#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "smc/error.hpp"

namespace smc {

enum class Hypothesis { H0, H1 };
enum class Method { Ssp, Sprt };

std::string_view to_string(Hypothesis h);
std::string_view to_string(Method m);

/// Bounds on the Type-I error (accepting H1 while p >= p0) and the
/// Type-II error (accepting H0 while p <= p1).
struct Strength {
    double alpha = 0.01;
    double beta = 0.01;

    friend bool operator==(const Strength&, const Strength&) = default;
};

/// H0: p >= p0 against H1: p <= p1, with 0 <= p1 < p0 <= 1.
struct Region {
    double p0 = 1.0;
    double p1 = 0.0;

    friend bool operator==(const Region&, const Region&) = default;
};

struct TestParams {
    double theta = 0.5;
    double delta = 0.0;
    Strength strength;

    /// (min(1, theta+delta), max(0, theta-delta))
    Region region() const;
};

/// Throws InvalidParams / InvalidStrength. A zero delta is accepted only
/// when `allow_zero_delta` is set (black-box mode).
void check_params(const TestParams& params, bool allow_zero_delta = false);
void check_region(const Region& region);
void check_strength(const Strength& strength);

struct WaldBounds {
    double log_A = 0.0;  // ln((1-beta)/alpha)
    double log_B = 0.0;  // ln(beta/(1-alpha))
};

/// Throws InvalidStrength unless log_B < 0 < log_A.
WaldBounds wald_bounds(double alpha, double beta);

struct SspPlan {
    std::int64_t n = 1;
    std::int64_t c = 0;

    friend bool operator==(const SspPlan&, const SspPlan&) = default;
};

inline constexpr std::int64_t kDefaultPlanLimit = 1'000'000;

/// Smallest n (then smallest c) with P[Bin(n,p0) <= c] <= alpha and
/// P[Bin(n,p1) > c] <= beta. Exhaustive for n up to 4096, bisection above.
SspPlan ssp_plan(const Region& region, const Strength& strength, std::int64_t n_max = kDefaultPlanLimit);

struct Verdict {
    Hypothesis accepted = Hypothesis::H0;
    std::int64_t samples_used = 0;
    Region region;
    Strength strength;
    Method method = Method::Sprt;
};

/// Accepts H0 iff more than c of the n outcomes are successes.
Verdict ssp_decide(const SspPlan& plan, std::span<const bool> outcomes, const Region& region = {},
                   const Strength& strength = {});
Verdict ssp_decide(const SspPlan& plan, const std::vector<bool>& outcomes, const Region& region = {},
                   const Strength& strength = {});

/// Running state of Wald's sequential test. The log likelihood ratio
/// ln(p1m/p0m) = d_m ln(p1/p0) + (m-d_m) ln((1-p1)/(1-p0)) grows with
/// evidence for H1; reaching log_A accepts H1, reaching log_B accepts H0.
struct SprtState {
    std::int64_t m = 0;
    std::int64_t d_m = 0;
    double log_ratio = 0.0;
    double log_A = 0.0;
    double log_B = 0.0;
    double log_success = 0.0;  // ln(p1/p0), -inf when p1 = 0
    double log_failure = 0.0;  // ln((1-p1)/(1-p0)), +inf when p0 = 1
    std::optional<Hypothesis> decision;

    static SprtState start(const Region& region, const Strength& strength);
};

/// Log likelihood ratio after m outcomes with d successes.
double sprt_log_ratio(std::int64_t m, std::int64_t d, double log_success, double log_failure);

/// Throws AlreadyDecided if the state has a decision.
SprtState sprt_step(SprtState state, bool outcome);

inline constexpr std::int64_t kDefaultMaxSamples = 10'000'000;

template <class Source>
concept OutcomeSource = std::invocable<Source&, std::int64_t> &&
                        std::convertible_to<std::invoke_result_t<Source&, std::int64_t>, bool>;

/// Folds outcomes 0, 1, 2, ... until the test decides.
template <OutcomeSource Source>
Verdict sprt_run(const Region& region, const Strength& strength, Source&& next,
                 std::int64_t max_samples = kDefaultMaxSamples)
{
    auto state = SprtState::start(region, strength);
    while (!state.decision) {
        if (state.m >= max_samples) {
            throw Error(ErrorCode::MaxSamplesExceeded,
                        "SPRT undecided after " + std::to_string(max_samples) + " samples");
        }
        state = sprt_step(state, static_cast<bool>(next(state.m)));
    }
    return Verdict{*state.decision, state.m, region, strength, Method::Sprt};
}

/// Draws the plan's n outcomes and decides.
template <OutcomeSource Source>
Verdict ssp_run(const SspPlan& plan, const Region& region, const Strength& strength, Source&& next)
{
    std::int64_t successes = 0;
    for (std::int64_t i = 0; i < plan.n; ++i) successes += static_cast<bool>(next(i)) ? 1 : 0;
    return Verdict{successes > plan.c ? Hypothesis::H0 : Hypothesis::H1, plan.n, region, strength, Method::Ssp};
}

struct StrengthEstimate {
    double error_rate = 0.0;
    double mean_samples = 0.0;
    std::int64_t errors = 0;
    std::int64_t reps = 0;
};

/// Runs `reps` tests on synthetic Bernoulli(true_p) streams. When true_p
/// lies strictly inside (p1, p0) no decision is an error.
StrengthEstimate estimate_strength(const Region& region, const Strength& strength, Method method, double true_p,
                                   std::int64_t reps, std::uint64_t seed,
                                   std::int64_t max_samples = kDefaultMaxSamples);

}  // namespace smc
