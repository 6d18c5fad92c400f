#include "smc/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smc/binomial.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

constexpr std::int64_t kExactScanLimit = 4096;

// Probability mass of Bin(n,p), anchored at the mode and extended outward
// by the pmf ratio so no term needs its own lgamma.
std::vector<double> binomial_pmf_row(std::int64_t n, double p)
{
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    if (p <= 0.0) {
        pmf.front() = 1.0;
        return pmf;
    }
    if (p >= 1.0) {
        pmf.back() = 1.0;
        return pmf;
    }
    const auto mode = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((n + 1) * p)), 0, n);
    const double odds = p / (1.0 - p);
    pmf[mode] = std::exp(binomial_log_pmf(mode, n, p));
    for (std::int64_t k = mode; k < n; ++k) {
        pmf[k + 1] = pmf[k] * odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
        if (pmf[k + 1] == 0.0) break;
    }
    for (std::int64_t k = mode; k > 0; --k) {
        pmf[k - 1] = pmf[k] / odds * static_cast<double>(k) / static_cast<double>(n - k + 1);
        if (pmf[k - 1] == 0.0) break;
    }
    return pmf;
}

// Feasible acceptance constant for sample size n, if any.
std::optional<std::int64_t> feasible_c(std::int64_t n, const Region& region, const Strength& strength)
{
    // c_max: largest c with P0[X <= c] <= alpha
    const auto pmf0 = binomial_pmf_row(n, region.p0);
    std::int64_t c_max = -1;
    double lower = 0.0;
    for (std::int64_t c = 0; c <= n; ++c) {
        lower += pmf0[c];
        if (lower > strength.alpha) break;
        c_max = c;
    }
    // c_min: smallest c with P1[X > c] <= beta
    const auto pmf1 = binomial_pmf_row(n, region.p1);
    std::int64_t c_min = n;
    double upper = 0.0;
    for (std::int64_t c = n; c > -1; --c) {
        upper += pmf1[c];  // now P1[X >= c] = P1[X > c-1]
        if (upper > strength.beta) break;
        c_min = c - 1;
    }
    if (c_min <= c_max) return c_min;
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Hypothesis h)
{
    return h == Hypothesis::H0 ? "AcceptH0" : "AcceptH1";
}

std::string_view to_string(Method m)
{
    return m == Method::Ssp ? "ssp" : "sprt";
}

Region TestParams::region() const
{
    return Region{std::min(1.0, theta + delta), std::max(0.0, theta - delta)};
}

void check_strength(const Strength& s)
{
    if (!(s.alpha > 0.0 && s.alpha < 1.0) || !(s.beta > 0.0 && s.beta < 1.0)) {
        throw Error(ErrorCode::InvalidStrength, "alpha and beta must lie in (0, 1)");
    }
}

void check_region(const Region& r)
{
    if (!(r.p1 >= 0.0 && r.p0 <= 1.0 && r.p1 < r.p0)) {
        throw Error(ErrorCode::InvalidParams, "indifference region needs 0 <= p1 < p0 <= 1, got p0=" +
                                                  std::to_string(r.p0) + " p1=" + std::to_string(r.p1));
    }
}

void check_params(const TestParams& params, bool allow_zero_delta)
{
    if (!(params.theta >= 0.0 && params.theta <= 1.0)) {
        throw Error(ErrorCode::InvalidParams, "theta must lie in [0, 1]");
    }
    if (!(params.delta >= 0.0)) throw Error(ErrorCode::InvalidParams, "delta must be non-negative");
    check_strength(params.strength);
    if (params.delta == 0.0 && !allow_zero_delta) {
        throw Error(ErrorCode::InvalidParams, "an indifference region (delta > 0) is required");
    }
    if (!allow_zero_delta) check_region(params.region());
}

WaldBounds wald_bounds(double alpha, double beta)
{
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
        throw Error(ErrorCode::InvalidStrength, "alpha and beta must lie in (0, 1)");
    }
    WaldBounds b{std::log((1.0 - beta) / alpha), std::log(beta / (1.0 - alpha))};
    if (!(b.log_A > b.log_B) || !(b.log_A > 0.0) || !(b.log_B < 0.0)) {
        throw Error(ErrorCode::InvalidStrength, "Wald bounds need alpha + beta < 1");
    }
    return b;
}

SspPlan ssp_plan(const Region& region, const Strength& strength, std::int64_t n_max)
{
    check_region(region);
    check_strength(strength);

    const std::int64_t scan_to = std::min(n_max, kExactScanLimit);
    for (std::int64_t n = 1; n <= scan_to; ++n) {
        if (auto c = feasible_c(n, region, strength)) return {n, *c};
    }
    if (n_max <= kExactScanLimit) {
        throw Error(ErrorCode::PlanSearchExhausted, "no single sampling plan with n <= " + std::to_string(n_max));
    }

    // Feasibility is treated as monotone past the exhaustive range: gallop
    // to a feasible n, then bisect.
    std::int64_t lo = kExactScanLimit;
    std::int64_t hi = lo;
    while (true) {
        hi = std::min(n_max, hi * 2);
        if (feasible_c(hi, region, strength)) break;
        if (hi == n_max) {
            throw Error(ErrorCode::PlanSearchExhausted, "no single sampling plan with n <= " + std::to_string(n_max));
        }
        lo = hi;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (feasible_c(mid, region, strength)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {hi, *feasible_c(hi, region, strength)};
}

Verdict ssp_decide(const SspPlan& plan, std::span<const bool> outcomes, const Region& region,
                   const Strength& strength)
{
    if (static_cast<std::int64_t>(outcomes.size()) != plan.n) {
        throw Error(ErrorCode::WrongSampleCount, "plan needs " + std::to_string(plan.n) + " outcomes, got " +
                                                     std::to_string(outcomes.size()));
    }
    const auto successes = std::count(outcomes.begin(), outcomes.end(), true);
    return Verdict{successes > plan.c ? Hypothesis::H0 : Hypothesis::H1, plan.n, region, strength, Method::Ssp};
}

Verdict ssp_decide(const SspPlan& plan, const std::vector<bool>& outcomes, const Region& region,
                   const Strength& strength)
{
    if (static_cast<std::int64_t>(outcomes.size()) != plan.n) {
        throw Error(ErrorCode::WrongSampleCount, "plan needs " + std::to_string(plan.n) + " outcomes, got " +
                                                     std::to_string(outcomes.size()));
    }
    const auto successes = std::count(outcomes.begin(), outcomes.end(), true);
    return Verdict{successes > plan.c ? Hypothesis::H0 : Hypothesis::H1, plan.n, region, strength, Method::Ssp};
}

SprtState SprtState::start(const Region& region, const Strength& strength)
{
    check_region(region);
    const auto bounds = wald_bounds(strength.alpha, strength.beta);
    SprtState s;
    s.log_A = bounds.log_A;
    s.log_B = bounds.log_B;
    s.log_success = region.p1 > 0.0 ? std::log(region.p1 / region.p0) : -std::numeric_limits<double>::infinity();
    s.log_failure = region.p0 < 1.0 ? std::log((1.0 - region.p1) / (1.0 - region.p0))
                                    : std::numeric_limits<double>::infinity();
    return s;
}

double sprt_log_ratio(std::int64_t m, std::int64_t d, double log_success, double log_failure)
{
    const double a = d == 0 ? 0.0 : static_cast<double>(d) * log_success;
    const double b = m - d == 0 ? 0.0 : static_cast<double>(m - d) * log_failure;
    return a + b;
}

SprtState sprt_step(SprtState state, bool outcome)
{
    if (state.decision) throw Error(ErrorCode::AlreadyDecided, "SPRT already reached a decision");
    ++state.m;
    if (outcome) ++state.d_m;
    // A success under p1 = 0 (or a failure under p0 = 1) rules the other
    // hypothesis out outright.
    if (outcome && std::isinf(state.log_success)) {
        state.log_ratio = state.log_success;
        state.decision = Hypothesis::H0;
        return state;
    }
    if (!outcome && std::isinf(state.log_failure)) {
        state.log_ratio = state.log_failure;
        state.decision = Hypothesis::H1;
        return state;
    }
    state.log_ratio = sprt_log_ratio(state.m, state.d_m, state.log_success, state.log_failure);
    if (state.log_ratio >= state.log_A) {
        state.decision = Hypothesis::H1;
    } else if (state.log_ratio <= state.log_B) {
        state.decision = Hypothesis::H0;
    }
    return state;
}

StrengthEstimate estimate_strength(const Region& region, const Strength& strength, Method method, double true_p,
                                   std::int64_t reps, std::uint64_t seed, std::int64_t max_samples)
{
    if (reps < 1) throw Error(ErrorCode::InvalidParams, "reps must be at least 1");
    check_region(region);
    check_strength(strength);

    std::optional<SspPlan> plan;
    if (method == Method::Ssp) plan = ssp_plan(region, strength);

    StrengthEstimate est;
    est.reps = reps;
    double total_samples = 0.0;
    for (std::int64_t r = 0; r < reps; ++r) {
        const UniformStream rng(SampleKey{seed, {static_cast<std::uint64_t>(r)}});
        auto source = [&](std::int64_t i) { return rng(static_cast<std::uint64_t>(i)) < true_p; };
        const Verdict v = plan ? ssp_run(*plan, region, strength, source)
                               : sprt_run(region, strength, source, max_samples);
        total_samples += static_cast<double>(v.samples_used);
        if (true_p >= region.p0 && v.accepted == Hypothesis::H1) ++est.errors;
        if (true_p <= region.p1 && v.accepted == Hypothesis::H0) ++est.errors;
    }
    est.error_rate = static_cast<double>(est.errors) / static_cast<double>(reps);
    est.mean_samples = total_samples / static_cast<double>(reps);
    return est;
}

}  // namespace smc
