#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smc/hypothesis.hpp"
#include "smc/model_text.hpp"
#include "smc/report.hpp"
#include "smc/simulation.hpp"
#include "smc/verify.hpp"

namespace {

constexpr int kExitH0 = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitH1 = 3;

int exit_code(smc::ErrorCode code)
{
    using smc::ErrorCode;
    switch (code) {
    case ErrorCode::RowSumInvalid:
    case ErrorCode::NegativeOrZeroWeight:
    case ErrorCode::DanglingTarget:
    case ErrorCode::EmptyDtmcRow:
    case ErrorCode::SyntaxError:
    case ErrorCode::BoundTypeMismatch:
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidStrength:
    case ErrorCode::NestedNotSupported:
        return kExitUsage;
    default:
        return kExitRuntime;
    }
}

std::string one_line(std::string text)
{
    for (char& ch : text) {
        if (ch == '\n' || ch == '\r') ch = ' ';
    }
    return text;
}

int emit(const smc::Report& report, bool json, bool timing)
{
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << (json ? smc::render_report_json(report, timing) : smc::render_report_text(report, timing));
    return report.holds() ? kExitH0 : kExitH1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Statistical model checking of DTMCs and CTMCs"};
    app.require_subcommand(1);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Decide a probabilistic property by simulation");
    std::string model_path, prop;
    smc::VerifyConfig config;
    std::string method = "sprt";
    double inner_alpha = 0, inner_beta = 0, inner_delta = 0;
    bool conservative = false, no_memo = false, json = false, no_timing = false;
    verify_cmd->add_option("--model", model_path, "Model file")->required();
    verify_cmd->add_option("--prop", prop, "State formula")->required();
    verify_cmd->add_option("--alpha", config.strength.alpha, "Type-I error bound")->required();
    verify_cmd->add_option("--beta", config.strength.beta, "Type-II error bound")->required();
    verify_cmd->add_option("--delta", config.delta, "Half-width of the indifference region")->required();
    verify_cmd->add_option("--method", method, "Test for outermost operators")->check(CLI::IsMember({"sprt", "ssp"}));
    verify_cmd->add_option("--seed", config.seed, "Random seed");
    verify_cmd->add_option("--max-samples", config.max_samples, "Sample limit per test");
    auto* ia = verify_cmd->add_option("--inner-alpha", inner_alpha, "Type-I bound of nested tests");
    auto* ib = verify_cmd->add_option("--inner-beta", inner_beta, "Type-II bound of nested tests");
    auto* id = verify_cmd->add_option("--inner-delta", inner_delta, "Indifference half-width of nested tests");
    verify_cmd->add_flag("--conservative-composition", conservative, "Compose conjunctions as (max, max)");
    verify_cmd->add_flag("--no-memo", no_memo, "Do not reuse nested results per state");
    verify_cmd->add_option("--threads", config.threads, "Worker threads for sampling")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--hard-cap", config.hard_cap, "Jump limit for time-bounded CTMC paths");
    verify_cmd->add_flag("--json", json, "Print the report as JSON");
    verify_cmd->add_flag("--no-timing", no_timing, "Leave wall time out of the output");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Compute the single sampling plan (n, c)");
    smc::Region region;
    smc::Strength strength;
    plan_cmd->add_option("--p0", region.p0)->required();
    plan_cmd->add_option("--p1", region.p1)->required();
    plan_cmd->add_option("--alpha", strength.alpha)->required();
    plan_cmd->add_option("--beta", strength.beta)->required();

    // strength
    auto* strength_cmd = app.add_subcommand("strength", "Estimate empirical error rates on Bernoulli streams");
    double true_p = 0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
    std::string strength_method;
    std::int64_t max_samples = smc::kDefaultMaxSamples;
    strength_cmd->add_option("--p0", region.p0)->required();
    strength_cmd->add_option("--p1", region.p1)->required();
    strength_cmd->add_option("--alpha", strength.alpha)->required();
    strength_cmd->add_option("--beta", strength.beta)->required();
    strength_cmd->add_option("--true-p", true_p)->required();
    strength_cmd->add_option("--reps", reps)->required();
    strength_cmd->add_option("--method", strength_method)->required()->check(CLI::IsMember({"sprt", "ssp"}));
    strength_cmd->add_option("--seed", seed);
    strength_cmd->add_option("--max-samples", max_samples);

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "Print sampled traces from the initial state");
    std::int64_t samples = 0;
    std::uint64_t depth = 0;
    double time_bound = 0;
    std::uint64_t hard_cap = smc::kDefaultHardCap;
    simulate_cmd->add_option("--model", model_path)->required();
    simulate_cmd->add_option("--samples", samples)->required()->check(CLI::NonNegativeNumber);
    auto* depth_opt = simulate_cmd->add_option("--depth", depth, "Number of transitions");
    auto* time_opt = simulate_cmd->add_option("--time", time_bound, "Time horizon (ctmc)");
    depth_opt->excludes(time_opt);
    simulate_cmd->add_option("--seed", seed);
    simulate_cmd->add_option("--hard-cap", hard_cap);

    // blackbox
    auto* blackbox_cmd = app.add_subcommand("blackbox", "Decide a property from recorded traces");
    std::string traces_path;
    double theta = 0;
    blackbox_cmd->add_option("--traces", traces_path)->required();
    blackbox_cmd->add_option("--model", model_path, "Model supplying the labels")->required();
    blackbox_cmd->add_option("--prop", prop, "Path formula, or P>=theta [ path ]")->required();
    blackbox_cmd->add_option("--theta", theta, "Threshold (overridden by a P operator in --prop)");
    blackbox_cmd->add_flag("--json", json);
    blackbox_cmd->add_flag("--no-timing", no_timing);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << one_line(e.what()) << '\n';
        return kExitUsage;
    }

    try {
        if (*verify_cmd) {
            config.method = method == "ssp" ? smc::Method::Ssp : smc::Method::Sprt;
            if (*ia) config.inner_alpha = inner_alpha;
            if (*ib) config.inner_beta = inner_beta;
            if (*id) config.inner_delta = inner_delta;
            config.composition = conservative ? smc::CompositionMode::Conservative : smc::CompositionMode::Optimistic;
            config.memoize = !no_memo;
            const auto model = smc::load_model(model_path);
            const auto formula = smc::parse_formula(prop);
            return emit(smc::verify(model, formula, config), json, !no_timing);
        }
        if (*plan_cmd) {
            const auto plan = smc::ssp_plan(region, strength);
            std::cout << "n=" << plan.n << " c=" << plan.c << '\n';
            return kExitH0;
        }
        if (*strength_cmd) {
            const auto m = strength_method == "ssp" ? smc::Method::Ssp : smc::Method::Sprt;
            const auto est = smc::estimate_strength(region, strength, m, true_p, reps, seed, max_samples);
            std::cout << "error rate: " << est.error_rate << '\n'
                      << "errors: " << est.errors << " of " << est.reps << '\n'
                      << "mean samples: " << est.mean_samples << '\n';
            return kExitH0;
        }
        if (*simulate_cmd) {
            if (!*depth_opt && !*time_opt) {
                std::cerr << "error: simulate needs --depth or --time\n";
                return kExitUsage;
            }
            const auto model = smc::load_model(model_path);
            smc::DepthBound bound;
            bound.hard_cap = hard_cap;
            if (*time_opt) {
                bound.kind = smc::Time{time_bound};
            } else {
                bound.kind = smc::Steps{depth};
            }
            for (std::int64_t i = 0; i < samples; ++i) {
                const smc::SampleKey key(seed, {static_cast<std::uint64_t>(i)});
                std::cout << smc::render_trace(smc::sample_path(model, model.initial(), key, bound), model.kind())
                          << '\n';
            }
            return kExitH0;
        }
        if (*blackbox_cmd) {
            const auto model = smc::load_model(model_path);
            const auto traces = smc::load_traces(traces_path, model.kind());
            // a bare path formula takes its threshold from --theta
            std::optional<smc::PathFormula> path;
            try {
                path = smc::parse_path_formula(prop);
            } catch (const smc::Error&) {
            }
            const auto report = path ? smc::verify_blackbox(traces, model, *path, theta)
                                     : smc::verify_blackbox(traces, model, smc::parse_formula(prop));
            return emit(report, json, !no_timing);
        }
    } catch (const smc::Error& e) {
        std::cerr << "error: " << one_line(e.what()) << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
