#include "smc/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <type_traits>
#include <variant>

#include "smc/binomial.hpp"
#include "smc/model_text.hpp"

namespace smc {

Strength VerifyConfig::inner_strength() const
{
    return Strength{inner_alpha.value_or(strength.alpha), inner_beta.value_or(strength.beta)};
}

double VerifyConfig::inner_delta_or_default() const
{
    return inner_delta.value_or(delta);
}

Region nested_thresholds(double theta, double delta, double alpha_inner, double beta_inner)
{
    if (!(alpha_inner >= 0.0 && alpha_inner < 1.0) || !(beta_inner >= 0.0 && beta_inner < 1.0)) {
        throw Error(ErrorCode::InvalidStrength, "inner error bounds must lie in [0, 1)");
    }
    const Region base = TestParams{theta, delta, {}}.region();
    const Region adjusted{base.p0 * (1.0 - alpha_inner), 1.0 - (1.0 - base.p1) * (1.0 - beta_inner)};
    if (!(adjusted.p0 > adjusted.p1)) {
        throw Error(ErrorCode::RegionCollapsed,
                    "indifference region collapsed: p0''=" + std::to_string(adjusted.p0) +
                        " <= p1''=" + std::to_string(adjusted.p1) +
                        "; tighten the inner alpha/beta or widen delta");
    }
    return adjusted;
}

namespace {

constexpr std::uint64_t kMemoTag = ~std::uint64_t{0};

using Clock = std::chrono::steady_clock;

struct NodeInfo {
    const ProbNode* node = nullptr;
    int level = 0;
    Strength strength;
    double delta = 0.0;
    Region region;
    Region effective;
    ErrorPair inner_errors;
    DepthBound depth;
};

struct Counters {
    std::atomic<std::int64_t> tests{0};
    std::atomic<std::int64_t> samples{0};
    std::atomic<std::int64_t> memo_hits{0};
    std::atomic<std::int64_t> accepted_h0{0};
};

void collect_nodes(const Formula& f, int level, std::vector<std::pair<const ProbNode*, int>>& out,
                   std::set<std::string>& atoms)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AtomNode>) {
                atoms.insert(n.name);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                collect_nodes(*n.operand, level, out, atoms);
            } else if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                collect_nodes(*n.lhs, level, out, atoms);
                collect_nodes(*n.rhs, level, out, atoms);
            } else if constexpr (std::is_same_v<T, ProbNode>) {
                out.emplace_back(&n, level);
                if (n.path.lhs) collect_nodes(*n.path.lhs, level + 1, out, atoms);
                if (n.path.rhs) collect_nodes(*n.path.rhs, level + 1, out, atoms);
            }
        },
        f.node);
}

// Serves outcomes in index order; with several threads, evaluates them a
// batch at a time. Failures are rethrown only when their index is consumed,
// so the result never depends on work done past the decision.
template <class Fn>
class BatchedOutcomes {
  public:
    BatchedOutcomes(Fn fn, unsigned threads) : fn_(std::move(fn)), threads_(std::max(1u, threads)) {}

    bool operator()(std::int64_t i)
    {
        if (threads_ == 1) return fn_(i);
        if (i < base_ || i >= base_ + static_cast<std::int64_t>(slots_.size())) fill(i);
        auto& slot = slots_[static_cast<std::size_t>(i - base_)];
        if (auto* e = std::get_if<std::exception_ptr>(&slot)) std::rethrow_exception(*e);
        return std::get<bool>(slot);
    }

  private:
    void fill(std::int64_t from)
    {
        base_ = from;
        slots_.assign(64 * threads_, false);
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads_; ++t) {
            workers.emplace_back([this, t] {
                for (std::size_t k = t; k < slots_.size(); k += threads_) {
                    try {
                        slots_[k] = static_cast<bool>(fn_(base_ + static_cast<std::int64_t>(k)));
                    } catch (...) {
                        slots_[k] = std::current_exception();
                    }
                }
            });
        }
    }

    Fn fn_;
    unsigned threads_;
    std::int64_t base_ = 0;
    std::vector<std::variant<bool, std::exception_ptr>> slots_;
};

class Verifier final : public ProbChecker {
  public:
    Verifier(const ValidatedModel& model, const VerifyConfig& config) : model_(model), config_(config) {}

    Report run(const FormulaPtr& formula)
    {
        const auto started = Clock::now();
        Report report;
        report.formula = formula;
        report.method = config_.method;
        report.composition = config_.composition;
        report.seed = config_.seed;

        std::vector<std::pair<const ProbNode*, int>> found;
        std::set<std::string> atoms;
        collect_nodes(*formula, 0, found, atoms);
        for (const auto& a : atoms) {
            if (!model_.has_atom(a)) {
                report.warnings.push_back("atom '" + a + "' is not a label of the model and is false everywhere");
            }
        }
        prepare(found, report);
        top_level_count_ = std::count_if(found.begin(), found.end(), [](const auto& p) { return p.second == 0; });

        EvalContext ctx{&model_, config_.composition, this, {}};
        const StateVerdict v = eval_state(*formula, model_.initial(), ctx);
        report.verdict = v.holds ? Hypothesis::H0 : Hypothesis::H1;
        report.errors = v.errors;
        report.exact = found.empty();

        std::map<int, LevelStats> levels;
        for (std::size_t i = 0; i < infos_.size(); ++i) {
            const auto& info = infos_[i];
            const auto& c = counters_[i];
            CheckStats s;
            s.node_id = info.node->node_id;
            s.level = info.level;
            s.theta = info.node->theta;
            s.delta = info.delta;
            s.region = info.region;
            s.effective = info.effective;
            s.strength = info.strength;
            s.inner_errors = info.inner_errors;
            s.tests = c.tests.load();
            s.samples = c.samples.load();
            s.memo_hits = c.memo_hits.load();
            s.accepted_h0 = c.accepted_h0.load();
            report.checks.push_back(s);
            if (s.tests > 0) {
                auto& l = levels[s.level];
                l.level = s.level;
                l.tests += s.tests;
                l.samples += s.samples;
            }
        }
        for (const auto& [_, l] : levels) report.levels.push_back(l);
        report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - started).count();
        return report;
    }

    StateVerdict check(const ProbNode& node, StateId state, const EvalSite& site) override
    {
        const std::size_t idx = index_.at(node.node_id);
        const NodeInfo& info = infos_[idx];
        const Strength s = info.strength;

        if (site.trace_path.empty()) {
            // outermost operator, tested once from the initial state
            const SampleKey prefix = top_level_count_ > 1
                                         ? SampleKey(config_.seed, {static_cast<std::uint64_t>(node.node_id)})
                                         : SampleKey();
            const auto v = run_test(idx, state, prefix, top_level_count_ > 1, config_.method);
            return {v.accepted == Hypothesis::H0, {s.alpha, s.beta}};
        }

        if (!config_.memoize) {
            std::vector<std::uint64_t> path(site.trace_path.begin(), site.trace_path.end());
            path.push_back(site.position);
            path.push_back(static_cast<std::uint64_t>(node.node_id));
            const auto v = run_test(idx, state, SampleKey(config_.seed, std::move(path)), true, Method::Sprt);
            return {v.accepted == Hypothesis::H0, {s.alpha, s.beta}};
        }

        const auto memo_key = std::pair{node.node_id, state.index};
        std::promise<bool> promise;
        std::shared_future<bool> result;
        bool owner = false;
        {
            std::lock_guard lock(memo_mutex_);
            auto it = memo_.find(memo_key);
            if (it == memo_.end()) {
                result = promise.get_future().share();
                memo_.emplace(memo_key, result);
                owner = true;
            } else {
                result = it->second;
            }
        }
        if (owner) {
            try {
                const SampleKey prefix(config_.seed,
                                       {kMemoTag, static_cast<std::uint64_t>(node.node_id), state.index});
                const auto v = run_test(idx, state, prefix, true, Method::Sprt);
                promise.set_value(v.accepted == Hypothesis::H0);
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
        } else {
            counters_[idx].memo_hits.fetch_add(1, std::memory_order_relaxed);
        }
        return {result.get(), {s.alpha, s.beta}};
    }

  private:
    void prepare(const std::vector<std::pair<const ProbNode*, int>>& found, Report& report)
    {
        const Strength inner = config_.inner_strength();
        check_strength(config_.strength);
        check_strength(inner);
        if (config_.threads < 1) throw Error(ErrorCode::InvalidParams, "threads must be at least 1");
        if (config_.max_samples < 1) throw Error(ErrorCode::InvalidParams, "max samples must be at least 1");

        infos_.reserve(found.size());
        for (const auto& [node, level] : found) {
            if (!index_.emplace(node->node_id, infos_.size()).second) {
                throw Error(ErrorCode::InvalidParams,
                            "Prob node id " + std::to_string(node->node_id) + " is not unique");
            }
            NodeInfo info;
            info.node = node;
            info.level = level;
            info.strength = level == 0 ? config_.strength : inner;
            info.delta = level == 0 ? config_.delta : config_.inner_delta_or_default();
            check_params(TestParams{node->theta, info.delta, info.strength});
            info.region = TestParams{node->theta, info.delta, info.strength}.region();
            info.inner_errors = path_error_bound(node->path, inner, config_.composition);
            info.effective =
                nested_thresholds(node->theta, info.delta, info.inner_errors.type1, info.inner_errors.type2);
            info.depth = required_depth(node->path, model_.kind(), config_.hard_cap);
            if (node->theta + info.delta > 1.0 || node->theta - info.delta < 0.0) {
                report.warnings.push_back("indifference region of P>=" + format_real(node->theta) +
                                          " clamped to [" + format_real(info.region.p1) + ", " +
                                          format_real(info.region.p0) + "]");
            }
            infos_.push_back(info);
        }
        counters_ = std::vector<Counters>(infos_.size());
    }

    // One hypothesis test for node `idx` from `state`. Sample i uses the key
    // prefix + {i}; a top-level test with a single operator uses (seed, {i}).
    Verdict run_test(std::size_t idx, StateId state, const SampleKey& prefix, bool extend, Method method)
    {
        const NodeInfo& info = infos_[idx];
        auto outcome = [&, this](std::int64_t i) {
            SampleKey key = extend ? prefix.child({static_cast<std::uint64_t>(i)})
                                   : SampleKey(config_.seed, {static_cast<std::uint64_t>(i)});
            const Trace trace = sample_path(model_, state, key, info.depth);
            const EvalContext ctx{&model_, config_.composition, this, key.stream_path};
            return eval_path(info.node->path, trace, ctx).holds;
        };
        // nested tests run inside a worker already
        const unsigned threads = info.level == 0 ? config_.threads : 1;
        BatchedOutcomes source(outcome, threads);

        Verdict v;
        if (method == Method::Ssp) {
            const SspPlan plan = ssp_plan(info.effective, info.strength, config_.max_samples);
            v = ssp_run(plan, info.effective, info.strength, source);
        } else {
            v = sprt_run(info.effective, info.strength, source, config_.max_samples);
        }
        auto& c = counters_[idx];
        c.tests.fetch_add(1, std::memory_order_relaxed);
        c.samples.fetch_add(v.samples_used, std::memory_order_relaxed);
        if (v.accepted == Hypothesis::H0) c.accepted_h0.fetch_add(1, std::memory_order_relaxed);
        return v;
    }

    const ValidatedModel& model_;
    const VerifyConfig& config_;
    std::vector<NodeInfo> infos_;
    std::map<int, std::size_t> index_;
    std::vector<Counters> counters_;
    std::ptrdiff_t top_level_count_ = 0;
    std::mutex memo_mutex_;
    std::map<std::pair<int, std::uint32_t>, std::shared_future<bool>> memo_;
};

}  // namespace

Report verify(const ValidatedModel& model, const FormulaPtr& formula, const VerifyConfig& config)
{
    if (!formula) throw Error(ErrorCode::InvalidParams, "no formula");
    Verifier verifier(model, config);
    return verifier.run(formula);
}

std::int64_t choose_blackbox_c(std::int64_t n, double theta)
{
    if (n < 1) throw Error(ErrorCode::InvalidParams, "black-box mode needs at least one trace");
    if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::InvalidParams, "theta must lie in (0, 1)");
    constexpr double kTie = 1e-12;
    std::int64_t best = -1;
    double best_gap = 0.5;  // F(-1) = 0
    double log_cdf = -std::numeric_limits<double>::infinity();
    for (std::int64_t c = 0; c <= n; ++c) {
        log_cdf = log_add(log_cdf, binomial_log_pmf(c, n, theta));
        const double cdf = c == n ? 1.0 : std::min(1.0, std::exp(log_cdf));
        const double gap = std::abs(cdf - 0.5);
        if (gap < best_gap - kTie) {
            best = c;
            best_gap = gap;
        }
        if (cdf > 0.5 + best_gap + kTie) break;
    }
    return best;
}

Report verify_blackbox(const std::vector<Trace>& traces, const ValidatedModel& model, const PathFormula& path,
                       double theta)
{
    const auto started = Clock::now();
    if (contains_prob(path)) {
        throw Error(ErrorCode::NestedNotSupported, "nested probabilistic operators are not supported in black-box mode");
    }
    if (traces.empty()) throw Error(ErrorCode::InvalidParams, "black-box mode needs at least one trace");
    required_depth(path, model.kind());
    for (const auto& t : traces) {
        for (const auto& step : t.steps) {
            if (!model.is_valid(step.state)) {
                throw Error(ErrorCode::DanglingTarget,
                            "trace visits state " + std::to_string(step.state.index) + " which the model lacks");
            }
        }
    }

    const auto n = static_cast<std::int64_t>(traces.size());
    const std::int64_t c = choose_blackbox_c(n, theta);
    const EvalContext ctx{&model, CompositionMode::Optimistic, nullptr, {}};
    std::int64_t successes = 0;
    for (const auto& t : traces) successes += eval_path(path, t, ctx).holds ? 1 : 0;

    Report report;
    report.formula = fml::prob(theta, path, 0);
    report.method = Method::Ssp;
    report.verdict = successes > c ? Hypothesis::H0 : Hypothesis::H1;
    BlackboxStats bb;
    bb.n = n;
    bb.c = c;
    bb.successes = successes;
    bb.theta = theta;
    bb.type1 = binomial_cdf(c, n, theta);
    bb.type2 = 1.0 - bb.type1;
    report.blackbox = bb;
    report.errors = {bb.type1, bb.type2};

    CheckStats s;
    s.node_id = 0;
    s.theta = theta;
    s.region = s.effective = Region{theta, theta};
    s.tests = 1;
    s.samples = n;
    s.accepted_h0 = report.holds() ? 1 : 0;
    report.checks.push_back(s);
    report.levels.push_back({0, 1, n});
    report.warnings.push_back("transition weights of the model are ignored in black-box mode");
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    return report;
}

Report verify_blackbox(const std::vector<Trace>& traces, const ValidatedModel& model, const FormulaPtr& formula)
{
    bool negated = false;
    const Formula* f = formula.get();
    if (const auto* n = std::get_if<NotNode>(&f->node)) {
        negated = true;
        f = n->operand.get();
    }
    const auto* prob = std::get_if<ProbNode>(&f->node);
    if (!prob) {
        throw Error(ErrorCode::NestedNotSupported,
                    "black-box mode verifies a single P>=theta [ path ] operator or its negation");
    }
    Report report = verify_blackbox(traces, model, prob->path, prob->theta);
    report.formula = formula;
    if (negated) {
        report.verdict = report.holds() ? Hypothesis::H1 : Hypothesis::H0;
        report.errors = compose_negation(report.errors);
    }
    return report;
}

}  // namespace smc
