#include "smc/logic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace smc {

ErrorPair compose_negation(ErrorPair e)
{
    return {e.type2, e.type1};
}

ErrorPair compose_conjunction(std::span<const ErrorPair> operands, CompositionMode mode)
{
    if (operands.empty()) return {};
    ErrorPair out = operands.front();
    for (const auto& e : operands.subspan(1)) {
        out.type1 = mode == CompositionMode::Optimistic ? std::min(out.type1, e.type1) : std::max(out.type1, e.type1);
        out.type2 = std::max(out.type2, e.type2);
    }
    return out;
}

ErrorPair compose_disjunction(std::span<const ErrorPair> operands, CompositionMode mode)
{
    std::vector<ErrorPair> negated;
    negated.reserve(operands.size());
    for (const auto& e : operands) negated.push_back(compose_negation(e));
    return compose_negation(compose_conjunction(negated, mode));
}

namespace {

ErrorPair conj2(ErrorPair a, ErrorPair b, CompositionMode mode)
{
    const ErrorPair ops[] = {a, b};
    return compose_conjunction(ops, mode);
}

ErrorPair disj2(ErrorPair a, ErrorPair b, CompositionMode mode)
{
    const ErrorPair ops[] = {a, b};
    return compose_disjunction(ops, mode);
}

// Until unfolds to g_0 | f_0 & (g_1 | f_1 & (g_2 | ...)). Errors are folded
// over the disjunction of terms f_0 & ... & f_{i-1} & g_i visited up to the
// decision point; when the until fails because f fails, the cut prefix
// f_0 & ... & f_i is one more disjunct, so the error of that f counts.
class UntilErrors {
  public:
    explicit UntilErrors(CompositionMode mode) : mode_(mode) {}

    void term(ErrorPair g_err) { add(has_prefix_ ? conj2(prefix_, g_err, mode_) : g_err); }

    void advance(ErrorPair f_err)
    {
        prefix_ = has_prefix_ ? conj2(prefix_, f_err, mode_) : f_err;
        has_prefix_ = true;
    }

    void cut()
    {
        if (has_prefix_) add(prefix_);
    }

    ErrorPair total() const { return total_; }

  private:
    void add(ErrorPair t)
    {
        total_ = has_total_ ? disj2(total_, t, mode_) : t;
        has_total_ = true;
    }

    CompositionMode mode_;
    bool has_prefix_ = false;
    bool has_total_ = false;
    ErrorPair prefix_;
    ErrorPair total_;
};

Bound max_bound(const Bound& a, const Bound& b)
{
    if (a.index() != b.index()) {
        throw Error(ErrorCode::BoundTypeMismatch, "cannot combine step and time bounds in one depth");
    }
    if (const auto* s = std::get_if<Steps>(&a)) return Steps{std::max(s->k, std::get<Steps>(b).k)};
    return Time{std::max(std::get<Time>(a).t, std::get<Time>(b).t)};
}

std::optional<Bound> top_level_depth(const Formula& f, ModelKind kind, std::uint64_t hard_cap)
{
    auto combine = [&](const FormulaPtr& a, const FormulaPtr& b) -> std::optional<Bound> {
        auto x = top_level_depth(*a, kind, hard_cap);
        auto y = top_level_depth(*b, kind, hard_cap);
        if (!x) return y;
        if (!y) return x;
        return max_bound(*x, *y);
    };
    if (const auto* n = std::get_if<NotNode>(&f.node)) return top_level_depth(*n->operand, kind, hard_cap);
    if (const auto* n = std::get_if<AndNode>(&f.node)) return combine(n->lhs, n->rhs);
    if (const auto* n = std::get_if<OrNode>(&f.node)) return combine(n->lhs, n->rhs);
    if (const auto* n = std::get_if<ProbNode>(&f.node)) return required_depth(n->path, kind, hard_cap).kind;
    return std::nullopt;
}

}  // namespace

DepthBound required_depth(const PathFormula& p, ModelKind kind, std::uint64_t hard_cap)
{
    if (p.kind == PathFormula::Kind::Next) return DepthBound{Steps{1}, hard_cap};
    if (std::holds_alternative<Time>(p.bound) && kind == ModelKind::Dtmc) {
        throw Error(ErrorCode::BoundTypeMismatch, "time-bounded until on a DTMC; use a step bound");
    }
    return DepthBound{p.bound, hard_cap};
}

DepthBound required_depth(const Formula& f, ModelKind kind, std::uint64_t hard_cap)
{
    return DepthBound{top_level_depth(f, kind, hard_cap).value_or(Steps{0}), hard_cap};
}

StateVerdict eval_state(const Formula& f, StateId state, const EvalContext& ctx, std::uint64_t position)
{
    return std::visit(
        [&](const auto& n) -> StateVerdict {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TrueNode>) {
                return {true, {}};
            } else if constexpr (std::is_same_v<T, FalseNode>) {
                return {false, {}};
            } else if constexpr (std::is_same_v<T, AtomNode>) {
                return {ctx.model->atom_holds(state, n.name), {}};
            } else if constexpr (std::is_same_v<T, NotNode>) {
                const auto v = eval_state(*n.operand, state, ctx, position);
                return {!v.holds, compose_negation(v.errors)};
            } else if constexpr (std::is_same_v<T, AndNode>) {
                const auto a = eval_state(*n.lhs, state, ctx, position);
                const auto b = eval_state(*n.rhs, state, ctx, position);
                return {a.holds && b.holds, conj2(a.errors, b.errors, ctx.mode)};
            } else if constexpr (std::is_same_v<T, OrNode>) {
                const auto a = eval_state(*n.lhs, state, ctx, position);
                const auto b = eval_state(*n.rhs, state, ctx, position);
                return {a.holds || b.holds, disj2(a.errors, b.errors, ctx.mode)};
            } else {
                if (!ctx.checker) {
                    throw Error(ErrorCode::NestedNotSupported, "probabilistic operator needs a simulation context");
                }
                return ctx.checker->check(n, state, EvalSite{ctx.trace_path, position});
            }
        },
        f.node);
}

PathVerdict eval_path(const PathFormula& p, const Trace& trace, const EvalContext& ctx)
{
    if (trace.steps.empty()) throw Error(ErrorCode::TraceTooShort, "empty trace");
    const std::size_t last = trace.size() - 1;

    auto finish = [&](PathVerdict v) {
        if (p.negated) return PathVerdict{!v.holds, compose_negation(v.errors)};
        return v;
    };

    if (p.kind == PathFormula::Kind::Next) {
        if (last < 1 && trace.truncated) {
            throw Error(ErrorCode::TraceTooShort, "X needs one transition but the trace has none");
        }
        const std::size_t pos = last >= 1 ? 1 : 0;
        const auto v = eval_state(*p.rhs, trace.state(pos), ctx, 1);
        return finish({v.holds, v.errors});
    }

    const auto* steps = std::get_if<Steps>(&p.bound);
    const double t_max = steps ? 0.0 : std::get<Time>(p.bound).t;
    const std::uint64_t k_max = steps ? steps->k : std::numeric_limits<std::uint64_t>::max();

    UntilErrors errors(ctx.mode);
    for (std::uint64_t i = 0;; ++i) {
        // Position i of the (self-loop extended) execution.
        const bool beyond = i > last;
        if (beyond && trace.truncated) {
            if (!steps && trace.horizon >= t_max) return finish({false, errors.total()});
            throw Error(ErrorCode::TraceTooShort, "trace ends at position " + std::to_string(last) +
                                                      " before the until is decided");
        }
        if (!steps && !beyond && trace.steps[i].entry_time > t_max) return finish({false, errors.total()});

        const StateId s = trace.state(std::min<std::size_t>(i, last));
        const auto g = eval_state(*p.rhs, s, ctx, i);
        errors.term(g.errors);
        if (g.holds) return finish({true, errors.total()});
        if (i >= k_max) return finish({false, errors.total()});

        const auto f = eval_state(*p.lhs, s, ctx, i);
        errors.advance(f.errors);
        if (!f.holds) {
            errors.cut();
            return finish({false, errors.total()});
        }
        // An absorbed trace repeats its last state forever: nothing changes.
        if (!trace.truncated && i >= last) return finish({false, errors.total()});
    }
}

ErrorPair formula_errors(const Formula& f, const Strength& leaf, CompositionMode mode)
{
    return std::visit(
        [&](const auto& n) -> ErrorPair {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NotNode>) {
                return compose_negation(formula_errors(*n.operand, leaf, mode));
            } else if constexpr (std::is_same_v<T, AndNode>) {
                return conj2(formula_errors(*n.lhs, leaf, mode), formula_errors(*n.rhs, leaf, mode), mode);
            } else if constexpr (std::is_same_v<T, OrNode>) {
                return disj2(formula_errors(*n.lhs, leaf, mode), formula_errors(*n.rhs, leaf, mode), mode);
            } else if constexpr (std::is_same_v<T, ProbNode>) {
                return {leaf.alpha, leaf.beta};
            } else {
                return {};
            }
        },
        f.node);
}

ErrorPair path_error_bound(const PathFormula& p, const Strength& leaf, CompositionMode mode)
{
    ErrorPair bound;
    auto widen = [&](ErrorPair e) {
        bound.type1 = std::max(bound.type1, e.type1);
        bound.type2 = std::max(bound.type2, e.type2);
    };
    if (p.kind == PathFormula::Kind::Next) {
        bound = formula_errors(*p.rhs, leaf, mode);
    } else {
        const ErrorPair f = formula_errors(*p.lhs, leaf, mode);
        const ErrorPair g = formula_errors(*p.rhs, leaf, mode);
        const std::uint64_t k = std::holds_alternative<Steps>(p.bound) ? std::get<Steps>(p.bound).k
                                                                       : std::numeric_limits<std::uint64_t>::max();
        // Every position carries the same errors and min/max are idempotent,
        // so decisions past position 2 add nothing new.
        UntilErrors fold(mode);
        for (std::uint64_t i = 0; i <= std::min<std::uint64_t>(k, 2); ++i) {
            fold.term(g);
            widen(fold.total());  // g holds here, or the bound is reached
            if (i == k) break;
            UntilErrors failing = fold;
            failing.advance(f);
            failing.cut();
            widen(failing.total());  // f fails here
            fold.advance(f);
            widen(fold.total());  // undecided at the end of an absorbed or timed-out trace
        }
    }
    if (p.negated) bound = compose_negation(bound);
    return bound;
}

}  // namespace smc
