#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "smc/logic.hpp"
#include "smc/model_text.hpp"

using namespace smc;

namespace {

// Decides every Prob node by a fixed table and reports a fixed strength.
class TableChecker : public ProbChecker {
  public:
    TableChecker(Strength s, std::uint64_t salt) : strength_(s), salt_(salt) {}

    StateVerdict check(const ProbNode& node, StateId state, const EvalSite&) override
    {
        ++calls;
        const bool holds = (mix64(salt_ ^ (static_cast<std::uint64_t>(node.node_id) << 32) ^ state.index) & 1) != 0;
        return {holds, {strength_.alpha, strength_.beta}};
    }

    int calls = 0;

  private:
    Strength strength_;
    std::uint64_t salt_;
};

Trace dtmc_trace(std::vector<std::uint32_t> states, bool truncated = true)
{
    Trace t;
    for (std::size_t i = 0; i < states.size(); ++i) t.steps.push_back({StateId(states[i]), static_cast<double>(i)});
    t.truncated = truncated;
    t.horizon = truncated ? static_cast<double>(states.size() - 1) : std::numeric_limits<double>::infinity();
    return t;
}

ValidatedModel three_state()
{
    return parse_model("dtmc\nstates 3\ninit 0\nlabel goal 2\nlabel a 0 1\nlabel b 2\n"
                       "trans 0 1 1\ntrans 1 2 1\ntrans 2 2 1");
}

bool holds(const ValidatedModel& m, std::string_view path, const Trace& t)
{
    const EvalContext ctx{&m, CompositionMode::Optimistic, nullptr, {}};
    return eval_path(parse_path_formula(path), t, ctx).holds;
}

ErrorCode error_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("required depth")
{
    CHECK(required_depth(*parse_formula("P>=0.9 [ X a ]"), ModelKind::Dtmc).kind == Bound{Steps{1}});
    CHECK(required_depth(*parse_formula("P>=0.9 [ a U<=5 b ]"), ModelKind::Dtmc).kind == Bound{Steps{5}});
    CHECK(required_depth(*parse_formula("P>=0.8 [ a U<=5 P>=0.9 [ F<=30 b ] ]"), ModelKind::Dtmc).kind ==
          Bound{Steps{5}});
    CHECK(required_depth(*parse_formula("P>=0.8 [ F<=2 a ] | !P>=0.1 [ G<=7 b ]"), ModelKind::Dtmc).kind ==
          Bound{Steps{7}});
    CHECK(required_depth(*parse_formula("P>=0.8 [ F<=2.5t a ]"), ModelKind::Ctmc).kind == Bound{Time{2.5}});
    CHECK(required_depth(*parse_formula("a & b"), ModelKind::Dtmc).kind == Bound{Steps{0}});
    CHECK(error_of([] { required_depth(*parse_formula("P>=0.8 [ F<=2.5t a ]"), ModelKind::Dtmc); }) ==
          ErrorCode::BoundTypeMismatch);
    CHECK(error_of([] {
              required_depth(*parse_formula("P>=0.8 [ F<=2.5t a ] & P>=0.1 [ F<=3 a ]"), ModelKind::Ctmc);
          }) == ErrorCode::BoundTypeMismatch);
}

TEST_CASE("composition examples")
{
    const ErrorPair exact[] = {{0, 0}, {0, 0}};
    CHECK(compose_conjunction(exact, CompositionMode::Optimistic) == ErrorPair{0, 0});
    const ErrorPair two[] = {{0.01, 0.05}, {0.02, 0.03}};
    CHECK(compose_conjunction(two, CompositionMode::Optimistic) == ErrorPair{0.01, 0.05});
    CHECK(compose_conjunction(two, CompositionMode::Conservative) == ErrorPair{0.02, 0.05});
    CHECK(compose_negation({0.2, 0.1}) == ErrorPair{0.1, 0.2});
    CHECK(compose_disjunction(two, CompositionMode::Optimistic) == ErrorPair{0.02, 0.03});
}

TEST_CASE("until on explicit traces")
{
    const auto m = three_state();
    const auto t = dtmc_trace({0, 1, 2});
    CHECK(holds(m, "F<=2 goal", t));
    CHECK_FALSE(holds(m, "F<=1 goal", t));
    CHECK(holds(m, "a U<=2 b", t));
    CHECK_FALSE(holds(m, "b U<=2 a", dtmc_trace({2, 2, 2})));
    CHECK(holds(m, "X a", t));
    CHECK(holds(m, "G<=1 a", t));
    CHECK_FALSE(holds(m, "G<=2 a", t));
    CHECK(holds(m, "F<=0 a", t));
}

TEST_CASE("absorbed traces extend by self-loops")
{
    const auto m = three_state();
    const auto t = dtmc_trace({0, 1, 2}, false);
    CHECK(holds(m, "F<=50 goal", t));
    CHECK_FALSE(holds(m, "F<=50 a & b", t));
    CHECK(holds(m, "G<=50 (a | b)", t));
    CHECK(holds(m, "X goal", dtmc_trace({2}, false)));
}

TEST_CASE("short traces are rejected")
{
    const auto m = three_state();
    CHECK(error_of([&] { holds(m, "F<=5 goal", dtmc_trace({0, 1})); }) == ErrorCode::TraceTooShort);
    CHECK(error_of([&] { holds(m, "X goal", dtmc_trace({0})); }) == ErrorCode::TraceTooShort);
    CHECK(error_of([&] { holds(m, "X goal", Trace{}); }) == ErrorCode::TraceTooShort);
    // decided before the end of the trace
    CHECK(holds(m, "F<=5 a", dtmc_trace({0, 1})));
}

TEST_CASE("time-bounded until on ctmc traces")
{
    const auto m = parse_model("ctmc\nstates 3\ninit 0\nlabel up 0 1\nlabel down 2\n"
                               "trans 0 1 1\ntrans 1 2 1\ntrans 2 0 1");
    Trace t;
    t.steps = {{StateId(0), 0.0}, {StateId(1), 1.0}, {StateId(2), 2.5}};
    t.truncated = true;
    t.horizon = 3.0;
    CHECK(holds(m, "F<=3t down", t));
    CHECK_FALSE(holds(m, "F<=2t down", t));
    CHECK(holds(m, "G<=2t up", t));
    CHECK_FALSE(holds(m, "G<=2.5t up", t));
    CHECK(error_of([&] { holds(m, "F<=3.5t up & down", t); }) == ErrorCode::TraceTooShort);
    CHECK_FALSE(holds(m, "F<=3t up & down", t));
}

TEST_CASE("propositional evaluation agrees with direct semantics on every short trace")
{
    std::mt19937_64 rng(77);
    const std::vector<std::string> paths = {"X a",           "X (a & !b)",     "a U<=3 b",      "F<=2 b",
                                            "G<=4 a",        "(a | b) U<=4 !a", "F<=0 a",        "G<=1 (a & b)",
                                            "!a U<=5 a & b", "true U<=5 false", "G<=5 (a | !b)", "b U<=1 a"};
    for (int chain = 0; chain < 6; ++chain) {
        const auto m = oracle::random_dtmc(rng);
        const std::uint32_t n = m.n_states();
        for (int len = 2; len <= 6; ++len) {
            std::vector<std::uint32_t> seq(len, 0);
            while (true) {
                std::vector<StateId> states;
                for (auto s : seq) states.push_back(StateId(s));
                const auto trace = dtmc_trace(seq);
                for (const auto& text : paths) {
                    const auto p = parse_path_formula(text);
                    const auto k = p.kind == PathFormula::Kind::Next ? 1 : std::get<Steps>(p.bound).k;
                    if (k + 1 > static_cast<std::uint64_t>(len)) continue;
                    const EvalContext ctx{&m, CompositionMode::Optimistic, nullptr, {}};
                    const auto v = eval_path(p, trace, ctx);
                    REQUIRE(v.holds == oracle::holds_on_states(m, p, states));
                    REQUIRE(v.errors == ErrorPair{});
                }
                int d = 0;
                while (d < len && ++seq[d] == n) seq[d++] = 0;
                if (d == len) break;
            }
        }
    }
}

TEST_CASE("eventually is monotone in its bound")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto m = oracle::random_dtmc(rng);
        std::vector<std::uint32_t> seq;
        std::uniform_int_distribution<std::uint32_t> pick(0, m.n_states() - 1);
        for (int j = 0; j < 8; ++j) seq.push_back(pick(rng));
        const auto t = dtmc_trace(seq);
        bool seen = false;
        for (int k = 0; k <= 7; ++k) {
            const bool now = holds(m, "F<=" + std::to_string(k) + " (a & b)", t);
            if (seen) CHECK(now);
            seen = seen || now;
        }
    }
}

TEST_CASE("G is the dual of F")
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 300; ++i) {
        const auto m = oracle::random_dtmc(rng);
        std::vector<std::uint32_t> seq;
        std::uniform_int_distribution<std::uint32_t> pick(0, m.n_states() - 1);
        for (int j = 0; j < 6; ++j) seq.push_back(pick(rng));
        const bool absorbed = i % 3 == 0;
        const auto t = dtmc_trace(seq, !absorbed);
        for (int k = 0; k <= 5; ++k) {
            const auto ks = std::to_string(k);
            CHECK(holds(m, "G<=" + ks + " (a | b)", t) == !holds(m, "F<=" + ks + " !(a | b)", t));
        }
    }
}

TEST_CASE("nested operators need a checker")
{
    const auto m = three_state();
    const EvalContext ctx{&m, CompositionMode::Optimistic, nullptr, {}};
    CHECK(error_of([&] { eval_state(*parse_formula("P>=0.5 [ X a ]"), StateId(0), ctx); }) ==
          ErrorCode::NestedNotSupported);
}

TEST_CASE("errors are zero exactly when no Prob node is reached")
{
    const auto m = three_state();
    TableChecker checker({0.03, 0.07}, 1);
    const EvalContext ctx{&m, CompositionMode::Optimistic, &checker, {}};
    CHECK(eval_path(parse_path_formula("F<=2 (a | !b)"), dtmc_trace({0, 1, 2}), ctx).errors == ErrorPair{});
    const auto v = eval_path(parse_path_formula("X P>=0.5 [ X a ]"), dtmc_trace({0, 1, 2}), ctx);
    CHECK(v.errors == ErrorPair{0.03, 0.07});
    CHECK(checker.calls == 1);
}

TEST_CASE("reported errors never exceed the static bound")
{
    std::mt19937_64 rng(9);
    const std::vector<std::string> paths = {
        "P>=0.5 [ X a ] U<=3 b",
        "a U<=4 P>=0.5 [ X b ]",
        "P>=0.5 [ X a ] U<=4 P>=0.2 [ F<=2 b ]",
        "G<=3 P>=0.5 [ X a ]",
        "F<=2 (P>=0.5 [ X a ] & !P>=0.3 [ X b ])",
        "X (P>=0.5 [ X a ] | b)",
        "(a | P>=0.1 [ X a ]) U<=0 b",
    };
    for (const auto mode : {CompositionMode::Optimistic, CompositionMode::Conservative}) {
        for (const auto& text : paths) {
            const auto p = parse_path_formula(text);
            const Strength leaf{0.02, 0.05};
            const auto bound = path_error_bound(p, leaf, mode);
            if (text.find("U<=0") == std::string::npos) CHECK(bound.type1 > 0.0);
            for (int i = 0; i < 300; ++i) {
                const auto m = oracle::random_dtmc(rng, 4);
                TableChecker checker(leaf, rng());
                const EvalContext ctx{&m, mode, &checker, {}};
                std::vector<std::uint32_t> seq;
                std::uniform_int_distribution<std::uint32_t> pick(0, m.n_states() - 1);
                for (int j = 0; j < 6; ++j) seq.push_back(pick(rng));
                const auto v = eval_path(p, dtmc_trace(seq, i % 2 == 0), ctx);
                CAPTURE(text);
                CHECK(v.errors.type1 <= bound.type1);
                CHECK(v.errors.type2 <= bound.type2);
            }
        }
    }
}

TEST_CASE("until error bound by hand")
{
    // f U<=2 b with f statistical (0.04, 0.06) and b exact. Decision points:
    // b at 0: (0,0); f fails at i: f_0..f_i; b at i>0: f_0..f_{i-1} & b.
    const auto p = parse_path_formula("P>=0.5 [ X a ] U<=2 b");
    // optimistic: conjunction takes min type1, so f & b = (0, 0.06); disjunction
    // with the exact (0, 0) term takes min type2.
    CHECK(path_error_bound(p, {0.04, 0.06}, CompositionMode::Optimistic) == ErrorPair{0.04, 0.0});
    CHECK(path_error_bound(p, {0.04, 0.06}, CompositionMode::Conservative) == ErrorPair{0.04, 0.06});
    CHECK(path_error_bound(parse_path_formula("P>=0.5 [ X a ] U<=0 b"), {0.04, 0.06}, CompositionMode::Optimistic) ==
          ErrorPair{});
    // G = !(F !x): the two negations cancel
    CHECK(path_error_bound(parse_path_formula("G<=2 P>=0.5 [ X a ]"), {0.04, 0.06}, CompositionMode::Optimistic) ==
          ErrorPair{0.04, 0.06});
}
