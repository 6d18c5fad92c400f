#include <doctest.h>

#include <string>
#include <vector>

#include "smc/model_text.hpp"

using namespace smc;

namespace {

Error parse_error(std::string_view text)
{
    try {
        parse_model(text);
    } catch (const Error& e) {
        return e;
    }
    FAIL("parse_model accepted ", text);
    return Error(ErrorCode::Io, "unreachable");
}

Error formula_error(std::string_view text)
{
    try {
        parse_formula(text);
    } catch (const Error& e) {
        return e;
    }
    FAIL("parse_formula accepted ", text);
    return Error(ErrorCode::Io, "unreachable");
}

const std::vector<std::string> kCorpus = {
    "true",
    "false",
    "a",
    "!a",
    "a & b | c",
    "a & (b | c)",
    "!(a & b)",
    "!!a",
    "P>=0.9 [ F<=20 goal ]",
    "P>=0.5 [ X (a & !b) ]",
    "P>=0.8 [ a U<=5 P>=0.9 [ F<=3 b ] ]",
    "P>=0.25 [ G<=4 safe ]",
    "P>=0.1 [ G<=2.5t (up | repairing) ]",
    "P<0.3 [ X a ] & P>0.2 [ a U<=3 b ]",
    "P<=1 [ X true ] | !P>=0 [ F<=0 false ]",
    "P>=0.7 [ P>=0.5 [ X a ] U<=2 P>=0.6 [ G<=1 b ] ]",
    "(a | b) & (c | d) & !(e | f)",
    "P>=0.333 [ F<=0.125t done ]",
};

}  // namespace

TEST_CASE("model text: two-state dtmc")
{
    const auto m = parse_model("dtmc\nstates 2\ninit 0\nlabel goal 1\ntrans 0 1 1.0\ntrans 1 1 1.0");
    CHECK(m.kind() == ModelKind::Dtmc);
    CHECK(m.n_states() == 2);
    CHECK(m.initial() == StateId(0));
    CHECK(m.atom_holds(StateId(1), "goal"));
    CHECK_FALSE(m.atom_holds(StateId(0), "goal"));
}

TEST_CASE("model text: single absorbing ctmc state")
{
    const auto m = parse_model("ctmc\nstates 1\ninit 0");
    CHECK(m.kind() == ModelKind::Ctmc);
    CHECK(m.is_absorbing(StateId(0)));
}

TEST_CASE("model text: row sum error points at the row")
{
    const auto e = parse_error("dtmc\nstates 2\ninit 0\ntrans 0 1 0.5");
    CHECK(e.code() == ErrorCode::RowSumInvalid);
    REQUIRE(e.span());
    CHECK(e.span()->line == 4);
}

TEST_CASE("model text: syntax errors carry spans")
{
    const std::vector<std::string> bad = {
        "",
        "mdp\nstates 1\ninit 0",
        "dtmc\ninit 0\nstates 1",
        "dtmc\nstates 2\ninit 0\ninit 1",
        "dtmc\nstates 2",
        "dtmc\nstates 2\ninit 0\ntrans 0 1 1,0",
        "dtmc\nstates 2\ninit 0\ntrans 0 1 1.0 extra",
        "dtmc\nstates 2\ninit 0\ntrans 0 1 0.5\ntrans 0 1 0.5\ntrans 1 1 1",
        "dtmc\nstates 2\ninit 0\nlabel 1x 0",
        "dtmc\nstates x\ninit 0",
        "dtmc\nstates 2\ninit 0\nbogus 1",
    };
    for (const auto& text : bad) {
        CAPTURE(text);
        const auto e = parse_error(text);
        CHECK(e.span().has_value());
    }
    CHECK(parse_error("dtmc\nstates 2\ninit 0\ntrans 0 7 1\ntrans 1 1 1").code() == ErrorCode::DanglingTarget);
}

TEST_CASE("model text: comments, CRLF and BOM")
{
    const auto m = parse_model("\xEF\xBB\xBF# header\r\nctmc # kind\r\nstates 2\r\ninit 1\r\n\r\ntrans 0 1 2.5 # rate\r\n");
    CHECK(m.kind() == ModelKind::Ctmc);
    CHECK(m.initial() == StateId(1));
    CHECK(m.exit_rate(StateId(0)) == 2.5);
}

TEST_CASE("model text: render round-trips")
{
    const std::string text = "ctmc\nstates 3\ninit 2\nlabel up 0 1\nlabel down 2\n"
                             "trans 0 1 0.2\ntrans 1 0 1\ntrans 1 2 0.1\ntrans 2 1 0.5\n";
    const auto m = parse_model(text);
    const auto again = parse_model(render_model(m.model()));
    CHECK(again.model() == m.model());
    CHECK(render_model(again.model()) == render_model(m.model()));
}

TEST_CASE("formula: F desugars to true-until")
{
    const auto f = parse_formula("P>=0.9 [ F<=20 goal ]");
    const auto expected = fml::prob(0.9, fml::until(fml::truth(), fml::atom("goal"), Steps{20}), 0);
    CHECK(*f == *expected);
}

TEST_CASE("formula: next over a conjunction")
{
    const auto f = parse_formula("P>=0.5 [ X (a & !b) ]");
    const auto expected = fml::prob(0.5, fml::next(fml::conj(fml::atom("a"), fml::negation(fml::atom("b")))), 0);
    CHECK(*f == *expected);
}

TEST_CASE("formula: nested Prob inside an until")
{
    const auto f = parse_formula("P>=0.8 [ a U<=5 P>=0.9 [ F<=3 b ] ]");
    const auto& outer = std::get<ProbNode>(f->node);
    CHECK(outer.node_id == 0);
    const auto& inner = std::get<ProbNode>(outer.path.rhs->node);
    CHECK(inner.node_id == 1);
    CHECK(inner.theta == 0.9);
    CHECK(std::get<Steps>(inner.path.bound).k == 3);
    CHECK(prob_depth(*f) == 2);
}

TEST_CASE("formula: comparison operators normalize through negation")
{
    CHECK(*parse_formula("P<0.3 [ X a ]") == *fml::negation(fml::prob(0.3, fml::next(fml::atom("a")), 0)));
    CHECK(*parse_formula("P<=0.3 [ X a ]") == *fml::negation(fml::prob(0.3, fml::next(fml::atom("a")), 0)));
    CHECK(*parse_formula("P>0.3 [ X a ]") == *fml::prob(0.3, fml::next(fml::atom("a")), 0));
}

TEST_CASE("formula: precedence and associativity")
{
    const auto a = fml::atom("a"), b = fml::atom("b"), c = fml::atom("c");
    CHECK(*parse_formula("a | b & c") == *fml::disj(a, fml::conj(b, c)));
    CHECK(*parse_formula("a & b & c") == *fml::conj(fml::conj(a, b), c));
    CHECK(*parse_formula("!a & b") == *fml::conj(fml::negation(a), b));
}

TEST_CASE("formula: render")
{
    CHECK(render_formula(*fml::prob(0.9, fml::next(fml::atom("a")), 0)) == "P>=0.9 [ X a ]");
    CHECK(render_formula(*parse_formula("P>=0.9 [ F<=20 goal ]")) == "P>=0.9 [ true U<=20 goal ]");
    CHECK(render_formula(*parse_formula("P>=0.5 [ G<=3 a ]")) == "P>=0.5 [ G<=3 a ]");
    CHECK(render_formula(*parse_formula("P>=0.5 [ a U<=1.5t b ]")) == "P>=0.5 [ a U<=1.5t b ]");
}

TEST_CASE("formula: round-trip over the corpus")
{
    for (const auto& text : kCorpus) {
        CAPTURE(text);
        const auto f = parse_formula(text);
        const auto again = parse_formula(render_formula(*f));
        CHECK(*again == *f);
    }
}

TEST_CASE("formula: parse errors carry spans")
{
    const std::vector<std::string> bad = {
        "",          "a &",         "P>=1.5 [ X a ]", "P>=0.5 X a",     "P>=0.5 [ F<= a ]",
        "(a",        "a b",         "P>=0,5 [ X a ]", "P>=0.5 [ a U b ]", "P>=0.5 [ F<=-1 a ]",
        "P=0.5 [ X a ]", "a & | b", "P>=0.5 [ X a",   "@",
    };
    for (const auto& text : bad) {
        CAPTURE(text);
        const auto e = formula_error(text);
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(e.span().has_value());
    }
}

TEST_CASE("formula: bare path formulas")
{
    const auto p = parse_path_formula("F<=3 goal");
    CHECK(p == fml::eventually(fml::atom("goal"), Steps{3}));
    CHECK(render_path(p) == "true U<=3 goal");
}
