#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "smc/model.hpp"

using namespace smc;

namespace {

Dtmc two_state()
{
    Dtmc d;
    d.n_states = 2;
    d.rows = {{{StateId(1), 1.0}}, {{StateId(1), 1.0}}};
    return d;
}

ErrorCode code_of(Model m)
{
    try {
        validate(std::move(m));
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("validate accepted an invalid model");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("deterministic two-state chain is valid")
{
    const auto m = validate(two_state());
    CHECK(m.kind() == ModelKind::Dtmc);
    CHECK(m.n_states() == 2);
    CHECK(m.is_absorbing(StateId(1)));
    CHECK_FALSE(m.is_absorbing(StateId(0)));
}

TEST_CASE("row summing to 1.1 is rejected")
{
    Dtmc d = two_state();
    d.rows[0] = {{StateId(1), 0.6}, {StateId(0), 0.5}};
    CHECK(code_of(d) == ErrorCode::RowSumInvalid);
}

TEST_CASE("zero or negative weights are rejected")
{
    Ctmc c;
    c.n_states = 2;
    c.rows = {{{StateId(1), 0.0}}, {}};
    CHECK(code_of(c) == ErrorCode::NegativeOrZeroWeight);
    c.rows[0][0].weight = -1.0;
    CHECK(code_of(c) == ErrorCode::NegativeOrZeroWeight);
    c.rows[0][0].weight = std::nan("");
    CHECK(code_of(c) == ErrorCode::NegativeOrZeroWeight);
}

TEST_CASE("structural errors")
{
    Dtmc d = two_state();
    d.rows[0][0].target = StateId(2);
    CHECK(code_of(d) == ErrorCode::DanglingTarget);

    d = two_state();
    d.initial = StateId(5);
    CHECK(code_of(d) == ErrorCode::DanglingTarget);

    d = two_state();
    d.labels["goal"].insert(StateId(9));
    CHECK(code_of(d) == ErrorCode::DanglingTarget);

    d = two_state();
    d.rows[0].clear();
    CHECK(code_of(d) == ErrorCode::EmptyDtmcRow);
}

TEST_CASE("atom queries; unknown atoms are false")
{
    Dtmc d;
    d.n_states = 3;
    d.rows = {{{StateId(1), 1.0}}, {{StateId(2), 1.0}}, {{StateId(2), 1.0}}};
    d.labels["goal"] = {StateId(2)};
    const auto m = validate(d);
    CHECK(atom_holds(m, StateId(2), "goal"));
    CHECK_FALSE(atom_holds(m, StateId(0), "goal"));
    CHECK_FALSE(atom_holds(m, StateId(0), "undeclared"));
    CHECK(m.has_atom("goal"));
    CHECK_FALSE(m.has_atom("undeclared"));
}

TEST_CASE("rows within tolerance are renormalized to sum to exactly 1")
{
    Dtmc d;
    d.n_states = 3;
    d.rows = {{{StateId(0), 0.1}, {StateId(1), 0.2}, {StateId(2), 0.7 + 5e-10}},
              {{StateId(1), 1.0 / 3}, {StateId(2), 2.0 / 3}},
              {{StateId(2), 1.0}}};
    const auto m = validate(d);
    for (std::uint32_t s = 0; s < 3; ++s) {
        double sum = 0.0;
        for (const auto& t : m.row(StateId(s))) sum += t.weight;
        CHECK(sum == 1.0);
        CHECK(m.cumulative(StateId(s)).back() == 1.0);
    }
}

TEST_CASE("validate is idempotent")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto once = oracle::random_dtmc(rng);
        const auto twice = validate(once.model());
        CHECK(twice.model() == once.model());
    }
}

TEST_CASE("ctmc exit rates and absorbing states")
{
    Ctmc c;
    c.n_states = 2;
    c.rows = {{{StateId(1), 2.5}, {StateId(0), 0.5}}, {}};
    const auto m = validate(c);
    CHECK(m.exit_rate(StateId(0)) == doctest::Approx(3.0));
    CHECK(m.exit_rate(StateId(1)) == 0.0);
    CHECK(m.is_absorbing(StateId(1)));
}
