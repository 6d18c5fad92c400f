#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smc/error.hpp"
#include "smc/random.hpp"

using namespace smc;

namespace {

// Pearson statistic of (u, v) pairs over a 10x10 grid.
double pair_chi_square(const UniformStream& a, const UniformStream& b, int n)
{
    std::array<int, 100> cells{};
    for (int i = 0; i < n; ++i) {
        const int x = static_cast<int>(a(i) * 10);
        const int y = static_cast<int>(b(i) * 10);
        ++cells[x * 10 + y];
    }
    const double expected = n / 100.0;
    double chi = 0.0;
    for (int c : cells) chi += (c - expected) * (c - expected) / expected;
    return chi;
}

// Upper 1% point of chi-square with 99 degrees of freedom.
constexpr double kChi99At01 = 134.642;

}  // namespace

TEST_CASE("philox known-answer vectors")
{
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::apply(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("draws are a pure function of key and index")
{
    const SampleKey key(42, {3, 1, 4});
    CHECK(sample_uniform(key, 17) == sample_uniform(key, 17));
    CHECK(sample_uniform(key, 17) == UniformStream(key)(17));
    CHECK(sample_uniform(key, 17) != sample_uniform(key, 18));
    CHECK(sample_uniform(SampleKey(43, {3, 1, 4}), 17) != sample_uniform(key, 17));
}

TEST_CASE("draws lie in [0, 1)")
{
    const UniformStream s(SampleKey(0, {0}));
    for (std::uint64_t i = 0; i < 100000; ++i) {
        const double u = s(i);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("mean of a million draws")
{
    const UniformStream s(SampleKey(7, {0}));
    double sum = 0.0;
    constexpr int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += s(i);
    const double mean = sum / n;
    CHECK(mean >= 0.499);
    CHECK(mean <= 0.501);
}

TEST_CASE("distinct stream paths are independent")
{
    const std::vector<std::pair<SampleKey, SampleKey>> pairs = {
        {SampleKey(1, {1}), SampleKey(1, {2})},
        {SampleKey(1, {0}), SampleKey(2, {0})},
        {SampleKey(1, {5}), SampleKey(1, {5, 0})},
        {SampleKey(9, {1, 2}), SampleKey(9, {2, 1})},
        {SampleKey(0, {0, 0}), SampleKey(0, {0, 0, 0})},
    };
    for (const auto& [a, b] : pairs) {
        CHECK(pair_chi_square(UniformStream(a), UniformStream(b), 100000) < kChi99At01);
    }
}

TEST_CASE("path encoding is prefix free")
{
    // {1} followed by draw index shifts must not alias {1, 0}
    CHECK(UniformStream(SampleKey(0, {1})).bits(0) != UniformStream(SampleKey(0, {1, 0})).bits(0));
    CHECK(UniformStream(SampleKey(0, {0})).bits(0) != UniformStream(SampleKey(0, {0, 0})).bits(0));
}

TEST_CASE("child appends to the stream path")
{
    const SampleKey k(5, {1, 2});
    CHECK(k.child({3}) == SampleKey(5, {1, 2, 3}));
    CHECK_THROWS_AS(SampleKey(5, std::vector<std::uint64_t>{}), Error);
}
