#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace smc {

/// Identifies one independent random stream. The path names where in the
/// verification the stream is used: outer sample index first, then one
/// triple (trace position, Prob node id, inner sample index) per nesting level.
struct SampleKey {
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> stream_path{0};

    SampleKey() = default;
    SampleKey(std::uint64_t s, std::vector<std::uint64_t> path);
    SampleKey(std::uint64_t s, std::initializer_list<std::uint64_t> path)
        : SampleKey(s, std::vector<std::uint64_t>(path))
    {
    }

    /// Copy of this key with `more` appended to the path.
    SampleKey child(std::initializer_list<std::uint64_t> more) const;

    friend bool operator==(const SampleKey&, const SampleKey&) = default;
};

/// Philox4x32-10 (Salmon et al., SC'11). A bijection of a 128-bit counter
/// under a 64-bit key.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) noexcept;
};

/// Precomputed stream state for one SampleKey; draws are a pure function of
/// (key, draw_index).
class UniformStream {
  public:
    explicit UniformStream(const SampleKey& key) noexcept;

    /// Uniform real in [0, 1) with 53 random bits.
    double operator()(std::uint64_t draw_index) const noexcept;

    std::uint64_t bits(std::uint64_t draw_index) const noexcept;

  private:
    Philox4x32::Key key_;
    std::uint32_t hi0_, hi1_;
};

double sample_uniform(const SampleKey& key, std::uint64_t draw_index);

/// SplitMix64 output function, used to hash seeds and paths.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace smc
