#include "smc/random.hpp"

#include "smc/error.hpp"

namespace smc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// Two independent 64-bit digests of (seed, path), length-prefixed so that
// paths of different lengths never collide structurally.
std::uint64_t digest(std::uint64_t seed, const std::vector<std::uint64_t>& path, std::uint64_t salt)
{
    std::uint64_t h = mix64(seed ^ salt);
    h = mix64(h ^ mix64(path.size() + salt));
    for (std::uint64_t v : path) h = mix64(h ^ mix64(v ^ (salt * 0x2545F4914F6CDD1DULL)));
    return h;
}

}  // namespace

SampleKey::SampleKey(std::uint64_t s, std::vector<std::uint64_t> path)
    : seed(s), stream_path(std::move(path))
{
    if (stream_path.empty()) throw Error(ErrorCode::InvalidParams, "SampleKey needs a non-empty stream path");
}

SampleKey SampleKey::child(std::initializer_list<std::uint64_t> more) const
{
    SampleKey k = *this;
    k.stream_path.insert(k.stream_path.end(), more.begin(), more.end());
    return k;
}

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

UniformStream::UniformStream(const SampleKey& key) noexcept
{
    const std::uint64_t a = digest(key.seed, key.stream_path, 0x5851F42D4C957F2DULL);
    const std::uint64_t b = digest(key.seed, key.stream_path, 0x14057B7EF767814FULL);
    key_ = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)};
    hi0_ = static_cast<std::uint32_t>(b);
    hi1_ = static_cast<std::uint32_t>(b >> 32);
}

std::uint64_t UniformStream::bits(std::uint64_t draw_index) const noexcept
{
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(draw_index),
                                  static_cast<std::uint32_t>(draw_index >> 32), hi0_, hi1_};
    const auto out = Philox4x32::apply(ctr, key_);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double UniformStream::operator()(std::uint64_t draw_index) const noexcept
{
    return static_cast<double>(bits(draw_index) >> 11) * 0x1.0p-53;
}

double sample_uniform(const SampleKey& key, std::uint64_t draw_index)
{
    return UniformStream(key)(draw_index);
}

}  // namespace smc
