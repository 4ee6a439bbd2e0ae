#include "dynamo/rng.hpp"

#include <cmath>
#include <numbers>

namespace dynamo {

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RngSpec substream(const RngSpec& base, std::uint64_t index) {
    return {base.seed, splitmix64(base.stream ^ splitmix64(base.seed + index))};
}

NormalStream::NormalStream(const RngSpec& spec)
    : key_{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32)},
      stream_(spec.stream) {}

double NormalStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const PhiloxCounter out = philox4x32(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
         static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
        key_);
    ++block_;
    constexpr double kTwo53 = 9007199254740992.0;
    auto uniform = [&](std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) / kTwo53;
    };
    const double u1 = uniform(out[0], out[1]);
    const double u2 = uniform(out[2], out[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
}

}  // namespace dynamo
