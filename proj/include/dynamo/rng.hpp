#pragma once

#include <array>
#include <cstdint>

namespace dynamo {

/// Identifies one reproducible normal-variate stream.
///
/// The generator is Philox4x32-10 keyed by `seed`; `stream` occupies the
/// upper 64 bits of the 128-bit counter and the draw index the lower 64.
/// Each counter block yields two 53-bit uniforms in (0, 1), mapped to two
/// standard normals by the Box-Muller transform (cos branch first).
struct RngSpec {
    static constexpr const char* algorithm = "philox4x32-10/box-muller";
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 block.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// SplitMix64 finaliser; used to derive per-path substreams.
std::uint64_t splitmix64(std::uint64_t x);

/// Substream for path `index` of a run with base spec `base`.
RngSpec substream(const RngSpec& base, std::uint64_t index);

class NormalStream {
public:
    explicit NormalStream(const RngSpec& spec);

    double next();

private:
    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace dynamo
