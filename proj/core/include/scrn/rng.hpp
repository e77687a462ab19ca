#pragma once

#include <array>
#include <cstdint>

namespace scrn {

// Philox4x32-10 counter-based generator. One instance per (seed, stream);
// distinct streams are statistically independent, so replicate r can draw
// from stream r without coordination. State advances by bumping a 128-bit
// counter, which makes runs reproducible and cheap to split.
class counter_rng {
public:
    counter_rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    // uniform on [0, 1) with 53 random bits
    double next_uniform();

    // inverse-CDF exponential; rate > 0
    double next_exponential(double rate);

    // raw block function, exposed for known-answer tests
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t block_index_ = 0;
    std::uint64_t stream_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int avail_ = 0; // unread 32-bit words left in buffer_

    void refill();
    std::uint32_t next_u32();
};

} // namespace scrn
