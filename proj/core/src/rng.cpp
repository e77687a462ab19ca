#include "scrn/rng.hpp"

#include <cmath>

namespace scrn {

namespace {

constexpr std::uint32_t mul_a = 0xD2511F53u;
constexpr std::uint32_t mul_b = 0xCD9E8D57u;
constexpr std::uint32_t weyl_a = 0x9E3779B9u;
constexpr std::uint32_t weyl_b = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    std::uint64_t p0 = std::uint64_t(mul_a) * c[0];
    std::uint64_t p1 = std::uint64_t(mul_b) * c[2];
    std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

std::array<std::uint32_t, 4> counter_rng::block(const std::array<std::uint32_t, 4>& counter,
                                                const std::array<std::uint32_t, 2>& key) {
    auto c = counter;
    auto k = key;
    for (int r = 0; r < 10; ++r) {
        round_once(c, k);
        k[0] += weyl_a;
        k[1] += weyl_b;
    }
    return c;
}

counter_rng::counter_rng(std::uint64_t seed, std::uint64_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, stream_(stream) {}

void counter_rng::refill() {
    std::array<std::uint32_t, 4> ctr = {
        std::uint32_t(block_index_), std::uint32_t(block_index_ >> 32),
        std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
    buffer_ = block(ctr, key_);
    ++block_index_;
    avail_ = 4;
}

std::uint32_t counter_rng::next_u32() {
    if (avail_ == 0) refill();
    return buffer_[4 - avail_--];
}

std::uint64_t counter_rng::next_u64() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double counter_rng::next_uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double counter_rng::next_exponential(double rate) {
    // -log1p(-u) is exact near u = 0 and finite for u < 1
    return -std::log1p(-next_uniform()) / rate;
}

} // namespace scrn
