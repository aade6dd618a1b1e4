#include "rcs/rng.hpp"

#include <cmath>

namespace rcs {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int rnd = 0; rnd < 10; ++rnd) {
        std::uint64_t p0 = std::uint64_t(kM0) * c[0];
        std::uint64_t p1 = std::uint64_t(kM1) * c[2];
        std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint32_t trial, std::uint32_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, trial_(trial), stream_(stream) {}

std::uint32_t CounterRng::next_u32() {
    std::uint64_t block = index_ >> 2;
    unsigned lane = unsigned(index_ & 3);
    if (lane == 0)
        buf_ = philox4x32({std::uint32_t(block), std::uint32_t(block >> 32), trial_, stream_}, key_);
    ++index_;
    return buf_[lane];
}

double CounterRng::next_uniform() {
    return (double(next_u32()) + 0.5) * 0x1p-32;
}

double CounterRng::next_normal() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace rcs
