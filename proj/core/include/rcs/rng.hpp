#pragma once

#include <array>
#include <cstdint>

namespace rcs {

// Philox4x32-10 block function. Stateless; the wrapper below assigns
// counter lanes.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// Counter-based draw stream. Layout:
//   key     = (lo32(seed), hi32(seed))
//   counter = (lo32(block), hi32(block), trial, stream)
// where block advances every 4 draws. Identical (seed, trial, stream)
// yields identical draws on any platform; streams never overlap.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint32_t trial, std::uint32_t stream);

    std::uint32_t next_u32();
    // uniform on (0,1): (v + 1/2) * 2^-32, never hits an endpoint
    double next_uniform();
    // standard normal via Box-Muller, always two fresh uniforms per draw
    double next_normal();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t trial_, stream_;
    std::uint64_t index_ = 0;
    std::array<std::uint32_t, 4> buf_{};
};

}  // namespace rcs
