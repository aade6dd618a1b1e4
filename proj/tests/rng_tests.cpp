#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "rcs/rng.hpp"

using namespace rcs;
using u32x4 = std::array<std::uint32_t, 4>;
using u32x2 = std::array<std::uint32_t, 2>;

TEST_SUITE("rng") {
    TEST_CASE("philox4x32-10 known answers") {
        // reference vectors for the 10-round block function
        u32x4 r0 = philox4x32({0, 0, 0, 0}, {0, 0});
        CHECK(r0 == u32x4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

        u32x4 r1 = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu});
        CHECK(r1 == u32x4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

        u32x4 r2 = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u});
        CHECK(r2 == u32x4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
    }

    TEST_CASE("counter stream frozen draws") {
        const std::uint64_t seed = 0x123456789ABCDEF0ULL;
        {
            CounterRng rng(seed, 7, 2);
            const std::uint32_t want[8] = {0x841a3d94u, 0xf9d66733u, 0x54e11791u, 0x1df0be1au,
                                           0x77244e07u, 0x6cea0c3du, 0x0ff4b286u, 0x3b61f8cbu};
            for (std::uint32_t w : want) CHECK(rng.next_u32() == w);
        }
        {
            CounterRng rng(seed, 7, 2);
            CHECK(rng.next_uniform() == 0.51602539897430688);
            CHECK(rng.next_uniform() == 0.97592778212856501);
            CHECK(rng.next_uniform() == 0.33155963232275099);
            CHECK(rng.next_uniform() == 0.11695469042751938);
        }
        {
            CounterRng rng(seed, 7, 2);
            CHECK(rng.next_normal() == 1.1371712232608964);
            CHECK(rng.next_normal() == 1.1024368662187471);
        }
    }

    TEST_CASE("trial and stream lanes separate sequences") {
        CounterRng a(99, 0, 0), b(99, 0, 1), c(99, 1, 0), a2(99, 0, 0);
        std::uint32_t va = a.next_u32(), vb = b.next_u32(), vc = c.next_u32();
        CHECK(va != vb);
        CHECK(va != vc);
        CHECK(vb != vc);
        CHECK(a2.next_u32() == va);
        CHECK(a2.next_u32() == a.next_u32());
    }

    TEST_CASE("draw distributions are sane") {
        CounterRng rng(2026, 3, 0);
        int n = 20000;
        double su = 0.0, sn = 0.0, sn2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double u = rng.next_uniform();
            CHECK(u > 0.0);
            CHECK(u < 1.0);
            su += u;
        }
        CHECK(std::abs(su / n - 0.5) < 0.01);
        for (int i = 0; i < n; ++i) {
            double z = rng.next_normal();
            sn += z;
            sn2 += z * z;
        }
        CHECK(std::abs(sn / n) < 0.03);
        CHECK(std::abs(sn2 / n - 1.0) < 0.05);
    }
}
