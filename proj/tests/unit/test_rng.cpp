#include <spopo/noise.hpp>
#include <spopo/rng.hpp>
#include <spopo/summation.hpp>

#include <doctest.h>

#include <cmath>

using namespace spopo;

TEST_CASE("philox4x32-10 known-answer vectors")
{
    using c = philox4x32::counter_type;
    using k = philox4x32::key_type;
    CHECK(philox4x32::generate(c{0, 0, 0, 0}, k{0, 0}) ==
          c{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32::generate(c{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               k{0xffffffffu, 0xffffffffu}) ==
          c{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32::generate(c{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               k{0xa4093822u, 0x299f31d0u}) ==
          c{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniform mapping excludes zero")
{
    CHECK(uniform_open_closed(0) > 0);
    CHECK(uniform_open_closed(0xffffffffu) == 1.0);
}

TEST_CASE("noise stream is addressable and reproducible")
{
    noise_stream a(42);
    noise_stream b(42);
    noise_stream other(43);
    CHECK(a.draw(3, 7, 1000) == b.draw(3, 7, 1000));
    CHECK(a.draw(3, 7, 1000) != a.draw(3, 7, 1001));
    CHECK(a.draw(3, 7, 1000) != a.draw(3, 8, 1000));
    CHECK(a.draw(3, 7, 1000) != a.draw(4, 7, 1000));
    CHECK(a.draw(3, 7, 1000) != other.draw(3, 7, 1000));
    CHECK(a.draw(0, 0, std::uint64_t{1} << 40) != a.draw(0, 0, 0));
}

TEST_CASE("normal deviates have unit variance and no channel correlation")
{
    noise_stream s(9);
    const int n = 200000;
    compensated_sum mean[4], var[4], cross01, cross23;
    for (int i = 0; i < n; ++i) {
        auto d = s.draw(0, 0, static_cast<std::uint64_t>(i));
        for (int c = 0; c < 4; ++c) {
            mean[c].add(d[c]);
            var[c].add(d[c] * d[c]);
        }
        cross01.add(d[0] * d[1]);
        cross23.add(d[2] * d[3]);
    }
    for (int c = 0; c < 4; ++c) {
        CHECK(std::abs(mean[c].value() / n) < 5 / std::sqrt(n));
        // One-step variance within 2%.
        CHECK(std::abs(var[c].value() / n - 1) < 0.02);
    }
    CHECK(std::abs(cross01.value() / n) < 5 / std::sqrt(n));
    CHECK(std::abs(cross23.value() / n) < 5 / std::sqrt(n));
}
