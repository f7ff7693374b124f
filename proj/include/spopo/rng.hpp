#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace spopo {

/// Philox4x32-10 counter-based generator. Stateless: the output is a pure
/// function of (counter, key), which is what makes parallel streams
/// reproducible regardless of scheduling.
struct philox4x32
{
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t m0 = 0xD2511F53u;
    static constexpr std::uint32_t m1 = 0xCD9E8D57u;
    static constexpr std::uint32_t w0 = 0x9E3779B9u;
    static constexpr std::uint32_t w1 = 0xBB67AE85u;

    static constexpr counter_type generate(counter_type c, key_type k) noexcept
    {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k[0] += w0;
                k[1] += w1;
            }
            std::uint64_t p0 = std::uint64_t{m0} * c[0];
            std::uint64_t p1 = std::uint64_t{m1} * c[2];
            auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            auto lo0 = static_cast<std::uint32_t>(p0);
            auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            auto lo1 = static_cast<std::uint32_t>(p1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        }
        return c;
    }
};

/// Uniform on (0, 1] from 32 random bits.
inline double uniform_open_closed(std::uint32_t x) noexcept
{
    return (static_cast<double>(x) + 1.0) * 0x1p-32;
}

/// Four standard normal deviates from one Philox block via Box-Muller.
inline std::array<double, 4> normals_from_block(const philox4x32::counter_type& b) noexcept
{
    constexpr double two_pi = 2 * std::numbers::pi;
    double r0 = std::sqrt(-2.0 * std::log(uniform_open_closed(b[0])));
    double a0 = two_pi * (static_cast<double>(b[1]) * 0x1p-32);
    double r1 = std::sqrt(-2.0 * std::log(uniform_open_closed(b[2])));
    double a1 = two_pi * (static_cast<double>(b[3]) * 0x1p-32);
    return {r0 * std::cos(a0), r0 * std::sin(a0), r1 * std::cos(a1), r1 * std::sin(a1)};
}

} // namespace spopo
