#pragma once

#include <array>
#include <cstdint>

namespace spopo {

/// Noise channels drawn per Euler step and slice.
enum class noise_channel : int { signal_x = 0, signal_y = 1, pump_x = 2, pump_y = 3 };

/// Seedable white-noise source. Each (trajectory, slice, step) addresses its
/// own Philox block, so any subset of deviates can be regenerated in any
/// order and the stream does not depend on how the work is scheduled.
class noise_stream
{
public:
    explicit noise_stream(std::uint64_t seed) noexcept;

    std::uint64_t seed() const noexcept { return m_seed; }

    /// Four independent standard normals indexed by noise_channel.
    std::array<double, 4> draw(std::uint32_t trajectory, std::uint32_t slice,
                               std::uint64_t step) const noexcept;

private:
    std::uint64_t m_seed;
};

} // namespace spopo
