#include <spopo/noise.hpp>
#include <spopo/rng.hpp>

namespace spopo {

noise_stream::noise_stream(std::uint64_t seed) noexcept : m_seed(seed) {}

std::array<double, 4> noise_stream::draw(std::uint32_t trajectory, std::uint32_t slice,
                                         std::uint64_t step) const noexcept
{
    philox4x32::counter_type ctr{static_cast<std::uint32_t>(step),
                                 static_cast<std::uint32_t>(step >> 32), slice, trajectory};
    philox4x32::key_type key{static_cast<std::uint32_t>(m_seed),
                             static_cast<std::uint32_t>(m_seed >> 32)};
    return normals_from_block(philox4x32::generate(ctr, key));
}

} // namespace spopo
