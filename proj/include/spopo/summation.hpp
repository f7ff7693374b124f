#pragma once

#include <cmath>

namespace spopo {

/// Neumaier compensated sum.
class compensated_sum
{
public:
    void add(double v) noexcept
    {
        double t = m_sum + v;
        if (std::abs(m_sum) >= std::abs(v)) {
            m_comp += (m_sum - t) + v;
        } else {
            m_comp += (v - t) + m_sum;
        }
        m_sum = t;
    }

    double value() const noexcept { return m_sum + m_comp; }

private:
    double m_sum = 0;
    double m_comp = 0;
};

} // namespace spopo
