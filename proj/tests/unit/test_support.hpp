#pragma once

#include <spopo/core_model.hpp>

#include <cmath>
#include <random>

namespace testing {

// κ_s·T_R = 0.01, κ_p = 100·κ_s, T_R = 1 ns.
inline spopo::oscillator_params standard_params(double ks_tr = 0.01, double ratio = 100.0)
{
    const double tr = 1e-9;
    const double ks = ks_tr / tr;
    return spopo::oscillator_params::from_threshold_flux(tr, ks, ratio * ks, 1e15);
}

inline double rel_diff(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace testing
