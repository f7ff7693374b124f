#pragma once

#include <numbers>

namespace spopo {

enum class field { pump, signal };
enum class quadrature { x, y };

const char* to_string(field f);
const char* to_string(quadrature q);

/// Cavity and coupling constants of the oscillator. All rates in 1/s, the
/// coupling in s^(-1/2). Fluxes derived from it are photons per second.
class oscillator_params
{
public:
    /// Throws physics_error unless every value is positive and the signal
    /// mode is high finesse (loss_rate_signal * roundtrip_time < 0.1).
    oscillator_params(double roundtrip_time, double loss_rate_signal, double loss_rate_pump,
                      double coupling);

    /// Same, with the coupling derived from a threshold flux N_th = κ_s²/(4g²).
    static oscillator_params from_threshold_flux(double roundtrip_time, double loss_rate_signal,
                                                 double loss_rate_pump, double threshold_flux);

    double roundtrip_time() const noexcept { return m_roundtrip_time; }
    double loss_rate_signal() const noexcept { return m_loss_rate_signal; }
    double loss_rate_pump() const noexcept { return m_loss_rate_pump; }
    double coupling() const noexcept { return m_coupling; }

    double loss_rate(field f) const noexcept
    {
        return f == field::pump ? m_loss_rate_pump : m_loss_rate_signal;
    }

    /// Output mirror transmission 2·κ_r·T_R. Throws physics_error when it
    /// exceeds 1, which only the pump can do (see pump_high_finesse()).
    double transmission(field f) const;

    /// κ_p·T_R < 0.5. Required wherever the pump mirror transmission enters.
    bool pump_high_finesse() const noexcept { return m_loss_rate_pump * m_roundtrip_time < 0.5; }

private:
    double m_roundtrip_time;
    double m_loss_rate_signal;
    double m_loss_rate_pump;
    double m_coupling;
};

struct steady_state
{
    double pump_flux;
    double signal_flux;
    int branch; // +1 or -1

    double pump_phase(double input_phase) const noexcept { return input_phase; }
    double signal_phase(double input_phase) const noexcept
    {
        return input_phase / 2 + (branch < 0 ? std::numbers::pi : 0.0);
    }
};

struct effective_rates
{
    double kappa_x;
    double kappa_y;
    /// Set when μ₀ ≥ 0.1·κ_p/κ_s, i.e. the adiabatic elimination of the pump
    /// is no longer well separated in rates.
    bool adiabatic_warning;
};

/// N_th = κ_s²/(4g²), photons per second.
double threshold_flux(const oscillator_params& params);

/// Bright above-threshold solution. Throws physics_error for mu0 < 1, where
/// there is no bright steady state and the below-threshold spectrum applies.
steady_state make_steady_state(const oscillator_params& params, double mu0, int branch = +1);

/// κ_x = 2κ_s(μ₀−1), κ_y = 2κ_s μ₀. Throws physics_error for mu0 < 1.
effective_rates make_effective_rates(const oscillator_params& params, double mu0);

/// Photon flux of an optical power: P·λ/(h·c).
double watts_to_flux(double power_watts, double wavelength_m);

/// Lower bound sqrt((κ_s/κ_p)/(N_th·T_F)) that μ₀−1 must greatly exceed for
/// the linearized fluctuations to stay small against the mean signal.
double validity_margin(const oscillator_params& params, double threshold_flux,
                       double averaging_time);

namespace constants {
inline constexpr double planck = 6.62607015e-34;   // J·s
inline constexpr double speed_of_light = 299792458.0; // m/s
} // namespace constants

} // namespace spopo
