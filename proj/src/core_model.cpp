#include <spopo/core_model.hpp>
#include <spopo/errors.hpp>

#include <cmath>
#include <string>

namespace spopo {

const char* to_string(field f)
{
    return f == field::pump ? "pump" : "signal";
}

const char* to_string(quadrature q)
{
    return q == quadrature::x ? "X" : "Y";
}

oscillator_params::oscillator_params(double roundtrip_time, double loss_rate_signal,
                                     double loss_rate_pump, double coupling)
    : m_roundtrip_time(roundtrip_time),
      m_loss_rate_signal(loss_rate_signal),
      m_loss_rate_pump(loss_rate_pump),
      m_coupling(coupling)
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0; };
    if (!positive(roundtrip_time) || !positive(loss_rate_signal) || !positive(loss_rate_pump) ||
        !positive(coupling)) {
        throw physics_error("oscillator parameters must be finite and strictly positive");
    }
    if (loss_rate_signal * roundtrip_time >= 0.1) {
        throw physics_error("signal cavity is not high finesse: kappa_s*T_R = " +
                            std::to_string(loss_rate_signal * roundtrip_time) + " >= 0.1");
    }
}

oscillator_params oscillator_params::from_threshold_flux(double roundtrip_time,
                                                         double loss_rate_signal,
                                                         double loss_rate_pump,
                                                         double threshold_flux)
{
    if (!(threshold_flux > 0) || !std::isfinite(threshold_flux)) {
        throw physics_error("threshold flux must be finite and strictly positive");
    }
    return {roundtrip_time, loss_rate_signal, loss_rate_pump,
            loss_rate_signal / (2 * std::sqrt(threshold_flux))};
}

double oscillator_params::transmission(field f) const
{
    double t = 2 * loss_rate(f) * m_roundtrip_time;
    if (t > 1) {
        throw physics_error(std::string("mirror transmission of the ") + to_string(f) +
                            " field exceeds 1 (kappa*T_R = " + std::to_string(t / 2) + ")");
    }
    return t;
}

double threshold_flux(const oscillator_params& params)
{
    double ks = params.loss_rate_signal();
    double g = params.coupling();
    return ks * ks / (4 * g * g);
}

steady_state make_steady_state(const oscillator_params& params, double mu0, int branch)
{
    if (!(mu0 >= 1)) {
        throw physics_error("pump parameter " + std::to_string(mu0) +
                            " is below threshold: no bright steady state");
    }
    if (branch != 1 && branch != -1) {
        throw physics_error("branch sign must be +1 or -1");
    }
    double nth = threshold_flux(params);
    double ratio = params.loss_rate_pump() / params.loss_rate_signal();
    return {nth, 2 * ratio * (mu0 - 1) * nth, branch};
}

effective_rates make_effective_rates(const oscillator_params& params, double mu0)
{
    if (!(mu0 >= 1)) {
        throw physics_error("effective damping rates need mu0 >= 1, got " + std::to_string(mu0));
    }
    double ks = params.loss_rate_signal();
    bool warn = mu0 >= 0.1 * params.loss_rate_pump() / ks;
    return {2 * ks * (mu0 - 1), 2 * ks * mu0, warn};
}

double watts_to_flux(double power_watts, double wavelength_m)
{
    if (power_watts < 0 || !(wavelength_m > 0)) {
        throw physics_error("power must be non-negative and wavelength positive");
    }
    return power_watts * wavelength_m / (constants::planck * constants::speed_of_light);
}

double validity_margin(const oscillator_params& params, double threshold_flux,
                       double averaging_time)
{
    if (!(threshold_flux > 0) || !(averaging_time > 0)) {
        throw physics_error("validity margin needs positive threshold flux and averaging time");
    }
    double ratio = params.loss_rate_signal() / params.loss_rate_pump();
    return std::sqrt(ratio / (threshold_flux * averaging_time));
}

} // namespace spopo
