#pragma once

#include <spopo/core_model.hpp>

#include <string>
#include <utility>
#include <vector>

namespace spopo {

/// A piecewise-linear function given by (t, value) samples; zero outside the
/// sampled range.
class sampled_curve
{
public:
    sampled_curve() = default;
    explicit sampled_curve(std::vector<std::pair<double, double>> points);

    double operator()(double t) const;
    bool empty() const noexcept { return m_points.empty(); }
    double front_time() const { return m_points.front().first; }
    double back_time() const { return m_points.back().first; }
    const std::vector<std::pair<double, double>>& points() const noexcept { return m_points; }
    /// Exact integral of the interpolant.
    double integral() const;

private:
    std::vector<std::pair<double, double>> m_points;
};

/// Pump parameter μ(t) = sqrt(N₀(t)/N_th) over one period, t measured from
/// the pulse centre, plus an optional phase modulation φ_in(t).
class pump_profile
{
public:
    enum class shape { rectangular, gaussian, sampled };

    /// μ(t) = μ₀ for |t| ≤ τ_p/2, zero elsewhere.
    static pump_profile rectangular(double mu0, double duration);
    /// μ(t) = μ₀·exp(−2(t/τ_p)²).
    static pump_profile gaussian(double mu0, double duration);
    /// Linear interpolation of (t, μ) samples.
    static pump_profile sampled(std::vector<std::pair<double, double>> mu_samples);
    /// Linear interpolation of (t, N₀) flux samples, converted with N_th.
    static pump_profile from_flux(const std::vector<std::pair<double, double>>& flux_samples,
                                  double threshold_flux);

    pump_profile& set_phase(std::vector<std::pair<double, double>> phase_samples);

    shape kind() const noexcept { return m_shape; }
    double mu0() const noexcept { return m_mu0; }
    double duration() const noexcept { return m_duration; }
    const sampled_curve& samples() const noexcept { return m_samples; }
    const sampled_curve& phase_samples() const noexcept { return m_phase; }

    double mu(double t) const;
    double phase(double t) const { return m_phase.empty() ? 0.0 : m_phase(t); }
    double peak() const;

    /// Points inside [lo, hi] where μ(t) is not smooth or crosses 1. Used to
    /// split integrals so each piece has a smooth integrand.
    std::vector<double> breakpoints(double lo, double hi) const;

    /// Throws physics_error when the profile does not fit one period.
    void check_period(double roundtrip_time) const;

    std::string describe() const;

private:
    pump_profile() = default;

    shape m_shape = shape::rectangular;
    double m_mu0 = 0;
    double m_duration = 0;
    sampled_curve m_samples;
    sampled_curve m_phase;
};

/// μ(t) with the domain check t ∈ [−T_R/2, T_R/2].
double pump_parameter(const pump_profile& profile, const oscillator_params& params, double t);

/// Local-oscillator pulse train: intensity envelope N_LO(t) in photons/s,
/// delay against the analysed pulses, and the quadrature it selects
/// (Φ = 0 reads X, Φ = π/2 reads Y).
class lo_profile
{
public:
    enum class shape { delta, rectangular, gaussian, sampled };

    /// Infinitely short pulse carrying `photons` per period.
    static lo_profile delta(double photons);
    static lo_profile rectangular(double peak_flux, double duration);
    /// N_LO(t) = N·exp(−4(t/τ)²), the intensity convention of the gaussian pump.
    static lo_profile gaussian(double peak_flux, double duration);
    static lo_profile sampled(std::vector<std::pair<double, double>> flux_samples);

    lo_profile& set_delay(double delay);
    lo_profile& set_quadrature(quadrature q);
    lo_profile& set_target(field f);

    shape kind() const noexcept { return m_shape; }
    double peak_flux() const noexcept { return m_peak_flux; }
    double duration() const noexcept { return m_duration; }
    double delay() const noexcept { return m_delay; }
    quadrature selected_quadrature() const noexcept { return m_quad; }
    field target() const noexcept { return m_target; }
    const sampled_curve& samples() const noexcept { return m_samples; }

    /// Constant phase shift Φ: 0 for X, π/2 for Y.
    double phase_shift() const noexcept;
    /// Phase modulation matched to the target: φ_in for pump, φ_in/2 for signal.
    double carrier_phase(const pump_profile& pump, double t) const;

    /// Delayed intensity N_LO(t − delay). Zero everywhere for a delta pulse;
    /// use integral() and delay() for it.
    double intensity(double t) const;
    /// ∫ N_LO dt over the pulse, photons per period.
    double integral() const;
    /// [lo, hi] outside which intensity() vanishes (delay included).
    std::pair<double, double> support() const;

    void check_period(double roundtrip_time) const;
    std::string describe() const;

private:
    lo_profile() = default;
    double envelope(double t) const;

    shape m_shape = shape::delta;
    double m_peak_flux = 0;
    double m_duration = 0;
    double m_delay = 0;
    quadrature m_quad = quadrature::y;
    field m_target = field::signal;
    sampled_curve m_samples;
};

} // namespace spopo
