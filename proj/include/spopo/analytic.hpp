#pragma once

#include <spopo/core_model.hpp>
#include <spopo/profiles.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spopo {

enum class field_pair { pump_pump, signal_signal, pump_signal };

const char* to_string(field_pair p);

/// Inter-pulse correlation of an output quadrature, kept in parametric form:
///
///   prefactor · [ vacuum·δ_nn′ δ(t−t′) + sign·c·exp(−γ T_R |n−n′|) δ(t−t′−(n−n′)T_R) ]
///
/// Auto-correlations use prefactor 1/4 and carry the reflected-vacuum term;
/// symmetrized pump–signal cross-correlations use prefactor 1 and no vacuum.
/// The δ-functions are never sampled; consumers work with (c, γ, sign).
struct correlation_comb
{
    bool has_vacuum_term = true;
    double coefficient = 0; // c ≥ 0, dimensionless
    int sign = +1;
    double decay_rate = 0;  // γ, 1/s
    field_pair pair = field_pair::signal_signal;
    quadrature quad = quadrature::y;
    double prefactor = 0.25;

    /// Weight multiplying δ(t−t′−(n−n′)T_R) for pulse separation `dn`, as
    /// a normalized value (vacuum level 1).
    double normalized_weight(std::int64_t dn, double roundtrip_time) const;

    /// Weight of the comb at pulse separation `dn` and fast-time offset
    /// t−t′ (seconds). Zero unless the offset equals dn·T_R within `tol`.
    double weight(std::int64_t dn, double time_offset, double roundtrip_time,
                  double tol = 1e-15) const;
};

/// Auto-correlation comb of an output quadrature above threshold. Throws
/// physics_error for mu0 ≤ 1.
correlation_comb quadrature_comb(field f, quadrature q, const oscillator_params& params,
                                 double mu0);

/// Symmetrized pump–signal cross-correlation comb, exactly as printed (sign
/// −1 for both quadratures). Throws physics_error for mu0 ≤ 1.
correlation_comb cross_comb(quadrature q, const oscillator_params& params, double mu0);

/// Default resonance-sum truncation for frequencies up to omega_max:
/// ceil(Ω_max·T_R/2π) + 10.
int default_m_max(double omega_max, double roundtrip_time);

/// Wiener–Khinchin image of a comb: (vacuum ? 1 : 0) + sign·Σ_{m=0..m_max}
/// 2γ(c/T_R)/(γ² + (Ω − 2πm/T_R)²).
double comb_to_spectrum(const correlation_comb& comb, double omega,
                        const oscillator_params& params, int m_max);

/// Shot-noise-normalized homodyne spectrum of an output quadrature for a
/// rectangular LO matched to a rectangular pump above threshold, evaluated from
/// the closed-form resonance sums. Y accepts μ₀ = 1 itself; X needs μ₀ > 1.
/// m_max < 0 selects default_m_max(Ω).
double spectrum_above(field f, quadrature q, double omega, double mu0,
                      const oscillator_params& params, int m_max = -1);

/// Below-threshold squeezed-quadrature spectrum of the signal at fixed μ:
/// 1 − Σ 4κ_s²μ/(κ_s²(1+μ)² + Ω̃_m²).
double spectrum_below(double omega, double mu, const oscillator_params& params, int m_max = -1);

/// Pointwise Y-quadrature spectrum of the slice at pump parameter μ: the
/// above-threshold form where μ > 1, below-threshold where μ ≤ 1 (signal) or
/// pure vacuum (pump, whose fluctuations decouple below threshold).
double local_spectrum(field f, double omega, double mu, const oscillator_params& params,
                      int m_max);

/// LO-weighted average of local_spectrum over the pulse for arbitrary pump
/// and LO shapes, normalized to shot noise. Throws physics_error for an LO of
/// zero measure.
double spectrum_general(field f, double omega, const pump_profile& pump, const lo_profile& lo,
                        const oscillator_params& params, int m_max = -1);

/// ⟨I⟩ = (1/T_R)∫ N_LO(t) dt, photons per second.
double lo_mean_current(const lo_profile& lo, double roundtrip_time);

struct spectrum_series
{
    std::vector<double> omega; // rad/s
    std::vector<double> value; // shot noise ≡ 1
    field fld = field::signal;
    quadrature quad = quadrature::y;
    std::string description; // μ₀ or profile reference
    int m_max = 0;
};

spectrum_series spectrum_above_series(field f, quadrature q, std::span<const double> omegas,
                                      double mu0, const oscillator_params& params,
                                      int m_max = -1);

spectrum_series spectrum_general_series(field f, std::span<const double> omegas,
                                        const pump_profile& pump, const lo_profile& lo,
                                        const oscillator_params& params, int m_max = -1);

struct fig4_row
{
    double mu0;
    double delay; // s
    double noise; // at Ω = 0, shot noise ≡ 1
};

/// Zero-frequency signal noise versus LO delay for gaussian pump pulses of
/// duration tau_p. lo_width = 0 uses an infinitely short LO, otherwise a
/// gaussian LO of that duration.
std::vector<fig4_row> fig4_scan(const oscillator_params& params, std::span<const double> mu0s,
                                std::span<const double> delays, double tau_p, double lo_width,
                                int m_max = -1);

} // namespace spopo
