#pragma once

#include <spopo/analytic.hpp>
#include <spopo/langevin.hpp>

#include <span>
#include <string>
#include <vector>

namespace spopo {

/// Difference-photocurrent fluctuations δi on the (slice, pulse) grid,
/// stored pulse-major per trajectory: samples[(k·M + n)·S + s].
struct photocurrent_series
{
    field fld = field::signal;
    quadrature quad = quadrature::y;
    std::string lo_description;
    double roundtrip_time = 0;
    double bin_width = 0;
    std::int64_t pulses = 0;
    int trajectories = 0;
    std::vector<double> slice_times;
    std::vector<double> lo_flux;   // N_LO at each recorded slice, photons/s
    double mean_current = 0;       // ⟨I⟩ = (1/T_R)·Σ_j N_LO(t_j)·Δt, photons/s
    std::vector<double> samples;
};

/// δi(t_j + nT_R) = 2·sqrt(N_LO(t_j − Δ))·Q_out[j][n], with Q selected by the
/// LO quadrature and the delay Δ snapped to the nearest bin. A delta LO puts
/// all its photons into the nearest bin. Throws physics_error when the target
/// field differs from the record field, the record is intracavity, or a
/// non-zero LO misses every recorded slice.
photocurrent_series synthesize_photocurrent(const pulse_train_record& record,
                                            const lo_profile& lo);

struct spectrum_estimate
{
    std::vector<double> omega;   // rad/s
    std::vector<double> value;   // normalized to ⟨I⟩
    std::vector<double> stderr_; // from segment scatter
    std::size_t segments = 0;
    std::int64_t segment_pulses = 0;
};

struct spectrum_options
{
    std::int64_t segment_pulses = 0; // 0: whole trajectory per segment
    /// When positive, segments must span at least 8/(rate·T_R) pulses so the
    /// narrowest resonance is resolved.
    double slowest_rate = 0;
    unsigned threads = 0;
};

/// Segment-averaged periodogram |Σ δi·e^{iΩt}·Δt|²/(T_seg·⟨I⟩) with a
/// rectangular window, accumulated one series (trajectory batch) at a time.
class spectrum_accumulator
{
public:
    spectrum_accumulator(std::vector<double> omegas, spectrum_options opts);

    void add(const photocurrent_series& series);
    spectrum_estimate finish() const;
    std::size_t segments() const noexcept { return m_values.size(); }

private:
    std::vector<double> m_omegas;
    spectrum_options m_opts;
    double m_mean_current = 0;
    double m_bin_width = 0;
    std::vector<std::vector<double>> m_values; // per segment
};

/// Convenience wrapper around spectrum_accumulator. Throws physics_error for
/// fewer than 4 segments, Ω above the Nyquist limit π/Δt, or ⟨I⟩ = 0.
spectrum_estimate photocurrent_spectrum(const photocurrent_series& series,
                                        std::span<const double> omegas,
                                        spectrum_options opts = {});

/// Analytic prediction restricted to the recorded bins: the LO-weighted mean
/// of the per-slice above-threshold spectrum, using the same bin weights as
/// the synthesized photocurrent.
spectrum_series masked_prediction(const photocurrent_series& series, const pump_profile& pump,
                                  const oscillator_params& params, std::span<const double> omegas,
                                  int m_max = -1);

struct comparison_report
{
    std::vector<double> omega;
    std::vector<double> z;
    double max_abs_z = 0;
    double worst_omega = 0;
    double z_critical = 3;
    bool pass = true;

    std::string to_json() const;
};

/// Per-point z-scores with a Bonferroni-corrected threshold: the two-sided
/// 3σ false-alarm probability is split over the number of points. Throws
/// comparison_failure when the Ω grids differ.
comparison_report compare_spectra(const spectrum_estimate& measured,
                                  const spectrum_series& predicted);

} // namespace spopo
