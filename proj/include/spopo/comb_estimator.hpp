#pragma once

#include <spopo/analytic.hpp>
#include <spopo/langevin.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace spopo {

/// Matched-bin covariance versus pulse separation, normalized so that the
/// vacuum level is 1 (auto: 4Δt·⟨Q_n Q_{n+l}⟩, symmetrized cross:
/// Δt·⟨P_n S_{n+l} + S_n P_{n+l}⟩). Standard errors come from the scatter
/// across independent slice series.
struct lag_covariance
{
    std::vector<double> value; // lags 0..L
    std::vector<double> stderr_;
    std::size_t series = 0;
};

struct comb_estimate
{
    field_pair pair = field_pair::signal_signal;
    quadrature quad = quadrature::y;
    bool detected = false;
    int sign = 0;
    double coefficient = 0;
    double coefficient_se = 0;
    double decay_rate = 0; // 1/s; NaN when not detected
    double decay_rate_se = 0;
    double zero_lag = 0;   // Ĉ(0): 1 + c for auto-combs
    double zero_lag_se = 0;
    int lags_used = 0;
    std::vector<std::string> warnings;
    lag_covariance lags;
};

struct estimator_options
{
    int max_lag = -1; // -1: min(M/2, 2000)
    int groups = 20;  // jackknife groups over slice series
    unsigned threads = 0;
};

/// Streaming estimator for the four auto-combs and two cross-combs of a run.
/// Feed it records trajectory by trajectory (e.g. from simulate_stream);
/// accumulation happens in a fixed order so the result does not depend on
/// the thread count.
class comb_accumulator
{
public:
    comb_accumulator(double roundtrip_time, double bin_width, std::int64_t pulses,
                     estimator_options opts = {});
    ~comb_accumulator();
    comb_accumulator(const comb_accumulator&) = delete;
    comb_accumulator& operator=(const comb_accumulator&) = delete;

    void add(const pulse_train_record& pump, const pulse_train_record& signal);

    std::size_t series() const noexcept;
    lag_covariance auto_lags(field f, quadrature q) const;
    lag_covariance cross_lags(quadrature q) const;
    comb_estimate auto_comb(field f, quadrature q) const;
    comb_estimate cross(quadrature q) const;

private:
    struct impl;
    std::unique_ptr<impl> m;

    friend comb_estimate estimate_comb(const pulse_train_record&, quadrature, estimator_options);
    friend comb_estimate estimate_cross(const pulse_train_record&, const pulse_train_record&,
                                        quadrature, estimator_options);
};

/// Auto-comb of one record. Throws physics_error when M < 100.
comb_estimate estimate_comb(const pulse_train_record& record, quadrature q,
                            estimator_options opts = {});

/// Symmetrized cross-comb of a pump and signal record from the same run.
comb_estimate estimate_cross(const pulse_train_record& pump, const pulse_train_record& signal,
                             quadrature q, estimator_options opts = {});

/// Fits a lag covariance: unweighted least squares of log|Ĉ(l)| against l
/// over the contiguous run of lags from 1 where |Ĉ| > 3 s.e. with a constant
/// sign. Exposed for testing.
comb_estimate fit_comb(const lag_covariance& lags, double roundtrip_time);

struct covariance_check
{
    double value = 0;   // normalized (vacuum 1)
    double stderr_ = 0;
    std::size_t pairs = 0;
    double z() const { return stderr_ > 0 ? value / stderr_ : 0.0; }
};

/// Normalized covariance 4Δt·⟨Q_j[n]·Q_{j+slice_offset}[n+lag]⟩ between
/// bins that are not an integer number of round trips apart (slice_offset
/// ≠ 0). Zero for a local comb.
covariance_check bin_covariance(const pulse_train_record& record, quadrature q, int slice_offset,
                                std::int64_t lag);

} // namespace spopo
