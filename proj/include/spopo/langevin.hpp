#pragma once

#include <spopo/core_model.hpp>
#include <spopo/profiles.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace spopo {

/// full: pump and signal quadratures integrated together.
/// adiabatic: pump eliminated, signal quadratures are Ornstein-Uhlenbeck
///   processes with rates κ_x and κ_y; pump output reconstructed.
/// passive: empty cavities with the coupling switched off, used for
///   shot-noise calibration.
enum class sim_mode { full, adiabatic, passive };

const char* to_string(sim_mode m);

struct sim_config
{
    sim_mode mode = sim_mode::adiabatic;
    int substeps = 1;           // Euler steps per round trip, ΔT = T_R/substeps
    std::int64_t pulses = 1000; // M, recorded round trips per trajectory
    std::int64_t warmup = -1;   // discarded round trips; -1 picks the minimum
    int slices = 1;             // J
    double bin_width = 0;       // Δt in seconds; 0 means T_R/J
    int trajectories = 1;       // K
    std::uint64_t seed = 0;
    int branch = +1;
    bool intracavity = false;   // record cavity quadratures instead of outputs
    unsigned threads = 0;       // 0 uses default_thread_count()
};

/// Output (or intracavity) quadrature samples, one per slice and recorded
/// round trip, for one field. Units: photons^(1/2) s^(-1/2), so that vacuum
/// has variance 1/(4Δt).
struct pulse_train_record
{
    field fld = field::signal;
    bool intracavity = false;
    double roundtrip_time = 0;
    double bin_width = 0;
    std::int64_t pulses = 0;
    int trajectories = 0;
    int first_trajectory = 0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::vector<double> slice_times; // fast time of each recorded slice
    std::vector<int> slice_index;    // position on the J-slice grid
    std::vector<double> x;           // [(k·S + s)·M + n]
    std::vector<double> y;

    std::size_t slices() const noexcept { return slice_times.size(); }
    std::size_t offset(int k, std::size_t s) const noexcept
    {
        return (static_cast<std::size_t>(k) * slices() + s) * static_cast<std::size_t>(pulses);
    }
    std::span<const double> series(quadrature q, int k, std::size_t s) const
    {
        const auto& v = q == quadrature::x ? x : y;
        return {v.data() + offset(k, s), static_cast<std::size_t>(pulses)};
    }
    /// Throws physics_error unless sizes agree and every value is finite.
    void validate() const;
};

/// Resolved slice grid and step sizes for a run.
struct sim_plan
{
    std::vector<double> slice_times; // all J slices
    std::vector<double> slice_mu;
    std::vector<int> recorded;       // indices with μ > 1 (all in passive mode)
    std::vector<double> skipped_times;
    std::int64_t warmup = 0;
    double bin_width = 0;
    double step = 0;
    std::uint64_t config_hash = 0;
    std::vector<std::string> warnings;
};

/// Validates the configuration against the step-size, warm-up and
/// grid rules and resolves the slice grid. Throws physics_error.
sim_plan plan_simulation(const oscillator_params& params, const pump_profile& pump,
                         const sim_config& cfg);

/// Fewest warm-up round trips accepted: 5/(κ_min·T_R) for the slowest
/// recorded relaxation rate.
std::int64_t minimum_warmup(const oscillator_params& params, const sim_plan& plan,
                            const sim_config& cfg);

struct simulation_result
{
    pulse_train_record pump;
    pulse_train_record signal;
    sim_plan plan;
};

/// Runs all trajectories and keeps the full records in memory.
simulation_result simulate(const oscillator_params& params, const pump_profile& pump,
                           const sim_config& cfg);

/// Streams one trajectory at a time (in trajectory order) to `visit`, so that
/// large ensembles need not be held in memory. Returns the plan.
using trajectory_visitor =
    std::function<void(const pulse_train_record& pump, const pulse_train_record& signal)>;
sim_plan simulate_stream(const oscillator_params& params, const pump_profile& pump,
                         const sim_config& cfg, const trajectory_visitor& visit);

} // namespace spopo
