#pragma once

#include <spopo/analytic.hpp>
#include <spopo/langevin.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spopo {

using sample_list = std::vector<std::pair<double, double>>;

/// Unit names accepted in the "units" block. Rates are per time unit, the
/// coupling per square-root time unit, fluxes photons per time unit.
struct units_block
{
    std::string time = "s";   // s, ms, us, ns, ps, fs
    std::string power = "W";  // W, mW, kW
    std::string length = "m"; // m, mm, um, nm

    double time_scale() const;
    double power_scale() const;
    double length_scale() const;
    bool operator==(const units_block&) const = default;
};

struct oscillator_section
{
    double roundtrip_time = 0;
    double loss_rate_signal = 0;
    double loss_rate_pump = 0;
    /// Exactly one of: coupling, threshold_flux, threshold_power (+ wavelength).
    std::optional<double> coupling;
    std::optional<double> threshold_flux;
    std::optional<double> threshold_power;
    std::optional<double> wavelength;
    bool operator==(const oscillator_section&) const = default;
};

struct pump_section
{
    std::string shape = "rectangular"; // rectangular, gaussian, sampled
    double mu0 = 0;
    double duration = 0;
    sample_list samples;        // (t, μ) for shape "sampled"
    std::string samples_unit = "mu"; // mu, flux, power
    sample_list phase;          // optional (t, φ_in)
    bool operator==(const pump_section&) const = default;
};

struct lo_section
{
    std::string shape = "rectangular"; // delta, rectangular, gaussian, sampled
    double peak_flux = 1;   // photons per time unit; photons per pulse for delta
    double duration = 0;
    double delay = 0;
    std::string quadrature = "Y";
    std::string target = "signal";
    sample_list samples;
    bool operator==(const lo_section&) const = default;
};

struct simulation_section
{
    std::string mode = "adiabatic";
    int substeps = 1;
    std::int64_t pulses = 1000;
    std::int64_t warmup = -1;
    int slices = 1;
    double bin_width = 0;
    int trajectories = 1;
    int branch = 1;
    std::string record_format = "binary"; // binary, csv, both
    bool operator==(const simulation_section&) const = default;
};

struct spectrum_section
{
    std::string fld = "signal";
    std::string quadrature = "Y";
    std::string model = "matched"; // matched (rectangular pump + LO) or general
    std::vector<double> omegas;    // rad per time unit; empty uses the range below
    double omega_min = 0;
    double omega_max = 0;
    int points = 0;
    int m_max = -1;
    std::int64_t segment_pulses = 0;
    bool operator==(const spectrum_section&) const = default;
};

struct fig4_section
{
    std::vector<double> mu0{0.5, 1.0, 2.0};
    double tau_p = 0;
    double delay_min = 0;
    double delay_max = 0;
    int points = 201;
    double lo_width = 0; // 0: infinitely short LO
    int m_max = -1;
    bool operator==(const fig4_section&) const = default;
};

struct validity_section
{
    double averaging_time = 0; // 0: not configured
    bool operator==(const validity_section&) const = default;
};

struct combs_section
{
    bool estimate = false;
    int max_lag = -1;
    bool operator==(const combs_section&) const = default;
};

struct run_config
{
    std::string task = "steady-state";
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    units_block units;
    oscillator_section oscillator;
    std::optional<pump_section> pump;
    std::optional<lo_section> lo;
    simulation_section simulation;
    spectrum_section spectrum;
    fig4_section fig4;
    validity_section validity;
    combs_section combs;
    bool operator==(const run_config&) const = default;
};

inline const std::vector<std::string>& task_names()
{
    static const std::vector<std::string> names{"steady-state", "combs",  "spectrum", "simulate",
                                                "homodyne",     "fig4",   "validity"};
    return names;
}

/// Parses and schema-checks a configuration. Unknown keys, wrong types and
/// bad enumerations throw config_error with the JSON path of the offence.
run_config parse_config(const nlohmann::json& j);
run_config load_config(const std::filesystem::path& path);
nlohmann::json to_json(const run_config& cfg);

/// 16 hex digits of FNV-1a over the canonical serialization.
std::string config_hash(const run_config& cfg);

// SI views of the configuration. They throw physics_error (or config_error
// for missing sections) when the values violate module preconditions.
oscillator_params make_params(const run_config& cfg);
double threshold_flux_si(const run_config& cfg);
pump_profile make_pump(const run_config& cfg);
lo_profile make_lo(const run_config& cfg);
sim_config make_sim_config(const run_config& cfg, unsigned threads);
std::vector<double> spectrum_omegas(const run_config& cfg);

/// Re-checks the cross-field constraints the selected task depends on.
void validate_for_task(const run_config& cfg);

} // namespace spopo
