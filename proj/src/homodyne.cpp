#include <spopo/errors.hpp>
#include <spopo/homodyne.hpp>
#include <spopo/parallel.hpp>
#include <spopo/record_io.hpp>
#include <spopo/summation.hpp>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <limits>

namespace spopo {

photocurrent_series synthesize_photocurrent(const pulse_train_record& record,
                                            const lo_profile& lo)
{
    if (record.intracavity) {
        throw physics_error("homodyne detection needs output records, not intracavity ones");
    }
    if (lo.target() != record.fld) {
        throw physics_error(std::string("LO targets the ") + to_string(lo.target()) +
                            " field but the record holds the " + to_string(record.fld));
    }
    if (!(record.bin_width > 0) || !(record.roundtrip_time > 0)) {
        throw physics_error("record has no valid time grid");
    }
    lo.check_period(record.roundtrip_time);
    const std::size_t S = record.slices();
    const double dt = record.bin_width;

    photocurrent_series out;
    out.fld = record.fld;
    out.quad = lo.selected_quadrature();
    out.lo_description = lo.describe();
    out.roundtrip_time = record.roundtrip_time;
    out.bin_width = dt;
    out.pulses = record.pulses;
    out.trajectories = record.trajectories;
    out.slice_times = record.slice_times;
    out.lo_flux.assign(S, 0.0);

    if (lo.kind() == lo_profile::shape::delta) {
        if (lo.integral() > 0) {
            // Nearest bin on the record grid; it must be one of the recorded slices.
            std::size_t best = S;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < S; ++s) {
                double d = std::abs(record.slice_times[s] - lo.delay());
                if (d < best_dist - 1e-12 * dt) {
                    best_dist = d;
                    best = s;
                }
            }
            if (best == S || best_dist > 0.5 * dt * (1 + 1e-9)) {
                throw physics_error("delta LO does not fall on a recorded slice");
            }
            out.lo_flux[best] = lo.integral() / dt;
        }
    } else {
        auto shifted = lo;
        shifted.set_delay(std::round(lo.delay() / dt) * dt);
        for (std::size_t s = 0; s < S; ++s) {
            out.lo_flux[s] = shifted.intensity(record.slice_times[s]);
        }
    }

    compensated_sum flux;
    for (double n : out.lo_flux) {
        flux.add(n * dt);
    }
    out.mean_current = flux.value() / record.roundtrip_time;
    if (lo.integral() > 0 && !(out.mean_current > 0)) {
        throw physics_error("LO support lies entirely off the recorded slices");
    }

    std::vector<double> w(S);
    for (std::size_t s = 0; s < S; ++s) {
        w[s] = 2 * std::sqrt(out.lo_flux[s]);
    }
    const auto M = static_cast<std::size_t>(record.pulses);
    out.samples.assign(static_cast<std::size_t>(record.trajectories) * M * S, 0.0);
    for (int k = 0; k < record.trajectories; ++k) {
        for (std::size_t s = 0; s < S; ++s) {
            auto q = record.series(out.quad, k, s);
            for (std::size_t n = 0; n < M; ++n) {
                out.samples[(k * M + n) * S + s] = w[s] * q[n];
            }
        }
    }
    return out;
}

spectrum_accumulator::spectrum_accumulator(std::vector<double> omegas, spectrum_options opts)
    : m_omegas(std::move(omegas)), m_opts(opts)
{
    if (m_omegas.empty()) {
        throw physics_error("empty frequency grid");
    }
    for (double w : m_omegas) {
        if (!std::isfinite(w)) {
            throw physics_error("frequencies must be finite");
        }
    }
}

void spectrum_accumulator::add(const photocurrent_series& series)
{
    if (!(series.mean_current > 0)) {
        throw physics_error("mean LO current is zero: spectrum cannot be normalized");
    }
    if (m_bin_width == 0) {
        m_bin_width = series.bin_width;
        m_mean_current = series.mean_current;
        for (double w : m_omegas) {
            if (std::abs(w) > std::numbers::pi / series.bin_width * (1 + 1e-12)) {
                throw physics_error("frequency " + format_double(w) +
                                    " rad/s exceeds the Nyquist limit pi/dt");
            }
        }
    } else if (std::abs(series.bin_width - m_bin_width) > 1e-12 * m_bin_width ||
               std::abs(series.mean_current - m_mean_current) > 1e-9 * m_mean_current) {
        throw physics_error("photocurrent series differ in grid or LO normalization");
    }

    const std::int64_t M = series.pulses;
    const std::int64_t P = m_opts.segment_pulses > 0 ? m_opts.segment_pulses : M;
    if (P > M) {
        throw physics_error("segment longer than the recorded pulse train");
    }
    if (m_opts.slowest_rate > 0) {
        double need = 8.0 / (m_opts.slowest_rate * series.roundtrip_time);
        if (static_cast<double>(P) < need) {
            throw physics_error("segments of " + std::to_string(P) +
                                " pulses cannot resolve the narrowest resonance (need >= " +
                                std::to_string(static_cast<long long>(std::ceil(need))) + ")");
        }
    }
    const std::size_t S = series.slice_times.size();
    const std::int64_t per_traj = M / P;
    const std::size_t nseg = static_cast<std::size_t>(series.trajectories * per_traj);
    const double tr = series.roundtrip_time;
    const double dt = series.bin_width;
    const double norm = 1.0 / (static_cast<double>(P) * tr * series.mean_current);

    std::vector<std::vector<double>> values(nseg, std::vector<double>(m_omegas.size()));
    unsigned threads = m_opts.threads == 0 ? default_thread_count() : m_opts.threads;
    parallel_for(nseg, threads, [&](std::size_t seg) {
        std::int64_t k = static_cast<std::int64_t>(seg) / per_traj;
        std::int64_t n0 = (static_cast<std::int64_t>(seg) % per_traj) * P;
        const double* base = series.samples.data() + (k * M + n0) * static_cast<std::int64_t>(S);
        for (std::size_t iw = 0; iw < m_omegas.size(); ++iw) {
            double w = m_omegas[iw];
            std::vector<std::complex<double>> slice_phase(S);
            for (std::size_t s = 0; s < S; ++s) {
                slice_phase[s] = std::polar(dt, w * series.slice_times[s]);
            }
            const std::complex<double> step = std::polar(1.0, w * tr);
            std::complex<double> rot(1.0, 0.0);
            std::complex<double> z(0.0, 0.0);
            for (std::int64_t n = 0; n < P; ++n) {
                if (n % 256 == 0) {
                    rot = std::polar(1.0, w * tr * static_cast<double>(n));
                }
                std::complex<double> y(0.0, 0.0);
                const double* row = base + n * static_cast<std::int64_t>(S);
                for (std::size_t s = 0; s < S; ++s) {
                    y += row[s] * slice_phase[s];
                }
                z += rot * y;
                rot *= step;
            }
            values[seg][iw] = std::norm(z) * norm;
        }
    });
    for (auto& v : values) {
        m_values.push_back(std::move(v));
    }
}

spectrum_estimate spectrum_accumulator::finish() const
{
    if (m_values.size() < 4) {
        throw physics_error("spectrum estimation needs at least 4 segments, have " +
                            std::to_string(m_values.size()));
    }
    spectrum_estimate est;
    est.omega = m_omegas;
    est.segments = m_values.size();
    est.segment_pulses = m_opts.segment_pulses;
    const double n = static_cast<double>(m_values.size());
    for (std::size_t iw = 0; iw < m_omegas.size(); ++iw) {
        compensated_sum s1;
        for (const auto& v : m_values) {
            s1.add(v[iw]);
        }
        double mean = s1.value() / n;
        compensated_sum s2;
        for (const auto& v : m_values) {
            s2.add((v[iw] - mean) * (v[iw] - mean));
        }
        est.value.push_back(mean);
        est.stderr_.push_back(std::sqrt(s2.value() / (n - 1) / n));
    }
    return est;
}

spectrum_estimate photocurrent_spectrum(const photocurrent_series& series,
                                        std::span<const double> omegas, spectrum_options opts)
{
    spectrum_accumulator acc({omegas.begin(), omegas.end()}, opts);
    acc.add(series);
    auto est = acc.finish();
    est.segment_pulses = opts.segment_pulses > 0 ? opts.segment_pulses : series.pulses;
    return est;
}

spectrum_series masked_prediction(const photocurrent_series& series, const pump_profile& pump,
                                  const oscillator_params& params, std::span<const double> omegas,
                                  int m_max)
{
    spectrum_series out;
    out.fld = series.fld;
    out.quad = series.quad;
    out.description = "recorded-bin prediction, pump " + pump.describe();
    double omax = 0;
    for (double w : omegas) {
        omax = std::max(omax, std::abs(w));
    }
    out.m_max = m_max < 0 ? default_m_max(omax, params.roundtrip_time()) : m_max;
    compensated_sum total;
    for (double n : series.lo_flux) {
        total.add(n);
    }
    if (!(total.value() > 0)) {
        throw physics_error("LO has no weight on the recorded slices");
    }
    for (double w : omegas) {
        compensated_sum acc;
        for (std::size_t s = 0; s < series.slice_times.size(); ++s) {
            if (series.lo_flux[s] == 0) {
                continue;
            }
            double mu = pump.mu(series.slice_times[s]);
            if (!(mu > 1)) {
                throw physics_error("recorded slice at or below threshold has no prediction");
            }
            acc.add(series.lo_flux[s] *
                    spectrum_above(series.fld, series.quad, w, mu, params, out.m_max));
        }
        out.omega.push_back(w);
        out.value.push_back(acc.value() / total.value());
    }
    return out;
}

comparison_report compare_spectra(const spectrum_estimate& measured,
                                  const spectrum_series& predicted)
{
    if (measured.omega.size() != predicted.omega.size()) {
        throw comparison_failure("frequency grids differ in length");
    }
    for (std::size_t i = 0; i < measured.omega.size(); ++i) {
        double a = measured.omega[i];
        double b = predicted.omega[i];
        if (std::abs(a - b) > 1e-12 * std::max({std::abs(a), std::abs(b), 1.0})) {
            throw comparison_failure("frequency grids differ at index " + std::to_string(i));
        }
    }
    comparison_report rep;
    rep.omega = measured.omega;
    const std::size_t n = measured.omega.size();
    boost::math::normal_distribution<double> unit;
    double alpha = 2 * boost::math::cdf(boost::math::complement(unit, 3.0));
    rep.z_critical = boost::math::quantile(boost::math::complement(unit, alpha / (2.0 * n)));
    for (std::size_t i = 0; i < n; ++i) {
        double diff = measured.value[i] - predicted.value[i];
        double se = measured.stderr_[i];
        double z = se > 0 ? diff / se
                          : (diff == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff));
        rep.z.push_back(z);
        if (std::abs(z) > rep.max_abs_z || i == 0) {
            rep.max_abs_z = std::abs(z);
            rep.worst_omega = measured.omega[i];
        }
    }
    rep.pass = rep.max_abs_z <= rep.z_critical;
    return rep;
}

std::string comparison_report::to_json() const
{
    nlohmann::json j;
    // JSON has no infinity; an unbounded z (zero standard error) becomes null.
    j["max_z"] = std::isfinite(max_abs_z) ? nlohmann::json(max_abs_z) : nlohmann::json();
    j["pass"] = pass;
    j["z_critical"] = z_critical;
    j["worst_omega_rad_s"] = worst_omega;
    j["points"] = omega.size();
    return j.dump(2) + "\n";
}

} // namespace spopo
