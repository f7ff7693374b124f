#include <spopo/comb_estimator.hpp>
#include <spopo/errors.hpp>
#include <spopo/homodyne.hpp>
#include <spopo/parallel.hpp>
#include <spopo/record_io.hpp>
#include <spopo/run.hpp>

#include <chrono>
#include <ctime>
#include <sstream>

#ifndef SPOPO_VERSION
#define SPOPO_VERSION "unknown"
#endif

namespace spopo {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_now()
{
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Collects output files so a failed run can remove what it wrote.
class output_set
{
public:
    explicit output_set(fs::path dir) : m_dir(std::move(dir)) {}

    fs::path path(const std::string& name) const { return m_dir / name; }

    void write(const std::string& name, const std::string& content)
    {
        write_file_atomic(path(name), content);
        m_files.push_back(name);
    }

    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows)
    {
        std::string out;
        for (std::size_t i = 0; i < header.size(); ++i) {
            out += (i ? "," : "") + header[i];
        }
        out += '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                out += (i ? "," : "") + r[i];
            }
            out += '\n';
        }
        write(name, out);
    }

    void adopt(const std::string& name) { m_files.push_back(name); }

    void remove_all() noexcept
    {
        for (const auto& f : m_files) {
            std::error_code ec;
            fs::remove(path(f), ec);
        }
        m_files.clear();
    }

    const std::vector<std::string>& files() const { return m_files; }

private:
    fs::path m_dir;
    std::vector<std::string> m_files;
};

std::string num(double v) { return format_double(v); }

field parse_field(const std::string& s) { return s == "pump" ? field::pump : field::signal; }
quadrature parse_quad(const std::string& s) { return s == "X" ? quadrature::x : quadrature::y; }

json validity_report(const run_config& cfg)
{
    if (!(cfg.validity.averaging_time > 0) || !cfg.pump) {
        return nullptr;
    }
    auto params = make_params(cfg);
    double nth = threshold_flux_si(cfg);
    double tf = cfg.validity.averaging_time * cfg.units.time_scale();
    double margin = validity_margin(params, nth, tf);
    double mu0 = make_pump(cfg).peak();
    // "Much greater" is read as at least one decade above the margin.
    bool ok = mu0 - 1 >= 10 * margin;
    return {{"margin", margin},
            {"mu0", mu0},
            {"mu0_minus_1", mu0 - 1},
            {"threshold_flux_photons_per_s", nth},
            {"averaging_time_s", tf},
            {"verdict", ok ? "PASS" : "WARN"}};
}

void task_steady_state(const run_config& cfg, output_set& out, std::ostringstream& log)
{
    auto params = make_params(cfg);
    double mu0 = make_pump(cfg).peak();
    auto ss = make_steady_state(params, mu0);
    auto rates = make_effective_rates(params, mu0);
    out.csv("steady_state.csv",
            {"mu0", "threshold_flux_photons_per_s", "pump_flux_photons_per_s",
             "signal_flux_photons_per_s", "kappa_x_per_s", "kappa_y_per_s", "adiabatic_warning"},
            {{num(mu0), num(threshold_flux(params)), num(ss.pump_flux), num(ss.signal_flux),
              num(rates.kappa_x), num(rates.kappa_y), rates.adiabatic_warning ? "1" : "0"}});
    log << "N_th = " << num(threshold_flux(params)) << " photons/s, N_s = " << num(ss.signal_flux)
        << " photons/s\n";
    if (rates.adiabatic_warning) {
        log << "warning: mu0 >= 0.1*kappa_p/kappa_s, adiabatic elimination is marginal\n";
    }
}

std::vector<std::string> comb_row(const std::string& source, const correlation_comb& c,
                                  double c_se, double g_se, bool detected)
{
    return {source,        to_string(c.pair),  to_string(c.quad), std::to_string(c.sign),
            num(c.coefficient), num(c_se),     num(c.decay_rate), num(g_se),
            num(c.prefactor),   detected ? "1" : "0"};
}

void task_combs(const run_config& cfg, unsigned threads, output_set& out,
                std::ostringstream& log)
{
    auto params = make_params(cfg);
    auto pump = make_pump(cfg);
    double mu0 = pump.peak();
    std::vector<correlation_comb> analytic;
    for (auto f : {field::pump, field::signal}) {
        for (auto q : {quadrature::x, quadrature::y}) {
            analytic.push_back(quadrature_comb(f, q, params, mu0));
        }
    }
    for (auto q : {quadrature::x, quadrature::y}) {
        analytic.push_back(cross_comb(q, params, mu0));
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : analytic) {
        rows.push_back(comb_row("analytic", c, 0, 0, true));
    }
    if (cfg.combs.estimate) {
        auto sc = make_sim_config(cfg, threads);
        auto plan = plan_simulation(params, pump, sc);
        estimator_options eo;
        eo.max_lag = cfg.combs.max_lag;
        eo.threads = threads;
        comb_accumulator acc(params.roundtrip_time(), plan.bin_width, sc.pulses, eo);
        simulate_stream(params, pump, sc,
                        [&](const pulse_train_record& p, const pulse_train_record& s) {
                            acc.add(p, s);
                        });
        std::vector<comb_estimate> est;
        for (auto f : {field::pump, field::signal}) {
            for (auto q : {quadrature::x, quadrature::y}) {
                est.push_back(acc.auto_comb(f, q));
            }
        }
        for (auto q : {quadrature::x, quadrature::y}) {
            est.push_back(acc.cross(q));
        }
        for (std::size_t i = 0; i < est.size(); ++i) {
            correlation_comb c = analytic[i];
            c.sign = est[i].sign;
            c.coefficient = est[i].coefficient;
            c.decay_rate = est[i].decay_rate;
            rows.push_back(comb_row("estimated", c, est[i].coefficient_se, est[i].decay_rate_se,
                                    est[i].detected));
            for (const auto& w : est[i].warnings) {
                log << "warning (" << to_string(c.pair) << ' ' << to_string(c.quad) << "): " << w
                    << '\n';
            }
        }
        for (const auto& w : plan.warnings) {
            log << "warning: " << w << '\n';
        }
    }
    out.csv("combs.csv",
            {"source", "pair", "quadrature", "sign", "coefficient", "coefficient_se",
             "decay_rate_per_s", "decay_rate_se_per_s", "prefactor", "detected"},
            rows);
}

void write_spectrum_csv(output_set& out, const std::string& name, const std::vector<double>& omega,
                        const std::vector<double>& value, const std::vector<double>* se)
{
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        rows.push_back({num(omega[i]), num(value[i]), num(se ? (*se)[i] : 0.0)});
    }
    out.csv(name, {"omega_rad_s", "value", "stderr"}, rows);
}

void task_spectrum(const run_config& cfg, output_set& out, std::ostringstream& log)
{
    auto params = make_params(cfg);
    auto pump = make_pump(cfg);
    auto omegas = spectrum_omegas(cfg);
    field f = parse_field(cfg.spectrum.fld);
    quadrature q = parse_quad(cfg.spectrum.quadrature);
    spectrum_series s;
    if (cfg.spectrum.model == "general") {
        if (q != quadrature::y) {
            throw config_error("/spectrum/quadrature", "the general model covers Y only");
        }
        s = spectrum_general_series(f, omegas, pump, make_lo(cfg), params, cfg.spectrum.m_max);
    } else if (pump.peak() > 1) {
        s = spectrum_above_series(f, q, omegas, pump.peak(), params, cfg.spectrum.m_max);
    } else if (f == field::signal && q == quadrature::y) {
        s.omega = omegas;
        for (double w : omegas) {
            s.value.push_back(spectrum_below(w, pump.peak(), params, cfg.spectrum.m_max));
        }
    } else {
        throw physics_error("below threshold only the signal Y spectrum is modelled");
    }
    write_spectrum_csv(out, "spectrum.csv", s.omega, s.value, nullptr);
    log << "spectrum: " << s.omega.size() << " points\n";
}

void write_records(const run_config& cfg, const simulation_result& res, output_set& out)
{
    const auto& fmt = cfg.simulation.record_format;
    for (const auto* rec : {&res.pump, &res.signal}) {
        std::string stem = std::string(to_string(rec->fld)) + "_record";
        if (fmt == "binary" || fmt == "both") {
            write_record_binary(*rec, out.path(stem + ".bin"));
            out.adopt(stem + ".bin");
        }
        if (fmt == "csv" || fmt == "both") {
            write_record_csv(*rec, out.path(stem + ".csv"));
            out.adopt(stem + ".csv");
        }
    }
}

void task_simulate(const run_config& cfg, unsigned threads, output_set& out,
                   std::ostringstream& log)
{
    auto params = make_params(cfg);
    auto res = simulate(params, make_pump(cfg), make_sim_config(cfg, threads));
    write_records(cfg, res, out);
    std::vector<std::vector<std::string>> rows;
    for (double t : res.plan.skipped_times) {
        rows.push_back({num(t)});
    }
    out.csv("skipped_slices.csv", {"slice_time_s"}, rows);
    log << "simulated " << res.signal.trajectories << " trajectories x " << res.signal.slices()
        << " slices x " << res.signal.pulses << " pulses\n";
    for (const auto& w : res.plan.warnings) {
        log << "warning: " << w << '\n';
    }
}

bool task_homodyne(const run_config& cfg, unsigned threads, output_set& out,
                   std::ostringstream& log)
{
    auto params = make_params(cfg);
    auto pump = make_pump(cfg);
    auto lo = make_lo(cfg);
    auto sc = make_sim_config(cfg, threads);
    auto plan = plan_simulation(params, pump, sc);
    auto omegas = spectrum_omegas(cfg);

    spectrum_options so;
    so.segment_pulses = cfg.spectrum.segment_pulses;
    so.threads = threads;
    if (sc.mode == sim_mode::passive) {
        so.slowest_rate = params.loss_rate_signal();
    } else {
        double mu_min = 1e300;
        for (int j : plan.recorded) {
            mu_min = std::min(mu_min, plan.slice_mu[j]);
        }
        so.slowest_rate = 2 * params.loss_rate_signal() * (mu_min - 1);
    }
    spectrum_accumulator acc(omegas, so);
    std::optional<photocurrent_series> first;
    simulate_stream(params, pump, sc,
                    [&](const pulse_train_record& p, const pulse_train_record& s) {
                        auto series = synthesize_photocurrent(
                            lo.target() == field::pump ? p : s, lo);
                        acc.add(series);
                        if (!first) {
                            first = std::move(series);
                            first->samples.clear();
                        }
                    });
    auto measured = acc.finish();
    spectrum_series predicted;
    if (sc.mode == sim_mode::passive) {
        predicted.omega = omegas;
        predicted.value.assign(omegas.size(), 1.0);
        predicted.description = "shot noise";
    } else {
        predicted = masked_prediction(*first, pump, params, omegas, cfg.spectrum.m_max);
    }
    auto report = compare_spectra(measured, predicted);

    write_spectrum_csv(out, "homodyne_spectrum.csv", measured.omega, measured.value,
                       &measured.stderr_);
    write_spectrum_csv(out, "homodyne_prediction.csv", predicted.omega, predicted.value, nullptr);
    std::vector<std::vector<std::string>> zrows;
    for (std::size_t i = 0; i < report.z.size(); ++i) {
        zrows.push_back({num(report.omega[i]), num(report.z[i])});
    }
    out.csv("comparison.csv", {"omega_rad_s", "z"}, zrows);
    out.write("comparison.json", report.to_json());
    log << "homodyne: " << measured.segments << " segments, max |z| = " << num(report.max_abs_z)
        << " (critical " << num(report.z_critical) << "), " << (report.pass ? "PASS" : "FAIL")
        << '\n';
    for (const auto& w : plan.warnings) {
        log << "warning: " << w << '\n';
    }
    return report.pass;
}

void task_fig4(const run_config& cfg, output_set& out, std::ostringstream& log)
{
    auto params = make_params(cfg);
    double ts = cfg.units.time_scale();
    const auto& f = cfg.fig4;
    double tau = f.tau_p * ts;
    double lo = f.delay_min * ts;
    double hi = f.delay_max * ts;
    if (!(hi > lo)) {
        lo = -1.5 * tau;
        hi = 1.5 * tau;
    }
    std::vector<double> delays;
    for (int i = 0; i < f.points; ++i) {
        delays.push_back(f.points == 1 ? lo : lo + (hi - lo) * i / (f.points - 1));
    }
    auto rows = fig4_scan(params, f.mu0, delays, tau, f.lo_width * ts, f.m_max);
    std::vector<std::vector<std::string>> csv;
    for (const auto& r : rows) {
        csv.push_back({num(r.mu0), num(r.delay), num(r.noise)});
    }
    out.csv("fig4.csv", {"mu0", "delay_s", "noise_at_zero_frequency"}, csv);
    log << "fig4: " << rows.size() << " rows\n";
}

void task_validity(const run_config& cfg, output_set& out, std::ostringstream& log)
{
    json v = validity_report(cfg);
    out.csv("validity.csv",
            {"margin", "mu0", "mu0_minus_1", "threshold_flux_photons_per_s", "averaging_time_s",
             "verdict"},
            {{num(v["margin"].get<double>()), num(v["mu0"].get<double>()),
              num(v["mu0_minus_1"].get<double>()),
              num(v["threshold_flux_photons_per_s"].get<double>()),
              num(v["averaging_time_s"].get<double>()), v["verdict"].get<std::string>()}});
    log << "validity margin " << num(v["margin"].get<double>()) << ", mu0-1 = "
        << num(v["mu0_minus_1"].get<double>()) << ": " << v["verdict"].get<std::string>() << '\n';
}

} // namespace

run_config apply_overrides(run_config cfg, const run_overrides& ov)
{
    if (ov.seed) {
        cfg.seed = *ov.seed;
    }
    if (ov.output_dir) {
        cfg.output_dir = *ov.output_dir;
    }
    if (ov.task) {
        const auto& names = task_names();
        if (std::find(names.begin(), names.end(), *ov.task) == names.end()) {
            throw config_error("/task", "unknown task '" + *ov.task + "'");
        }
        cfg.task = *ov.task;
    }
    return cfg;
}

run_outcome run_task(const run_config& cfg, unsigned threads)
{
    if (threads == 0) {
        threads = default_thread_count();
    }
    validate_for_task(cfg);
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    output_set out(dir);
    std::ostringstream log;
    std::string started = utc_now();
    run_outcome outcome;
    try {
        const std::string& t = cfg.task;
        if (t == "steady-state") {
            task_steady_state(cfg, out, log);
        } else if (t == "combs") {
            task_combs(cfg, threads, out, log);
        } else if (t == "spectrum") {
            task_spectrum(cfg, out, log);
        } else if (t == "simulate") {
            task_simulate(cfg, threads, out, log);
        } else if (t == "homodyne") {
            if (!task_homodyne(cfg, threads, out, log)) {
                outcome.code = exit_code::comparison;
            }
        } else if (t == "fig4") {
            task_fig4(cfg, out, log);
        } else if (t == "validity") {
            task_validity(cfg, out, log);
        } else {
            throw config_error("/task", "unknown task '" + t + "'");
        }

        json manifest;
        manifest["config_hash"] = config_hash(cfg);
        manifest["version"] = SPOPO_VERSION;
        manifest["seed"] = cfg.seed;
        manifest["task"] = cfg.task;
        manifest["started_utc"] = started;
        manifest["finished_utc"] = utc_now();
        manifest["outputs"] = out.files();
        manifest["validity"] = validity_report(cfg);
        manifest["exit_code"] = outcome.code;
        manifest["config"] = to_json(cfg);
        out.write("manifest.json", manifest.dump(2) + "\n");
    } catch (...) {
        out.remove_all();
        throw;
    }
    for (const auto& f : out.files()) {
        outcome.outputs.emplace_back(f);
    }
    outcome.summary = log.str();
    return outcome;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const config_error*>(&e)) {
        return exit_code::config;
    }
    if (dynamic_cast<const physics_error*>(&e)) {
        return exit_code::physics;
    }
    if (dynamic_cast<const comparison_failure*>(&e)) {
        return exit_code::comparison;
    }
    return exit_code::internal;
}

} // namespace spopo
