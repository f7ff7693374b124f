// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <spopo/analytic.hpp>
#include <spopo/comb_estimator.hpp>
#include <spopo/homodyne.hpp>
#include <spopo/langevin.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace spopo;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

struct verdict
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

oscillator_params standard(double ks_tr, double ratio)
{
    const double tr = 1e-9;
    return oscillator_params::from_threshold_flux(tr, ks_tr / tr, ratio * ks_tr / tr, 1e15);
}

verdict exact_formulas()
{
    verdict v;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        double tr = std::pow(10.0, -12 + 4 * u(rng));
        double ks = (1e-4 + 0.09 * u(rng)) / tr;
        double kp = ks * std::pow(10.0, 3 * u(rng));
        double g = std::pow(10.0, -3 + 6 * u(rng));
        double mu0 = 1 + 5 * u(rng);
        oscillator_params p(tr, ks, kp, g);
        double nth = ks * ks / (4 * g * g);
        auto ss = make_steady_state(p, mu0);
        auto r = make_effective_rates(p, mu0);
        for (double e : {rel(threshold_flux(p), nth), rel(ss.pump_flux, nth),
                         rel(ss.signal_flux, 2 * kp / ks * (mu0 - 1) * nth),
                         rel(r.kappa_x, 2 * ks * (mu0 - 1)), rel(r.kappa_y, 2 * ks * mu0)}) {
            worst = std::max(worst, e);
        }
    }
    v.detail << "100 random sets, worst relative error " << worst;
    v.require(worst < 1e-12, "relative error < 1e-12");
    return v;
}

verdict pump_noise_floor()
{
    verdict v;
    auto p = standard(0.01, 100);
    double best_mu = 0;
    double best = 2;
    for (int i = 0; i <= 29900; ++i) {
        double mu = 1.01 + 1e-4 * i;
        double s = spectrum_above(field::pump, quadrature::y, 0, mu, p, 0);
        if (s < best) {
            best = s;
            best_mu = mu;
        }
    }
    v.detail << "minimum " << best << " at mu0 = " << best_mu;
    v.require(std::abs(best_mu - 2) <= 0.01, "argmin within 2.00 +- 0.01");
    v.require(std::abs(best - 0.5) <= 1e-6, "value 0.500 +- 1e-6");
    return v;
}

verdict threshold_squeezing()
{
    verdict v;
    auto p = standard(0.01, 100);
    const double mu = 1.001;
    double s = spectrum_above(field::signal, quadrature::y, 0, mu, p, 0);
    double expected = 1 - 1 / (mu * mu);
    v.detail << "S_Y(mu0=1.001) = " << s << ", 1 - 1/mu0^2 = " << expected;
    v.require(std::abs(s - expected) < 1e-12, "difference < 1e-12");
    return v;
}

verdict continuity()
{
    verdict v;
    auto p = standard(0.01, 100);
    const double tr = p.roundtrip_time();
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        double w = 3 * two_pi / tr * i / 9999.0;
        worst = std::max(worst, std::abs(spectrum_below(w, 1.0, p) -
                                         spectrum_above(field::signal, quadrature::y, w, 1.0, p)));
    }
    v.detail << "max |below - above| at threshold over 1e4 points: " << worst;
    v.require(worst < 1e-12, "< 1e-12");
    return v;
}

verdict monte_carlo_combs()
{
    verdict v;
    auto p = standard(0.01, 100);
    const double mu = 1.5;
    const double tr = p.roundtrip_time();
    auto pump = pump_profile::rectangular(mu, 0.5 * tr);
    sim_config cfg;
    cfg.mode = sim_mode::adiabatic;
    cfg.substeps = 4;
    cfg.pulses = 2000;
    cfg.slices = 1000;
    cfg.bin_width = tr / 2000;
    cfg.trajectories = 20;
    cfg.seed = 1;
    comb_accumulator acc(tr, cfg.bin_width, cfg.pulses);
    simulate_stream(p, pump, cfg, [&](const pulse_train_record& a, const pulse_train_record& b) {
        acc.add(a, b);
    });
    v.detail << acc.series() << " series;";
    for (auto f : {field::pump, field::signal}) {
        for (auto q : {quadrature::x, quadrature::y}) {
            auto e = acc.auto_comb(f, q);
            auto a = quadrature_comb(f, q, p, mu);
            std::string name = std::string(to_string(f)) + "-" + to_string(q);
            v.detail << ' ' << name << " c " << e.coefficient / a.coefficient << " g "
                     << e.decay_rate / a.decay_rate << " sign " << e.sign << ';';
            v.require(e.detected, name + " detected");
            v.require(rel(e.coefficient, a.coefficient) <= 0.05, name + " c within 5%");
            v.require(rel(e.decay_rate, a.decay_rate) <= 0.05, name + " decay rate within 5%");
            v.require(e.sign == a.sign, name + " sign");
        }
    }
    for (auto q : {quadrature::x, quadrature::y}) {
        auto e = acc.cross(q);
        auto a = cross_comb(q, p, mu);
        std::string name = std::string("cross-") + to_string(q);
        v.detail << ' ' << name << " c " << e.coefficient / a.coefficient << " sign " << e.sign
                 << " (expected " << a.sign << ");";
        v.require(e.detected, name + " detected");
        v.require(rel(e.coefficient, a.coefficient) <= 0.10, name + " c within 10%");
        v.require(e.sign == a.sign, name + " sign");
    }
    return v;
}

spectrum_estimate homodyne_run(const oscillator_params& p, const pump_profile& pump,
                               const lo_profile& lo, sim_config cfg,
                               const std::vector<double>& omegas, spectrum_options so,
                               photocurrent_series* first)
{
    spectrum_accumulator acc(omegas, so);
    simulate_stream(p, pump, cfg, [&](const pulse_train_record&, const pulse_train_record& s) {
        auto pc = synthesize_photocurrent(s, lo);
        acc.add(pc);
        if (first && first->samples.empty() && first->pulses == 0) {
            *first = pc;
        }
    });
    return acc.finish();
}

verdict end_to_end_homodyne()
{
    verdict v;
    auto p = standard(0.01, 100);
    const double mu = 1.5;
    const double tr = p.roundtrip_time();
    auto pump = pump_profile::rectangular(mu, 0.5 * tr);
    auto lo = lo_profile::rectangular(1.0, 0.5 * tr);
    std::vector<double> omegas{0.0, two_pi / tr};

    sim_config cfg;
    cfg.mode = sim_mode::adiabatic;
    cfg.substeps = 4;
    // Two bins of T_R/5 keep Ω = 2π/T_R below the Nyquist limit π/Δt.
    cfg.slices = 2;
    cfg.bin_width = 0.2 * tr;
    cfg.pulses = 1000000;
    cfg.trajectories = 20;
    cfg.seed = 6;
    spectrum_options so;
    so.segment_pulses = 10000;
    so.slowest_rate = 2 * p.loss_rate_signal() * (mu - 1);

    photocurrent_series first;
    auto est = homodyne_run(p, pump, lo, cfg, omegas, so, &first);
    auto pred = masked_prediction(first, pump, p, omegas);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        double z = (est.value[i] - pred.value[i]) / est.stderr_[i];
        v.detail << "Omega=" << (i ? "2pi/T_R" : "0") << ": " << est.value[i] << " +- "
                 << est.stderr_[i] << " vs " << pred.value[i] << " (z " << z << "); ";
        v.require(std::abs(z) <= 3, "squeezed spectrum within 3 s.e.");
    }

    cfg.mode = sim_mode::passive;
    cfg.seed = 7;
    so.slowest_rate = p.loss_rate_signal();
    auto vac = homodyne_run(p, pump, lo, cfg, omegas, so, nullptr);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        double z = (vac.value[i] - 1) / vac.stderr_[i];
        v.detail << "vacuum " << vac.value[i] << " (z " << z << "); ";
        v.require(std::abs(z) <= 3, "vacuum flat within 3 s.e.");
    }
    v.detail << est.segments << " segments of " << so.segment_pulses << " pulses";
    return v;
}

verdict fig4_features()
{
    verdict v;
    auto p = standard(0.01, 100);
    const double tau = 0.1e-9;
    const int points = 601;
    std::vector<double> delays;
    for (int i = 0; i < points; ++i) {
        delays.push_back(-1.5 * tau + 3 * tau * i / (points - 1));
    }
    const double bin = delays[1] - delays[0];
    std::vector<double> mus{0.5, 2.0};
    auto rows = fig4_scan(p, mus, delays, tau, 0.0, 0);
    auto curve = [&](int k) {
        return std::vector<fig4_row>(rows.begin() + k * points, rows.begin() + (k + 1) * points);
    };
    auto below = curve(0);
    auto above = curve(1);
    const int centre = points / 2;

    double peak = above[centre].noise;
    bool local_max = above[centre - 1].noise < peak && above[centre + 1].noise < peak;
    v.detail << "mu0=2: S(0) = " << peak;
    v.require(std::abs(peak - 0.75) <= 1e-6, "peak 0.750 +- 1e-6");
    v.require(local_max, "local maximum at zero delay");

    double zero_expected = tau * std::sqrt(std::log(2.0) / 2);
    for (int side : {-1, 1}) {
        int best = centre;
        for (int i = centre; i >= 0 && i < points; i += side) {
            if (above[i].noise < above[best].noise) {
                best = i;
            }
        }
        v.detail << ", zero " << above[best].noise << " at " << above[best].delay / tau << " tau_p";
        v.require(std::abs(std::abs(above[best].delay) - zero_expected) <= bin, "zero within one bin");
        v.require(above[best].noise < 1e-3, "zero reached");
    }

    int argmin = 0;
    for (int i = 0; i < points; ++i) {
        if (below[i].noise < below[argmin].noise) {
            argmin = i;
        }
    }
    v.detail << "; mu0=0.5: min " << below[argmin].noise << " at " << below[argmin].delay / tau
             << " tau_p";
    v.require(argmin == centre, "mu0=0.5 minimum at zero delay");
    v.require(std::abs(below[argmin].noise - 1.0 / 9) <= 1e-6, "mu0=0.5 minimum 0.1111 +- 1e-6");

    // Simulated overlay on the above-threshold bins (μ ≥ 1.25) of a gaussian pulse.
    auto q = standard(0.05, 100);
    const double tr = q.roundtrip_time();
    auto pump = pump_profile::gaussian(2.0, 0.2 * tr);
    sim_config cfg;
    cfg.mode = sim_mode::adiabatic;
    cfg.substeps = 4;
    cfg.slices = 21;
    cfg.bin_width = 0.01 * tr;
    cfg.pulses = 200000;
    cfg.trajectories = 4;
    cfg.seed = 8;
    auto plan = plan_simulation(q, pump, cfg);
    std::vector<double> slice_times;
    for (int j : plan.recorded) {
        if (plan.slice_mu[j] >= 1.25) {
            slice_times.push_back(plan.slice_times[j]);
        }
    }
    std::vector<spectrum_accumulator> accs;
    std::vector<double> w{0.0};
    spectrum_options so;
    so.segment_pulses = 2000;
    so.slowest_rate = 2 * q.loss_rate_signal() * 0.25;
    for (std::size_t i = 0; i < slice_times.size(); ++i) {
        accs.emplace_back(w, so);
    }
    std::vector<photocurrent_series> firsts(slice_times.size());
    simulate_stream(q, pump, cfg, [&](const pulse_train_record&, const pulse_train_record& s) {
        for (std::size_t i = 0; i < slice_times.size(); ++i) {
            auto lo = lo_profile::delta(1.0);
            lo.set_delay(slice_times[i]);
            auto pc = synthesize_photocurrent(s, lo);
            accs[i].add(pc);
            if (firsts[i].pulses == 0) {
                firsts[i] = std::move(pc);
            }
        }
    });
    spectrum_estimate measured;
    spectrum_series predicted;
    for (std::size_t i = 0; i < slice_times.size(); ++i) {
        auto e = accs[i].finish();
        auto pr = masked_prediction(firsts[i], pump, q, w);
        measured.omega.push_back(slice_times[i]);
        measured.value.push_back(e.value[0]);
        measured.stderr_.push_back(e.stderr_[0]);
        predicted.omega.push_back(slice_times[i]);
        predicted.value.push_back(pr.value[0]);
    }
    auto rep = compare_spectra(measured, predicted);
    v.detail << "; overlay on " << slice_times.size() << " bins: max |z| " << rep.max_abs_z
             << " (critical " << rep.z_critical << ")";
    v.require(rep.pass, "simulated overlay within Bonferroni 3 s.e.");
    return v;
}

verdict validity_margin_check()
{
    verdict v;
    double nth = watts_to_flux(50.0, 0.4e-6);
    auto p = oscillator_params::from_threshold_flux(1e-9, 1e7, 1e8, nth);
    double m = validity_margin(p, nth, 10e-15);
    v.detail << "margin " << m << ", decade 1e" << std::ceil(std::log10(m));
    v.require(std::abs(m - 3.1e-4) <= 0.05 * 3.1e-4, "3.1e-4 +- 5%");
    v.require(std::ceil(std::log10(m)) == -3, "order 1e-3");
    return v;
}

verdict property_suites()
{
    verdict v;
    auto p = standard(0.01, 100);
    const double tr = p.roundtrip_time();

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uw(0, 4 * two_pi / tr);
    std::uniform_real_distribution<double> um(1.0001, 10.0);
    bool bounds = true;
    for (int i = 0; i < 5000; ++i) {
        double w = uw(rng);
        double mu = um(rng);
        for (auto f : {field::pump, field::signal}) {
            double y = spectrum_above(f, quadrature::y, w, mu, p);
            double x = spectrum_above(f, quadrature::x, w, mu, p);
            bounds = bounds && y >= 0 && y <= 1 && x >= 1;
        }
    }
    v.require(bounds, "Y in [0,1] and X >= 1");

    bool product = true;
    for (double mu = 1.001; mu < 10; mu *= 1.005) {
        for (auto f : {field::pump, field::signal}) {
            product = product && spectrum_above(f, quadrature::x, 0, mu, p, 0) *
                                         spectrum_above(f, quadrature::y, 0, mu, p, 0) >= 1;
        }
    }
    v.require(product, "resonance uncertainty product >= 1");

    auto pump = pump_profile::rectangular(1.5, 0.5 * tr);
    sim_config cfg;
    cfg.slices = 8;
    cfg.bin_width = 0.05 * tr;
    cfg.pulses = 20000;
    cfg.trajectories = 2;
    cfg.seed = 12;
    cfg.threads = 1;
    auto res = simulate(p, pump, cfg);
    double worst_off = 0;
    for (const auto* rec : {&res.signal, &res.pump}) {
        for (auto q : {quadrature::x, quadrature::y}) {
            for (std::int64_t lag : {1, 2, 5, 10}) {
                worst_off = std::max(worst_off, std::abs(bin_covariance(*rec, q, 2, lag).z()));
            }
        }
    }
    v.require(worst_off <= 3.5, "off-comb covariance within noise");
    double worst_slice = 0;
    for (const auto* rec : {&res.signal, &res.pump}) {
        for (auto q : {quadrature::x, quadrature::y}) {
            worst_slice = std::max(worst_slice, std::abs(bin_covariance(*rec, q, 1, 0).z()));
        }
    }
    v.require(worst_slice <= 3.5, "neighbouring slices independent");

    cfg.threads = 3;
    auto again = simulate(p, pump, cfg);
    bool same = again.signal.x == res.signal.x && again.signal.y == res.signal.y &&
                again.pump.x == res.pump.x && again.pump.y == res.pump.y;
    estimator_options one;
    one.threads = 1;
    estimator_options many;
    many.threads = 3;
    same = same && estimate_comb(res.signal, quadrature::x, one).lags.value ==
                       estimate_comb(again.signal, quadrature::x, many).lags.value;
    v.require(same, "bit-identical results across thread counts");
    v.detail << "bounds " << (bounds ? "ok" : "bad") << ", product " << (product ? "ok" : "bad")
             << ", off-comb max |z| " << worst_off << ", slice max |z| " << worst_slice
             << ", determinism " << (same ? "ok" : "bad");
    return v;
}

} // namespace

int main()
{
    struct criterion
    {
        int id;
        const char* name;
        std::function<verdict()> run;
    };
    const criterion all[] = {
        {1, "exact formulas", exact_formulas},
        {2, "pump noise floor", pump_noise_floor},
        {3, "threshold squeezing limit", threshold_squeezing},
        {4, "below/above continuity", continuity},
        {5, "Monte Carlo combs", monte_carlo_combs},
        {6, "end-to-end homodyne", end_to_end_homodyne},
        {7, "delay-scan features", fig4_features},
        {8, "validity margin", validity_margin_check},
        {9, "property suites", property_suites},
    };
    int failures = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << "exception: " << e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d %s: %s (%.1f s) %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL",
                    secs, v.detail.str().c_str());
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
