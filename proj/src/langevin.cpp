#include <spopo/errors.hpp>
#include <spopo/langevin.hpp>
#include <spopo/noise.hpp>
#include <spopo/parallel.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace spopo {

namespace {

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

std::string canonical(const oscillator_params& params, const pump_profile& pump,
                      const sim_config& cfg)
{
    std::ostringstream os;
    os << "T_R=" << hex(params.roundtrip_time()) << ";ks=" << hex(params.loss_rate_signal())
       << ";kp=" << hex(params.loss_rate_pump()) << ";g=" << hex(params.coupling());
    os << ";pump=" << static_cast<int>(pump.kind()) << ',' << hex(pump.mu0()) << ','
       << hex(pump.duration());
    if (pump.kind() == pump_profile::shape::sampled) {
        for (const auto& [t, mu] : pump.samples().points()) {
            os << ',' << hex(t) << ':' << hex(mu);
        }
    }
    os << ";mode=" << to_string(cfg.mode) << ";substeps=" << cfg.substeps
       << ";pulses=" << cfg.pulses << ";warmup=" << cfg.warmup << ";slices=" << cfg.slices
       << ";dt=" << hex(cfg.bin_width) << ";K=" << cfg.trajectories << ";seed=" << cfg.seed
       << ";branch=" << cfg.branch << ";cav=" << cfg.intracavity;
    return os.str();
}

struct slice_output
{
    double* pump_x;
    double* pump_y;
    double* signal_x;
    double* signal_y;
};

struct slice_rates
{
    double kappa_x = 0;
    double kappa_y = 0;
};

/// Integrates one (trajectory, slice) and writes its M recorded samples.
void run_slice(const oscillator_params& params, const sim_config& cfg, const sim_plan& plan,
               const noise_stream& noise, int trajectory, int grid_index, slice_output out)
{
    const double tr = params.roundtrip_time();
    const double ks = params.loss_rate_signal();
    const double kp = params.loss_rate_pump();
    const double dT = plan.step;
    const double dt = plan.bin_width;
    const double b = cfg.branch;
    const int sub = cfg.substeps;
    const double mu = plan.slice_mu[grid_index];

    slice_rates rates;
    if (cfg.mode != sim_mode::passive) {
        rates = {2 * ks * (mu - 1), 2 * ks * mu};
    }

    // Noise amplitude for a unit-rate source per step: sqrt(2κΔT)/(2sqrt(Δt)).
    auto amp = [&](double kappa) { return std::sqrt(2 * kappa * dT) / (2 * std::sqrt(dt)); };
    const double a_s = amp(ks);
    const double a_p = amp(kp);
    const double a_x = amp(rates.kappa_x);
    const double qin_scale = 1.0 / (2 * std::sqrt(sub * dt));

    const double ts = 2 * ks * tr;
    const bool pump_resolved = cfg.mode == sim_mode::full ||
                               (cfg.mode == sim_mode::passive && params.pump_high_finesse() &&
                                kp * dT <= 0.1);
    const double tp = pump_resolved ? 2 * kp * tr : 0.0;
    const double coupling = b * std::sqrt(kp * rates.kappa_x);
    const double pump_reflect = b * std::sqrt(2 * rates.kappa_x * tr);

    double xs = 0, ys = 0, xp = 0, yp = 0;
    std::vector<std::array<double, 4>> xi(static_cast<std::size_t>(sub));
    const std::int64_t total = plan.warmup + cfg.pulses;
    const auto traj = static_cast<std::uint32_t>(trajectory);
    const auto slice = static_cast<std::uint32_t>(grid_index);

    for (std::int64_t r = 0; r < total; ++r) {
        std::array<double, 4> qin{};
        for (int i = 0; i < sub; ++i) {
            xi[i] = noise.draw(traj, slice, static_cast<std::uint64_t>(r) * sub + i);
            for (int c = 0; c < 4; ++c) {
                qin[c] += xi[i][c];
            }
        }
        for (double& q : qin) {
            q *= qin_scale;
        }

        if (r >= plan.warmup) {
            auto n = static_cast<std::size_t>(r - plan.warmup);
            constexpr int SX = static_cast<int>(noise_channel::signal_x);
            constexpr int SY = static_cast<int>(noise_channel::signal_y);
            constexpr int PX = static_cast<int>(noise_channel::pump_x);
            constexpr int PY = static_cast<int>(noise_channel::pump_y);
            if (cfg.intracavity) {
                out.signal_x[n] = xs;
                out.signal_y[n] = ys;
                if (cfg.mode == sim_mode::adiabatic) {
                    double f = -b * std::sqrt(rates.kappa_x / kp);
                    out.pump_x[n] = f * xs;
                    out.pump_y[n] = f * ys;
                } else {
                    out.pump_x[n] = xp;
                    out.pump_y[n] = yp;
                }
            } else {
                double rs = std::sqrt(1 - ts);
                out.signal_x[n] = std::sqrt(ts) * xs - rs * qin[SX];
                out.signal_y[n] = std::sqrt(ts) * ys - rs * qin[SY];
                if (cfg.mode == sim_mode::adiabatic) {
                    out.pump_x[n] = -pump_reflect * xs + qin[PX];
                    out.pump_y[n] = -pump_reflect * ys + qin[PY];
                } else if (pump_resolved) {
                    double rp = std::sqrt(1 - tp);
                    out.pump_x[n] = std::sqrt(tp) * xp - rp * qin[PX];
                    out.pump_y[n] = std::sqrt(tp) * yp - rp * qin[PY];
                } else {
                    out.pump_x[n] = qin[PX];
                    out.pump_y[n] = qin[PY];
                }
            }
        }

        for (int i = 0; i < sub; ++i) {
            const auto& e = xi[i];
            switch (cfg.mode) {
            case sim_mode::full: {
                double dxp = (-kp * xp - coupling * xs) * dT + a_p * e[2];
                double dyp = (-kp * yp - coupling * ys) * dT + a_p * e[3];
                double dxs = coupling * xp * dT + a_s * e[0];
                double dys = (-2 * ks * ys + coupling * yp) * dT + a_s * e[1];
                xp += dxp;
                yp += dyp;
                xs += dxs;
                ys += dys;
                break;
            }
            case sim_mode::adiabatic:
                xs += -rates.kappa_x * xs * dT + a_s * e[0] + b * a_x * e[2];
                ys += -rates.kappa_y * ys * dT + a_s * e[1] + b * a_x * e[3];
                break;
            case sim_mode::passive:
                xs += -ks * xs * dT + a_s * e[0];
                ys += -ks * ys * dT + a_s * e[1];
                if (pump_resolved) {
                    xp += -kp * xp * dT + a_p * e[2];
                    yp += -kp * yp * dT + a_p * e[3];
                }
                break;
            }
        }
    }
}

pulse_train_record empty_record(field f, const oscillator_params& params, const sim_config& cfg,
                                const sim_plan& plan)
{
    pulse_train_record rec;
    rec.fld = f;
    rec.intracavity = cfg.intracavity;
    rec.roundtrip_time = params.roundtrip_time();
    rec.bin_width = plan.bin_width;
    rec.pulses = cfg.pulses;
    rec.seed = cfg.seed;
    rec.config_hash = plan.config_hash;
    for (int j : plan.recorded) {
        rec.slice_times.push_back(plan.slice_times[j]);
        rec.slice_index.push_back(j);
    }
    return rec;
}

} // namespace

const char* to_string(sim_mode m)
{
    switch (m) {
    case sim_mode::full:
        return "full";
    case sim_mode::adiabatic:
        return "adiabatic";
    case sim_mode::passive:
        return "passive";
    }
    return "?";
}

void pulse_train_record::validate() const
{
    std::size_t expected = static_cast<std::size_t>(trajectories) * slices() *
                           static_cast<std::size_t>(pulses);
    if (x.size() != expected || y.size() != expected || slice_index.size() != slices()) {
        throw physics_error("pulse train record has inconsistent sizes");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(x.begin(), x.end(), finite) || !std::all_of(y.begin(), y.end(), finite)) {
        throw physics_error("pulse train record contains non-finite samples");
    }
}

std::int64_t minimum_warmup(const oscillator_params& params, const sim_plan& plan,
                            const sim_config& cfg)
{
    const double tr = params.roundtrip_time();
    double slowest = std::numeric_limits<double>::infinity();
    if (cfg.mode == sim_mode::passive) {
        slowest = params.loss_rate_signal();
    } else {
        for (int j : plan.recorded) {
            slowest = std::min(slowest, 2 * params.loss_rate_signal() * (plan.slice_mu[j] - 1));
        }
    }
    if (!std::isfinite(slowest) || !(slowest > 0)) {
        return 0;
    }
    return static_cast<std::int64_t>(std::ceil(5.0 / (slowest * tr)));
}

sim_plan plan_simulation(const oscillator_params& params, const pump_profile& pump,
                         const sim_config& cfg)
{
    if (cfg.substeps < 1 || cfg.pulses < 1 || cfg.slices < 1 || cfg.trajectories < 1) {
        throw physics_error("substeps, pulses, slices and trajectories must all be >= 1");
    }
    if (cfg.branch != 1 && cfg.branch != -1) {
        throw physics_error("branch must be +1 or -1");
    }
    if (cfg.bin_width < 0 || !std::isfinite(cfg.bin_width)) {
        throw physics_error("bin width must be finite and non-negative");
    }
    const double tr = params.roundtrip_time();
    pump.check_period(tr);

    sim_plan plan;
    plan.step = tr / cfg.substeps;
    plan.bin_width = cfg.bin_width > 0 ? cfg.bin_width : tr / cfg.slices;
    if (plan.bin_width * cfg.slices > tr * (1 + 1e-12)) {
        throw physics_error("slices * bin_width exceeds the round-trip time");
    }
    for (int j = 0; j < cfg.slices; ++j) {
        double t = (j - (cfg.slices - 1) / 2.0) * plan.bin_width;
        double mu = pump.mu(t);
        plan.slice_times.push_back(t);
        plan.slice_mu.push_back(mu);
        if (cfg.mode == sim_mode::passive || mu > 1) {
            plan.recorded.push_back(j);
        } else {
            plan.skipped_times.push_back(t);
        }
    }
    if (plan.recorded.empty()) {
        throw physics_error("no slice is above threshold (mu > 1); nothing to simulate");
    }
    if (!plan.skipped_times.empty()) {
        plan.warnings.push_back(std::to_string(plan.skipped_times.size()) +
                                " slice(s) at or below threshold were skipped");
    }

    const double ks = params.loss_rate_signal();
    const double kp = params.loss_rate_pump();
    double mu_max = 0;
    for (int j : plan.recorded) {
        mu_max = std::max(mu_max, plan.slice_mu[j]);
    }
    switch (cfg.mode) {
    case sim_mode::full:
        if (!params.pump_high_finesse()) {
            throw physics_error("full mode needs kappa_p*T_R < 0.5 for the pump output mirror");
        }
        if (kp * plan.step > 0.1) {
            throw physics_error("full mode needs step <= 0.1/kappa_p; raise substeps to at least " +
                                std::to_string(static_cast<int>(std::ceil(10 * kp * tr))));
        }
        break;
    case sim_mode::adiabatic:
        if (2 * ks * mu_max * plan.step > 0.1) {
            throw physics_error("adiabatic mode needs step <= 0.1/kappa_y");
        }
        if (make_effective_rates(params, mu_max).adiabatic_warning) {
            plan.warnings.push_back("mu0 >= 0.1*kappa_p/kappa_s: adiabatic elimination is marginal");
        }
        break;
    case sim_mode::passive:
        if (ks * plan.step > 0.1) {
            throw physics_error("passive mode needs step <= 0.1/kappa_s");
        }
        break;
    }

    std::int64_t needed = minimum_warmup(params, plan, cfg);
    if (cfg.warmup < 0) {
        plan.warmup = needed;
    } else if (cfg.warmup < needed) {
        throw physics_error("warm-up of " + std::to_string(cfg.warmup) +
                            " round trips is below the required " + std::to_string(needed));
    } else {
        plan.warmup = cfg.warmup;
    }
    if (static_cast<std::uint64_t>(cfg.trajectories) > std::numeric_limits<std::uint32_t>::max()) {
        throw physics_error("too many trajectories");
    }
    plan.config_hash = fnv1a(canonical(params, pump, cfg));
    return plan;
}

sim_plan simulate_stream(const oscillator_params& params, const pump_profile& pump,
                         const sim_config& cfg, const trajectory_visitor& visit)
{
    sim_plan plan = plan_simulation(params, pump, cfg);
    const noise_stream noise(cfg.seed);
    const unsigned threads = cfg.threads == 0 ? default_thread_count() : cfg.threads;
    const std::size_t S = plan.recorded.size();
    const auto M = static_cast<std::size_t>(cfg.pulses);

    // Batch trajectories so that small slice counts still keep every worker busy.
    const int batch = std::max<int>(1, static_cast<int>((2 * threads + S - 1) / S));
    for (int k0 = 0; k0 < cfg.trajectories; k0 += batch) {
        int nk = std::min(batch, cfg.trajectories - k0);
        std::vector<pulse_train_record> pumps(nk, empty_record(field::pump, params, cfg, plan));
        std::vector<pulse_train_record> signals(nk, empty_record(field::signal, params, cfg, plan));
        for (int i = 0; i < nk; ++i) {
            for (auto* rec : {&pumps[i], &signals[i]}) {
                rec->trajectories = 1;
                rec->first_trajectory = k0 + i;
                rec->x.assign(S * M, 0.0);
                rec->y.assign(S * M, 0.0);
            }
        }
        parallel_for(static_cast<std::size_t>(nk) * S, threads, [&](std::size_t idx) {
            auto i = static_cast<int>(idx / S);
            std::size_t s = idx % S;
            slice_output out{pumps[i].x.data() + s * M, pumps[i].y.data() + s * M,
                             signals[i].x.data() + s * M, signals[i].y.data() + s * M};
            run_slice(params, cfg, plan, noise, k0 + i, plan.recorded[s], out);
        });
        for (int i = 0; i < nk; ++i) {
            visit(pumps[i], signals[i]);
        }
    }
    return plan;
}

simulation_result simulate(const oscillator_params& params, const pump_profile& pump,
                           const sim_config& cfg)
{
    simulation_result res;
    bool first = true;
    res.plan = simulate_stream(params, pump, cfg,
                               [&](const pulse_train_record& p, const pulse_train_record& s) {
                                   if (first) {
                                       res.pump = p;
                                       res.signal = s;
                                       res.pump.trajectories = 0;
                                       res.signal.trajectories = 0;
                                       res.pump.x.clear();
                                       res.pump.y.clear();
                                       res.signal.x.clear();
                                       res.signal.y.clear();
                                       first = false;
                                   }
                                   for (auto [dst, src] : {std::pair{&res.pump, &p},
                                                           std::pair{&res.signal, &s}}) {
                                       dst->x.insert(dst->x.end(), src->x.begin(), src->x.end());
                                       dst->y.insert(dst->y.end(), src->y.begin(), src->y.end());
                                       dst->trajectories += 1;
                                   }
                               });
    return res;
}

} // namespace spopo
