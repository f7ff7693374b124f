#include <spopo/config.hpp>
#include <spopo/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace spopo {

using nlohmann::json;

namespace {

/// Reads an object member by member and remembers which keys were used, so
/// that leftovers can be reported as unknown.
class reader
{
public:
    reader(const json& j, std::string path) : m_j(j), m_path(std::move(path))
    {
        if (!j.is_object()) {
            throw config_error(where(), "expected an object");
        }
    }

    std::string where() const { return m_path.empty() ? "/" : m_path; }
    std::string at(const std::string& key) const { return m_path + "/" + key; }
    bool has(const std::string& key) const { return m_j.contains(key); }

    const json* get(const std::string& key)
    {
        m_used.insert(key);
        auto it = m_j.find(key);
        return it == m_j.end() ? nullptr : &*it;
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        const json* v = get(key);
        if (!v) {
            if (fallback) {
                return *fallback;
            }
            throw config_error(at(key), "required number is missing");
        }
        if (!v->is_number()) {
            throw config_error(at(key), "expected a number");
        }
        double d = v->get<double>();
        if (!std::isfinite(d)) {
            throw config_error(at(key), "must be finite");
        }
        return d;
    }

    std::optional<double> optional_number(const std::string& key)
    {
        if (!has(key)) {
            get(key);
            return std::nullopt;
        }
        return number(key);
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback)
    {
        const json* v = get(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_number_integer()) {
            throw config_error(at(key), "expected an integer");
        }
        return v->get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        const json* v = get(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_number_unsigned()) {
            throw config_error(at(key), "expected a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        const json* v = get(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_boolean()) {
            throw config_error(at(key), "expected true or false");
        }
        return v->get<bool>();
    }

    std::string choice(const std::string& key, const std::string& fallback,
                       std::initializer_list<const char*> allowed)
    {
        const json* v = get(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_string()) {
            throw config_error(at(key), "expected a string");
        }
        std::string s = v->get<std::string>();
        std::string list;
        for (const char* a : allowed) {
            if (s == a) {
                return s;
            }
            list += std::string(list.empty() ? "" : ", ") + a;
        }
        if (allowed.size() == 0) {
            return s;
        }
        throw config_error(at(key), "'" + s + "' is not one of: " + list);
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json* v = get(key);
        std::vector<double> out;
        if (!v) {
            return out;
        }
        if (!v->is_array()) {
            throw config_error(at(key), "expected an array of numbers");
        }
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto& e = (*v)[i];
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                throw config_error(at(key) + "/" + std::to_string(i), "expected a finite number");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    sample_list pairs(const std::string& key)
    {
        const json* v = get(key);
        sample_list out;
        if (!v) {
            return out;
        }
        if (!v->is_array()) {
            throw config_error(at(key), "expected an array of [t, value] pairs");
        }
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto& e = (*v)[i];
            std::string p = at(key) + "/" + std::to_string(i);
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw config_error(p, "expected a [t, value] pair of numbers");
            }
            out.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        return out;
    }

    void finish() const
    {
        for (auto it = m_j.begin(); it != m_j.end(); ++it) {
            if (!m_used.count(it.key())) {
                throw config_error(at(it.key()), "unknown key");
            }
        }
    }

private:
    const json& m_j;
    std::string m_path;
    std::set<std::string> m_used;
};

double scale_of(const std::string& name,
                std::initializer_list<std::pair<const char*, double>> table, const char* what)
{
    for (const auto& [n, v] : table) {
        if (name == n) {
            return v;
        }
    }
    throw config_error("/units", std::string("unknown ") + what + " unit '" + name + "'");
}

json pairs_json(const sample_list& s)
{
    json a = json::array();
    for (const auto& [t, v] : s) {
        a.push_back({t, v});
    }
    return a;
}

void require_positive(double v, const std::string& path)
{
    if (!(v > 0)) {
        throw config_error(path, "must be strictly positive");
    }
}

const json* section(reader& r, const std::string& key)
{
    const json* v = r.get(key);
    return v;
}

} // namespace

double units_block::time_scale() const
{
    return scale_of(time, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12},
                           {"fs", 1e-15}},
                    "time");
}

double units_block::power_scale() const
{
    return scale_of(power, {{"W", 1.0}, {"mW", 1e-3}, {"kW", 1e3}}, "power");
}

double units_block::length_scale() const
{
    return scale_of(length, {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}, "length");
}

run_config parse_config(const json& j)
{
    run_config cfg;
    reader top(j, "");
    cfg.task = top.choice("task", cfg.task,
                          {"steady-state", "combs", "spectrum", "simulate", "homodyne", "fig4",
                           "validity"});
    cfg.output_dir = top.choice("output_dir", cfg.output_dir, {});
    cfg.seed = top.unsigned_integer("seed", cfg.seed);

    if (const json* u = section(top, "units")) {
        reader r(*u, "/units");
        cfg.units.time = r.choice("time", "s", {"s", "ms", "us", "ns", "ps", "fs"});
        cfg.units.power = r.choice("power", "W", {"W", "mW", "kW"});
        cfg.units.length = r.choice("length", "m", {"m", "mm", "um", "nm"});
        r.finish();
    } else {
        throw config_error("/units", "a units block is required");
    }

    if (const json* o = section(top, "oscillator")) {
        reader r(*o, "/oscillator");
        auto& s = cfg.oscillator;
        s.roundtrip_time = r.number("roundtrip_time");
        s.loss_rate_signal = r.number("loss_rate_signal");
        s.loss_rate_pump = r.number("loss_rate_pump");
        s.coupling = r.optional_number("coupling");
        s.threshold_flux = r.optional_number("threshold_flux");
        s.threshold_power = r.optional_number("threshold_power");
        s.wavelength = r.optional_number("wavelength");
        require_positive(s.roundtrip_time, "/oscillator/roundtrip_time");
        require_positive(s.loss_rate_signal, "/oscillator/loss_rate_signal");
        require_positive(s.loss_rate_pump, "/oscillator/loss_rate_pump");
        int given = int(s.coupling.has_value()) + int(s.threshold_flux.has_value()) +
                    int(s.threshold_power.has_value());
        if (given != 1) {
            throw config_error("/oscillator",
                               "give exactly one of coupling, threshold_flux, threshold_power");
        }
        if (s.threshold_power.has_value() != s.wavelength.has_value()) {
            throw config_error("/oscillator/wavelength",
                               "wavelength is required with (and only with) threshold_power");
        }
        for (auto [v, name] : {std::pair{s.coupling, "coupling"},
                               std::pair{s.threshold_flux, "threshold_flux"},
                               std::pair{s.threshold_power, "threshold_power"},
                               std::pair{s.wavelength, "wavelength"}}) {
            if (v) {
                require_positive(*v, std::string("/oscillator/") + name);
            }
        }
        r.finish();
    } else {
        throw config_error("/oscillator", "an oscillator block is required");
    }

    if (const json* p = section(top, "pump")) {
        reader r(*p, "/pump");
        pump_section s;
        s.shape = r.choice("shape", s.shape, {"rectangular", "gaussian", "sampled"});
        if (s.shape == "sampled") {
            s.samples = r.pairs("samples");
            s.samples_unit = r.choice("samples_unit", s.samples_unit, {"mu", "flux", "power"});
            if (s.samples.size() < 2) {
                throw config_error("/pump/samples", "at least two samples are required");
            }
        } else {
            s.mu0 = r.number("mu0");
            s.duration = r.number("duration");
            if (s.mu0 < 0) {
                throw config_error("/pump/mu0", "must be non-negative");
            }
            require_positive(s.duration, "/pump/duration");
        }
        s.phase = r.pairs("phase");
        r.finish();
        cfg.pump = s;
    }

    if (const json* l = section(top, "lo")) {
        reader r(*l, "/lo");
        lo_section s;
        s.shape = r.choice("shape", s.shape, {"delta", "rectangular", "gaussian", "sampled"});
        if (s.shape == "sampled") {
            s.samples = r.pairs("samples");
            if (s.samples.size() < 2) {
                throw config_error("/lo/samples", "at least two samples are required");
            }
        } else {
            s.peak_flux = r.number("peak_flux", 1.0);
            if (s.peak_flux < 0) {
                throw config_error("/lo/peak_flux", "must be non-negative");
            }
        }
        if (s.shape == "rectangular" || s.shape == "gaussian") {
            s.duration = r.number("duration");
            require_positive(s.duration, "/lo/duration");
        }
        s.delay = r.number("delay", 0.0);
        s.quadrature = r.choice("quadrature", s.quadrature, {"X", "Y"});
        s.target = r.choice("target", s.target, {"signal", "pump"});
        r.finish();
        cfg.lo = s;
    }

    if (const json* v = section(top, "simulation")) {
        reader r(*v, "/simulation");
        auto& s = cfg.simulation;
        s.mode = r.choice("mode", s.mode, {"full", "adiabatic", "passive"});
        s.substeps = static_cast<int>(r.integer("substeps", s.substeps));
        s.pulses = r.integer("pulses", s.pulses);
        s.warmup = r.integer("warmup", s.warmup);
        s.slices = static_cast<int>(r.integer("slices", s.slices));
        s.bin_width = r.number("bin_width", s.bin_width);
        s.trajectories = static_cast<int>(r.integer("trajectories", s.trajectories));
        s.branch = static_cast<int>(r.integer("branch", s.branch));
        s.record_format = r.choice("record_format", s.record_format, {"binary", "csv", "both"});
        for (auto [val, name] : {std::pair{std::int64_t{s.substeps}, "substeps"},
                                 std::pair{s.pulses, "pulses"},
                                 std::pair{std::int64_t{s.slices}, "slices"},
                                 std::pair{std::int64_t{s.trajectories}, "trajectories"}}) {
            if (val < 1) {
                throw config_error(std::string("/simulation/") + name, "must be >= 1");
            }
        }
        if (s.warmup < -1) {
            throw config_error("/simulation/warmup", "must be >= 0, or -1 for the minimum");
        }
        if (s.branch != 1 && s.branch != -1) {
            throw config_error("/simulation/branch", "must be +1 or -1");
        }
        if (s.bin_width < 0) {
            throw config_error("/simulation/bin_width", "must be non-negative");
        }
        r.finish();
    }

    if (const json* v = section(top, "spectrum")) {
        reader r(*v, "/spectrum");
        auto& s = cfg.spectrum;
        s.fld = r.choice("field", s.fld, {"signal", "pump"});
        s.quadrature = r.choice("quadrature", s.quadrature, {"X", "Y"});
        s.model = r.choice("model", s.model, {"matched", "general"});
        s.omegas = r.numbers("omegas");
        s.omega_min = r.number("omega_min", s.omega_min);
        s.omega_max = r.number("omega_max", s.omega_max);
        s.points = static_cast<int>(r.integer("points", s.points));
        s.m_max = static_cast<int>(r.integer("m_max", s.m_max));
        s.segment_pulses = r.integer("segment_pulses", s.segment_pulses);
        if (s.omegas.empty() && s.points < 1) {
            throw config_error("/spectrum", "give either omegas or points with omega_min/max");
        }
        if (s.points > 1 && s.omega_max < s.omega_min) {
            throw config_error("/spectrum/omega_max", "must not be below omega_min");
        }
        if (s.m_max < -1) {
            throw config_error("/spectrum/m_max", "must be >= 0, or -1 for automatic");
        }
        if (s.segment_pulses < 0) {
            throw config_error("/spectrum/segment_pulses", "must be non-negative");
        }
        r.finish();
    } else {
        cfg.spectrum.omegas = {0.0};
    }

    if (const json* v = section(top, "fig4")) {
        reader r(*v, "/fig4");
        auto& s = cfg.fig4;
        if (r.has("mu0")) {
            s.mu0 = r.numbers("mu0");
        } else {
            r.get("mu0");
        }
        s.tau_p = r.number("tau_p", s.tau_p);
        s.delay_min = r.number("delay_min", s.delay_min);
        s.delay_max = r.number("delay_max", s.delay_max);
        s.points = static_cast<int>(r.integer("points", s.points));
        s.lo_width = r.number("lo_width", s.lo_width);
        s.m_max = static_cast<int>(r.integer("m_max", s.m_max));
        if (s.points < 1) {
            throw config_error("/fig4/points", "must be >= 1");
        }
        if (s.lo_width < 0) {
            throw config_error("/fig4/lo_width", "must be non-negative");
        }
        if (s.m_max < -1) {
            throw config_error("/fig4/m_max", "must be >= 0, or -1 for automatic");
        }
        r.finish();
    }

    if (const json* v = section(top, "validity")) {
        reader r(*v, "/validity");
        cfg.validity.averaging_time = r.number("averaging_time", 0.0);
        if (cfg.validity.averaging_time < 0) {
            throw config_error("/validity/averaging_time", "must be non-negative");
        }
        r.finish();
    }

    if (const json* v = section(top, "combs")) {
        reader r(*v, "/combs");
        cfg.combs.estimate = r.boolean("estimate", cfg.combs.estimate);
        cfg.combs.max_lag = static_cast<int>(r.integer("max_lag", cfg.combs.max_lag));
        r.finish();
    }

    top.finish();
    return cfg;
}

run_config load_config(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw config_error("", "cannot open config file " + path.string());
    }
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw config_error("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const run_config& cfg)
{
    json j;
    j["task"] = cfg.task;
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    j["units"] = {{"time", cfg.units.time}, {"power", cfg.units.power},
                  {"length", cfg.units.length}};

    const auto& o = cfg.oscillator;
    json jo = {{"roundtrip_time", o.roundtrip_time},
               {"loss_rate_signal", o.loss_rate_signal},
               {"loss_rate_pump", o.loss_rate_pump}};
    if (o.coupling) {
        jo["coupling"] = *o.coupling;
    }
    if (o.threshold_flux) {
        jo["threshold_flux"] = *o.threshold_flux;
    }
    if (o.threshold_power) {
        jo["threshold_power"] = *o.threshold_power;
    }
    if (o.wavelength) {
        jo["wavelength"] = *o.wavelength;
    }
    j["oscillator"] = jo;

    if (cfg.pump) {
        const auto& p = *cfg.pump;
        json jp = {{"shape", p.shape}};
        if (p.shape == "sampled") {
            jp["samples"] = pairs_json(p.samples);
            jp["samples_unit"] = p.samples_unit;
        } else {
            jp["mu0"] = p.mu0;
            jp["duration"] = p.duration;
        }
        if (!p.phase.empty()) {
            jp["phase"] = pairs_json(p.phase);
        }
        j["pump"] = jp;
    }
    if (cfg.lo) {
        const auto& l = *cfg.lo;
        json jl = {{"shape", l.shape}, {"delay", l.delay}, {"quadrature", l.quadrature},
                   {"target", l.target}};
        if (l.shape == "sampled") {
            jl["samples"] = pairs_json(l.samples);
        } else {
            jl["peak_flux"] = l.peak_flux;
        }
        if (l.shape == "rectangular" || l.shape == "gaussian") {
            jl["duration"] = l.duration;
        }
        j["lo"] = jl;
    }
    const auto& s = cfg.simulation;
    j["simulation"] = {{"mode", s.mode},       {"substeps", s.substeps},
                       {"pulses", s.pulses},   {"warmup", s.warmup},
                       {"slices", s.slices},   {"bin_width", s.bin_width},
                       {"trajectories", s.trajectories}, {"branch", s.branch},
                       {"record_format", s.record_format}};
    const auto& sp = cfg.spectrum;
    j["spectrum"] = {{"field", sp.fld},         {"quadrature", sp.quadrature},
                     {"model", sp.model},       {"omegas", sp.omegas},
                     {"omega_min", sp.omega_min}, {"omega_max", sp.omega_max},
                     {"points", sp.points},     {"m_max", sp.m_max},
                     {"segment_pulses", sp.segment_pulses}};
    const auto& f = cfg.fig4;
    j["fig4"] = {{"mu0", f.mu0},           {"tau_p", f.tau_p},     {"delay_min", f.delay_min},
                 {"delay_max", f.delay_max}, {"points", f.points}, {"lo_width", f.lo_width},
                 {"m_max", f.m_max}};
    j["validity"] = {{"averaging_time", cfg.validity.averaging_time}};
    j["combs"] = {{"estimate", cfg.combs.estimate}, {"max_lag", cfg.combs.max_lag}};
    return j;
}

std::string config_hash(const run_config& cfg)
{
    std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double threshold_flux_si(const run_config& cfg)
{
    const auto& o = cfg.oscillator;
    double ts = cfg.units.time_scale();
    if (o.threshold_flux) {
        return *o.threshold_flux / ts;
    }
    if (o.threshold_power) {
        return watts_to_flux(*o.threshold_power * cfg.units.power_scale(),
                             *o.wavelength * cfg.units.length_scale());
    }
    double ks = o.loss_rate_signal / ts;
    double g = *o.coupling / std::sqrt(ts);
    return ks * ks / (4 * g * g);
}

oscillator_params make_params(const run_config& cfg)
{
    const auto& o = cfg.oscillator;
    double ts = cfg.units.time_scale();
    double tr = o.roundtrip_time * ts;
    double ks = o.loss_rate_signal / ts;
    double kp = o.loss_rate_pump / ts;
    if (o.coupling) {
        return {tr, ks, kp, *o.coupling / std::sqrt(ts)};
    }
    return oscillator_params::from_threshold_flux(tr, ks, kp, threshold_flux_si(cfg));
}

pump_profile make_pump(const run_config& cfg)
{
    if (!cfg.pump) {
        throw config_error("/pump", "this task needs a pump block");
    }
    const auto& p = *cfg.pump;
    double ts = cfg.units.time_scale();
    pump_profile prof = [&] {
        if (p.shape == "rectangular") {
            return pump_profile::rectangular(p.mu0, p.duration * ts);
        }
        if (p.shape == "gaussian") {
            return pump_profile::gaussian(p.mu0, p.duration * ts);
        }
        sample_list s;
        for (const auto& [t, v] : p.samples) {
            s.emplace_back(t * ts, v);
        }
        if (p.samples_unit == "mu") {
            return pump_profile::sampled(std::move(s));
        }
        double nth = threshold_flux_si(cfg);
        if (p.samples_unit == "flux") {
            for (auto& e : s) {
                e.second /= ts;
            }
        } else {
            if (!cfg.oscillator.wavelength) {
                throw config_error("/pump/samples_unit",
                                   "power samples need /oscillator/wavelength");
            }
            double lambda = *cfg.oscillator.wavelength * cfg.units.length_scale();
            for (auto& e : s) {
                e.second = watts_to_flux(e.second * cfg.units.power_scale(), lambda);
            }
        }
        return pump_profile::from_flux(s, nth);
    }();
    if (!p.phase.empty()) {
        sample_list ph;
        for (const auto& [t, v] : p.phase) {
            ph.emplace_back(t * ts, v);
        }
        prof.set_phase(std::move(ph));
    }
    return prof;
}

lo_profile make_lo(const run_config& cfg)
{
    if (!cfg.lo) {
        throw config_error("/lo", "this task needs an lo block");
    }
    const auto& l = *cfg.lo;
    double ts = cfg.units.time_scale();
    lo_profile lo = [&] {
        if (l.shape == "delta") {
            return lo_profile::delta(l.peak_flux);
        }
        if (l.shape == "rectangular") {
            return lo_profile::rectangular(l.peak_flux / ts, l.duration * ts);
        }
        if (l.shape == "gaussian") {
            return lo_profile::gaussian(l.peak_flux / ts, l.duration * ts);
        }
        sample_list s;
        for (const auto& [t, v] : l.samples) {
            s.emplace_back(t * ts, v / ts);
        }
        return lo_profile::sampled(std::move(s));
    }();
    lo.set_delay(l.delay * ts)
        .set_quadrature(l.quadrature == "X" ? quadrature::x : quadrature::y)
        .set_target(l.target == "pump" ? field::pump : field::signal);
    return lo;
}

sim_config make_sim_config(const run_config& cfg, unsigned threads)
{
    const auto& s = cfg.simulation;
    sim_config c;
    c.mode = s.mode == "full" ? sim_mode::full
                              : (s.mode == "passive" ? sim_mode::passive : sim_mode::adiabatic);
    c.substeps = s.substeps;
    c.pulses = s.pulses;
    c.warmup = s.warmup;
    c.slices = s.slices;
    c.bin_width = s.bin_width * cfg.units.time_scale();
    c.trajectories = s.trajectories;
    c.seed = cfg.seed;
    c.branch = s.branch;
    c.threads = threads;
    return c;
}

std::vector<double> spectrum_omegas(const run_config& cfg)
{
    const auto& s = cfg.spectrum;
    double ts = cfg.units.time_scale();
    std::vector<double> out;
    if (!s.omegas.empty()) {
        for (double w : s.omegas) {
            out.push_back(w / ts);
        }
        return out;
    }
    for (int i = 0; i < s.points; ++i) {
        double f = s.points == 1 ? 0.0 : double(i) / (s.points - 1);
        out.push_back((s.omega_min + f * (s.omega_max - s.omega_min)) / ts);
    }
    return out;
}

void validate_for_task(const run_config& cfg)
{
    cfg.units.time_scale();
    auto params = make_params(cfg);
    const std::string& t = cfg.task;
    if (t == "steady-state" || t == "combs" || t == "spectrum" || t == "simulate" ||
        t == "homodyne") {
        auto pump = make_pump(cfg);
        pump.check_period(params.roundtrip_time());
        if (t == "simulate" || t == "homodyne" || (t == "combs" && cfg.combs.estimate)) {
            plan_simulation(params, pump, make_sim_config(cfg, 1));
        }
        if (t == "homodyne" || (t == "spectrum" && cfg.spectrum.model == "general")) {
            auto lo = make_lo(cfg);
            lo.check_period(params.roundtrip_time());
        }
    }
    if (t == "fig4") {
        if (!(cfg.fig4.tau_p > 0)) {
            throw config_error("/fig4/tau_p", "must be strictly positive");
        }
        if (cfg.fig4.mu0.empty()) {
            throw config_error("/fig4/mu0", "needs at least one value");
        }
    }
    if (t == "validity") {
        if (!(cfg.validity.averaging_time > 0)) {
            throw config_error("/validity/averaging_time", "the validity task needs it");
        }
        if (!cfg.pump) {
            throw config_error("/pump", "the validity task needs the pump mu0");
        }
    }
}

} // namespace spopo
