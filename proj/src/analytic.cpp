#include <spopo/analytic.hpp>
#include <spopo/errors.hpp>

#include <boost/math/quadrature/trapezoidal.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spopo {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

void require_above(double mu0, const char* what)
{
    if (!(mu0 > 1)) {
        throw physics_error(std::string(what) + " requires mu0 > 1, got " + std::to_string(mu0));
    }
}

int resolve_m_max(int m_max, double omega, double roundtrip_time)
{
    return m_max < 0 ? default_m_max(std::abs(omega), roundtrip_time) : m_max;
}

/// Σ_{m=0..m_max} numerator/(width² + (Ω − 2πm/T_R)²)
double resonance_sum(double numerator, double width_sq, double omega, double roundtrip_time,
                     int m_max)
{
    double sum = 0;
    for (int m = 0; m <= m_max; ++m) {
        double detuning = omega - two_pi * m / roundtrip_time;
        sum += numerator / (width_sq + detuning * detuning);
    }
    return sum;
}

double wrap_to_period(double t, double roundtrip_time)
{
    double half = roundtrip_time / 2;
    if (t >= -half && t <= half) {
        return t;
    }
    double w = std::remainder(t, roundtrip_time);
    return w;
}

} // namespace

const char* to_string(field_pair p)
{
    switch (p) {
    case field_pair::pump_pump:
        return "pump-pump";
    case field_pair::signal_signal:
        return "signal-signal";
    case field_pair::pump_signal:
        return "pump-signal";
    }
    return "?";
}

double correlation_comb::normalized_weight(std::int64_t dn, double roundtrip_time) const
{
    double w = sign * coefficient *
               std::exp(-decay_rate * roundtrip_time * static_cast<double>(std::llabs(dn)));
    if (dn == 0 && has_vacuum_term) {
        w += 1.0;
    }
    return w;
}

double correlation_comb::weight(std::int64_t dn, double time_offset, double roundtrip_time,
                                double tol) const
{
    double expected = static_cast<double>(dn) * roundtrip_time;
    double scale = std::max(std::abs(expected), roundtrip_time);
    if (std::abs(time_offset - expected) > tol * scale) {
        return 0.0;
    }
    return prefactor * normalized_weight(dn, roundtrip_time);
}

correlation_comb quadrature_comb(field f, quadrature q, const oscillator_params& params,
                                 double mu0)
{
    require_above(mu0, "quadrature comb");
    double ks = params.loss_rate_signal();
    double kt = ks * params.roundtrip_time();
    correlation_comb comb;
    comb.has_vacuum_term = true;
    comb.prefactor = 0.25;
    comb.pair = f == field::pump ? field_pair::pump_pump : field_pair::signal_signal;
    comb.quad = q;
    if (q == quadrature::x) {
        comb.sign = +1;
        comb.decay_rate = 2 * ks * (mu0 - 1);
        comb.coefficient = f == field::pump ? 2 * kt : kt / (mu0 - 1);
    } else {
        comb.sign = -1;
        comb.decay_rate = 2 * ks * mu0;
        comb.coefficient = f == field::pump ? 2 * kt * (mu0 - 1) / mu0 : kt / mu0;
    }
    return comb;
}

correlation_comb cross_comb(quadrature q, const oscillator_params& params, double mu0)
{
    require_above(mu0, "cross comb");
    double ks = params.loss_rate_signal();
    double kt = ks * params.roundtrip_time();
    correlation_comb comb;
    comb.has_vacuum_term = false;
    comb.prefactor = 1.0;
    comb.pair = field_pair::pump_signal;
    comb.quad = q;
    comb.sign = -1;
    if (q == quadrature::x) {
        comb.coefficient = kt * std::sqrt(1 / (2 * (mu0 - 1)));
        comb.decay_rate = 2 * ks * (mu0 - 1);
    } else {
        comb.coefficient = kt * std::sqrt((mu0 - 1) / (2 * mu0 * mu0));
        comb.decay_rate = 2 * ks * mu0;
    }
    return comb;
}

int default_m_max(double omega_max, double roundtrip_time)
{
    return static_cast<int>(std::ceil(std::abs(omega_max) * roundtrip_time / two_pi)) + 10;
}

double comb_to_spectrum(const correlation_comb& comb, double omega,
                        const oscillator_params& params, int m_max)
{
    if (m_max < 0) {
        throw physics_error("m_max must be non-negative");
    }
    double base = comb.has_vacuum_term ? 1.0 : 0.0;
    if (comb.coefficient == 0) {
        return base;
    }
    double tr = params.roundtrip_time();
    double g = comb.decay_rate;
    double lorentz = resonance_sum(2 * g * comb.coefficient / tr, g * g, omega, tr, m_max);
    return base + comb.sign * lorentz;
}

double spectrum_above(field f, quadrature q, double omega, double mu0,
                      const oscillator_params& params, int m_max)
{
    // The Y forms stay finite at threshold, where they meet the below-threshold
    // spectrum; X diverges there.
    if (q == quadrature::y ? !(mu0 >= 1) : !(mu0 > 1)) {
        throw physics_error("above-threshold spectrum requires mu0 " +
                            std::string(q == quadrature::y ? ">= 1" : "> 1") + ", got " +
                            std::to_string(mu0));
    }
    double tr = params.roundtrip_time();
    int mm = resolve_m_max(m_max, omega, tr);
    double ks2 = params.loss_rate_signal() * params.loss_rate_signal();
    double numerator = f == field::pump ? 8 * ks2 * (mu0 - 1) : 4 * ks2;
    if (q == quadrature::y) {
        return 1 - resonance_sum(numerator, 4 * ks2 * mu0 * mu0, omega, tr, mm);
    }
    return 1 + resonance_sum(numerator, 4 * ks2 * (mu0 - 1) * (mu0 - 1), omega, tr, mm);
}

double spectrum_below(double omega, double mu, const oscillator_params& params, int m_max)
{
    if (!(mu >= 0)) {
        throw physics_error("pump parameter must be non-negative");
    }
    double tr = params.roundtrip_time();
    int mm = resolve_m_max(m_max, omega, tr);
    double ks2 = params.loss_rate_signal() * params.loss_rate_signal();
    return 1 - resonance_sum(4 * ks2 * mu, ks2 * (1 + mu) * (1 + mu), omega, tr, mm);
}

double local_spectrum(field f, double omega, double mu, const oscillator_params& params,
                      int m_max)
{
    if (mu > 1) {
        return spectrum_above(f, quadrature::y, omega, mu, params, m_max);
    }
    return f == field::signal ? spectrum_below(omega, mu, params, m_max) : 1.0;
}

double lo_mean_current(const lo_profile& lo, double roundtrip_time)
{
    if (!(roundtrip_time > 0)) {
        throw physics_error("round-trip time must be positive");
    }
    return lo.integral() / roundtrip_time;
}

double spectrum_general(field f, double omega, const pump_profile& pump, const lo_profile& lo,
                        const oscillator_params& params, int m_max)
{
    double tr = params.roundtrip_time();
    pump.check_period(tr);
    lo.check_period(tr);
    int mm = resolve_m_max(m_max, omega, tr);
    double weight = lo.integral();
    if (!(weight > 0)) {
        throw physics_error("local oscillator has zero measure");
    }
    auto local = [&](double t) { return local_spectrum(f, omega, pump.mu(wrap_to_period(t, tr)), params, mm); };

    if (lo.kind() == lo_profile::shape::delta) {
        return local(lo.delay());
    }

    auto [a, b] = lo.support();
    std::vector<double> cuts{a, b};
    for (int k = -1; k <= 1; ++k) {
        double shift = k * tr;
        for (double p : pump.breakpoints(a - shift, b - shift)) {
            cuts.push_back(p + shift);
        }
        for (double edge : {-tr / 2 + shift, tr / 2 + shift}) {
            if (edge > a && edge < b) {
                cuts.push_back(edge);
            }
        }
    }
    if (lo.kind() == lo_profile::shape::sampled) {
        for (const auto& [ts, n] : lo.samples().points()) {
            double t = ts + lo.delay();
            if (t > a && t < b) {
                cuts.push_back(t);
            }
        }
    } else if (lo.kind() == lo_profile::shape::gaussian) {
        if (lo.delay() > a && lo.delay() < b) {
            cuts.push_back(lo.delay());
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double t) { return lo.intensity(t) * local(t); };
    auto lo_only = [&](double t) { return lo.intensity(t); };
    double num = 0;
    double den = 0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        double lo_t = cuts[i - 1];
        double hi_t = cuts[i];
        if (hi_t - lo_t <= 0) {
            continue;
        }
        // Nudge inside so jump discontinuities at the cut points do not leak
        // into the neighbouring piece.
        double eps = (hi_t - lo_t) * 1e-12;
        num += boost::math::quadrature::trapezoidal(integrand, lo_t + eps, hi_t - eps, 1e-7, 22);
        den += boost::math::quadrature::trapezoidal(lo_only, lo_t + eps, hi_t - eps, 1e-7, 22);
    }
    if (!(den > 0)) {
        throw physics_error("local oscillator has zero measure");
    }
    return num / den;
}

spectrum_series spectrum_above_series(field f, quadrature q, std::span<const double> omegas,
                                      double mu0, const oscillator_params& params, int m_max)
{
    spectrum_series s;
    s.fld = f;
    s.quad = q;
    double omax = 0;
    for (double w : omegas) {
        omax = std::max(omax, std::abs(w));
    }
    s.m_max = m_max < 0 ? default_m_max(omax, params.roundtrip_time()) : m_max;
    std::ostringstream os;
    os << "above threshold, rectangular pulses, mu0=" << mu0;
    s.description = os.str();
    s.omega.assign(omegas.begin(), omegas.end());
    s.value.reserve(omegas.size());
    for (double w : omegas) {
        s.value.push_back(spectrum_above(f, q, w, mu0, params, s.m_max));
    }
    return s;
}

spectrum_series spectrum_general_series(field f, std::span<const double> omegas,
                                        const pump_profile& pump, const lo_profile& lo,
                                        const oscillator_params& params, int m_max)
{
    spectrum_series s;
    s.fld = f;
    s.quad = quadrature::y;
    double omax = 0;
    for (double w : omegas) {
        omax = std::max(omax, std::abs(w));
    }
    s.m_max = m_max < 0 ? default_m_max(omax, params.roundtrip_time()) : m_max;
    s.description = "pump " + pump.describe() + ", LO " + lo.describe();
    s.omega.assign(omegas.begin(), omegas.end());
    s.value.reserve(omegas.size());
    for (double w : omegas) {
        s.value.push_back(spectrum_general(f, w, pump, lo, params, s.m_max));
    }
    return s;
}

std::vector<fig4_row> fig4_scan(const oscillator_params& params, std::span<const double> mu0s,
                                std::span<const double> delays, double tau_p, double lo_width,
                                int m_max)
{
    if (lo_width < 0) {
        throw physics_error("LO width must be non-negative");
    }
    std::vector<fig4_row> rows;
    rows.reserve(mu0s.size() * delays.size());
    for (double mu0 : mu0s) {
        auto pump = pump_profile::gaussian(mu0, tau_p);
        for (double d : delays) {
            auto lo = lo_width == 0 ? lo_profile::delta(1.0) : lo_profile::gaussian(1.0, lo_width);
            lo.set_delay(d).set_quadrature(quadrature::y).set_target(field::signal);
            rows.push_back({mu0, d, spectrum_general(field::signal, 0.0, pump, lo, params, m_max)});
        }
    }
    return rows;
}

} // namespace spopo
