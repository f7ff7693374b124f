#include <spopo/errors.hpp>
#include <spopo/profiles.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spopo {

namespace {

// exp(-4 (t/τ)^2) is below 1e-15 beyond 3τ.
constexpr double gaussian_cutoff = 3.0;

} // namespace

sampled_curve::sampled_curve(std::vector<std::pair<double, double>> points)
    : m_points(std::move(points))
{
    if (m_points.size() < 2) {
        throw physics_error("a sampled curve needs at least two points");
    }
    for (std::size_t i = 1; i < m_points.size(); ++i) {
        if (!(m_points[i].first > m_points[i - 1].first)) {
            throw physics_error("sample times must be strictly increasing");
        }
    }
    for (const auto& p : m_points) {
        if (!std::isfinite(p.first) || !std::isfinite(p.second)) {
            throw physics_error("sample values must be finite");
        }
    }
}

double sampled_curve::operator()(double t) const
{
    if (m_points.empty() || t < m_points.front().first || t > m_points.back().first) {
        return 0.0;
    }
    auto it = std::upper_bound(m_points.begin(), m_points.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    if (it == m_points.end()) {
        return m_points.back().second;
    }
    const auto& [t1, v1] = *it;
    const auto& [t0, v0] = *(it - 1);
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

double sampled_curve::integral() const
{
    double sum = 0;
    for (std::size_t i = 1; i < m_points.size(); ++i) {
        sum += 0.5 * (m_points[i].second + m_points[i - 1].second) *
               (m_points[i].first - m_points[i - 1].first);
    }
    return sum;
}

// --- pump --------------------------------------------------------------------

pump_profile pump_profile::rectangular(double mu0, double duration)
{
    if (!(mu0 >= 0) || !(duration > 0)) {
        throw physics_error("rectangular pump needs mu0 >= 0 and a positive duration");
    }
    pump_profile p;
    p.m_shape = shape::rectangular;
    p.m_mu0 = mu0;
    p.m_duration = duration;
    return p;
}

pump_profile pump_profile::gaussian(double mu0, double duration)
{
    if (!(mu0 >= 0) || !(duration > 0)) {
        throw physics_error("gaussian pump needs mu0 >= 0 and a positive duration");
    }
    pump_profile p;
    p.m_shape = shape::gaussian;
    p.m_mu0 = mu0;
    p.m_duration = duration;
    return p;
}

pump_profile pump_profile::sampled(std::vector<std::pair<double, double>> mu_samples)
{
    pump_profile p;
    p.m_shape = shape::sampled;
    p.m_samples = sampled_curve(std::move(mu_samples));
    for (const auto& [t, mu] : p.m_samples.points()) {
        if (mu < 0) {
            throw physics_error("pump parameter samples must be non-negative");
        }
    }
    p.m_mu0 = p.peak();
    p.m_duration = p.m_samples.back_time() - p.m_samples.front_time();
    return p;
}

pump_profile pump_profile::from_flux(const std::vector<std::pair<double, double>>& flux_samples,
                                     double threshold_flux)
{
    if (!(threshold_flux > 0)) {
        throw physics_error("threshold flux must be positive");
    }
    std::vector<std::pair<double, double>> mu;
    mu.reserve(flux_samples.size());
    for (const auto& [t, n0] : flux_samples) {
        if (n0 < 0) {
            throw physics_error("pump flux samples must be non-negative");
        }
        mu.emplace_back(t, std::sqrt(n0 / threshold_flux));
    }
    return sampled(std::move(mu));
}

pump_profile& pump_profile::set_phase(std::vector<std::pair<double, double>> phase_samples)
{
    m_phase = sampled_curve(std::move(phase_samples));
    return *this;
}

double pump_profile::mu(double t) const
{
    switch (m_shape) {
    case shape::rectangular:
        return std::abs(t) <= m_duration / 2 ? m_mu0 : 0.0;
    case shape::gaussian: {
        double r = t / m_duration;
        return m_mu0 * std::exp(-2 * r * r);
    }
    case shape::sampled:
        return m_samples(t);
    }
    return 0.0;
}

double pump_profile::peak() const
{
    if (m_shape != shape::sampled) {
        return m_mu0;
    }
    double best = 0;
    for (const auto& p : m_samples.points()) {
        best = std::max(best, p.second);
    }
    return best;
}

std::vector<double> pump_profile::breakpoints(double lo, double hi) const
{
    std::vector<double> pts;
    auto keep = [&](double t) {
        if (t > lo && t < hi) {
            pts.push_back(t);
        }
    };
    switch (m_shape) {
    case shape::rectangular:
        keep(-m_duration / 2);
        keep(m_duration / 2);
        break;
    case shape::gaussian:
        keep(0.0);
        if (m_mu0 > 1) {
            double tc = m_duration * std::sqrt(std::log(m_mu0) / 2);
            keep(-tc);
            keep(tc);
        }
        break;
    case shape::sampled: {
        const auto& s = m_samples.points();
        for (std::size_t i = 0; i < s.size(); ++i) {
            keep(s[i].first);
            if (i + 1 < s.size()) {
                double a = s[i].second - 1;
                double b = s[i + 1].second - 1;
                if ((a < 0 && b > 0) || (a > 0 && b < 0)) {
                    keep(s[i].first + (s[i + 1].first - s[i].first) * a / (a - b));
                }
            }
        }
        break;
    }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

void pump_profile::check_period(double roundtrip_time) const
{
    double half = roundtrip_time / 2;
    if (m_shape == shape::sampled) {
        if (m_samples.front_time() < -half || m_samples.back_time() > half) {
            throw physics_error("pump samples extend beyond [-T_R/2, T_R/2]");
        }
    } else if (m_duration > roundtrip_time) {
        throw physics_error("pump duration exceeds the round-trip time");
    }
    if (!m_phase.empty() && (m_phase.front_time() < -half || m_phase.back_time() > half)) {
        throw physics_error("pump phase samples extend beyond [-T_R/2, T_R/2]");
    }
}

std::string pump_profile::describe() const
{
    std::ostringstream os;
    switch (m_shape) {
    case shape::rectangular:
        os << "rectangular(mu0=" << m_mu0 << ", tau_p=" << m_duration << ")";
        break;
    case shape::gaussian:
        os << "gaussian(mu0=" << m_mu0 << ", tau_p=" << m_duration << ")";
        break;
    case shape::sampled:
        os << "sampled(" << m_samples.points().size() << " points, peak=" << peak() << ")";
        break;
    }
    return os.str();
}

double pump_parameter(const pump_profile& profile, const oscillator_params& params, double t)
{
    double half = params.roundtrip_time() / 2;
    if (!(t >= -half && t <= half)) {
        throw physics_error("time " + std::to_string(t) + " s is outside [-T_R/2, T_R/2]");
    }
    return profile.mu(t);
}

// --- local oscillator --------------------------------------------------------

lo_profile lo_profile::delta(double photons)
{
    if (!(photons >= 0)) {
        throw physics_error("LO pulse energy must be non-negative");
    }
    lo_profile lo;
    lo.m_shape = shape::delta;
    lo.m_peak_flux = photons;
    return lo;
}

lo_profile lo_profile::rectangular(double peak_flux, double duration)
{
    if (!(peak_flux >= 0) || !(duration > 0)) {
        throw physics_error("rectangular LO needs non-negative flux and positive duration");
    }
    lo_profile lo;
    lo.m_shape = shape::rectangular;
    lo.m_peak_flux = peak_flux;
    lo.m_duration = duration;
    return lo;
}

lo_profile lo_profile::gaussian(double peak_flux, double duration)
{
    if (!(peak_flux >= 0) || !(duration > 0)) {
        throw physics_error("gaussian LO needs non-negative flux and positive duration");
    }
    lo_profile lo;
    lo.m_shape = shape::gaussian;
    lo.m_peak_flux = peak_flux;
    lo.m_duration = duration;
    return lo;
}

lo_profile lo_profile::sampled(std::vector<std::pair<double, double>> flux_samples)
{
    lo_profile lo;
    lo.m_shape = shape::sampled;
    lo.m_samples = sampled_curve(std::move(flux_samples));
    for (const auto& [t, n] : lo.m_samples.points()) {
        if (n < 0) {
            throw physics_error("LO intensity samples must be non-negative");
        }
        lo.m_peak_flux = std::max(lo.m_peak_flux, n);
    }
    lo.m_duration = lo.m_samples.back_time() - lo.m_samples.front_time();
    return lo;
}

lo_profile& lo_profile::set_delay(double delay)
{
    if (!std::isfinite(delay)) {
        throw physics_error("LO delay must be finite");
    }
    m_delay = delay;
    return *this;
}

lo_profile& lo_profile::set_quadrature(quadrature q)
{
    m_quad = q;
    return *this;
}

lo_profile& lo_profile::set_target(field f)
{
    m_target = f;
    return *this;
}

double lo_profile::phase_shift() const noexcept
{
    return m_quad == quadrature::x ? 0.0 : std::numbers::pi / 2;
}

double lo_profile::carrier_phase(const pump_profile& pump, double t) const
{
    double phi = pump.phase(t);
    return m_target == field::pump ? phi : phi / 2;
}

double lo_profile::envelope(double t) const
{
    switch (m_shape) {
    case shape::delta:
        return 0.0;
    case shape::rectangular:
        return std::abs(t) <= m_duration / 2 ? m_peak_flux : 0.0;
    case shape::gaussian: {
        double r = t / m_duration;
        return std::abs(r) > gaussian_cutoff ? 0.0 : m_peak_flux * std::exp(-4 * r * r);
    }
    case shape::sampled:
        return m_samples(t);
    }
    return 0.0;
}

double lo_profile::intensity(double t) const
{
    return envelope(t - m_delay);
}

double lo_profile::integral() const
{
    switch (m_shape) {
    case shape::delta:
        return m_peak_flux;
    case shape::rectangular:
        return m_peak_flux * m_duration;
    case shape::gaussian:
        return m_peak_flux * m_duration * std::sqrt(std::numbers::pi) / 2 *
               std::erf(2 * gaussian_cutoff);
    case shape::sampled:
        return m_samples.integral();
    }
    return 0.0;
}

std::pair<double, double> lo_profile::support() const
{
    switch (m_shape) {
    case shape::delta:
        return {m_delay, m_delay};
    case shape::rectangular:
        return {m_delay - m_duration / 2, m_delay + m_duration / 2};
    case shape::gaussian:
        return {m_delay - gaussian_cutoff * m_duration, m_delay + gaussian_cutoff * m_duration};
    case shape::sampled:
        return {m_delay + m_samples.front_time(), m_delay + m_samples.back_time()};
    }
    return {m_delay, m_delay};
}

void lo_profile::check_period(double roundtrip_time) const
{
    if (m_duration > roundtrip_time) {
        throw physics_error("LO duration exceeds the round-trip time");
    }
}

std::string lo_profile::describe() const
{
    std::ostringstream os;
    switch (m_shape) {
    case shape::delta:
        os << "delta(photons=" << m_peak_flux;
        break;
    case shape::rectangular:
        os << "rectangular(N_LO=" << m_peak_flux << ", tau_LO=" << m_duration;
        break;
    case shape::gaussian:
        os << "gaussian(N_LO=" << m_peak_flux << ", tau_LO=" << m_duration;
        break;
    case shape::sampled:
        os << "sampled(" << m_samples.points().size() << " points";
        break;
    }
    os << ", delay=" << m_delay << ", quadrature=" << to_string(m_quad)
       << ", target=" << to_string(m_target) << ")";
    return os.str();
}

} // namespace spopo
