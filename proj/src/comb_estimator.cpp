#include <spopo/comb_estimator.hpp>
#include <spopo/errors.hpp>
#include <spopo/parallel.hpp>
#include <spopo/summation.hpp>

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>

namespace spopo {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

constexpr int n_series = 4; // pump X, pump Y, signal X, signal Y
constexpr int n_combos = 6; // the four autos, cross X, cross Y

int series_index(field f, quadrature q)
{
    return (f == field::pump ? 0 : 2) + (q == quadrature::x ? 0 : 1);
}

struct combo
{
    int a;
    int b; // == a for auto-combs
};

constexpr std::array<combo, n_combos> combos{{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 2}, {1, 3}}};

int auto_combo(field f, quadrature q) { return series_index(f, q); }
int cross_combo(quadrature q) { return q == quadrature::x ? 4 : 5; }

struct fft_buffer
{
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    explicit fft_buffer(std::size_t n)
    {
        real = fftw_alloc_real(n);
        spec = fftw_alloc_complex(n / 2 + 1);
    }
    ~fft_buffer()
    {
        fftw_free(real);
        fftw_free(spec);
    }
    fft_buffer(const fft_buffer&) = delete;
    fft_buffer& operator=(const fft_buffer&) = delete;
};

struct line_fit
{
    double intercept;
    double slope;
};

/// Unweighted least squares of log|C(l)| on l for l = 1..n. When standard
/// errors are given, each log value gets the second-order correction
/// +se²/(2C²), which removes the downward bias E[log|Ĉ|] < log|C| that
/// otherwise steepens the fit at the noisy tail of the run.
line_fit fit_log_line(const std::vector<double>& c, int n, const std::vector<double>* se = nullptr)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int l = 1; l <= n; ++l) {
        double y = std::log(std::abs(c[l]));
        if (se) {
            double r = (*se)[l] / c[l];
            y += 0.5 * r * r;
        }
        sx += l;
        sy += y;
        sxx += double(l) * l;
        sxy += l * y;
    }
    double d = n * sxx - sx * sx;
    double slope = (n * sxy - sx * sy) / d;
    return {(sy - slope * sx) / n, slope};
}

/// Length of the contiguous run of significant, same-signed lags from 1.
int significant_run(const lag_covariance& lags)
{
    int run = 0;
    int lmax = static_cast<int>(lags.value.size()) - 1;
    if (lmax < 1) {
        return 0;
    }
    double s1 = lags.value[1] >= 0 ? 1 : -1;
    for (int l = 1; l <= lmax; ++l) {
        double v = lags.value[l];
        if (std::abs(v) > 3 * lags.stderr_[l] && v * s1 > 0) {
            ++run;
        } else {
            break;
        }
    }
    return run;
}

} // namespace

comb_estimate fit_comb(const lag_covariance& lags, double roundtrip_time)
{
    comb_estimate est;
    est.lags = lags;
    if (lags.value.empty()) {
        throw physics_error("empty lag covariance");
    }
    est.zero_lag = lags.value[0];
    est.zero_lag_se = lags.stderr_[0];
    if (lags.value.size() < 2) {
        est.warnings.push_back("no nonzero lags available");
        est.decay_rate = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    est.sign = lags.value[1] >= 0 ? 1 : -1;
    int run = significant_run(lags);
    est.lags_used = run;
    if (run < 3) {
        est.detected = false;
        est.coefficient = std::abs(lags.value[1]);
        est.coefficient_se = lags.stderr_[1];
        est.decay_rate = std::numeric_limits<double>::quiet_NaN();
        est.decay_rate_se = std::numeric_limits<double>::quiet_NaN();
        est.warnings.push_back("fewer than 3 significant lags: comb not detected");
        return est;
    }
    est.detected = true;
    auto fit = fit_log_line(lags.value, run, &lags.stderr_);
    est.coefficient = std::exp(fit.intercept);
    est.decay_rate = -fit.slope / roundtrip_time;

    // Delta-method errors treating lags as independent; the accumulator
    // replaces these with jackknife errors.
    double mean_l = (run + 1) / 2.0;
    double sxx = 0;
    for (int l = 1; l <= run; ++l) {
        sxx += (l - mean_l) * (l - mean_l);
    }
    double var_slope = 0, var_icpt = 0;
    for (int l = 1; l <= run; ++l) {
        double sig = lags.stderr_[l] / std::abs(lags.value[l]);
        double ws = (l - mean_l) / sxx;
        double wi = 1.0 / run - mean_l * ws;
        var_slope += ws * ws * sig * sig;
        var_icpt += wi * wi * sig * sig;
    }
    est.coefficient_se = est.coefficient * std::sqrt(var_icpt);
    est.decay_rate_se = std::sqrt(var_slope) / roundtrip_time;

    for (int l = 1; l < run; ++l) {
        double rise = std::abs(lags.value[l + 1]) - std::abs(lags.value[l]);
        double tol = 3 * std::hypot(lags.stderr_[l], lags.stderr_[l + 1]);
        if (rise > tol) {
            est.warnings.push_back("non-monotonic |C| at lag " + std::to_string(l + 1));
            break;
        }
    }
    return est;
}

struct comb_accumulator::impl
{
    double roundtrip_time;
    double bin_width;
    std::int64_t pulses;
    int max_lag;
    int groups;
    unsigned threads;
    std::size_t nfft;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    struct sums
    {
        std::vector<compensated_sum> s1, s2;
        std::vector<std::vector<compensated_sum>> grp;
        std::vector<std::size_t> grp_count;
        std::size_t count = 0;
    };
    std::array<sums, n_combos> acc;
    std::size_t total_series = 0;

    impl(double tr, double dt, std::int64_t m, const estimator_options& o)
        : roundtrip_time(tr), bin_width(dt), pulses(m), groups(std::max(2, o.groups)),
          threads(o.threads == 0 ? default_thread_count() : o.threads)
    {
        if (m < 100) {
            throw physics_error("comb estimation needs at least 100 recorded pulses, got " +
                                std::to_string(m));
        }
        max_lag = o.max_lag < 0 ? static_cast<int>(std::min<std::int64_t>(m / 2, 2000))
                                : static_cast<int>(std::min<std::int64_t>(o.max_lag, m - 1));
        std::size_t need = static_cast<std::size_t>(m + max_lag + 1);
        nfft = 1;
        while (nfft < need) {
            nfft <<= 1;
        }
        for (auto& a : acc) {
            a.s1.resize(max_lag + 1);
            a.s2.resize(max_lag + 1);
            a.grp.assign(groups, std::vector<compensated_sum>(max_lag + 1));
            a.grp_count.assign(groups, 0);
        }
        fft_buffer scratch(nfft);
        std::lock_guard lock(planner_mutex());
        forward = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), scratch.real, scratch.spec,
                                       FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(static_cast<int>(nfft), scratch.spec, scratch.real,
                                        FFTW_ESTIMATE);
    }

    ~impl()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }

    /// Lag vectors of every combo whose inputs are present, for one slice.
    void slice_lags(const std::array<const double*, n_series>& in,
                    std::array<std::vector<double>, n_combos>& out) const
    {
        const std::size_t nc = nfft / 2 + 1;
        std::array<std::vector<std::complex<double>>, n_series> spectra;
        fft_buffer buf(nfft);
        for (int s = 0; s < n_series; ++s) {
            if (!in[s]) {
                continue;
            }
            std::fill(buf.real, buf.real + nfft, 0.0);
            std::copy(in[s], in[s] + pulses, buf.real);
            fftw_execute_dft_r2c(forward, buf.real, buf.spec);
            spectra[s].resize(nc);
            for (std::size_t i = 0; i < nc; ++i) {
                spectra[s][i] = {buf.spec[i][0], buf.spec[i][1]};
            }
        }
        for (int c = 0; c < n_combos; ++c) {
            const auto [a, b] = combos[c];
            if (!in[a] || !in[b]) {
                out[c].clear();
                continue;
            }
            bool is_auto = a == b;
            for (std::size_t i = 0; i < nc; ++i) {
                std::complex<double> p = std::conj(spectra[a][i]) * spectra[b][i];
                // Symmetrized cross: conj(A)B + conj(B)A = 2 Re(conj(A)B).
                double re = is_auto ? std::norm(spectra[a][i]) : 2 * p.real();
                buf.spec[i][0] = re;
                buf.spec[i][1] = 0;
            }
            fftw_execute_dft_c2r(backward, buf.spec, buf.real);
            double scale = (is_auto ? 4 * bin_width : bin_width) / static_cast<double>(nfft);
            out[c].resize(max_lag + 1);
            for (int l = 0; l <= max_lag; ++l) {
                out[c][l] = buf.real[l] * scale / static_cast<double>(pulses - l);
            }
        }
    }

    void add(const std::array<const pulse_train_record*, 2>& recs)
    {
        const pulse_train_record* ref = recs[0] ? recs[0] : recs[1];
        for (const auto* r : recs) {
            if (!r) {
                continue;
            }
            if (r->pulses != pulses || std::abs(r->bin_width - bin_width) > 1e-12 * bin_width ||
                std::abs(r->roundtrip_time - roundtrip_time) > 1e-12 * roundtrip_time) {
                throw physics_error("record does not match the estimator grid");
            }
            if (r->slices() != ref->slices() || r->trajectories != ref->trajectories) {
                throw physics_error("pump and signal records have different shapes");
            }
            if (r->x.size() != static_cast<std::size_t>(r->trajectories) * r->slices() *
                                   static_cast<std::size_t>(r->pulses)) {
                throw physics_error("record sample count is inconsistent");
            }
        }
        const std::size_t S = ref->slices();
        const std::size_t n = static_cast<std::size_t>(ref->trajectories) * S;
        std::vector<std::array<std::vector<double>, n_combos>> lagbuf(n);
        parallel_for(n, threads, [&](std::size_t i) {
            int k = static_cast<int>(i / S);
            std::size_t s = i % S;
            std::array<const double*, n_series> in{};
            if (recs[0]) {
                in[0] = recs[0]->series(quadrature::x, k, s).data();
                in[1] = recs[0]->series(quadrature::y, k, s).data();
            }
            if (recs[1]) {
                in[2] = recs[1]->series(quadrature::x, k, s).data();
                in[3] = recs[1]->series(quadrature::y, k, s).data();
            }
            slice_lags(in, lagbuf[i]);
        });
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t g = total_series % static_cast<std::size_t>(groups);
            for (int c = 0; c < n_combos; ++c) {
                const auto& v = lagbuf[i][c];
                if (v.empty()) {
                    continue;
                }
                auto& a = acc[c];
                for (int l = 0; l <= max_lag; ++l) {
                    a.s1[l].add(v[l]);
                    a.s2[l].add(v[l] * v[l]);
                    a.grp[g][l].add(v[l]);
                }
                a.grp_count[g] += 1;
                a.count += 1;
            }
            ++total_series;
        }
    }

    lag_covariance lags(int c) const
    {
        const auto& a = acc[c];
        if (a.count < 2) {
            throw physics_error("need at least two slice series for a covariance estimate");
        }
        lag_covariance out;
        out.series = a.count;
        double n = static_cast<double>(a.count);
        for (int l = 0; l <= max_lag; ++l) {
            double mean = a.s1[l].value() / n;
            double var = std::max(0.0, (a.s2[l].value() - n * mean * mean) / (n - 1));
            out.value.push_back(mean);
            out.stderr_.push_back(std::sqrt(var / n));
        }
        return out;
    }

    comb_estimate estimate(int c) const
    {
        lag_covariance lc = lags(c);
        comb_estimate est = fit_comb(lc, roundtrip_time);
        if (lc.series < 1000) {
            est.warnings.push_back("fewer than 1000 independent slice series");
        }
        if (!est.detected) {
            return est;
        }
        // Jackknife over slice groups, refitting on the same lag run.
        const auto& a = acc[c];
        std::vector<double> cs, gs;
        for (int g = 0; g < groups; ++g) {
            double n = static_cast<double>(a.count - a.grp_count[g]);
            if (a.grp_count[g] == 0 || n < 1) {
                continue;
            }
            std::vector<double> v(est.lags_used + 1);
            for (int l = 1; l <= est.lags_used; ++l) {
                v[l] = (a.s1[l].value() - a.grp[g][l].value()) / n;
            }
            auto fit = fit_log_line(v, est.lags_used, &est.lags.stderr_);
            cs.push_back(std::exp(fit.intercept));
            gs.push_back(-fit.slope / roundtrip_time);
        }
        if (cs.size() >= 2) {
            auto jk = [](const std::vector<double>& v) {
                double m = 0;
                for (double x : v) {
                    m += x;
                }
                m /= v.size();
                double ss = 0;
                for (double x : v) {
                    ss += (x - m) * (x - m);
                }
                return std::sqrt(ss * (v.size() - 1) / v.size());
            };
            est.coefficient_se = jk(cs);
            est.decay_rate_se = jk(gs);
        }
        return est;
    }
};

comb_accumulator::comb_accumulator(double roundtrip_time, double bin_width, std::int64_t pulses,
                                   estimator_options opts)
    : m(std::make_unique<impl>(roundtrip_time, bin_width, pulses, opts))
{
}

comb_accumulator::~comb_accumulator() = default;

void comb_accumulator::add(const pulse_train_record& pump, const pulse_train_record& signal)
{
    if (pump.fld != field::pump || signal.fld != field::signal) {
        throw physics_error("comb_accumulator::add expects (pump, signal) records");
    }
    m->add({&pump, &signal});
}

std::size_t comb_accumulator::series() const noexcept { return m->total_series; }

lag_covariance comb_accumulator::auto_lags(field f, quadrature q) const
{
    return m->lags(auto_combo(f, q));
}

lag_covariance comb_accumulator::cross_lags(quadrature q) const
{
    return m->lags(cross_combo(q));
}

comb_estimate comb_accumulator::auto_comb(field f, quadrature q) const
{
    auto est = m->estimate(auto_combo(f, q));
    est.pair = f == field::pump ? field_pair::pump_pump : field_pair::signal_signal;
    est.quad = q;
    return est;
}

comb_estimate comb_accumulator::cross(quadrature q) const
{
    auto est = m->estimate(cross_combo(q));
    est.pair = field_pair::pump_signal;
    est.quad = q;
    return est;
}

comb_estimate estimate_comb(const pulse_train_record& record, quadrature q,
                            estimator_options opts)
{
    if (record.intracavity) {
        throw physics_error("comb estimation needs output records");
    }
    comb_accumulator::impl core(record.roundtrip_time, record.bin_width, record.pulses, opts);
    if (record.fld == field::pump) {
        core.add({&record, nullptr});
    } else {
        core.add({nullptr, &record});
    }
    auto est = core.estimate(auto_combo(record.fld, q));
    est.pair = record.fld == field::pump ? field_pair::pump_pump : field_pair::signal_signal;
    est.quad = q;
    return est;
}

comb_estimate estimate_cross(const pulse_train_record& pump, const pulse_train_record& signal,
                             quadrature q, estimator_options opts)
{
    if (pump.fld != field::pump || signal.fld != field::signal) {
        throw physics_error("estimate_cross expects a pump record and a signal record");
    }
    comb_accumulator::impl core(pump.roundtrip_time, pump.bin_width, pump.pulses, opts);
    core.add({&pump, &signal});
    auto est = core.estimate(cross_combo(q));
    est.pair = field_pair::pump_signal;
    est.quad = q;
    return est;
}

covariance_check bin_covariance(const pulse_train_record& record, quadrature q, int slice_offset,
                                std::int64_t lag)
{
    if (lag < 0 || lag >= record.pulses) {
        throw physics_error("lag out of range");
    }
    const auto S = static_cast<int>(record.slices());
    if (slice_offset <= 0 || slice_offset >= S) {
        throw physics_error("slice offset must be in [1, slices)");
    }
    std::vector<double> per_pair;
    for (int k = 0; k < record.trajectories; ++k) {
        for (int s = 0; s + slice_offset < S; ++s) {
            auto a = record.series(q, k, s);
            auto b = record.series(q, k, s + slice_offset);
            compensated_sum sum;
            for (std::int64_t n = 0; n + lag < record.pulses; ++n) {
                sum.add(a[n] * b[n + lag]);
            }
            per_pair.push_back(4 * record.bin_width * sum.value() /
                               static_cast<double>(record.pulses - lag));
        }
    }
    covariance_check out;
    out.pairs = per_pair.size();
    if (out.pairs < 2) {
        throw physics_error("need at least two slice pairs");
    }
    compensated_sum s1;
    for (double v : per_pair) {
        s1.add(v);
    }
    double mean = s1.value() / out.pairs;
    compensated_sum s2;
    for (double v : per_pair) {
        s2.add((v - mean) * (v - mean));
    }
    out.value = mean;
    out.stderr_ = std::sqrt(s2.value() / (out.pairs - 1) / out.pairs);
    return out;
}

} // namespace spopo
