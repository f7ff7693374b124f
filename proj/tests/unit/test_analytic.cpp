#include "test_support.hpp"

#include <spopo/analytic.hpp>
#include <spopo/errors.hpp>

#include <doctest.h>

#include <random>

using namespace spopo;

namespace {

struct comb_oracle
{
    double c;
    int sign;
    double gamma;
};

// Independent table of the comb parameters (c, sign, γ) in terms of κ_s, T_R, μ₀.
comb_oracle auto_oracle(field f, quadrature q, double ks, double tr, double mu)
{
    double kx = 2 * ks * (mu - 1);
    double ky = 2 * ks * mu;
    if (f == field::pump) {
        return q == quadrature::x ? comb_oracle{2 * ks * tr, +1, kx}
                                  : comb_oracle{2 * ks * tr * (mu - 1) / mu, -1, ky};
    }
    return q == quadrature::x ? comb_oracle{ks * tr / (mu - 1), +1, kx}
                              : comb_oracle{ks * tr / mu, -1, ky};
}

comb_oracle cross_oracle(quadrature q, double ks, double tr, double mu)
{
    if (q == quadrature::x) {
        return {ks * tr * std::sqrt(1 / (2 * (mu - 1))), -1, 2 * ks * (mu - 1)};
    }
    return {ks * tr * std::sqrt((mu - 1) / (2 * mu * mu)), -1, 2 * ks * mu};
}

// Brute-force resonance sum for the auto spectra, written out term by term.
double brute_spectrum(field f, quadrature q, double w, double mu, double ks, double tr, int mmax)
{
    double s = 1;
    for (int m = 0; m <= mmax; ++m) {
        double d = w - 2 * std::numbers::pi * m / tr;
        if (q == quadrature::y) {
            double num = f == field::pump ? 8 * ks * ks * (mu - 1) : 4 * ks * ks;
            s -= num / (4 * ks * ks * mu * mu + d * d);
        } else {
            double num = f == field::pump ? 8 * ks * ks * (mu - 1) : 4 * ks * ks;
            s += num / (4 * ks * ks * (mu - 1) * (mu - 1) + d * d);
        }
    }
    return s;
}

} // namespace

TEST_CASE("comb parameters follow the closed-form table")
{
    auto p = testing::standard_params();
    const double ks = p.loss_rate_signal();
    const double tr = p.roundtrip_time();
    for (double mu : {1.05, 1.5, 2.0, 3.7}) {
        for (auto f : {field::pump, field::signal}) {
            for (auto q : {quadrature::x, quadrature::y}) {
                auto c = quadrature_comb(f, q, p, mu);
                auto o = auto_oracle(f, q, ks, tr, mu);
                CHECK(testing::rel_diff(c.coefficient, o.c) < 1e-13);
                CHECK(testing::rel_diff(c.decay_rate, o.gamma) < 1e-13);
                CHECK(c.sign == o.sign);
                CHECK(c.prefactor == 0.25);
                CHECK(c.has_vacuum_term);
            }
        }
        for (auto q : {quadrature::x, quadrature::y}) {
            auto c = cross_comb(q, p, mu);
            auto o = cross_oracle(q, ks, tr, mu);
            CHECK(testing::rel_diff(c.coefficient, o.c) < 1e-13);
            CHECK(testing::rel_diff(c.decay_rate, o.gamma) < 1e-13);
            CHECK(c.sign == o.sign);
            CHECK(c.prefactor == 1.0);
            CHECK_FALSE(c.has_vacuum_term);
        }
    }
    CHECK_THROWS_AS(quadrature_comb(field::signal, quadrature::y, p, 1.0), physics_error);
    CHECK_THROWS_AS(cross_comb(quadrature::x, p, 0.7), physics_error);
}

TEST_CASE("comb weight vanishes off the comb teeth")
{
    auto p = testing::standard_params();
    auto c = quadrature_comb(field::signal, quadrature::y, p, 1.5);
    const double tr = p.roundtrip_time();
    CHECK(c.weight(3, 3 * tr, tr) != 0);
    CHECK(c.weight(3, 3 * tr + 0.01 * tr, tr) == 0);
    CHECK(c.weight(3, 2 * tr, tr) == 0);
    CHECK(std::abs(c.normalized_weight(5, tr)) < std::abs(c.normalized_weight(1, tr)));
}

TEST_CASE("spectra agree with a brute-force resonance sum")
{
    auto p = testing::standard_params();
    const double ks = p.loss_rate_signal();
    const double tr = p.roundtrip_time();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uw(-3 * 2 * std::numbers::pi / tr, 3 * 2 * std::numbers::pi / tr);
    std::uniform_real_distribution<double> um(1.01, 4.0);
    for (int i = 0; i < 200; ++i) {
        double w = uw(rng);
        double mu = um(rng);
        for (auto f : {field::pump, field::signal}) {
            for (auto q : {quadrature::x, quadrature::y}) {
                double a = spectrum_above(f, q, w, mu, p, 12);
                CHECK(testing::rel_diff(a, brute_spectrum(f, q, w, mu, ks, tr, 12)) < 1e-12);
            }
        }
    }
}

TEST_CASE("comb_to_spectrum reproduces the spectra")
{
    auto p = testing::standard_params();
    for (double mu : {1.2, 2.0, 3.0}) {
        for (double w : {0.0, 1e6, 3e7, 6.2e9}) {
            for (auto f : {field::pump, field::signal}) {
                for (auto q : {quadrature::x, quadrature::y}) {
                    auto c = quadrature_comb(f, q, p, mu);
                    CHECK(std::abs(comb_to_spectrum(c, w, p, 8) - spectrum_above(f, q, w, mu, p, 8)) <
                          1e-12);
                }
            }
        }
    }
}

TEST_CASE("property: Y spectra lie in [0,1], X spectra are at least 1")
{
    auto p = testing::standard_params();
    const double tr = p.roundtrip_time();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uw(0, 4 * 2 * std::numbers::pi / tr);
    std::uniform_real_distribution<double> um(1.0001, 10.0);
    std::uniform_real_distribution<double> ub(0.0, 0.9999);
    for (int i = 0; i < 2000; ++i) {
        double w = uw(rng);
        double mu = um(rng);
        for (auto f : {field::pump, field::signal}) {
            double y = spectrum_above(f, quadrature::y, w, mu, p);
            double x = spectrum_above(f, quadrature::x, w, mu, p);
            CHECK(y >= 0);
            CHECK(y <= 1);
            CHECK(x >= 1);
        }
        double below = spectrum_below(w, ub(rng), p);
        CHECK(below >= 0);
        CHECK(below <= 1);
    }
}

TEST_CASE("property: resonance uncertainty product is at least 1")
{
    auto p = testing::standard_params();
    for (double mu = 1.001; mu < 10; mu *= 1.01) {
        for (auto f : {field::pump, field::signal}) {
            double prod = spectrum_above(f, quadrature::x, 0, mu, p, 0) *
                          spectrum_above(f, quadrature::y, 0, mu, p, 0);
            CHECK(prod >= 1);
        }
    }
}

TEST_CASE("single-resonance values")
{
    auto p = testing::standard_params();
    // Pump Y: 1 − 2(μ−1)/μ², minimal 1/2 at μ₀ = 2.
    CHECK(spectrum_above(field::pump, quadrature::y, 0, 2.0, p, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(spectrum_above(field::pump, quadrature::y, 0, 1.9, p, 0) > 0.5);
    CHECK(spectrum_above(field::pump, quadrature::y, 0, 2.1, p, 0) > 0.5);
    // Signal Y: 1 − 1/μ².
    CHECK(std::abs(spectrum_above(field::signal, quadrature::y, 0, 1.001, p, 0) -
                   (1 - 1 / (1.001 * 1.001))) < 1e-12);
    // Below threshold at μ = 1/2: 1 − 4μ/(1+μ)² = 1/9.
    CHECK(spectrum_below(0, 0.5, p, 0) == doctest::Approx(1.0 / 9).epsilon(1e-14));
}

TEST_CASE("below- and above-threshold spectra join at threshold")
{
    auto p = testing::standard_params();
    const double tr = p.roundtrip_time();
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        double w = 3 * 2 * std::numbers::pi / tr * i / 9999.0;
        worst = std::max(worst, std::abs(spectrum_below(w, 1.0, p, 3) -
                                         spectrum_above(field::signal, quadrature::y, w, 1.0, p, 3)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("default resonance truncation")
{
    const double tr = 1e-9;
    CHECK(default_m_max(0, tr) == 10);
    CHECK(default_m_max(2 * std::numbers::pi / tr * 2.5, tr) == 13);
}

TEST_CASE("general spectrum reduces to the matched one for rectangular pump and LO")
{
    auto p = testing::standard_params();
    const double tau = 0.2e-9;
    auto pump = pump_profile::rectangular(1.7, tau);
    auto lo = lo_profile::rectangular(1.0, tau);
    for (double w : {0.0, 2e7, 1e8}) {
        double general = spectrum_general(field::signal, w, pump, lo, p, 4);
        double matched = spectrum_above(field::signal, quadrature::y, w, 1.7, p, 4);
        CHECK(std::abs(general - matched) < 1e-9);
    }
    CHECK(lo_mean_current(lo, p.roundtrip_time()) == doctest::Approx(tau / p.roundtrip_time()));
}

TEST_CASE("a delta LO samples the local spectrum")
{
    auto p = testing::standard_params();
    auto pump = pump_profile::gaussian(2.0, 0.2e-9);
    for (double d : {0.0, 0.03e-9, 0.1e-9}) {
        auto lo = lo_profile::delta(1.0);
        lo.set_delay(d);
        double mu = pump.mu(d);
        CHECK(std::abs(spectrum_general(field::signal, 0, pump, lo, p, 0) -
                       local_spectrum(field::signal, 0, mu, p, 0)) < 1e-14);
    }
}

TEST_CASE("zero-frequency noise versus LO delay for gaussian pulses")
{
    auto p = testing::standard_params();
    const double tau = 0.1e-9;
    std::vector<double> mus{0.5, 2.0};
    std::vector<double> delays{0.0, tau * std::sqrt(std::log(2.0) / 2), 0.2 * tau};
    auto rows = fig4_scan(p, mus, delays, tau, 0.0, 0);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].noise == doctest::Approx(1.0 / 9).epsilon(1e-12));
    CHECK(rows[3].noise == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rows[4].noise < 1e-12); // μ(t) crosses 1
    CHECK(rows[5].noise < rows[3].noise);
    CHECK(rows[2].noise > rows[0].noise);
}
