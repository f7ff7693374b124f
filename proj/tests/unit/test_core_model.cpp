#include "test_support.hpp"

#include <spopo/core_model.hpp>
#include <spopo/errors.hpp>

#include <doctest.h>

#include <random>

using namespace spopo;

TEST_CASE("threshold, steady state and effective rates match closed forms on random parameters")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 100; ++i) {
        double tr = std::pow(10.0, -12 + 4 * u(rng));
        double ks = (1e-4 + 0.09 * u(rng)) / tr;
        double kp = ks * std::pow(10.0, 3 * u(rng));
        double g = std::pow(10.0, -3 + 6 * u(rng));
        double mu0 = 1 + 5 * u(rng);
        oscillator_params p(tr, ks, kp, g);

        double nth = ks * ks / (4 * g * g);
        CHECK(testing::rel_diff(threshold_flux(p), nth) < 1e-12);

        auto ss = make_steady_state(p, mu0);
        CHECK(testing::rel_diff(ss.pump_flux, nth) < 1e-12);
        CHECK(testing::rel_diff(ss.signal_flux, 2 * kp / ks * (mu0 - 1) * nth) < 1e-12);

        auto r = make_effective_rates(p, mu0);
        CHECK(testing::rel_diff(r.kappa_x, 2 * ks * (mu0 - 1)) < 1e-12);
        CHECK(testing::rel_diff(r.kappa_y, 2 * ks * mu0) < 1e-12);

        auto q = oscillator_params::from_threshold_flux(tr, ks, kp, nth);
        CHECK(testing::rel_diff(q.coupling(), g) < 1e-12);
    }
}

TEST_CASE("steady state phases and branches")
{
    auto p = testing::standard_params();
    auto plus = make_steady_state(p, 2.0, +1);
    auto minus = make_steady_state(p, 2.0, -1);
    CHECK(plus.signal_phase(0.4) == doctest::Approx(0.2));
    CHECK(minus.signal_phase(0.4) == doctest::Approx(0.2 + std::numbers::pi));
    CHECK(plus.pump_phase(0.4) == 0.4);
    CHECK(plus.signal_flux == minus.signal_flux);
    CHECK_THROWS_AS(make_steady_state(p, 0.9), physics_error);
    CHECK_THROWS_AS(make_steady_state(p, 2.0, 0), physics_error);
    CHECK_THROWS_AS(make_effective_rates(p, 0.5), physics_error);
}

TEST_CASE("adiabatic warning trips at a tenth of the loss ratio")
{
    auto p = testing::standard_params(0.01, 20.0);
    CHECK_FALSE(make_effective_rates(p, 1.9).adiabatic_warning);
    CHECK(make_effective_rates(p, 2.1).adiabatic_warning);
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS(oscillator_params(1e-9, 1e8, 1e9, 1.0), physics_error); // κ_s T_R = 0.1
    CHECK_THROWS_AS(oscillator_params(-1e-9, 1e7, 1e9, 1.0), physics_error);
    CHECK_THROWS_AS(oscillator_params(1e-9, 1e7, 1e9, 0.0), physics_error);
    oscillator_params low_finesse(1e-9, 1e7, 1e9, 1.0); // κ_p T_R = 1
    CHECK_FALSE(low_finesse.pump_high_finesse());
    CHECK_THROWS_AS(low_finesse.transmission(field::pump), physics_error);
    CHECK(low_finesse.transmission(field::signal) == doctest::Approx(0.02));
}

TEST_CASE("photon flux of an optical power")
{
    double h = 6.62607015e-34;
    double c = 299792458.0;
    CHECK(testing::rel_diff(watts_to_flux(50.0, 0.4e-6), 50.0 * 0.4e-6 / (h * c)) < 1e-14);
}

TEST_CASE("validity margin for a 0.4 um, 50 W threshold oscillator")
{
    double nth = watts_to_flux(50.0, 0.4e-6);
    oscillator_params p = oscillator_params::from_threshold_flux(1e-9, 1e7, 1e8, nth);
    double margin = validity_margin(p, nth, 10e-15);
    // sqrt(0.1/(N_th·T_F)) with N_th = 1.006823e20 photons/s.
    CHECK(margin == doctest::Approx(3.15155e-4).epsilon(1e-5));
    CHECK(std::ceil(std::log10(margin)) == -3); // bounded by the 1e-3 decade
}
