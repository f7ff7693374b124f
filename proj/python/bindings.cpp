#include <spopo/analytic.hpp>
#include <spopo/comb_estimator.hpp>
#include <spopo/errors.hpp>
#include <spopo/homodyne.hpp>
#include <spopo/langevin.hpp>
#include <spopo/run.hpp>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace spopo;

namespace {

py::array_t<double> to_array(const std::vector<double>& v, std::vector<py::ssize_t> shape)
{
    py::array_t<double> a(shape);
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::dict record_dict(const pulse_train_record& r)
{
    std::vector<py::ssize_t> shape{r.trajectories, static_cast<py::ssize_t>(r.slices()),
                                   static_cast<py::ssize_t>(r.pulses)};
    py::dict d;
    d["field"] = to_string(r.fld);
    d["intracavity"] = r.intracavity;
    d["roundtrip_time"] = r.roundtrip_time;
    d["bin_width"] = r.bin_width;
    d["seed"] = r.seed;
    d["slice_times"] = r.slice_times;
    d["x"] = to_array(r.x, shape);
    d["y"] = to_array(r.y, shape);
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Quantum noise of a synchronously pumped OPO above threshold";
    m.attr("__version__") = SPOPO_VERSION;

    py::register_exception<physics_error>(m, "PhysicsError", PyExc_ValueError);
    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<comparison_failure>(m, "ComparisonFailure", PyExc_RuntimeError);

    py::enum_<field>(m, "Field").value("PUMP", field::pump).value("SIGNAL", field::signal);
    py::enum_<quadrature>(m, "Quadrature").value("X", quadrature::x).value("Y", quadrature::y);
    py::enum_<sim_mode>(m, "SimMode")
        .value("FULL", sim_mode::full)
        .value("ADIABATIC", sim_mode::adiabatic)
        .value("PASSIVE", sim_mode::passive);

    py::class_<oscillator_params>(m, "OscillatorParams")
        .def(py::init<double, double, double, double>(), py::arg("roundtrip_time"),
             py::arg("loss_rate_signal"), py::arg("loss_rate_pump"), py::arg("coupling"))
        .def_static("from_threshold_flux", &oscillator_params::from_threshold_flux,
                    py::arg("roundtrip_time"), py::arg("loss_rate_signal"),
                    py::arg("loss_rate_pump"), py::arg("threshold_flux"))
        .def_property_readonly("roundtrip_time", &oscillator_params::roundtrip_time)
        .def_property_readonly("loss_rate_signal", &oscillator_params::loss_rate_signal)
        .def_property_readonly("loss_rate_pump", &oscillator_params::loss_rate_pump)
        .def_property_readonly("coupling", &oscillator_params::coupling)
        .def_property_readonly("pump_high_finesse", &oscillator_params::pump_high_finesse);

    py::class_<steady_state>(m, "SteadyState")
        .def_readonly("pump_flux", &steady_state::pump_flux)
        .def_readonly("signal_flux", &steady_state::signal_flux)
        .def_readonly("branch", &steady_state::branch);
    py::class_<effective_rates>(m, "EffectiveRates")
        .def_readonly("kappa_x", &effective_rates::kappa_x)
        .def_readonly("kappa_y", &effective_rates::kappa_y)
        .def_readonly("adiabatic_warning", &effective_rates::adiabatic_warning);
    py::class_<correlation_comb>(m, "CorrelationComb")
        .def_readonly("coefficient", &correlation_comb::coefficient)
        .def_readonly("sign", &correlation_comb::sign)
        .def_readonly("decay_rate", &correlation_comb::decay_rate)
        .def_readonly("prefactor", &correlation_comb::prefactor)
        .def_readonly("has_vacuum_term", &correlation_comb::has_vacuum_term);

    m.def("threshold_flux", &threshold_flux);
    m.def("steady_state", &make_steady_state, py::arg("params"), py::arg("mu0"),
          py::arg("branch") = 1);
    m.def("effective_rates", &make_effective_rates);
    m.def("watts_to_flux", &watts_to_flux);
    m.def("validity_margin", &validity_margin, py::arg("params"), py::arg("threshold_flux"),
          py::arg("averaging_time"));
    m.def("quadrature_comb", &quadrature_comb);
    m.def("cross_comb", &cross_comb);
    m.def("spectrum_above", &spectrum_above, py::arg("field"), py::arg("quadrature"),
          py::arg("omega"), py::arg("mu0"), py::arg("params"), py::arg("m_max") = -1);
    m.def("spectrum_below", &spectrum_below, py::arg("omega"), py::arg("mu"), py::arg("params"),
          py::arg("m_max") = -1);

    m.def(
        "fig4_scan",
        [](const oscillator_params& p, std::vector<double> mu0s, std::vector<double> delays,
           double tau_p, double lo_width, int m_max) {
            auto rows = fig4_scan(p, mu0s, delays, tau_p, lo_width, m_max);
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& r : rows) {
                out.emplace_back(r.mu0, r.delay, r.noise);
            }
            return out;
        },
        py::arg("params"), py::arg("mu0s"), py::arg("delays"), py::arg("tau_p"),
        py::arg("lo_width") = 0.0, py::arg("m_max") = -1,
        "Zero-frequency signal noise versus LO delay as (mu0, delay, noise) tuples.");

    m.def(
        "simulate_rectangular",
        [](const oscillator_params& p, double mu0, double duration, sim_mode mode, int substeps,
           std::int64_t pulses, int slices, double bin_width, int trajectories,
           std::uint64_t seed, unsigned threads) {
            sim_config cfg;
            cfg.mode = mode;
            cfg.substeps = substeps;
            cfg.pulses = pulses;
            cfg.slices = slices;
            cfg.bin_width = bin_width;
            cfg.trajectories = trajectories;
            cfg.seed = seed;
            cfg.threads = threads;
            simulation_result res;
            {
                py::gil_scoped_release release;
                res = simulate(p, pump_profile::rectangular(mu0, duration), cfg);
            }
            py::dict d;
            d["pump"] = record_dict(res.pump);
            d["signal"] = record_dict(res.signal);
            d["warnings"] = res.plan.warnings;
            return d;
        },
        py::arg("params"), py::arg("mu0"), py::arg("duration"),
        py::arg("mode") = sim_mode::adiabatic, py::arg("substeps") = 1, py::arg("pulses") = 1000,
        py::arg("slices") = 1, py::arg("bin_width") = 0.0, py::arg("trajectories") = 1,
        py::arg("seed") = 0, py::arg("threads") = 0,
        "Simulates a rectangular pump and returns output quadratures shaped "
        "(trajectories, slices, pulses).");

    m.def(
        "run_config_file",
        [](const std::filesystem::path& path, std::optional<std::string> output_dir,
           std::optional<std::uint64_t> seed, unsigned threads) {
            run_overrides ov;
            ov.output_dir = std::move(output_dir);
            ov.seed = seed;
            auto cfg = apply_overrides(load_config(path), ov);
            run_outcome out;
            {
                py::gil_scoped_release release;
                out = run_task(cfg, threads);
            }
            py::dict d;
            d["code"] = out.code;
            d["outputs"] = out.outputs;
            d["summary"] = out.summary;
            return d;
        },
        py::arg("path"), py::arg("output_dir") = py::none(), py::arg("seed") = py::none(),
        py::arg("threads") = 0);
}
