import json
import math

import numpy as np
import pytest

import spopo


@pytest.fixture
def params():
    return spopo.OscillatorParams.from_threshold_flux(1e-9, 1e7, 1e9, 1e15)


def test_threshold_and_rates(params):
    assert spopo.threshold_flux(params) == pytest.approx(1e15, rel=1e-12)
    ss = spopo.steady_state(params, 1.5)
    assert ss.signal_flux == pytest.approx(2 * 100 * 0.5 * 1e15, rel=1e-12)
    rates = spopo.effective_rates(params, 1.5)
    assert rates.kappa_x == pytest.approx(1e7)
    assert rates.kappa_y == pytest.approx(3e7)


def test_spectra(params):
    y = spopo.spectrum_above(spopo.Field.PUMP, spopo.Quadrature.Y, 0.0, 2.0, params, 0)
    assert y == pytest.approx(0.5, abs=1e-14)
    assert spopo.spectrum_below(0.0, 0.5, params, 0) == pytest.approx(1 / 9)
    comb = spopo.quadrature_comb(spopo.Field.SIGNAL, spopo.Quadrature.X, params, 1.5)
    assert comb.coefficient == pytest.approx(0.02)
    assert comb.sign == 1


def test_errors(params):
    with pytest.raises(spopo.PhysicsError):
        spopo.steady_state(params, 0.5)
    with pytest.raises(ValueError):
        spopo.OscillatorParams(1e-9, 1e8, 1e9, 1.0)


def test_fig4(params):
    rows = spopo.fig4_scan(params, [2.0], [0.0], 0.1e-9, 0.0, 0)
    assert rows[0][2] == pytest.approx(0.75)


def test_simulation_shapes_and_vacuum(params):
    out = spopo.simulate_rectangular(params, 1.5, 0.5e-9, mode=spopo.SimMode.PASSIVE,
                                     pulses=20000, slices=2, bin_width=0.1e-9,
                                     trajectories=2, seed=3)
    sig = out["signal"]
    assert sig["x"].shape == (2, 2, 20000)
    var = 4 * sig["bin_width"] * np.mean(sig["y"] ** 2)
    assert abs(var - 1) < 0.03


def test_run_config_file(tmp_path):
    cfg = {
        "task": "steady-state",
        "units": {"time": "ns"},
        "oscillator": {"roundtrip_time": 1.0, "loss_rate_signal": 0.01,
                       "loss_rate_pump": 1.0, "threshold_flux": 1e6},
        "pump": {"shape": "rectangular", "mu0": 1.5, "duration": 0.5},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    res = spopo.run_config_file(str(path), output_dir=str(tmp_path / "out"))
    assert res["code"] == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["task"] == "steady-state"
    assert not math.isnan(manifest["config"]["pump"]["mu0"])
