"""Quantum noise of a synchronously pumped OPO above threshold.

Thin Python layer over the C++ core: analytic spectra and correlation combs,
the pulse-train Langevin simulator and the configuration-driven task runner.
"""

from ._core import (
    ComparisonFailure,
    ConfigError,
    CorrelationComb,
    EffectiveRates,
    Field,
    OscillatorParams,
    PhysicsError,
    Quadrature,
    SimMode,
    SteadyState,
    __version__,
    cross_comb,
    effective_rates,
    fig4_scan,
    quadrature_comb,
    run_config_file,
    simulate_rectangular,
    spectrum_above,
    spectrum_below,
    steady_state,
    threshold_flux,
    validity_margin,
    watts_to_flux,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
