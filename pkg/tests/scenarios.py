"""Scenario builders shared by the simulation-level tests."""
from amb_smc.control import Gains
from amb_smc.plant import PlantParams
from amb_smc.sim import Pulse, ScenarioConfig

P = PlantParams()
# A unit pulse read in the same scaled-force units as v, converted to m/s^2.
SCALED_UNIT_PULSE = Gains().Q_z * P.kappa / (4.0 * P.m)


def quiet(**kw):
    """Noise-free, pulse-free regulation from hover."""
    kw.setdefault("noise_variance", 0.0)
    kw.setdefault("pulse", Pulse(amplitude=0.0))
    return ScenarioConfig(**kw)


def scaled_force_reading(**kw):
    """Regulation with the noise figure read as a standard deviation and the
    pulse read in scaled-force units."""
    kw.setdefault("noise_interpretation", "std")
    kw.setdefault("noise_variance", 1e-7)
    kw.setdefault("pulse", Pulse(amplitude=SCALED_UNIT_PULSE))
    return ScenarioConfig(**kw)
