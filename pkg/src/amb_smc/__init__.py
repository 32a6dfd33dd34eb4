"""Cascaded sliding-mode control of an active-magnetic-bearing rotor axis."""
from .control import (Gains, GainConditionError, Reference, current_control, position_control,
                      sgn, sgn_approx, sliding_variable, switching)
from .inversion import (InversionState, SingularGradient, SingularityCheck, adaptive_rate,
                        check_singularity, default_epsilon_grad, delta1_estimate)
from .plant import (Disturbances, PlantParams, PlantState, RotorContact, dv_di, dv_dz,
                    hover_current, plant_derivative, virtual_input)
from .sim import (NumericalBlowup, Pulse, RunMetrics, ScenarioConfig, SimRecord, Simulation,
                  compute_metrics, disturbance_at, integrate_euler, integrate_rk4, reference_at,
                  run, step)

__version__ = "0.1.0"
