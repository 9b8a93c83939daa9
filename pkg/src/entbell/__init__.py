"""Simulation and statistics for a Bell test between a single-photon
polarization and the entangled state of a photon pair."""

from .experiment import (MeasurementSetting, PreparedState, calibrate_preparation,
                         correlation_exact, default_prepared, target_state,
                         ghz_circular_state, outcome_probability, prepare_state)
from .qstate import BellKind, StateVector, bell_state, fidelity, make_ket, tensor
from .stats import (ChshResult, CorrelationEstimate, NoiseModel, SettingCounts, chsh,
                    correlation_from_counts, critical_visibility, lhv_max_chsh,
                    simulate_counts)

__version__ = "0.1.0"
