"""Exact dynamics of blockaded three-level atom ensembles via SU(3) sector blocks."""
from .dynamics import (
    InitialSpec,
    block_spectra,
    detect_revival,
    evolve_expectation,
    evolve_observables,
    find_revivals,
    full_spectrum,
    initial_weights,
    max_rabi_enhancement,
    revival_scaling,
)
from .errors import CapacityError, NoRevivalError, NumericalError, ValidationError
from .hamiltonian import DriveParams, build_block, build_observable
from .irrep import Partition, blockaded_dimension, build_basis, enumerate_partitions, multiplicity
from .series import TimeSeries
from .state_prep import (
    Pulse,
    PulseSchedule,
    apply_schedule,
    ghz_target,
    physical_schedule,
    synthesize_sequence,
    w_target,
)

__version__ = "0.1.0"

__all__ = [
    "InitialSpec",
    "block_spectra",
    "detect_revival",
    "evolve_expectation",
    "evolve_observables",
    "find_revivals",
    "full_spectrum",
    "initial_weights",
    "max_rabi_enhancement",
    "revival_scaling",
    "CapacityError",
    "NoRevivalError",
    "NumericalError",
    "ValidationError",
    "DriveParams",
    "build_block",
    "build_observable",
    "Partition",
    "blockaded_dimension",
    "build_basis",
    "enumerate_partitions",
    "multiplicity",
    "TimeSeries",
    "Pulse",
    "PulseSchedule",
    "apply_schedule",
    "ghz_target",
    "physical_schedule",
    "synthesize_sequence",
    "w_target",
]
