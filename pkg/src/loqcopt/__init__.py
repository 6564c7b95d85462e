"""loqcopt: numerical design of measurement-assisted linear-optical two-qubit gates."""

from .fock import (
    DUAL_RAIL_STATES,
    ModeLayout,
    dual_rail_index,
    dual_rail_state,
    enumerate_fock_basis,
)
from .kraus import (
    InterferometerMatrix,
    PhotonCountError,
    kraus_operator,
    permanent,
    transfer_amplitude,
)
from .metrics import GateScore, NullBranchError, TargetGate, hs_inner, score, score_gradient
from .weyl import (
    KAKFactors,
    canonicalize,
    gate_from_coordinates,
    kak_decompose,
    symmetry_orbit,
)
from .optimizer import (
    DeviceConfig,
    InfeasibleTargetError,
    OptimizationRecord,
    OptimizerSettings,
    apply_symmetry_transport,
    continue_family,
    dilate,
    optimize,
)

__version__ = "0.1.0"

__all__ = [
    "DUAL_RAIL_STATES",
    "DeviceConfig",
    "GateScore",
    "InfeasibleTargetError",
    "InterferometerMatrix",
    "KAKFactors",
    "ModeLayout",
    "NullBranchError",
    "OptimizationRecord",
    "OptimizerSettings",
    "PhotonCountError",
    "TargetGate",
    "apply_symmetry_transport",
    "canonicalize",
    "continue_family",
    "dilate",
    "dual_rail_index",
    "dual_rail_state",
    "enumerate_fock_basis",
    "gate_from_coordinates",
    "hs_inner",
    "kak_decompose",
    "kraus_operator",
    "optimize",
    "permanent",
    "score",
    "score_gradient",
    "symmetry_orbit",
    "transfer_amplitude",
]
