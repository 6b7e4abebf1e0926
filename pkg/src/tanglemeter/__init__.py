"""Nilpotent-polynomial toolkit for 3- and 4-qubit pure-state
entanglement: canonic-form reduction, polynomial invariants, measures,
and classification."""

from .classification import ClassLabel, classify
from .config import FlowConfig, ToolConfig
from .errors import ConvergenceError, ReconstructionError, ZeroReferenceError
from .invariants import (
    InvariantSet3,
    InvariantSet4,
    betas_from_invariants,
    canonic_amplitudes,
    invariants3,
    invariants4,
    raise_indices,
)
from .measures import (
    MeasureReport,
    k4,
    kappa4,
    orbit_distance,
    s1_and_nonunitarity,
    s2,
)
from .nilpotent import NilpotentPoly
from .sampling import haar_sample
from .sl_reduction import (
    SingularSpectrum,
    SlTanglemeter,
    apply_scaling,
    d4_matrix,
    feedback_p_minus,
    gammas,
    reduce_sl,
)
from .states import (
    LocalOperation,
    PureState,
    apply_local,
    is_bipartition_entangled,
    named_state,
    nilpotential,
    read_state_file,
    state_from_nilpotential,
    write_state_file,
)
from .su_reduction import SuTanglemeter, coset_dimension, prerotate, reduce_su

__version__ = "0.1.0"

__all__ = [
    "ClassLabel",
    "ConvergenceError",
    "FlowConfig",
    "InvariantSet3",
    "InvariantSet4",
    "LocalOperation",
    "MeasureReport",
    "NilpotentPoly",
    "PureState",
    "ReconstructionError",
    "SingularSpectrum",
    "SlTanglemeter",
    "SuTanglemeter",
    "ToolConfig",
    "ZeroReferenceError",
    "apply_local",
    "apply_scaling",
    "betas_from_invariants",
    "canonic_amplitudes",
    "classify",
    "coset_dimension",
    "d4_matrix",
    "feedback_p_minus",
    "gammas",
    "haar_sample",
    "invariants3",
    "invariants4",
    "is_bipartition_entangled",
    "k4",
    "kappa4",
    "named_state",
    "nilpotential",
    "orbit_distance",
    "prerotate",
    "raise_indices",
    "read_state_file",
    "reduce_sl",
    "reduce_su",
    "s1_and_nonunitarity",
    "s2",
    "state_from_nilpotential",
    "write_state_file",
]
