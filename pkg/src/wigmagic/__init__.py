"""Geometric magic measures for 1-3 qubits.

Discrete Wigner functions on the product phase space, the l1 distance ``C``
to the stabilizer Wigner polytope, the mixed-state stabilizer extent
``Gamma``, their ratio ``kappa`` and the LP dual witnesses behind them.
"""

from .families import FamilyId, closed_form, family_density, family_state
from .measures import (
    magic_report,
    stabilizer_extent,
    tightness_ratio,
    wigner_distance,
)
from .phasespace import WignerVector, wigner
from .qcore import DensityMatrix, PauliString, PureState, bloch_state, haar_random_pure
from .stabgen import enumerate_stabilizers, stabilizer_set

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "FamilyId",
    "PauliString",
    "PureState",
    "WignerVector",
    "bloch_state",
    "closed_form",
    "enumerate_stabilizers",
    "family_density",
    "family_state",
    "haar_random_pure",
    "magic_report",
    "stabilizer_extent",
    "stabilizer_set",
    "tightness_ratio",
    "wigner",
    "wigner_distance",
]
