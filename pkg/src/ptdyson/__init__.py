"""Invariants, Dyson maps and metric operators for time-dependent
non-Hermitian quadratic Hamiltonians, built from point transformations."""

from .algebra import (
    AlgebraElement,
    GroupElement,
    GroupFactor,
    adjoint_action,
    commutator,
    dagger,
    flow_derivative,
    hermiticity_defect,
)

__all__ = [
    "AlgebraElement",
    "GroupElement",
    "GroupFactor",
    "adjoint_action",
    "commutator",
    "dagger",
    "flow_derivative",
    "hermiticity_defect",
]

__version__ = "0.1.0"
