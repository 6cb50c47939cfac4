"""Exact arithmetic in the operator algebra spanned by (p^2, p, {x,p}, x^2, x, 1).

The basis closes under commutation with [x, p] = i*hbar.  Elements are complex
coefficient vectors over that fixed basis; group elements are ordered products
of exponentials exp(theta * G_k) of the non-identity basis operators, acting on
elements through the adjoint representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

P2, P, XP, X2, X, ONE = range(6)

BASIS_LABELS = ("p^2", "p", "{x,p}", "x^2", "x", "1")

# [G_i, G_j] = i*hbar * sum_k STRUCTURE[i, j, k] G_k, from [x,p] = i*hbar.
STRUCTURE = np.zeros((6, 6, 6))
# nonzero brackets with i < j, as (i, j, k, value)
_BRACKETS = (
    (P2, XP, P2, -4.0),
    (P2, X2, XP, -2.0),
    (P2, X, P, -2.0),
    (P, XP, P, -2.0),
    (P, X2, X, -2.0),
    (P, X, ONE, -1.0),
    (XP, X2, X2, -4.0),
    (XP, X, X, -2.0),
)
for i, j, k, val in _BRACKETS:
    STRUCTURE[i, j, k] = val
    STRUCTURE[j, i, k] = -val
STRUCTURE.setflags(write=False)


def _as_coeffs(values) -> np.ndarray:
    c = np.asarray(values, dtype=complex)
    if c.shape != (6,):
        raise ValueError(f"expected 6 coefficients, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite coefficient")
    c = c.copy()
    c.setflags(write=False)
    return c


@dataclass(frozen=True)
class AlgebraElement:
    """Complex coefficient vector over (p^2, p, {x,p}, x^2, x, 1)."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @staticmethod
    def zero() -> "AlgebraElement":
        return AlgebraElement(np.zeros(6))

    @staticmethod
    def basis(index: int) -> "AlgebraElement":
        c = np.zeros(6)
        c[index] = 1.0
        return AlgebraElement(c)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(-self.coeffs)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def is_close(self, other: "AlgebraElement", tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)

    def __repr__(self):
        terms = [f"({c:.6g})*{l}" for c, l in zip(self.coeffs, BASIS_LABELS) if c != 0]
        return "AlgebraElement(" + (" + ".join(terms) if terms else "0") + ")"


def commutator(a: AlgebraElement, b: AlgebraElement, hbar: float = 1.0) -> AlgebraElement:
    """[a, b] through the hard-coded structure constants.

    Summed pairwise over a_i b_j - a_j b_i so [a,b] + [b,a] cancels exactly.
    """
    ac, bc = a.coeffs, b.coeffs
    out = np.zeros(6, dtype=complex)
    for i, j, k, val in _BRACKETS:
        out[k] += val * (ac[i] * bc[j] - ac[j] * bc[i])
    return AlgebraElement(1j * hbar * out)


def dagger(a: AlgebraElement) -> AlgebraElement:
    """Hermitian conjugate; every basis operator is self-adjoint."""
    return AlgebraElement(np.conj(a.coeffs))


def hermiticity_defect(a: AlgebraElement) -> float:
    """Max absolute imaginary part over the six coefficients."""
    return float(np.max(np.abs(a.coeffs.imag)))


def is_hermitian(a: AlgebraElement, tol: float = 1e-12) -> bool:
    return hermiticity_defect(a) <= tol


def ad_matrix(generator: int, hbar: float = 1.0) -> np.ndarray:
    """6x6 matrix of ad_G on coefficient vectors: (ad_G A)_k = [G, A]_k."""
    return 1j * hbar * STRUCTURE[generator].T.astype(complex)


@dataclass(frozen=True)
class GroupFactor:
    """One factor exp(parameter * G) of a group element.

    parameter_rate is the time derivative of the parameter when known; it is
    required by flow_derivative but not by the adjoint action.
    """

    generator: int
    parameter: complex
    parameter_rate: complex | None = None

    def __post_init__(self):
        if self.generator == ONE:
            raise ValueError("identity slot is not a group generator")
        if not (0 <= self.generator < 6):
            raise ValueError(f"bad generator index {self.generator}")


@dataclass(frozen=True)
class GroupElement:
    """Ordered product of factors, leftmost applied first: g = F_0 F_1 ... F_n."""

    factors: tuple[GroupFactor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @staticmethod
    def identity() -> "GroupElement":
        return GroupElement(())

    def inverse(self) -> "GroupElement":
        return GroupElement(tuple(
            GroupFactor(f.generator, -f.parameter,
                        None if f.parameter_rate is None else -f.parameter_rate)
            for f in reversed(self.factors)))

    def dagger(self) -> "GroupElement":
        """Adjoint of the product: conjugated parameters, reversed order."""
        return GroupElement(tuple(
            GroupFactor(f.generator, np.conj(f.parameter),
                        None if f.parameter_rate is None else np.conj(f.parameter_rate))
            for f in reversed(self.factors)))

    def reversed(self) -> "GroupElement":
        return GroupElement(tuple(reversed(self.factors)))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.factors + other.factors)

    def merged(self) -> "GroupElement":
        """Combine adjacent factors sharing a generator (they commute)."""
        out: list[GroupFactor] = []
        for f in self.factors:
            if out and out[-1].generator == f.generator:
                prev = out.pop()
                rate = None
                if prev.parameter_rate is not None and f.parameter_rate is not None:
                    rate = prev.parameter_rate + f.parameter_rate
                out.append(GroupFactor(f.generator, prev.parameter + f.parameter, rate))
            else:
                out.append(f)
        return GroupElement(tuple(f for f in out if f.parameter != 0))


def _factor_ad_exp(factor: GroupFactor, hbar: float) -> np.ndarray:
    """exp(theta * ad_G) on coefficient vectors.

    ad_G is nilpotent (order <= 3) for p^2, p, x^2, x and diagonal for {x,p},
    so the exponential is evaluated in closed form; scipy's scaling-and-
    squaring expm remains as the generic fallback.
    """
    m = factor.parameter * ad_matrix(factor.generator, hbar)
    m2 = m @ m
    m3 = m2 @ m
    if not m3.any() or not (m3 @ m).any():
        return np.eye(6, dtype=complex) + m + m2 / 2 + m3 / 6
    if np.count_nonzero(m - np.diag(np.diagonal(m))) == 0:
        return np.diag(np.exp(np.diagonal(m)))
    return expm(m)


def adjoint_action(g: GroupElement, a: AlgebraElement, hbar: float = 1.0) -> AlgebraElement:
    """g a g^-1, applied factor by factor (innermost factor first)."""
    c = a.coeffs
    for f in reversed(g.factors):
        c = _factor_ad_exp(f, hbar) @ c
    return AlgebraElement(c)


def flow_derivative(g: GroupElement, hbar: float = 1.0) -> AlgebraElement:
    """(d_t g) g^-1 as an algebra element.

    Each factor commutes with its own generator, so
    d_t g g^-1 = sum_k Ad_{F_0...F_{k-1}}(rate_k * G_k).
    """
    total = np.zeros(6, dtype=complex)
    prefix = np.eye(6, dtype=complex)
    for f in g.factors:
        if f.parameter_rate is None:
            raise ValueError("factor missing parameter_rate")
        term = np.zeros(6, dtype=complex)
        term[f.generator] = f.parameter_rate
        total += prefix @ term
        prefix = prefix @ _factor_ad_exp(f, hbar)
    return AlgebraElement(total)
