"""Reference and target Hamiltonians as coefficient vectors, plus the map
between the ladder-operator and (x, p) parametrizations of the Swanson model.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .algebra import P2, P, XP, X2, X, ONE, AlgebraElement
from .exprparse import ExprAst, eval_jet2, parse

REFERENCE_KINDS = ("ho", "free", "ho_linear", "ho_ilinear", "ho_dilation")
TARGET_KINDS = ("swanson", "complex_linear")
ALPHA_MODES = ("power", "expr", "complex")


@dataclass(frozen=True)
class ReferenceModel:
    """Time-independent reference Hamiltonian in the chi variable.

    kinds: ho          P^2/2m + m w^2 chi^2/2
           free        P^2/2m
           ho_linear   ho + a*chi
           ho_ilinear  ho + i*b*chi
           ho_dilation ho + a*{chi,P}
    """

    kind: str
    m: float = 1.0
    omega: float = 1.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in REFERENCE_KINDS:
            raise ValueError(f"unknown reference kind {self.kind!r}")
        if self.m <= 0:
            raise ValueError("mass m must be positive")

    def omega2_effective(self) -> float:
        """w^2 entering the constraint equations and invariants.

        The free particle is the w=0 oscillator; the dilation term only ever
        enters through w^2 - 4a^2.
        """
        if self.kind == "free":
            return 0.0
        if self.kind == "ho_dilation":
            return self.omega**2 - 4 * self.a**2
        return self.omega**2


def reference_element(ref: ReferenceModel) -> AlgebraElement:
    """Coefficient vector of the reference Hamiltonian (chi-variable algebra)."""
    c = np.zeros(6, dtype=complex)
    c[P2] = 1.0 / (2 * ref.m)
    if ref.kind != "free":
        c[X2] = ref.m * ref.omega**2 / 2
    if ref.kind == "ho_linear":
        c[X] = ref.a
    elif ref.kind == "ho_ilinear":
        c[X] = 1j * ref.b
    elif ref.kind == "ho_dilation":
        c[XP] = ref.a
    return AlgebraElement(c)


@dataclass(frozen=True)
class TargetModel:
    """Time-dependent target Hamiltonian.

    swanson:        H = p^2/2M + M Om^2 x^2/2 + i alpha {x,p},  M = m sigma^n
    complex_linear: H = p^2/2M + M Om^2 x^2/2 + i beta x,       beta = b sigma^{r-s}

    alpha modes (swanson only):
      power    alpha_r = c2 * sigma^rho (rho defaults to r+2s, the alpha_i = 0
               branch), alpha_i from the reality condition
      expr     alpha_r(t) given as an expression, alpha_i from the reality
               condition
      complex  alpha_r(t), alpha_i(t) both given (complex space-time mode)
    """

    kind: str
    m: float = 1.0
    Omega: str = "1"
    alpha_mode: str = "power"
    alpha_c2: float = 0.0
    alpha_rho: float | None = None   # None -> r + 2s
    alpha_r: str | None = None
    alpha_i: str | None = None
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.m <= 0:
            raise ValueError("mass scale m must be positive")
        if self.kind == "swanson" and self.alpha_mode not in ALPHA_MODES:
            raise ValueError(f"unknown alpha mode {self.alpha_mode!r}")
        object.__setattr__(self, "_Omega_ast", parse(self.Omega))
        for name in ("alpha_r", "alpha_i"):
            src = getattr(self, name)
            object.__setattr__(self, f"_{name}_ast", parse(src) if src else None)

    @property
    def Omega_ast(self) -> ExprAst:
        return self._Omega_ast

    @property
    def alpha_r_ast(self) -> ExprAst | None:
        return self._alpha_r_ast

    @property
    def alpha_i_ast(self) -> ExprAst | None:
        return self._alpha_i_ast

    def Omega_at(self, t: float) -> float:
        return eval_jet2(self._Omega_ast, t).f


def swanson_reparam(M: float, Omega: float, alpha: complex):
    """(M, Omega, alpha) -> (alpha~, beta~, omega~) of the ladder form."""
    if M <= 0:
        raise ValueError("M must be positive")
    base = M * Omega**2 / 4 - 1 / (4 * M)
    alpha_t = base + alpha
    beta_t = base - alpha
    omega_t = M * Omega**2 / 2 + 1 / (2 * M)
    return alpha_t, beta_t, omega_t


def swanson_reparam_inverse(alpha_t: complex, beta_t: complex, omega_t: complex):
    """Inverse of swanson_reparam; raises when no real (M, Omega) exists."""
    alpha = (alpha_t - beta_t) / 2
    base = (alpha_t + beta_t) / 2
    if abs(base.imag) > 1e-12 * (1 + abs(base)) or abs(complex(omega_t).imag) > 1e-12:
        raise ValueError("alpha~ + beta~ and omega~ must be real")
    base = base.real
    omega_t = complex(omega_t).real
    u = omega_t / 4 + base / 2          # M Omega^2 / 4
    w = omega_t / 4 - base / 2          # 1 / (4 M)
    if w <= 0:
        raise ValueError("inverse infeasible: omega~ inconsistent with M > 0")
    if u < 0:
        raise ValueError("inverse infeasible: Omega^2 < 0")
    M = 1 / (4 * w)
    Omega = cmath.sqrt(16 * u * w).real
    return M, Omega, alpha


def swanson_element(M: float, Omega: float, alpha: complex) -> AlgebraElement:
    c = np.zeros(6, dtype=complex)
    c[P2] = 1 / (2 * M)
    c[X2] = M * Omega**2 / 2
    c[XP] = 1j * alpha
    return AlgebraElement(c)


def complex_linear_element(M: float, Omega: float, beta: float) -> AlgebraElement:
    c = np.zeros(6, dtype=complex)
    c[P2] = 1 / (2 * M)
    c[X2] = M * Omega**2 / 2
    c[X] = 1j * beta
    return AlgebraElement(c)


def hamiltonian_at(model: TargetModel, t: float, aux) -> AlgebraElement:
    """Target Hamiltonian at time t from solved auxiliary data.

    aux is an AuxTrajectory (anything exposing sample(t) with M, Omega,
    alpha, beta fields).
    """
    smp = aux.sample(t)
    if model.kind == "swanson":
        return swanson_element(smp.M, smp.Omega, smp.alpha)
    return complex_linear_element(smp.M, smp.Omega, smp.beta)


def pt_transform(a: AlgebraElement) -> AlgebraElement:
    """PT image of a coefficient vector: x -> -x, p -> p, i -> -i.

    Basis images: p^2, p, x^2, 1 invariant; {x,p} -> -{x,p}; x -> -x; the
    antiunitary part conjugates all coefficients.
    """
    c = np.conj(a.coeffs).copy()
    c[XP] = -c[XP]
    c[X] = -c[X]
    return AlgebraElement(c)
