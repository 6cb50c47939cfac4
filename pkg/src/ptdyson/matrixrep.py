"""Truncated Fock-basis oracle: materializes algebra elements as dense
matrices, validates commutators and metric positivity, and drives
Crank-Nicolson propagation checks for the Dyson intertwining.

Comparisons are restricted to a trusted lower block where truncation
artifacts of banded quadratic operators cannot reach.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .algebra import (
    P2, P, XP, X2, X, ONE, AlgebraElement, GroupElement, commutator,
)


class TruncationOverflow(RuntimeError):
    pass


class PropagationError(RuntimeError):
    pass


@dataclass
class MatrixBasis:
    """Ladder-operator realization x = c (a + a^+), p = i d (a^+ - a)."""

    N: int = 128
    N_trust: int = 32
    m0: float = 1.0
    w0: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.N < 8:
            raise ValueError("basis size must be at least 8")
        if self.N_trust > self.N // 2:
            raise ValueError("trusted block must not exceed half the basis")
        N = self.N
        n = np.arange(N)
        ann = np.zeros((N, N))
        ann[n[:-1], n[:-1] + 1] = np.sqrt(n[1:])
        a2 = ann @ ann
        c = np.sqrt(self.hbar / (2 * self.m0 * self.w0))
        d = np.sqrt(self.hbar * self.m0 * self.w0 / 2)
        ops = np.zeros((6, N, N), dtype=complex)
        ops[X] = c * (ann + ann.T)
        ops[P] = 1j * d * (ann.T - ann)
        ops[X2] = c**2 * (a2 + a2.T + np.diag(2 * n + 1.0))
        ops[P2] = d**2 * (np.diag(2 * n + 1.0) - a2 - a2.T)
        ops[XP] = 1j * self.hbar * (a2.T - a2)
        ops[ONE] = np.eye(N)
        self._ops = ops
        self._ops_ld = None
        self._eigs: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def operator(self, index: int) -> np.ndarray:
        return self._ops[index]

    def materialize(self, elem: AlgebraElement) -> np.ndarray:
        return np.einsum("k,kij->ij", elem.coeffs, self._ops)

    def materialize_extended(self, elem: AlgebraElement) -> np.ndarray:
        """Extended-precision materialization for oracle-grade comparisons."""
        if self._ops_ld is None:
            N = self.N
            n = np.arange(N)
            ann = np.zeros((N, N), dtype=np.longdouble)
            ann[n[:-1], n[:-1] + 1] = np.sqrt(n[1:].astype(np.longdouble))
            a2 = ann @ ann
            diag = np.diag((2 * n + 1).astype(np.longdouble))
            c2 = np.longdouble(self.hbar) / (2 * self.m0 * self.w0)
            d2 = np.longdouble(self.hbar) * self.m0 * self.w0 / 2
            ops = np.zeros((6, N, N), dtype=np.clongdouble)
            ops[X] = np.sqrt(c2) * (ann + ann.T)
            ops[P] = 1j * np.sqrt(d2) * (ann.T - ann).astype(np.clongdouble)
            ops[X2] = c2 * (a2 + a2.T + diag)
            ops[P2] = d2 * (diag - a2 - a2.T)
            ops[XP] = 1j * np.longdouble(self.hbar) * (a2.T - a2).astype(np.clongdouble)
            ops[ONE] = np.eye(N, dtype=np.longdouble)
            self._ops_ld = ops
        out = np.zeros((self.N, self.N), dtype=np.clongdouble)
        for k in range(6):
            out += elem.coeffs[k] * self._ops_ld[k]
        return out

    def trust(self, mat: np.ndarray) -> np.ndarray:
        nt = self.N_trust
        return mat[:nt, :nt]

    def _eig(self, index: int):
        if index not in self._eigs:
            vals, vecs = np.linalg.eigh(self._ops[index])
            self._eigs[index] = (vals, vecs)
        return self._eigs[index]

    def factor_matrix(self, generator: int, parameter: complex) -> np.ndarray:
        """exp(parameter * G) via the cached eigendecomposition of G."""
        parameter = complex(parameter)
        if abs(parameter.imag) < 1e-14 * (1 + abs(parameter.real)):
            vals, vecs = self._eig(generator)
            with np.errstate(over="raise"):
                try:
                    ev = np.exp(parameter.real * vals)
                except FloatingPointError:
                    raise TruncationOverflow(
                        "matrix exponential overflow (parameter too large for N)")
            return (vecs * ev) @ vecs.conj().T
        return expm(parameter * self._ops[generator])

    def group_matrix(self, g: GroupElement) -> np.ndarray:
        out = np.eye(self.N, dtype=complex)
        for f in g.factors:
            out = out @ self.factor_matrix(f.generator, f.parameter)
        return out


def commutator_check(A: AlgebraElement, B: AlgebraElement,
                     basis: MatrixBasis) -> float:
    """Trusted-block max-abs gap between matrix and structure-constant brackets.

    The basis operators are banded (width <= 2), so the trusted entries of the
    product only reach rows/columns N_trust+4; the bracket is evaluated in
    extended precision on that sub-block, which keeps the oracle's own
    roundoff far below the 1e-12 comparison level.
    """
    nt = basis.N_trust
    cut = min(basis.N, nt + 8)
    ma = basis.materialize_extended(A)[:cut, :cut]
    mb = basis.materialize_extended(B)[:cut, :cut]
    lhs = ma @ mb - mb @ ma
    rhs = basis.materialize_extended(commutator(A, B, basis.hbar))[:cut, :cut]
    return float(np.max(np.abs(lhs[:nt, :nt] - rhs[:nt, :nt])))


def commutator_defect_untrusted(A: AlgebraElement, B: AlgebraElement,
                                basis: MatrixBasis) -> float:
    """Same defect without the projector; grows at the truncation edge."""
    ma, mb = basis.materialize(A), basis.materialize(B)
    lhs = ma @ mb - mb @ ma
    rhs = basis.materialize(commutator(A, B, basis.hbar))
    return float(np.max(np.abs(lhs - rhs)))


def metric_spectrum(rho: GroupElement, basis: MatrixBasis) -> float:
    """Smallest eigenvalue of the symmetrized metric on the trusted block."""
    mat = basis.group_matrix(rho)
    if not np.all(np.isfinite(mat)):
        raise TruncationOverflow("non-finite metric matrix entries")
    block = basis.trust(mat)
    sym = 0.5 * (block + block.conj().T)
    vals = np.linalg.eigvalsh(sym)
    vmin, vmax = float(vals[0]), float(vals[-1])
    if vmax <= 0 or (vmin > 0 and vmin / vmax < 1e-13):
        raise TruncationOverflow(
            f"metric spectrum not resolvable (min/max = {vmin:.3g}/{vmax:.3g})")
    return vmin


@dataclass
class PropagationReport:
    t_grid: np.ndarray
    metric_norms: np.ndarray            # <phi | rho(t) phi> at sample times
    metric_drift: float                 # max |m(t)/m(0) - 1|
    plain_drift_H: float                # max |  ||phi||/||phi0|| - 1 |
    plain_drift_h: float                # Hermitian control under h
    intertwining_final: float           # || eta phi - psi_h || at t1
    leaked: float                       # top-quarter population under H


def _cn_step(mat_mid: np.ndarray, state: np.ndarray, dt: float,
             hbar: float) -> np.ndarray:
    """Midpoint Cayley step (1 + i dt H/2)^-1 (1 - i dt H/2) state.

    Exactly norm-preserving when H is Hermitian, second order in dt.
    """
    rhs = state - (0.5j * dt / hbar) * (mat_mid @ state)
    lhs = np.eye(mat_mid.shape[0], dtype=complex) + (0.5j * dt / hbar) * mat_mid
    return np.linalg.solve(lhs, rhs)


def propagate_check(basis: MatrixBasis, H_of_t, h_of_t, eta_of_t, phi0,
                    t0: float, t1: float, dt: float,
                    sample_stride: int | None = None) -> PropagationReport:
    """Crank-Nicolson propagation of phi under H(t) with metric monitoring.

    H_of_t / h_of_t map t to AlgebraElement; eta_of_t maps t to a
    (real-parameter) GroupElement.  psi := eta phi is compared against a
    Crank-Nicolson propagation under h started from eta(t0) phi0.
    """
    N = basis.N
    phi0 = np.asarray(phi0, dtype=complex)
    if phi0.shape != (N,):
        raise ValueError("initial state dimension mismatch")
    if np.sum(np.abs(phi0[basis.N_trust:]) ** 2) > 1e-12:
        raise ValueError("initial state must be supported on the trusted block")
    nsteps = int(round((t1 - t0) / dt))
    if nsteps < 1:
        raise ValueError("window shorter than one step")
    hm0 = basis.materialize(H_of_t(t0))
    if dt * np.linalg.norm(hm0, ord=2) / basis.hbar > 1.0:
        raise PropagationError("time step too large for Crank-Nicolson accuracy")
    stride = sample_stride or max(1, nsteps // 200)

    phi = phi0 / np.linalg.norm(phi0)
    eta0 = basis.group_matrix(eta_of_t(t0))
    psi = eta0 @ phi
    rho0 = eta0.conj().T @ eta0
    m0 = float(np.real(phi.conj() @ (rho0 @ phi)))
    n0_phi = np.linalg.norm(phi)
    n0_psi = np.linalg.norm(psi)

    ts = [t0]
    metric_norms = [m0]
    plain_H = [1.0]
    plain_h = [1.0]

    t = t0
    for k in range(1, nsteps + 1):
        t_mid = t0 + (k - 0.5) * dt
        t_next = t0 + k * dt
        phi = _cn_step(basis.materialize(H_of_t(t_mid)), phi, dt, basis.hbar)
        psi = _cn_step(basis.materialize(h_of_t(t_mid)), psi, dt, basis.hbar)
        t = t_next
        if k % stride == 0 or k == nsteps:
            eta_m = basis.group_matrix(eta_of_t(t))
            rho_m = eta_m.conj().T @ eta_m
            metric_norms.append(float(np.real(phi.conj() @ (rho_m @ phi))))
            plain_H.append(float(np.linalg.norm(phi) / n0_phi))
            plain_h.append(float(np.linalg.norm(psi) / n0_psi))
            ts.append(t)

    leak = float(np.sum(np.abs(phi[3 * N // 4:]) ** 2) / np.linalg.norm(phi) ** 2)
    if leak > 1e-6:
        raise PropagationError(
            f"state leaked past the trusted block (top-quarter population {leak:.3g})")

    eta_final = basis.group_matrix(eta_of_t(t1))
    intertwine = float(np.linalg.norm(eta_final @ phi - psi))

    metric_norms = np.array(metric_norms)
    return PropagationReport(
        t_grid=np.array(ts),
        metric_norms=metric_norms,
        metric_drift=float(np.max(np.abs(metric_norms / metric_norms[0] - 1.0))),
        plain_drift_H=float(np.max(np.abs(np.array(plain_H) - 1.0))),
        plain_drift_h=float(np.max(np.abs(np.array(plain_h) - 1.0))),
        intertwining_final=intertwine,
        leaked=leak,
    )


def matrix_lr_check(basis: MatrixBasis, I_of_t, H_of_t, t: float,
                    window: tuple[float, float], h: float = 1e-5):
    """(matrix-level, coefficient-level) Lewis-Riesenfeld residual norms.

    d/dt I is taken by central differences of the materialized coefficients
    on both sides, so the two levels must agree to machine precision on the
    trusted block.
    """
    t0, t1 = window
    ta, tb = max(t0, t - h), min(t1, t + h)
    Ia, Ib = I_of_t(ta), I_of_t(tb)
    dI_coeff = (Ib - Ia) * (1 / (tb - ta))
    I = I_of_t(t)
    H = H_of_t(t)
    hbar = basis.hbar

    mat_dI = (basis.materialize(Ib) - basis.materialize(Ia)) / (tb - ta)
    mI, mH = basis.materialize(I), basis.materialize(H)
    mat_res = mat_dI + (mI @ mH - mH @ mI) / (1j * hbar)

    coeff_res = dI_coeff + commutator(I, H, hbar) * (1 / (1j * hbar))
    mat_from_coeff = basis.materialize(coeff_res)

    lvl_matrix = float(np.max(np.abs(basis.trust(mat_res))))
    lvl_coeff = float(np.max(np.abs(basis.trust(mat_from_coeff))))
    return lvl_matrix, lvl_coeff
