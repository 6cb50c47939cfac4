"""Dyson maps that Hermitize the constructed invariants, the Hermitian
counterparts I_h and h, and the metric rho = eta^dagger eta.

Closed forms: eta = exp(theta2 x^2) for the Swanson family and
eta = exp(eps p) exp(lam x) for the complex-linear model.  A damped Newton
solver over a factor family provides the generic route and cross-validates
the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    P2, P, XP, X2, X, ONE,
    AlgebraElement, GroupElement, GroupFactor,
    adjoint_action, commutator, flow_derivative, hermiticity_defect,
)
from .invariants import CanonicalCoeffs, build_invariant, canonical_split
from .models import hamiltonian_at
from .pointtrans import AuxSample, AuxTrajectory


class DysonError(RuntimeError):
    pass


class NewtonError(DysonError):
    pass


def closed_form_parameters(aux: AuxTrajectory, t: float) -> dict:
    """Closed-form Dyson parameters with analytic rates at time t.

    Swanson family: theta2 = -alpha_r m sigma^{-r-2s} / hbar.
    Complex linear: eps = b sigma^s/(m w^2), lam = -b s sigma^{-1-r-s} sigma_t / w^2.
    """
    spec = aux.spec
    cs = aux.constraints
    smp = aux.sample(t)
    m, hb = cs.m, cs.hbar
    r, s, q = spec.r, spec.s, spec.q
    sig, sig_t, sig_tt = smp.sigma, smp.sigma_t, smp.sigma_tt
    if spec.target.kind == "swanson":
        theta2 = -m * smp.alpha_r * sig ** (-q) / hb
        theta2_rate = -m * sig ** (-q) * (smp.alpha_r_t - q * smp.alpha_r * sig_t / sig) / hb
        return {"kind": "swanson", "theta2": theta2, "theta2_rate": theta2_rate}
    w2 = cs.omega2_raw
    if w2 == 0:
        raise DysonError("closed-form complex-linear Dyson map needs omega != 0")
    b = spec.target.b
    eps = b * sig**s / (m * w2)
    eps_rate = b * s * sig ** (s - 1) * sig_t / (m * w2)
    lam = -b * s * sig ** (-1 - r - s) * sig_t / w2
    lam_rate = -b * s * (sig ** (-1 - r - s) * sig_tt
                         + (-1 - r - s) * sig ** (-2 - r - s) * sig_t**2) / w2
    return {"kind": "complex_linear", "eps": eps, "eps_rate": eps_rate,
            "lam": lam, "lam_rate": lam_rate}


def closed_form_eta(aux: AuxTrajectory, t: float) -> GroupElement:
    p = closed_form_parameters(aux, t)
    if p["kind"] == "swanson":
        return GroupElement((GroupFactor(X2, _real(p["theta2"]),
                                         _real(p["theta2_rate"])),))
    return GroupElement((GroupFactor(P, _real(p["eps"]), _real(p["eps_rate"])),
                         GroupFactor(X, _real(p["lam"]), _real(p["lam_rate"]))))


def _real(z) -> float:
    z = complex(z)
    if abs(z.imag) > 1e-10 * (1 + abs(z.real)):
        raise DysonError(f"Dyson parameter acquired an imaginary part: {z}")
    return z.real


def cl_parameters_from_coeffs(c: CanonicalCoeffs, hbar: float = 1.0):
    """(eps, lam) of eta = e^{eps p} e^{lam x} from invariant coefficients."""
    den = c.a_r * c.e_r - c.b_r * c.c_r
    if den == 0:
        raise DysonError("degenerate coefficients: a_r e_r - b_r c_r = 0")
    eps = c.a_r * c.f_i / den / hbar
    lam = c.c_r * eps / c.a_r
    return eps, lam


def cl_consistency_defect(c: CanonicalCoeffs) -> float:
    """Residual of e_i = 2(c_r^2 - a_r d_r) f_i / (b_r c_r - a_r e_r)."""
    den = c.b_r * c.c_r - c.a_r * c.e_r
    if den == 0:
        return float("nan")
    predicted = 2 * (c.c_r**2 - c.a_r * c.d_r) * c.f_i / den
    return abs(c.e_i - predicted) / max(abs(c.e_i), 1e-300)


GENERATOR_IDS = {"x2": X2, "p": P, "x": X}
FAMILY_ORDER = (X2, P, X)  # eta = exp(th2 x^2) exp(th1 p) exp(th0 x)


def _family_eta(params: np.ndarray, generators: tuple[int, ...]) -> GroupElement:
    return GroupElement(tuple(GroupFactor(g, float(v))
                              for g, v in zip(generators, params)))


def _defects(params: np.ndarray, generators, I: AlgebraElement, hbar: float) -> np.ndarray:
    got = adjoint_action(_family_eta(params, generators), I, hbar)
    return got.coeffs.imag.copy()


def solve_generic(I: AlgebraElement, generators=("x2",), seed=None,
                  hbar: float = 1.0, max_iter: int = 50, tol: float = 1e-12,
                  damping: float = 0.5):
    """Damped Newton on the imaginary-part defects of Ad(eta) I.

    generators: subset of ("x2", "p", "x"), applied in that fixed order.
    Returns (params, iterations).
    """
    gens = tuple(GENERATOR_IDS[g] for g in generators)
    if len(set(gens)) != len(gens):
        raise ValueError("duplicate generators")
    k = len(gens)
    params = np.zeros(k) if seed is None else np.asarray(seed, dtype=float).copy()
    defect = _defects(params, gens, I, hbar)
    if np.max(np.abs(defect)) < tol:
        return params, 0
    fd = 1e-7
    for it in range(1, max_iter + 1):
        jac = np.empty((6, k))
        for j in range(k):
            dp = np.zeros(k)
            dp[j] = fd
            jac[:, j] = (_defects(params + dp, gens, I, hbar)
                         - _defects(params - dp, gens, I, hbar)) / (2 * fd)
        if np.linalg.matrix_rank(jac, tol=1e-13) < k:
            raise NewtonError("singular Jacobian in the Dyson Newton solve")
        step, *_ = np.linalg.lstsq(jac, -defect, rcond=None)
        new_params = params + step
        new_defect = _defects(new_params, gens, I, hbar)
        if np.max(np.abs(new_defect)) >= np.max(np.abs(defect)):
            new_params = params + damping * step
            new_defect = _defects(new_params, gens, I, hbar)
        params, defect = new_params, new_defect
        if np.max(np.abs(defect)) < tol:
            return params, it
    raise NewtonError(f"no convergence in {max_iter} iterations "
                      f"(defect {np.max(np.abs(defect)):.3e})")


def hermitian_counterparts(eta: GroupElement, I: AlgebraElement,
                           H: AlgebraElement, hbar: float = 1.0):
    """(I_h, h) = (Ad_eta I, Ad_eta H + i hbar (d_t eta) eta^-1)."""
    I_h = adjoint_action(eta, I, hbar)
    h = adjoint_action(eta, H, hbar) + flow_derivative(eta, hbar) * (1j * hbar)
    return I_h, h


def metric(eta: GroupElement) -> GroupElement:
    """rho = eta^dagger eta as an ordered (merged) factor product."""
    for f in eta.factors:
        if abs(complex(f.parameter).imag) > 1e-12 * (1 + abs(f.parameter)):
            raise DysonError("metric requires real Dyson parameters")
    return (eta.dagger() @ eta).merged()


def closed_form_h(aux: AuxTrajectory, t: float) -> AlgebraElement:
    """Paper-form Hermitian Hamiltonian for the supported families."""
    spec = aux.spec
    cs = aux.constraints
    smp = aux.sample(t)
    m = cs.m
    r, s, q = spec.r, spec.s, spec.q
    sig, sig_t = smp.sigma, smp.sigma_t
    Om2 = smp.Omega**2
    c = np.zeros(6, dtype=complex)
    c[P2] = sig**q / (2 * m)
    if spec.target.kind == "swanson":
        c[X2] = 2 * m * smp.alpha_r**2 * sig ** (-q) + m * sig ** (-q) * Om2 / 2
        c[XP] = -smp.alpha_i   # = (1/4) d/dt ln(sigma^{r+2s}/alpha_r)
        return AlgebraElement(c)
    w2 = cs.omega2_raw
    b = spec.target.b
    c[X2] = m * sig ** (-q) * Om2 / 2
    c[ONE] = b**2 * sig ** (-r - 2) * (sig**2 * Om2 - s**2 * sig_t**2) / (2 * m * w2**2)
    return AlgebraElement(c)


def swanson_Ih_x2_shift(aux: AuxTrajectory, t: float) -> float:
    """Closed-form x^2 shift of I_h over I_H: 4 m^2 a_r alpha_r^2 sigma^{-2r-4s}."""
    spec = aux.spec
    smp = aux.sample(t)
    m = aux.constraints.m
    a_r = (smp.sigma ** (2 * spec.s) / (2 * m)).real
    return float((4 * m**2 * a_r * smp.alpha_r**2
                  * smp.sigma ** (-2 * spec.r - 4 * spec.s)).real)


@dataclass
class DysonSolution:
    grid: np.ndarray
    etas: list[GroupElement]
    I_h: list[AlgebraElement]
    h: list[AlgebraElement]
    Ih_defects: np.ndarray
    h_defects: np.ndarray
    closed_h_gap: np.ndarray             # |h - paper closed form| per sample
    params: list[dict]
    provenance: str = "closed-form"
    generic_gap: np.ndarray | None = None


def solve_dyson(aux: AuxTrajectory, grid, generic_check: bool = False) -> DysonSolution:
    """Closed-form Dyson solution along the grid.

    With generic_check=True the Newton solver is run per sample (seeded by
    continuation) and its max parameter gap against the closed form recorded.
    """
    spec = aux.spec
    hb = aux.constraints.hbar
    grid = np.asarray(grid, dtype=float)
    etas, I_hs, hs, params = [], [], [], []
    Ih_d, h_d, gap = [], [], []
    generic_gap = [] if generic_check else None
    seed = None
    family = ("x2",) if spec.target.kind == "swanson" else ("p", "x")
    for t in grid:
        t = float(t)
        eta = closed_form_eta(aux, t)
        I = build_invariant(aux, t)
        H = hamiltonian_at(aux.spec.target, t, aux)
        I_h, h = hermitian_counterparts(eta, I, H, hb)
        etas.append(eta)
        I_hs.append(I_h)
        hs.append(h)
        params.append(closed_form_parameters(aux, t))
        Ih_d.append(hermiticity_defect(I_h))
        h_d.append(hermiticity_defect(h))
        gap.append((h - closed_form_h(aux, t)).max_abs())
        if generic_check:
            closed = np.array([f.parameter.real if isinstance(f.parameter, complex)
                               else float(f.parameter) for f in eta.factors])
            got, _ = solve_generic(I, generators=family, seed=seed, hbar=hb)
            generic_gap.append(float(np.max(np.abs(got - closed))))
            seed = got
    return DysonSolution(grid=grid, etas=etas, I_h=I_hs, h=hs,
                         Ih_defects=np.array(Ih_d), h_defects=np.array(h_d),
                         closed_h_gap=np.array(gap), params=params,
                         generic_gap=(np.array(generic_gap) if generic_check else None))


def fd_element_derivative(f, t: float, window: tuple[float, float],
                          h: float = 1e-5) -> AlgebraElement:
    """Second-order finite difference of an AlgebraElement-valued function,
    one-sided (still second order) near the window boundaries."""
    t0, t1 = window
    if t - h >= t0 and t + h <= t1:
        return (f(t + h) - f(t - h)) * (1 / (2 * h))
    if t - h < t0:
        return (f(t) * (-3.0) + f(t + h) * 4.0 - f(t + 2 * h)) * (1 / (2 * h))
    return (f(t) * 3.0 - f(t - h) * 4.0 + f(t - 2 * h)) * (1 / (2 * h))


def lr_residual_hermitian(aux: AuxTrajectory, grid, h_fd: float = 1e-5) -> np.ndarray:
    """Residual of d/dt I_h + [I_h, h]/(i hbar) with a differenced d/dt I_h."""
    hb = aux.constraints.hbar

    def ih_at(t):
        eta = closed_form_eta(aux, t)
        return adjoint_action(eta, build_invariant(aux, t), hb)

    out = []
    for t in np.asarray(grid, dtype=float):
        t = float(t)
        dIh = fd_element_derivative(ih_at, t, aux.window, h_fd)
        eta = closed_form_eta(aux, t)
        I = build_invariant(aux, t)
        H = hamiltonian_at(aux.spec.target, t, aux)
        I_h, h = hermitian_counterparts(eta, I, H, hb)
        res = dIh + commutator(I_h, h, hb) * (1 / (1j * hb))
        out.append(res.max_abs())
    return np.array(out)
