"""Time-dependent invariants as coefficient trajectories, their canonical
split, the coefficient symmetry ratios, and the Lewis-Riesenfeld residual.

The analytic time derivative of every coefficient is assembled by hand from
the auxiliary data (sigma/gamma second derivatives come from the constraint
right-hand sides, alpha from its jets) so the residual is free of
finite-difference noise; a differenced derivative is kept as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, commutator
from .models import hamiltonian_at
from .pointtrans import AuxSample, AuxTrajectory, PointTransformSpec


@dataclass(frozen=True)
class CanonicalCoeffs:
    """Real/imaginary split over (p^2, p, {x,p}, x^2, x, 1)."""

    a_r: float
    b_r: float
    c_r: float
    c_i: float
    d_r: float
    d_i: float
    e_r: float
    e_i: float
    f_r: float
    f_i: float

    def reconstruct(self) -> AlgebraElement:
        return AlgebraElement([self.a_r, self.b_r, self.c_r + 1j * self.c_i,
                               self.d_r + 1j * self.d_i, self.e_r + 1j * self.e_i,
                               self.f_r + 1j * self.f_i])


def canonical_split(a: AlgebraElement) -> CanonicalCoeffs:
    c = a.coeffs
    return CanonicalCoeffs(
        a_r=c[0].real, b_r=c[1].real,
        c_r=c[2].real, c_i=c[2].imag,
        d_r=c[3].real, d_i=c[3].imag,
        e_r=c[4].real, e_i=c[4].imag,
        f_r=c[5].real, f_i=c[5].imag,
    )


def symmetry_ratios(c: CanonicalCoeffs, tol: float = 1e-12):
    """(e_i/2b_r, d_i/4c_r, c_i/2a_r); a ratio is None when its numerator or
    denominator is negligible."""
    scale = max(abs(getattr(c, f)) for f in ("a_r", "b_r", "c_r", "c_i",
                                             "d_r", "d_i", "e_r", "e_i"))
    cut = tol * (1 + scale)

    def ratio(num, den):
        if abs(num) < cut or abs(den) < cut:
            return None
        return num / den

    return (ratio(c.e_i, 2 * c.b_r), ratio(c.d_i, 4 * c.c_r), ratio(c.c_i, 2 * c.a_r))


def symmetry_target(smp: AuxSample, spec: PointTransformSpec, m: float):
    """alpha_r m sigma^{-r-2s}, the common value of the defined ratios."""
    return smp.alpha_r * m * smp.sigma ** (-spec.q)


def symmetry_spread(c: CanonicalCoeffs, smp: AuxSample,
                    spec: PointTransformSpec, m: float) -> float:
    """Max relative deviation of the defined ratios from their common value."""
    target = symmetry_target(smp, spec, m)
    ratios = [x for x in symmetry_ratios(c) if x is not None]
    if not ratios or abs(target) < 1e-300:
        return 0.0
    return max(abs(x - target) / abs(target) for x in ratios)


# --------------------------------------------------------------------------
# coefficient assembly
# --------------------------------------------------------------------------

def _swanson_coeffs(spec, cs, smp, derivative=False) -> np.ndarray:
    r, s, q = spec.r, spec.s, spec.q
    m = cs.m
    w2 = cs.w2eff
    a2 = cs.a2
    sig, sig_t, sig_tt = smp.sigma, smp.sigma_t, smp.sigma_tt
    gam, gam_t = smp.gamma, smp.gamma_t
    ar, ar_t, ar_tt = smp.alpha_r, smp.alpha_r_t, smp.alpha_r_tt
    W, W_t = smp.W, smp.W_t
    v = r * ar * sig_t - sig * ar_t
    out = np.zeros(6, dtype=complex)
    if not derivative:
        out[0] = sig ** (2 * s) / (2 * m)
        out[1] = sig ** (-r - 1) * W
        out[2] = v / (4 * ar * sig ** (r + 1)) + 1j * ar * sig ** (-r)
        out[3] = ((m / 2) * w2 * sig ** (-2 * s)
                  - 2 * m * ar**2 * sig ** (-2 * r - 2 * s)
                  + m * v**2 / (8 * ar**2 * sig ** (2 * r + 2 * s + 2))
                  + 1j * m * v * sig ** (-2 * r - 2 * s - 1))
        out[4] = (gam * m * w2 * sig ** (-2 * s)
                  + m * W * v / (2 * ar * sig ** (2 * r + 2 * s + 2))
                  + a2 * sig ** (-s)
                  + 2j * m * ar * W * sig ** (-2 * r - 2 * s - 1))
        out[5] = ((m / 2) * (gam**2 * w2 * sig ** (-2 * s)
                             + W**2 * sig ** (-2 * r - 2 * s - 2))
                  + a2 * gam * sig ** (-s))
        return out
    v_t = (r - 1) * ar_t * sig_t + r * ar * sig_tt - sig * ar_tt
    lar = ar_t / ar                      # d/dt log alpha_r
    out[0] = s * sig ** (2 * s - 1) * sig_t / m
    out[1] = sig ** (-r - 1) * (W_t - (r + 1) * sig_t * W / sig)
    out[2] = ((v_t - v * (lar + (r + 1) * sig_t / sig)) / (4 * ar * sig ** (r + 1))
              + 1j * (ar_t * sig ** (-r) - r * ar * sig ** (-r - 1) * sig_t))
    out[3] = (-m * s * w2 * sig ** (-2 * s - 1) * sig_t
              - 2 * m * (2 * ar * ar_t * sig ** (-2 * r - 2 * s)
                         - (2 * r + 2 * s) * ar**2 * sig ** (-2 * r - 2 * s - 1) * sig_t)
              + m * (2 * v * v_t - v**2 * (2 * lar + (2 * r + 2 * s + 2) * sig_t / sig))
              / (8 * ar**2 * sig ** (2 * r + 2 * s + 2))
              + 1j * m * (v_t * sig ** (-2 * r - 2 * s - 1)
                          - (2 * r + 2 * s + 1) * v * sig ** (-2 * r - 2 * s - 2) * sig_t))
    out[4] = (m * w2 * (gam_t * sig ** (-2 * s) - 2 * s * gam * sig ** (-2 * s - 1) * sig_t)
              + m * (W_t * v + W * v_t - W * v * (lar + (2 * r + 2 * s + 2) * sig_t / sig))
              / (2 * ar * sig ** (2 * r + 2 * s + 2))
              - a2 * s * sig ** (-s - 1) * sig_t
              + 2j * m * ((ar_t * W + ar * W_t) * sig ** (-2 * r - 2 * s - 1)
                          - (2 * r + 2 * s + 1) * ar * W * sig ** (-2 * r - 2 * s - 2) * sig_t))
    out[5] = ((m / 2) * (2 * gam * gam_t * w2 * sig ** (-2 * s)
                         - 2 * s * gam**2 * w2 * sig ** (-2 * s - 1) * sig_t
                         + 2 * W * W_t * sig ** (-2 * r - 2 * s - 2)
                         - (2 * r + 2 * s + 2) * W**2 * sig ** (-2 * r - 2 * s - 3) * sig_t)
              + a2 * (gam_t * sig ** (-s) - s * gam * sig ** (-s - 1) * sig_t))
    return out


def _complex_linear_coeffs(spec, cs, smp, derivative=False) -> np.ndarray:
    r, s = spec.r, spec.s
    m = cs.m
    w2 = cs.w2eff
    b3 = cs.b3
    sig, sig_t, sig_tt = smp.sigma, smp.sigma_t, smp.sigma_tt
    gam, gam_t = smp.gamma, smp.gamma_t
    W, W_t = smp.W, smp.W_t
    e2 = -2 * r - 2 * s - 2              # exponent of the sigma^{-2(r+s+1)} blocks
    out = np.zeros(6, dtype=complex)
    if not derivative:
        out[0] = sig ** (2 * s) / (2 * m)
        out[1] = sig ** (-r - 1) * W
        out[2] = -s * sig ** (-r - 1) * sig_t / 2
        out[3] = (m / 2) * (w2 * sig ** (-2 * s) + s**2 * sig_t**2 * sig**e2)
        out[4] = (-m * s * sig_t * W * sig**e2 + gam * m * w2 * sig ** (-2 * s)
                  + 1j * b3 * sig ** (-s))
        out[5] = ((m / 2) * (W**2 * sig**e2 + gam**2 * w2 * sig ** (-2 * s))
                  + 1j * gam * b3 * sig ** (-s))
        return out
    out[0] = s * sig ** (2 * s - 1) * sig_t / m
    out[1] = sig ** (-r - 1) * (W_t - (r + 1) * sig_t * W / sig)
    out[2] = -s * (sig ** (-r - 1) * sig_tt - (r + 1) * sig ** (-r - 2) * sig_t**2) / 2
    out[3] = (m / 2) * (-2 * s * w2 * sig ** (-2 * s - 1) * sig_t
                        + s**2 * (2 * sig_t * sig_tt * sig**e2
                                  + e2 * sig_t**3 * sig ** (e2 - 1)))
    out[4] = (-m * s * ((sig_tt * W + sig_t * W_t) * sig**e2
                        + e2 * sig_t * W * sig ** (e2 - 1) * sig_t)
              + m * w2 * (gam_t * sig ** (-2 * s) - 2 * s * gam * sig ** (-2 * s - 1) * sig_t)
              - 1j * b3 * s * sig ** (-s - 1) * sig_t)
    out[5] = ((m / 2) * (2 * W * W_t * sig**e2 + e2 * W**2 * sig ** (e2 - 1) * sig_t
                         + 2 * gam * gam_t * w2 * sig ** (-2 * s)
                         - 2 * s * gam**2 * w2 * sig ** (-2 * s - 1) * sig_t)
              + 1j * b3 * (gam_t * sig ** (-s) - s * gam * sig ** (-s - 1) * sig_t))
    return out


def _complex_mode_coeffs(spec, cs, smp, derivative=False) -> np.ndarray:
    """Fixed-mass invariant with free complex alpha (complex space-time mode)."""
    m = cs.m
    w2 = cs.w2eff
    sig, sig_t, sig_tt = smp.sigma, smp.sigma_t, smp.sigma_tt
    gam, gam_t, gam_tt = smp.gamma, smp.gamma_t, smp.gamma_tt
    al = smp.alpha
    al_t = smp.alpha_r_t + 1j * smp.alpha_i_t
    W = sig * gam_t - gam * sig_t
    W_t = sig * gam_tt - gam * sig_tt
    out = np.zeros(6, dtype=complex)
    if not derivative:
        out[0] = sig**2 / (2 * m)
        out[1] = sig * W
        out[2] = 1j * al * sig**2 - sig * sig_t / 2
        out[3] = (m / 2) * ((sig_t - 2j * al * sig) ** 2 + w2 / sig**2)
        out[4] = m * (gam * w2 / sig**2 + 2j * al * sig * W
                      - sig * sig_t * gam_t + gam * sig_t**2)
        out[5] = (m / 2) * (gam**2 * w2 / sig**2 + W**2)
        return out
    out[0] = sig * sig_t / m
    out[1] = sig_t * W + sig * W_t
    out[2] = 1j * (al_t * sig**2 + 2 * al * sig * sig_t) - (sig_t**2 + sig * sig_tt) / 2
    out[3] = (m / 2) * (2 * (sig_t - 2j * al * sig)
                        * (sig_tt - 2j * al_t * sig - 2j * al * sig_t)
                        - 2 * w2 * sig_t / sig**3)
    out[4] = m * (gam_t * w2 / sig**2 - 2 * gam * w2 * sig_t / sig**3
                  + 2j * ((al_t * sig + al * sig_t) * W + al * sig * W_t)
                  - sig * sig_tt * gam_t - sig * sig_t * gam_tt
                  + 2 * gam * sig_t * sig_tt)
    out[5] = (m / 2) * (2 * gam * gam_t * w2 / sig**2 - 2 * gam**2 * w2 * sig_t / sig**3
                        + 2 * W * W_t)
    return out


def build_invariant(aux: AuxTrajectory, t: float) -> AlgebraElement:
    """I_H(t) as a coefficient vector."""
    spec = aux.spec
    smp = aux.sample(t)
    if spec.target.kind == "complex_linear":
        coeffs = _complex_linear_coeffs(spec, aux.constraints, smp)
    elif spec.field_mode == "complex":
        coeffs = _complex_mode_coeffs(spec, aux.constraints, smp)
    else:
        coeffs = _swanson_coeffs(spec, aux.constraints, smp)
    return AlgebraElement(coeffs)


def build_invariant_rate(aux: AuxTrajectory, t: float) -> AlgebraElement:
    """Analytic d/dt of I_H(t)."""
    spec = aux.spec
    smp = aux.sample(t)
    if spec.target.kind == "complex_linear":
        coeffs = _complex_linear_coeffs(spec, aux.constraints, smp, derivative=True)
    elif spec.field_mode == "complex":
        coeffs = _complex_mode_coeffs(spec, aux.constraints, smp, derivative=True)
    else:
        coeffs = _swanson_coeffs(spec, aux.constraints, smp, derivative=True)
    return AlgebraElement(coeffs)


@dataclass
class InvariantTrajectory:
    grid: np.ndarray
    elements: list[AlgebraElement]
    rates: list[AlgebraElement]          # analytic d/dt I_H
    hamiltonians: list[AlgebraElement]


def build_invariant_trajectory(aux: AuxTrajectory, grid) -> InvariantTrajectory:
    grid = np.asarray(grid, dtype=float)
    elements, rates, hams = [], [], []
    for t in grid:
        elements.append(build_invariant(aux, float(t)))
        rates.append(build_invariant_rate(aux, float(t)))
        hams.append(hamiltonian_at(aux.spec.target, float(t), aux))
    return InvariantTrajectory(grid, elements, rates, hams)


def lr_residual_element(I: AlgebraElement, dIdt: AlgebraElement,
                        H: AlgebraElement, hbar: float = 1.0) -> AlgebraElement:
    """d/dt I + [I, H]/(i hbar)."""
    return dIdt + commutator(I, H, hbar) * (1 / (1j * hbar))


def lr_residual(traj: InvariantTrajectory, hbar: float = 1.0) -> np.ndarray:
    """Max-abs coefficient of the Lewis-Riesenfeld defect per grid point."""
    if not (len(traj.elements) == len(traj.rates) == len(traj.hamiltonians)):
        raise ValueError("grid mismatch between invariant and Hamiltonian series")
    return np.array([
        lr_residual_element(I, dI, H, hbar).max_abs()
        for I, dI, H in zip(traj.elements, traj.rates, traj.hamiltonians)
    ])


def lr_residual_fd(aux: AuxTrajectory, grid, hbar: float = 1.0,
                   h: float = 1e-5) -> np.ndarray:
    """Residual with a differenced d/dt I_H (independent cross-check).

    Uses a second-order stencil, one-sided near the window boundaries.
    """
    t0, t1 = aux.window

    def I_at(t):
        return build_invariant(aux, t)

    out = []
    for t in np.asarray(grid, dtype=float):
        t = float(t)
        if t - h >= t0 and t + h <= t1:
            dI = (I_at(t + h) - I_at(t - h)) * (1 / (2 * h))
        elif t - h < t0:
            dI = (I_at(t) * (-3.0) + I_at(t + h) * 4.0 - I_at(t + 2 * h)) * (1 / (2 * h))
        else:
            dI = (I_at(t) * 3.0 - I_at(t - h) * 4.0 + I_at(t - 2 * h)) * (1 / (2 * h))
        I = I_at(t)
        H = hamiltonian_at(aux.spec.target, t, aux)
        out.append(lr_residual_element(I, dI, H, hbar).max_abs())
    return np.array(out)
