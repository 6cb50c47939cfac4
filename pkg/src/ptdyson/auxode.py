"""Adaptive Dormand-Prince 5(4) integration with dense output, plus the
superposition construction of Ermakov-Pinney solutions.

The integrator works natively on real or complex state vectors, supports a
state guard (used for the sigma > 0 constraint), and exposes a quartic
dense-output interpolant whose time derivative is also available.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t={t:.6g}")
        self.t = t


class GuardViolation(IntegrationError):
    pass


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# error = y5 - y4 coefficients
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# quartic dense-output interpolant (Shampine)
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@dataclass(frozen=True)
class OdeSystem:
    dim: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    complex_field: bool = False


@dataclass
class Trajectory:
    """Accepted steps plus per-step dense-output coefficients.

    Evaluation inside step i uses y(t0 + x*h) = y_i + h * Q_i @ [x, x^2, x^3, x^4].
    """

    ts: np.ndarray                      # accepted times, shape (n+1,)
    ys: np.ndarray                      # states at accepted times, (n+1, dim)
    qs: np.ndarray                      # dense coefficients, (n, dim, 4)
    complex_field: bool = False

    @property
    def t0(self) -> float:
        return float(self.ts[0])

    @property
    def t1(self) -> float:
        return float(self.ts[-1])

    def _locate(self, t):
        ts = self.ts
        if np.any(t < ts[0] - 1e-12) or np.any(t > ts[-1] + 1e-12):
            raise ValueError(f"t={t} outside trajectory window [{ts[0]}, {ts[-1]}]")
        idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2)
        return idx

    def __call__(self, t):
        """Dense-output state at scalar or array t."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        idx = self._locate(t_arr)
        h = self.ts[idx + 1] - self.ts[idx]
        x = (t_arr - self.ts[idx]) / h
        powers = np.stack([x, x**2, x**3, x**4], axis=-1)  # (m, 4)
        vals = self.ys[idx] + h[:, None] * np.einsum("mdp,mp->md", self.qs[idx], powers)
        return vals[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else vals

    def derivative(self, t):
        """Time derivative of the interpolant at scalar or array t."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        idx = self._locate(t_arr)
        h = self.ts[idx + 1] - self.ts[idx]
        x = (t_arr - self.ts[idx]) / h
        powers = np.stack([np.ones_like(x), 2 * x, 3 * x**2, 4 * x**3], axis=-1)
        vals = np.einsum("mdp,mp->md", self.qs[idx], powers)
        return vals[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else vals


def integrate(
    system: OdeSystem,
    ic: Sequence,
    window: tuple[float, float],
    rtol: float = 1e-10,
    atol: float = 1e-10,
    guard: Callable[[float, np.ndarray], bool] | None = None,
    max_step: float | None = None,
    first_step: float | None = None,
) -> Trajectory:
    """Adaptive embedded RK5(4) with dense output over window=[t0, t1].

    guard(t, y) returning False aborts with GuardViolation at that time.
    """
    t0, t1 = float(window[0]), float(window[1])
    if not t1 > t0:
        raise ValueError("window must satisfy t1 > t0")
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    dtype = complex if system.complex_field else float
    y = np.asarray(ic, dtype=dtype)
    if y.shape != (system.dim,):
        raise ValueError(f"initial state must have shape ({system.dim},)")
    if not np.all(np.isfinite(y)):
        raise ValueError("initial state not finite")
    if guard is not None and not guard(t0, y):
        raise GuardViolation("guard violated by initial state", t0)

    span = t1 - t0
    hmax = span if max_step is None else float(max_step)

    def rhs(t, state):
        out = np.asarray(system.rhs(t, state), dtype=dtype)
        if not np.all(np.isfinite(out)):
            raise IntegrationError("non-finite right-hand side", t)
        return out

    f = rhs(t0, y)
    if first_step is not None:
        h = float(first_step)
    else:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean(np.abs(y / scale) ** 2)) if y.size else 0.0
        d1 = np.sqrt(np.mean(np.abs(f / scale) ** 2))
        h = min(1e-3 * span, 0.01 * d0 / d1 if d1 > 1e-15 else 1e-6 * span)
        h = max(h, 1e-12 * span)
    h = min(h, hmax)

    ts = [t0]
    ys = [y.copy()]
    qs = []
    t = t0
    k = np.empty((7, system.dim), dtype=dtype)
    k[0] = f

    while t < t1:
        h = min(h, t1 - t, hmax)
        if h < 1e-14 * max(abs(t), 1.0):
            raise IntegrationError("step size underflow", t)
        for i in range(1, 7):
            yi = y + h * (_A[i] @ k[:i])
            k[i] = rhs(t + _C[i] * h, yi)
        y_new = y + h * (_B @ k)
        err_vec = h * (_E @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean(np.abs(err_vec / scale) ** 2))

        if err <= 1.0:
            q = k.T @ _P  # (dim, 4)
            if guard is not None:
                def dense(xg):
                    return y + h * (q @ np.array([xg, xg**2, xg**3, xg**4]))

                lo = 0.0
                for xg in (0.25, 0.5, 0.75, 1.0):
                    if not guard(t + xg * h, dense(xg)):
                        hi = xg
                        for _ in range(80):  # bisect to the crossing
                            mid = 0.5 * (lo + hi)
                            if guard(t + mid * h, dense(mid)):
                                lo = mid
                            else:
                                hi = mid
                        raise GuardViolation("guard violated", t + hi * h)
                    lo = xg
            t = t + h
            y = y_new
            ts.append(t)
            ys.append(y.copy())
            qs.append(q)
            k[0] = rhs(t, y)
        factor = 0.9 * err ** (-0.2) if err > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))

    return Trajectory(np.array(ts), np.array(ys), np.array(qs),
                      complex_field=system.complex_field)


@dataclass(frozen=True)
class PinneySpec:
    """Superposition data for sigma'' + kappa(t) sigma = w^2 / sigma^3.

    sigma = (A u^2 + B v^2 + 2 C u v)^{1/2} with u, v fundamental solutions of
    y'' + kappa y = 0.  The constants must satisfy C^2 = A*B - w^2/W^2 with
    Wronskian W = u v' - v u' (the W^2 power is fixed by substitution into the
    equation; see tests).
    """

    kappa: Callable[[float], complex]
    w: float
    A: float
    B: float
    C: float
    u0: tuple[float, float]
    v0: tuple[float, float]
    complex_field: bool = False

    def wronskian0(self) -> float:
        return self.u0[0] * self.v0[1] - self.v0[0] * self.u0[1]

    def __post_init__(self):
        W = self.wronskian0()
        if abs(W) < 1e-14:
            raise ValueError("fundamental solutions must have nonzero Wronskian")
        defect = self.C**2 - (self.A * self.B - self.w**2 / W**2)
        if abs(defect) > 1e-9 * max(1.0, abs(self.A * self.B)):
            raise ValueError(
                f"superposition constants violate C^2 = AB - w^2/W^2 (defect {defect:.3g})")


@dataclass
class PinneyResult:
    base: Trajectory          # (u, u', v, v') trajectory
    spec: PinneySpec

    def sigma(self, t):
        """(sigma, sigma_t) from the superposition, with sqrt branch tracking."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        states = self.base(t_arr)
        u, ut, v, vt = states[:, 0], states[:, 1], states[:, 2], states[:, 3]
        sp_ = self.spec
        s2 = sp_.A * u**2 + sp_.B * v**2 + 2 * sp_.C * u * v
        s2t = 2 * sp_.A * u * ut + 2 * sp_.B * v * vt + 2 * sp_.C * (ut * v + u * vt)
        if self.base.complex_field:
            sig = np.sqrt(s2.astype(complex))
            # branch continuity: flip roots that jump relative to neighbor
            for i in range(1, len(sig)):
                if abs(sig[i] - sig[i - 1]) > abs(-sig[i] - sig[i - 1]):
                    sig[i] = -sig[i]
        else:
            if np.any(s2.real <= 0):
                bad = t_arr[np.argmax(s2.real <= 0)]
                raise IntegrationError("sigma^2 <= 0 in real mode", float(bad))
            sig = np.sqrt(s2.real)
        sig_t = s2t / (2 * sig)
        if np.isscalar(t) or np.asarray(t).ndim == 0:
            return sig[0], sig_t[0]
        return sig, sig_t

    def wronskian(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        st = self.base(t_arr)
        wr = st[:, 0] * st[:, 3] - st[:, 2] * st[:, 1]
        return wr[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else wr


def pinney_sigma(spec: PinneySpec, window: tuple[float, float],
                 rtol: float = 1e-10, atol: float = 1e-10) -> PinneyResult:
    """Integrate the fundamental pair and expose the superposed sigma."""

    def rhs(t, y):
        kap = spec.kappa(t)
        return np.array([y[1], -kap * y[0], y[3], -kap * y[2]],
                        dtype=complex if spec.complex_field else float)

    system = OdeSystem(4, rhs, complex_field=spec.complex_field)
    ic = [spec.u0[0], spec.u0[1], spec.v0[0], spec.v0[1]]
    base = integrate(system, ic, window, rtol=rtol, atol=atol)
    return PinneyResult(base, spec)


def ep_rhs(kappa: Callable[[float], float], w: float):
    """Right-hand side of the Ermakov-Pinney equation as a first-order system."""

    def rhs(t, y):
        return np.array([y[1], -kappa(t) * y[0] + w**2 / y[0] ** 3])

    return rhs
