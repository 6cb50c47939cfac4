import math

import numpy as np
import pytest

from ptdyson.auxode import (
    GuardViolation, IntegrationError, OdeSystem, PinneySpec,
    ep_rhs, integrate, pinney_sigma,
)


def harmonic():
    return OdeSystem(2, lambda t, y: np.array([y[1], -y[0]]))


class TestIntegrate:
    def test_harmonic_oscillator(self):
        traj = integrate(harmonic(), [1.0, 0.0], (0.0, math.pi))
        assert traj(math.pi)[0] == pytest.approx(-1.0, abs=1e-8)

    def test_ep_equilibrium(self):
        # sigma'' = -4 sigma + 1/sigma^3 has fixed point sigma^4 = 1/4
        s0 = 0.25**0.25
        sys = OdeSystem(2, ep_rhs(lambda t: 4.0, 1.0))
        traj = integrate(sys, [s0, 0.0], (0.0, 10.0))
        samples = traj(np.linspace(0, 10, 200))
        assert np.max(np.abs(samples[:, 0] - s0)) < 1e-8

    def test_nan_rhs_reports_time(self):
        def rhs(t, y):
            return np.array([y[1], float("nan") if t > 0.5 else -y[0]])

        with pytest.raises(IntegrationError) as exc:
            integrate(OdeSystem(2, rhs), [1.0, 0.0], (0.0, 2.0))
        assert exc.value.t > 0.4

    def test_guard_violation(self):
        sys = OdeSystem(2, lambda t, y: np.array([y[1], -1.0]))  # falling body
        with pytest.raises(GuardViolation) as exc:
            integrate(sys, [1.0, 0.0], (0.0, 5.0), guard=lambda t, y: y[0] > 0)
        # sigma = 1 - t^2/2 crosses zero at sqrt(2)
        assert exc.value.t == pytest.approx(math.sqrt(2.0), abs=0.1)

    def test_dense_output_accuracy(self):
        tol = 1e-10
        traj = integrate(harmonic(), [1.0, 0.0], (0.0, 10.0), rtol=tol, atol=tol)
        mids = 0.5 * (traj.ts[:-1] + traj.ts[1:])
        dense = traj(mids)
        exact = np.stack([np.cos(mids), -np.sin(mids)], axis=1)
        assert np.max(np.abs(dense - exact)) < 10 * tol * len(traj.ts)

    def test_dense_derivative(self):
        traj = integrate(harmonic(), [1.0, 0.0], (0.0, 6.0))
        ts = np.linspace(0.1, 5.9, 57)
        d = traj.derivative(ts)
        assert np.max(np.abs(d[:, 0] + np.sin(ts))) < 1e-8
        assert np.max(np.abs(d[:, 1] + np.cos(ts))) < 1e-7

    def test_complex_mode_stays_real(self):
        sys = OdeSystem(2, lambda t, y: np.array([y[1], -y[0]], dtype=complex),
                        complex_field=True)
        traj = integrate(sys, [1.0, 0.0], (0.0, 8.0))
        samples = traj(np.linspace(0, 8, 100))
        assert np.max(np.abs(samples.imag)) < 1e-12

    def test_out_of_window_raises(self):
        traj = integrate(harmonic(), [1.0, 0.0], (0.0, 1.0))
        with pytest.raises(ValueError):
            traj(2.0)


class TestPinney:
    def test_equilibrium_value_and_w_squared(self):
        # kappa=4, u=cos 2t, v=sin 2t, W=2, A=B=1/2, C=0:
        # sigma = sqrt(1/2) solves the EP equation only with the W^2 constraint
        spec = PinneySpec(kappa=lambda t: 4.0, w=1.0, A=0.5, B=0.5, C=0.0,
                          u0=(1.0, 0.0), v0=(0.0, 2.0))
        res = pinney_sigma(spec, (0.0, 10.0))
        ts = np.linspace(0, 10, 400)
        sig, _ = res.sigma(ts)
        assert np.max(np.abs(sig - math.sqrt(0.5))) < 1e-8

    def test_first_power_constraint_rejected(self):
        # same data with C chosen for the printed first-power constraint
        # C^2 = AB - w^2/W violates the construction and must be refused
        with pytest.raises(ValueError, match="C\\^2"):
            PinneySpec(kappa=lambda t: 4.0, w=1.0, A=0.5, B=0.5,
                       C=math.sqrt(abs(0.25 - 1.0 / 2.0)),
                       u0=(1.0, 0.0), v0=(0.0, 2.0))

    def test_wronskian_drift_constant_kappa(self):
        spec = PinneySpec(kappa=lambda t: 4.0, w=1.0, A=0.5, B=0.5, C=0.0,
                          u0=(1.0, 0.0), v0=(0.0, 2.0))
        res = pinney_sigma(spec, (0.0, 20.0), rtol=1e-12, atol=1e-12)
        ts = np.linspace(0, 20, 500)
        assert np.max(np.abs(res.wronskian(ts) - 2.0)) < 1e-10

    def test_matches_direct_integration_time_dependent(self):
        kappa = lambda t: 4.0 + math.sin(t)
        w = 1.3
        A, B = 0.7, 0.9
        W = 2.0
        C = math.sqrt(A * B - w**2 / W**2)
        spec = PinneySpec(kappa=kappa, w=w, A=A, B=B, C=C,
                          u0=(1.0, 0.0), v0=(0.0, 2.0))
        res = pinney_sigma(spec, (0.0, 10.0))
        s0, st0 = res.sigma(0.0)
        direct = integrate(OdeSystem(2, ep_rhs(kappa, w)), [s0, st0], (0.0, 10.0))
        ts = np.linspace(0, 10, 300)
        sig, _ = res.sigma(ts)
        assert np.max(np.abs(sig - direct(ts)[:, 0])) < 1e-6

    def test_ep_residual_from_dense_derivatives(self):
        kappa = lambda t: 4.0 + math.sin(t)
        spec = PinneySpec(kappa=kappa, w=1.0, A=0.5, B=0.5,
                          C=math.sqrt(0.25 - 1.0 / 4.0),
                          u0=(1.0, 0.0), v0=(0.0, 2.0))
        res = pinney_sigma(spec, (0.0, 10.0))
        ts = np.linspace(0.05, 9.95, 400)
        sig, sig_t = res.sigma(ts)
        h = 1e-4
        _, st_p = res.sigma(ts + h)
        _, st_m = res.sigma(ts - h)
        sig_tt = (st_p - st_m) / (2 * h)
        residual = sig_tt + np.array([kappa(t) for t in ts]) * sig - 1.0 / sig**3
        assert np.max(np.abs(residual)) < 1e-6

    def test_vanishing_wronskian_rejected(self):
        with pytest.raises(ValueError, match="Wronskian"):
            PinneySpec(kappa=lambda t: 4.0, w=1.0, A=0.5, B=0.5, C=0.0,
                       u0=(1.0, 0.0), v0=(2.0, 0.0))
