import math
from pathlib import Path

import numpy as np
import pytest

from ptdyson.models import ReferenceModel, TargetModel
from ptdyson.pointtrans import PointTransformSpec, build_constraints, solve_aux

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

OMEGA_EQ = math.sqrt(1.09)  # sigma = 1 equilibrium for Omega=1, c2=0.15


def _solve(spec, ics, window=(0.0, 10.0)):
    return solve_aux(build_constraints(spec), ics, window)


@pytest.fixture(scope="session")
def aux_fixed_point():
    """Fixed-mass autonomous case: sigma = 1, gamma = 0, alpha constant."""
    ref = ReferenceModel("ho", m=1.0, omega=OMEGA_EQ)
    tgt = TargetModel("swanson", m=1.0, Omega="1", alpha_mode="power", alpha_c2=0.15)
    return _solve(PointTransformSpec(ref, tgt, r=-2.0, s=1.0), [1.0, 0.0, 0.0, 0.0])


@pytest.fixture(scope="session")
def aux_variable_mass():
    """alpha_i = 0 branch with r=0, s=-1 (mass ~ sigma^2) and a driven Omega."""
    ref = ReferenceModel("ho", m=1.0, omega=OMEGA_EQ)
    tgt = TargetModel("swanson", m=1.0, Omega="1+0.08*sin(0.5*t)",
                      alpha_mode="power", alpha_c2=0.15)
    return _solve(PointTransformSpec(ref, tgt, r=0.0, s=-1.0), [1.0, 0.0, 0.1, 0.0])


@pytest.fixture(scope="session")
def aux_power_generic():
    """Constant alpha_r with nonzero alpha_i (time-dependent Dyson factor)."""
    ref = ReferenceModel("ho", m=1.0, omega=OMEGA_EQ)
    tgt = TargetModel("swanson", m=1.0, Omega="1+0.08*sin(0.5*t)",
                      alpha_mode="power", alpha_c2=0.15, alpha_rho=0.0)
    return _solve(PointTransformSpec(ref, tgt, r=-2.0, s=2.0), [1.0, 0.0, 0.1, 0.0])


@pytest.fixture(scope="session")
def aux_expr_alpha():
    ref = ReferenceModel("ho", m=1.0, omega=OMEGA_EQ)
    tgt = TargetModel("swanson", m=1.0, Omega="1", alpha_mode="expr",
                      alpha_r="0.15+0.05*sin(0.7*t)")
    return _solve(PointTransformSpec(ref, tgt, r=-2.0, s=1.0), [1.0, 0.0, 0.05, 0.0])


@pytest.fixture(scope="session")
def aux_complex_linear():
    ref = ReferenceModel("ho_ilinear", m=1.0, omega=1.0, b=0.3)
    tgt = TargetModel("complex_linear", m=1.0, Omega="1+0.05*sin(0.4*t)", b=0.3)
    return _solve(PointTransformSpec(ref, tgt, r=-2.0, s=1.0), [1.0, 0.0, 0.1, 0.0])


@pytest.fixture(scope="session")
def aux_complex_mode():
    ref = ReferenceModel("ho", m=1.0, omega=1.0)
    tgt = TargetModel("swanson", m=1.0, Omega="1", alpha_mode="complex",
                      alpha_r="0.1", alpha_i="0.05*sin(t)")
    spec = PointTransformSpec(ref, tgt, r=-2.0, s=1.0, field_mode="complex")
    return _solve(spec, [1.0, 0.0, 0.05, 0.0], (0.0, 5.0))


ALL_REAL_AUX = ["aux_fixed_point", "aux_variable_mass", "aux_power_generic",
                "aux_expr_alpha", "aux_complex_linear"]


@pytest.fixture(params=ALL_REAL_AUX)
def aux_any(request):
    return request.getfixturevalue(request.param)
