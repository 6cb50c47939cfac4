import numpy as np
import pytest

from ptdyson.algebra import P2, P, XP, X2, X, ONE, hermiticity_defect
from ptdyson.models import (
    ReferenceModel, TargetModel, complex_linear_element, pt_transform,
    reference_element, swanson_element, swanson_reparam, swanson_reparam_inverse,
)


class TestSwansonReparam:
    def test_symmetric_point(self):
        assert swanson_reparam(1.0, 1.0, 0.0) == (0.0, 0.0, 1.0)

    def test_direct_substitution(self):
        at, bt, wt = swanson_reparam(2.0, 1.0, 0.1j)
        assert at == pytest.approx(0.375 + 0.1j)
        assert bt == pytest.approx(0.375 - 0.1j)
        assert wt == pytest.approx(1.25)

    def test_round_trip(self):
        at, bt, wt = swanson_reparam(2.0, 1.0, 0.1j)
        M, Om, al = swanson_reparam_inverse(at, bt, wt)
        assert M == pytest.approx(2.0, abs=1e-14)
        assert Om == pytest.approx(1.0, abs=1e-14)
        assert al == pytest.approx(0.1j, abs=1e-14)

    def test_infeasible_inverse(self):
        # omega~ too small for M > 0 given alpha~+beta~
        with pytest.raises(ValueError, match="infeasible"):
            swanson_reparam_inverse(1.0, 1.0, 1.0)

    def test_omega_shift_value(self):
        # the omega~/2 shift dropped from the working Hamiltonian
        _, _, wt = swanson_reparam(1.0, 1.0, 0.0)
        assert wt / 2 == pytest.approx(0.5)


class TestReferenceElement:
    def test_free_particle(self):
        el = reference_element(ReferenceModel("free", m=1.0))
        assert np.allclose(el.coeffs, [0.5, 0, 0, 0, 0, 0])

    def test_ho(self):
        el = reference_element(ReferenceModel("ho", m=2.0, omega=3.0))
        assert np.allclose(el.coeffs, [0.25, 0, 0, 9.0, 0, 0])

    def test_ilinear(self):
        el = reference_element(ReferenceModel("ho_ilinear", m=1.0, omega=1.0, b=0.4))
        assert el.coeffs[X] == pytest.approx(0.4j)
        assert el.coeffs[X2] == pytest.approx(0.5)

    def test_dilation(self):
        el = reference_element(ReferenceModel("ho_dilation", m=1.0, omega=1.0, a=0.2))
        assert el.coeffs[XP] == pytest.approx(0.2)

    def test_omega2_effective(self):
        assert ReferenceModel("free").omega2_effective() == 0.0
        assert ReferenceModel("ho", omega=2.0).omega2_effective() == 4.0
        assert ReferenceModel("ho_dilation", omega=2.0, a=0.5).omega2_effective() == 3.0

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            ReferenceModel("nope")

    def test_bad_mass(self):
        with pytest.raises(ValueError):
            ReferenceModel("ho", m=-1.0)


class TestTargetElements:
    def test_fixed_mass_swanson_vector(self):
        el = swanson_element(1.0, 1.0, 0.1)
        assert np.allclose(el.coeffs, [0.5, 0, 0.1j, 0.5, 0, 0])

    def test_swanson_defect_is_alpha_r(self):
        el = swanson_element(1.0, 1.0, 0.3)
        assert hermiticity_defect(el) == pytest.approx(0.3)

    def test_complex_linear_hermitian_iff_b_zero(self):
        assert hermiticity_defect(complex_linear_element(1.0, 1.0, 0.0)) == 0.0
        assert hermiticity_defect(complex_linear_element(1.0, 1.0, 0.2)) == pytest.approx(0.2)

    def test_swanson_hermitian_iff_alpha_zero(self):
        assert hermiticity_defect(swanson_element(1.0, 1.0, 0.0)) == 0.0
        assert hermiticity_defect(swanson_element(1.0, 1.0, 0.1 + 0.2j)) > 0


class TestPTSymmetry:
    def test_swanson_family_pt_symmetric(self):
        # PT with alpha_i -> -alpha_i reproduces the coefficient vector
        for alpha in (0.3, 0.3 + 0.2j, -0.1 + 0.05j):
            h = swanson_element(1.5, 1.2, alpha)
            h_flip = swanson_element(1.5, 1.2, np.conj(alpha))
            assert pt_transform(h).is_close(h_flip)

    def test_complex_linear_pt_symmetric(self):
        h = complex_linear_element(1.5, 1.2, 0.4)
        assert pt_transform(h).is_close(h)

    def test_involution(self):
        h = swanson_element(1.0, 1.0, 0.1 + 0.3j)
        assert pt_transform(pt_transform(h)).is_close(h)


def test_target_model_parses_expressions():
    tm = TargetModel("swanson", Omega="1+0.1*sin(t)", alpha_mode="expr",
                     alpha_r="0.2+0.1*cos(t)")
    assert tm.Omega_at(0.0) == pytest.approx(1.0)
    assert tm.alpha_r_ast is not None


def test_target_model_rejects_bad_kind():
    with pytest.raises(ValueError):
        TargetModel("nope")
