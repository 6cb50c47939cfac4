import numpy as np
import pytest

from ptdyson.algebra import (
    P2, P, XP, X2, X, ONE,
    AlgebraElement, GroupElement, GroupFactor,
    adjoint_action, commutator, dagger, flow_derivative, hermiticity_defect,
)


def elem(**kw):
    c = np.zeros(6, dtype=complex)
    names = {"p2": P2, "p": P, "xp": XP, "x2": X2, "x": X, "one": ONE}
    for k, v in kw.items():
        c[names[k]] = v
    return AlgebraElement(c)


def random_element(rng):
    return AlgebraElement(rng.uniform(-1, 1, 6) + 1j * rng.uniform(-1, 1, 6))


def random_group(rng, nfactors=3, scale=1.0):
    factors = []
    for _ in range(nfactors):
        gen = rng.integers(0, 5)  # excludes ONE
        factors.append(GroupFactor(int(gen), rng.uniform(-scale, scale)))
    return GroupElement(tuple(factors))


class TestCommutator:
    def test_x2_p2(self):
        out = commutator(elem(x2=1), elem(p2=1))
        assert out.is_close(elem(xp=2j))

    def test_canonical(self):
        assert commutator(elem(x=1), elem(p=1)).is_close(elem(one=1j))

    def test_xp_p2(self):
        assert commutator(elem(xp=1), elem(p2=1)).is_close(elem(p2=4j))

    def test_antisymmetry_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a, b = random_element(rng), random_element(rng)
            s = commutator(a, b) + commutator(b, a)
            assert s.max_abs() == 0.0

    def test_jacobi(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b, c = (random_element(rng) for _ in range(3))
            j = (commutator(a, commutator(b, c))
                 + commutator(b, commutator(c, a))
                 + commutator(c, commutator(a, b)))
            assert j.max_abs() < 1e-12

    def test_hbar_scaling(self):
        out = commutator(elem(x=1), elem(p=1), hbar=2.5)
        assert out.is_close(elem(one=2.5j))


class TestDagger:
    def test_ixp(self):
        assert dagger(elem(xp=1j)).is_close(elem(xp=-1j))

    def test_real_fixed_point(self):
        a = elem(p2=0.3, xp=-1.2, x=0.5)
        assert dagger(a).is_close(a)

    def test_swanson_flip(self):
        h = elem(p2=0.5, xp=0.1j, x2=0.5)
        hd = dagger(h)
        assert hd.is_close(elem(p2=0.5, xp=-0.1j, x2=0.5))
        assert hermiticity_defect(h) == pytest.approx(0.1)

    def test_involution(self):
        rng = np.random.default_rng(3)
        a = random_element(rng)
        assert dagger(dagger(a)).is_close(a)


class TestAdjointAction:
    def test_exp_x2_on_p(self):
        g = GroupElement((GroupFactor(X2, 0.5),))
        out = adjoint_action(g, elem(p=1))
        assert out.is_close(elem(p=1, x=1j))

    def test_exp_p_on_x(self):
        g = GroupElement((GroupFactor(P, 1.0),))
        out = adjoint_action(g, elem(x=1))
        assert out.is_close(elem(x=1, one=-1j))

    def test_identity(self):
        rng = np.random.default_rng(5)
        a = random_element(rng)
        g = GroupElement((GroupFactor(X2, 0.0), GroupFactor(P, 0.0)))
        assert adjoint_action(g, a).is_close(a)

    def test_homomorphism_on_brackets(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            g = random_group(rng)
            a, b = random_element(rng), random_element(rng)
            lhs = adjoint_action(g, commutator(a, b))
            rhs = commutator(adjoint_action(g, a), adjoint_action(g, b))
            scale = max(lhs.max_abs(), 1.0)
            assert (lhs - rhs).max_abs() / scale < 1e-12

    def test_inverse_roundtrip(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            g = random_group(rng)
            a = random_element(rng)
            back = adjoint_action(g.inverse(), adjoint_action(g, a))
            assert (back - a).max_abs() / max(a.max_abs(), 1.0) < 1e-12

    def test_dagger_compatibility_real_parameters(self):
        # dagger(g A g^-1) = (g^dagger)^-1 A^dagger g^dagger; for real
        # parameters (g^dagger)^-1 is the reversed factor order with negated
        # parameters.
        rng = np.random.default_rng(19)
        for _ in range(40):
            g = random_group(rng)
            a = random_element(rng)
            lhs = dagger(adjoint_action(g, a))
            rhs = adjoint_action(g.reversed().inverse().inverse(), dagger(a))
            # g real-parameter: g^dagger == g.reversed(), so
            # (g^dagger)^-1 == g.reversed().inverse()
            rhs = adjoint_action(g.reversed().inverse(), dagger(a))
            assert (lhs - rhs).max_abs() / max(lhs.max_abs(), 1.0) < 1e-12


class TestFlowDerivative:
    def test_single_x2_factor(self):
        g = GroupElement((GroupFactor(X2, 0.7, parameter_rate=0.3),))
        assert flow_derivative(g).is_close(elem(x2=0.3))

    def test_p_then_x(self):
        eps, lam = 0.4, -0.8
        deps, dlam = 0.2, 0.5
        g = GroupElement((GroupFactor(P, eps, deps), GroupFactor(X, lam, dlam)))
        expected = elem(p=deps, x=dlam, one=-1j * eps * dlam)
        assert (flow_derivative(g) - expected).max_abs() < 1e-14

    def test_zero_rates(self):
        g = GroupElement((GroupFactor(X2, 0.7, 0.0), GroupFactor(P, 0.2, 0.0)))
        assert flow_derivative(g).max_abs() == 0.0

    def test_missing_rate_raises(self):
        g = GroupElement((GroupFactor(X2, 0.7),))
        with pytest.raises(ValueError):
            flow_derivative(g)


def test_group_merged():
    g = GroupElement((GroupFactor(X, 0.3, 0.1), GroupFactor(X, 0.2, 0.4),
                      GroupFactor(P, 0.5)))
    m = g.merged()
    assert len(m.factors) == 2
    assert m.factors[0].parameter == pytest.approx(0.5)
    assert m.factors[0].parameter_rate == pytest.approx(0.5)


def test_identity_generator_rejected():
    with pytest.raises(ValueError):
        GroupFactor(ONE, 0.1)
