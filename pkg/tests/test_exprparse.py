import math

import numpy as np
import pytest

from ptdyson.exprparse import (
    EvalError, ParseError, eval_jet2, eval_value, parse, to_source,
)


class TestParse:
    def test_precedence(self):
        assert eval_value(parse("1+2*3"), 0.0) == 7.0

    def test_sin_of_2t(self):
        ast = parse("sin(2*t)")
        assert eval_value(ast, 0.3) == pytest.approx(math.sin(0.6))

    def test_dangling_operator_offset(self):
        with pytest.raises(ParseError) as exc:
            parse("2*")
        assert exc.value.offset == 2

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier"):
            parse("2*q")

    def test_power_right_assoc(self):
        assert eval_value(parse("2^3^2"), 0.0) == 512.0

    def test_unary_minus_vs_power(self):
        # ^ binds tighter than unary minus: -2^2 = -(2^2)
        assert eval_value(parse("-2^2"), 0.0) == -4.0

    def test_whitespace_insensitive(self):
        assert eval_value(parse(" 1 + 2\t*3 "), 0.0) == 7.0

    def test_left_assoc_sub(self):
        assert eval_value(parse("10-3-2"), 0.0) == 5.0
        assert eval_value(parse("12/3/2"), 0.0) == 2.0

    def test_pi(self):
        assert eval_value(parse("cos(pi)"), 0.0) == pytest.approx(-1.0)

    def test_scientific_numbers(self):
        assert eval_value(parse("1.5e-3"), 0.0) == pytest.approx(1.5e-3)


class TestJet2:
    def test_polynomial(self):
        j = eval_jet2(parse("t^2"), 3.0)
        assert (j.f, j.df, j.d2f) == (9.0, 6.0, 2.0)

    def test_sin_at_zero(self):
        j = eval_jet2(parse("sin(t)"), 0.0)
        assert (j.f, j.df, j.d2f) == (0.0, 1.0, -0.0)

    def test_exp_half(self):
        j = eval_jet2(parse("exp(0.5*t)"), 0.0)
        assert (j.f, j.df, j.d2f) == (1.0, 0.5, 0.25)

    def test_division_by_zero(self):
        with pytest.raises(EvalError, match="division by zero"):
            eval_jet2(parse("1/(t-1)"), 1.0)

    def test_log_domain(self):
        with pytest.raises(EvalError, match="log"):
            eval_jet2(parse("log(t)"), -2.0)

    def test_negative_base_integer_power(self):
        j = eval_jet2(parse("(t-2)^3"), 1.0)
        assert (j.f, j.df, j.d2f) == (-1.0, 3.0, -6.0)

    def test_negative_base_real_power_raises(self):
        with pytest.raises(EvalError, match="non-positive base"):
            eval_jet2(parse("(0-2)^0.5"), 0.0)


SMOOTH_EXPRS = [
    "sin(2*t)+cos(t/3)",
    "exp(-0.3*t)*sin(t)",
    "t^3-2*t+1",
    "1/(2+sin(t))",
    "tanh(t)*t",
    "sqrt(2+cos(t))",
    "exp(sin(t)^2)",
    "(1+t^2)^1.5",
    "log(2+t^2)",
    "2^t",
]


@pytest.mark.parametrize("src", SMOOTH_EXPRS)
def test_derivatives_match_finite_differences(src):
    ast = parse(src)
    h = 1e-5
    rng = np.random.default_rng(42)
    for t in rng.uniform(0.2, 3.0, 5):
        j = eval_jet2(ast, t)
        fp = eval_value(ast, t + h)
        fm = eval_value(ast, t - h)
        f0 = eval_value(ast, t)
        d1 = (fp - fm) / (2 * h)
        d2 = (fp - 2 * f0 + fm) / h**2
        assert j.df == pytest.approx(d1, rel=1e-6, abs=1e-6)
        # central-difference f'' carries ~4*eps*|f|/h^2 roundoff noise
        assert j.d2f == pytest.approx(d2, rel=1e-6, abs=2e-4 * max(1.0, abs(j.f)))


@pytest.mark.parametrize("src", SMOOTH_EXPRS + ["-t^2", "-(t+1)*3", "t-(t-1)", "1-2-3"])
def test_printer_roundtrip(src):
    ast = parse(src)
    printed = to_source(ast)
    reparsed = parse(printed)
    assert to_source(reparsed) == printed
    for t in (0.3, 1.1, 2.7):
        assert eval_value(reparsed, t) == pytest.approx(eval_value(ast, t), rel=1e-14)
