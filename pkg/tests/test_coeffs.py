from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qholonomic import Laurent, MultiLaurent, RationalFn, TruncatedSeries, series_expand
from qholonomic.coeffs import binomial
from qholonomic.errors import ParseError, PoleAtExpansionPoint
from strategies import laurents

q = Laurent.monomial(1)


def test_parse_and_print_round_trip():
    f = Laurent.parse("3*q^2 - q^(-1/2) + 1/2")
    assert str(f) == "3*q^2 + 1/2 - q^(-1/2)"
    assert Laurent.parse(str(f)) == f
    assert Laurent.parse("0") == Laurent()
    assert f.coefficient(Fraction(-1, 2)) == -1


@pytest.mark.parametrize("bad", ["q^", "3**q", "q^(1/0)", "(q", "x^2"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        Laurent.parse(bad)


@given(laurents(), laurents(), laurents())
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == Laurent()


@given(laurents())
def test_print_parse_inverse(a):
    assert Laurent.parse(str(a)) == a


@given(laurents(), laurents())
def test_exact_division_inverts_multiplication(a, b):
    if b:
        assert (a * b).exact_div(b) == a


@given(laurents(), laurents())
def test_inversion_is_a_ring_map(a, b):
    assert (a * b).invert_variable() == a.invert_variable() * b.invert_variable()
    assert a.invert_variable().invert_variable() == a


@given(laurents(half=False), laurents(half=False))
def test_derivative_leibniz(a, b):
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


def test_half_power_series_by_binomial():
    s = Laurent.monomial(Fraction(1, 2)).series(3)
    assert s.coeffs == (1, Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16))
    assert [binomial(Fraction(1, 2), k) for k in range(4)] == list(s.coeffs)


@given(laurents(), laurents())
@settings(max_examples=50)
def test_series_is_multiplicative(a, b):
    assert (a * b).series(4) == a.series(4) * b.series(4)


def test_multilaurent_euler_and_at_one():
    P = MultiLaurent.parse("lam^2*u*q - 3*u^(-1) + lam")
    assert P.euler("lam") == MultiLaurent.parse("2*lam^2*u*q + lam")
    assert P.at_one("lam").at_one("q").to_laurent() == Laurent.parse("u + 1 - 3*u^(-1)", var="u")


@given(st.lists(st.fractions(max_denominator=5).map(Fraction), min_size=1, max_size=5))
def test_series_reciprocal(cs):
    if cs[0] == 0:
        cs[0] = Fraction(1)
    s = TruncatedSeries(cs)
    one = s * s.reciprocal()
    assert one == TruncatedSeries.constant(1, s.order)


def test_compose_binomials():
    inner = TruncatedSeries.binomial(2, 4) - 1
    outer = TruncatedSeries.binomial(Fraction(1, 2), 4)
    assert outer.compose(inner) == TruncatedSeries.binomial(1, 4)


def test_rational_function_taylor_and_poles():
    f = RationalFn([1], [2, -1])  # 1/(2 - u)
    assert f.taylor(3, 1).coeffs == (1, 1, 1, 1)
    with pytest.raises(PoleAtExpansionPoint):
        RationalFn([1], [-1, 1])
    g = RationalFn([0, 0, 1])
    assert (f * g / g) == f
    assert f(Fraction(3, 2)) == 2


def test_series_expand_helper():
    assert series_expand(q ** 2 - 1, order=3).coeffs == (0, 2, 1, 0)
