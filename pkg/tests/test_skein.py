import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _gen
from qholonomic import (
    DiscreteFunction,
    Laurent,
    SkeinElement,
    SolidTorusElement,
    WeylElement,
    chebyshev_s,
    chebyshev_t,
    phi,
    phi_inverse,
    recursion_from_orthogonal,
    skein_mul,
    tau,
    weyl_apply,
)
from qholonomic.errors import NotEven, NotInImage, ParseError
from qholonomic.skein import (
    Convention,
    displayed_recursion_operator,
    find_unit,
    gelca_element,
    pairing_combination,
    printed_recursion_element,
    product_to_sum,
    rec_combination,
)
from qholonomic.weyl import E
from strategies import skeins

t = Laurent.monomial(Fraction(1, 2))


def test_product_examples():
    a, b = SkeinElement.curve(1, 0), SkeinElement.curve(0, 1)
    assert skein_mul(a, b) == SkeinElement({(1, 1): t, (1, -1): t ** -1})
    assert skein_mul(a, a) == SkeinElement({(2, 0): 1, (0, 0): 2})


def test_curve_orientation_is_forgotten():
    assert SkeinElement.curve(-2, 3) == SkeinElement.curve(2, -3)
    assert SkeinElement.curve(0, -4) == SkeinElement.curve(0, 4)


@given(skeins(), skeins())
@settings(max_examples=80)
def test_product_to_sum_agrees_with_phi_route(x, y):
    assert skein_mul(x, y) == product_to_sum(x, y)


@given(skeins(), skeins(), skeins())
@settings(max_examples=30)
def test_skein_product_is_associative(x, y, z):
    assert skein_mul(skein_mul(x, y), z) == skein_mul(x, skein_mul(y, z))


@given(skeins())
def test_phi_image_is_tau_even(x):
    y = phi(x)
    assert tau(y) == y
    assert phi_inverse(y) == x


def test_phi_inverse_rejects_outside_image():
    with pytest.raises(NotEven):
        phi_inverse(E)
    with pytest.raises(NotInImage):
        phi_inverse(WeylElement.monomial(Fraction(1, 2), 0))


@given(skeins())
def test_text_and_json_round_trip(x):
    assert SkeinElement.parse(str(x)) == x
    assert SkeinElement.from_json(x.to_json()) == x


def test_parse_errors():
    with pytest.raises(ParseError):
        SkeinElement.parse("(1,2")
    with pytest.raises(ParseError):
        SkeinElement.parse("q*(1,x)")


def test_chebyshev_families():
    assert chebyshev_s(3) == (0, -2, 0, 1)
    assert chebyshev_t(3) == (0, -3, 0, 1)
    assert chebyshev_t(0) == (2,)
    assert chebyshev_s(-1) == () and chebyshev_s(-3) == (0, -1)


@given(st.dictionaries(st.integers(0, 6), st.integers(-4, 4).filter(bool), max_size=4))
def test_chebyshev_basis_round_trip(c):
    s = SolidTorusElement.from_s(c)
    assert s.to_s() == {n: Laurent.const(v) for n, v in sorted(c.items())}
    tt = SolidTorusElement.from_t(c)
    assert SolidTorusElement.from_t(tt.to_t()) == tt


def test_t_times_alpha_recurrence():
    for n in range(1, 6):
        lhs = SolidTorusElement.from_t({n: 1}).times_alpha()
        assert lhs == SolidTorusElement.from_t({n + 1: 1, n - 1: 1})


def test_printed_operators_match_up_to_units():
    for k in range(1, 6):
        assert find_unit(phi(gelca_element(k)), printed_recursion_element(k)) == (-1, Fraction(2 * k - 1, 2))
    assert find_unit(E, E + 1) is None


@given(skeins(span=3))
@settings(max_examples=40)
def test_full_operator_cross_check(x):
    full, reduced = recursion_from_orthogonal(x)
    assert reduced == phi(x)
    assert full == (E - E ** -1) * reduced


def test_empty_curve_counts_twice_in_displayed_operator():
    one = SkeinElement.curve(0, 0)
    assert displayed_recursion_operator(one) == (E - E ** -1) * 2


def _odd_sequence(rng):
    vals = {n: _gen.laurent(rng) for n in range(1, 12)}
    return DiscreteFunction(lambda n: Laurent() if n == 0 else (vals[n] if n > 0 else -vals[-n]), -11, 11)


def test_action_recursion_and_pairing_agree():
    rng = random.Random(3)
    for _ in range(20):
        x = _gen.skein(rng, size=3, terms=2)
        J = _odd_sequence(rng)
        full, _ = recursion_from_orthogonal(x)
        for n in range(0, 5):
            rec = rec_combination(x, J, n)
            assert pairing_combination(x, J, n) == rec * (-1) ** n
            if (0, 0) not in dict(x.items()):
                assert weyl_apply(full, J, n) == rec


def test_convention_candidates():
    cands = Convention.candidates()
    assert len(cands) == 24 and cands[0] == Convention()
    f = DiscreteFunction.quantum_integer()
    g = Convention(mirror=True, shift=1, sign=True).sequence(f)
    assert g(3) == -f(4).invert_variable()
    assert g(2) == f(3).invert_variable()
