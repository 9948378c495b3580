from fractions import Fraction

import pytest
from hypothesis import given, settings

from qholonomic import DiscreteFunction, Laurent, WeylElement, reflect, tau, weyl_apply, weyl_mul, z2_split
from qholonomic.errors import OutOfRange, ParseError
from qholonomic.weyl import E, ONE, Q, act
from strategies import weyls

q = Laurent.monomial(1)


def test_commutation_relation():
    assert weyl_mul(E, Q) == weyl_mul(Q, E) * q
    # (E^a Q^b)(E^c Q^d) = q^(-bc) E^(a+c) Q^(b+d)
    x = weyl_mul(WeylElement.monomial(1, 2), WeylElement.monomial(3, -1))
    assert x == WeylElement.monomial(4, 1, Laurent.monomial(-6))


def test_half_integer_monomials():
    h = WeylElement.monomial(Fraction(1, 2), 1)
    assert weyl_mul(h, h) == WeylElement.monomial(1, 2, Laurent.monomial(Fraction(-1, 2)))
    quarter = WeylElement.monomial(Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(ValueError):
        weyl_mul(quarter, quarter)


@given(weyls(), weyls(), weyls())
@settings(max_examples=60)
def test_associative_and_distributive(a, b, c):
    assert weyl_mul(weyl_mul(a, b), c) == weyl_mul(a, weyl_mul(b, c))
    assert weyl_mul(a, b + c) == weyl_mul(a, b) + weyl_mul(a, c)
    assert weyl_mul(ONE, a) == a == weyl_mul(a, ONE)


@given(weyls(), weyls())
def test_tau_is_a_ring_involution(a, b):
    assert tau(tau(a)) == a
    assert tau(weyl_mul(a, b)) == weyl_mul(tau(a), tau(b))


@given(weyls())
def test_z2_split(a):
    even, odd = z2_split(a)
    assert even + odd == a
    assert tau(even) == even and tau(odd) == -odd


@given(weyls(span=2), weyls(span=2))
@settings(max_examples=40)
def test_action_is_a_module_action(a, b):
    f = DiscreteFunction.quantum_integer()
    for n in range(-2, 3):
        assert weyl_apply(weyl_mul(a, b), f, n) == weyl_apply(a, act(b, f), n)


def test_basic_action():
    f = DiscreteFunction.quantum_integer()
    assert weyl_apply(E, f, 2) == f(3)
    assert weyl_apply(Q, f, 2) == q ** 2 * f(2)
    g = DiscreteFunction.from_table({0: 1, 1: "q", 2: "q^2"})
    with pytest.raises(OutOfRange):
        weyl_apply(E, g, 2)


def test_reflection_of_odd_function():
    f = DiscreteFunction.quantum_integer()
    r = reflect(f)
    assert all(r(n) == -f(n) for n in range(-4, 5))


@given(weyls(half_coeffs=True))
def test_text_and_json_round_trip(a):
    assert WeylElement.parse(str(a)) == a
    assert WeylElement.from_json(a.to_json()) == a


def test_parse_products():
    assert WeylElement.parse("Q*E") == weyl_mul(Q, E)
    assert WeylElement.parse("(q - 1)*E^2 + Q^(-1)") == WeylElement.monomial(2, 0, q - 1) + Q ** -1
    with pytest.raises(ParseError):
        WeylElement.parse("E^")
    with pytest.raises(ParseError):
        WeylElement.parse("E^(x)")


def test_gelca_variable_halves_q_and_Q():
    x = WeylElement.monomial(1, 2, q ** 3)
    assert x.gelca_variable() == WeylElement.monomial(1, 1, Laurent.monomial(Fraction(3, 2)))
