"""Seeded random objects shared by the tests."""
from __future__ import annotations

import random
from fractions import Fraction

from qholonomic import CharPoly, Laurent, MultiLaurent, RationalFn, SkeinElement, WeylElement


def laurent(rng: random.Random, span: int = 4, half: bool = True, terms: int = 3) -> Laurent:
    out = Laurent()
    for _ in range(rng.randint(1, terms)):
        e = Fraction(rng.randint(-2 * span, 2 * span), 2) if half else rng.randint(-span, span)
        out = out + Laurent.monomial(e, rng.choice([-3, -2, -1, 1, 2, 3]))
    return out or Laurent.const(1)


def skein(rng: random.Random, size: int = 6, terms: int = 3) -> SkeinElement:
    out = SkeinElement()
    for _ in range(rng.randint(1, terms)):
        out = out + SkeinElement.curve(rng.randint(-size, size), rng.randint(-size, size), laurent(rng))
    return out


def weyl(rng: random.Random, size: int = 3, terms: int = 4, half: bool = False) -> WeylElement:
    out = WeylElement()
    for _ in range(rng.randint(1, terms)):
        out = out + WeylElement.monomial(rng.randint(-size, size), rng.randint(-size, size), laurent(rng, 3, half))
    return out


def char_poly(rng: random.Random, terms: int = 5) -> CharPoly:
    P = MultiLaurent()
    for _ in range(rng.randint(1, terms)):
        exps = {"lam": rng.randint(-2, 2), "u": rng.randint(-3, 3), "q": rng.randint(-3, 3)}
        P = P + MultiLaurent.monomial(exps, rng.choice([-2, -1, 1, 2, 3]))
    return CharPoly(P)


def rational(rng: random.Random) -> RationalFn:
    num = [rng.randint(-4, 4) for _ in range(rng.randint(1, 4))]
    while True:
        den = [rng.randint(-3, 3) for _ in range(rng.randint(1, 3))] + [1]
        if sum(den) != 0:
            return RationalFn(num, den)
