"""Torus skein algebra and its isomorphism onto the even q-Weyl subring.

A skein element is a finite sum ``c (a,b)`` of torus curves, with
``(a,b) = (-a,-b)``.  The map

    phi(a,b) = (-1)^(a+b) q^(-ab/2) (E^a Q^b + E^-a Q^-b),   phi(0,0) = 1

is a ring isomorphism onto the ``tau``-fixed operators, so the skein product
is computed by conjugation through it.  The product-to-sum rule is kept as a
separate cross-check.

The solid torus side (polynomials in the core curve ``alpha``) carries the
Chebyshev bases ``S_n`` and ``T_n`` and the right action of skein elements.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .coeffs import Laurent, _split_terms
from .errors import NotEven, NotInImage, OracleMismatch, ParseError
from .weyl import E, ONE, WeylElement, DiscreteFunction, tau, weyl_mul

__all__ = [
    "SkeinElement",
    "SolidTorusElement",
    "Convention",
    "chebyshev_s",
    "chebyshev_t",
    "phi",
    "phi_inverse",
    "skein_mul",
    "product_to_sum",
    "gelca_action",
    "recursion_from_orthogonal",
    "displayed_recursion_operator",
    "rec_combination",
    "pairing_combination",
    "gelca_element",
    "printed_recursion_element",
    "find_unit",
]


def _canon(a: int, b: int) -> tuple[int, int]:
    if a > 0 or (a == 0 and b >= 0):
        return a, b
    return -a, -b


def _qpow(e) -> Laurent:
    return Laurent.monomial(e)


class SkeinElement:
    """Finite sum of torus curves ``(a, b)`` with Laurent coefficients."""

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[tuple[int, int], Laurent | int | Fraction | str] | None = None):
        t: dict[tuple[int, int], Laurent] = {}
        for (a, b), c in (terms or {}).items():
            if isinstance(c, str):
                c = Laurent.parse(c)
            elif not isinstance(c, Laurent):
                c = Laurent.const(c)
            if int(a) != a or int(b) != b:
                raise ValueError("skein curves have integer slopes")
            k = _canon(int(a), int(b))
            v = t[k] + c if k in t else c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        self._t = t

    @classmethod
    def curve(cls, a: int, b: int, coef=1) -> "SkeinElement":
        return cls({(a, b): coef})

    def items(self):
        return sorted(self._t.items())

    def __bool__(self):
        return bool(self._t)

    def __add__(self, other: "SkeinElement") -> "SkeinElement":
        out = dict(self._t)
        for k, c in other._t.items():
            out[k] = out[k] + c if k in out else c
        return SkeinElement(out)

    def __neg__(self):
        return SkeinElement({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "SkeinElement":
        return SkeinElement({k: v * c for k, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, SkeinElement):
            return skein_mul(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, SkeinElement) and self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def to_json(self) -> dict:
        return {"terms": [{"a": a, "b": b, "coef": str(c)} for (a, b), c in self.items()]}

    @classmethod
    def from_json(cls, obj) -> "SkeinElement":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return _sum_terms(obj["terms"])
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"bad skein element: {e}") from None

    @classmethod
    def parse(cls, s: str) -> "SkeinElement":
        """Parse ``(1,-5) - q^(-4)*(1,-1) + 2*(0,0)``."""
        if not isinstance(s, str) or not s.strip():
            raise ParseError("empty skein element")
        s = s.replace(" ", "")
        out = SkeinElement()
        if s == "0":
            return out
        for term in _split_terms(s):
            sign = 1
            while term and term[0] in "+-":
                sign = -sign if term[0] == "-" else sign
                term = term[1:]
            i = term.rfind("(")
            if i < 0 or not term.endswith(")"):
                raise ParseError(f"term {term!r} has no curve (a,b)")
            pair = term[i + 1:-1].split(",")
            if len(pair) != 2:
                raise ParseError(f"bad curve in {term!r}")
            try:
                a, b = int(pair[0]), int(pair[1])
            except ValueError:
                raise ParseError(f"bad curve in {term!r}") from None
            prefix = term[:i]
            if prefix:
                if not prefix.endswith("*"):
                    raise ParseError(f"expected '*' before the curve in {term!r}")
                prefix = prefix[:-1]
                if prefix.startswith("(") and prefix.endswith(")"):
                    prefix = prefix[1:-1]
                coef = Laurent.parse(prefix)
            else:
                coef = Laurent.const(1)
            out = out + SkeinElement({(a, b): coef * sign})
        return out

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for (a, b), c in sorted(self._t.items(), reverse=True):
            curve = f"({a},{b})"
            if c == 1:
                body = curve
            elif c == -1:
                body = "-" + curve
            elif len(c) == 1:
                body = f"{c}*{curve}"
            else:
                body = f"({c})*{curve}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"SkeinElement({str(self)!r})"


def _sum_terms(terms) -> SkeinElement:
    out = SkeinElement()
    for t in terms:
        out = out + SkeinElement({(int(t["a"]), int(t["b"])): Laurent.parse(str(t["coef"]))})
    return out


# ---------------------------------------------------------------------------
# Chebyshev polynomials, coefficient tuples from degree 0 upwards


def _cheb(n: int, seed0: tuple, seed1: tuple) -> tuple[int, ...]:
    prev, cur = seed0, seed1
    if n == 0:
        return prev
    for _ in range(n - 1):
        nxt = [0] * (len(cur) + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] += c
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, tuple(nxt)
    return cur


def chebyshev_s(n: int) -> tuple[int, ...]:
    """``S_n`` with ``S_0 = 1``, ``S_1 = x``; ``S_-1 = 0``, ``S_{-n-2} = -S_n``."""
    if n == -1:
        return ()
    if n < -1:
        return tuple(-c for c in chebyshev_s(-n - 2))
    return _cheb(n, (1,), (0, 1))


def chebyshev_t(n: int) -> tuple[int, ...]:
    """``T_n`` with ``T_0 = 2``, ``T_1 = x``; ``T_-n = T_n``."""
    return _cheb(abs(n), (2,), (0, 1))


def _resolve_s(n: int) -> tuple[int, int]:
    """Write ``S_n`` as ``sign * S_m`` with ``m >= 0`` (sign 0 for ``S_-1``)."""
    if n >= 0:
        return 1, n
    if n == -1:
        return 0, 0
    return -1, -n - 2


class SolidTorusElement:
    """Polynomial in the core curve ``alpha`` with Laurent coefficients.

    Stored in the power basis; :meth:`from_s`, :meth:`to_s`, :meth:`from_t`
    and :meth:`to_t` convert to and from the Chebyshev bases.
    """

    __slots__ = ("power",)

    def __init__(self, power: list | tuple = ()):
        p = [c if isinstance(c, Laurent) else Laurent.const(c) for c in power]
        while p and not p[-1]:
            p.pop()
        self.power = tuple(p)

    @classmethod
    def _from_basis(cls, coeffs: Mapping[int, Laurent], poly) -> "SolidTorusElement":
        size = max((n for n in coeffs), default=-1) + 1
        out = [Laurent()] * (size + 1)
        for n, c in coeffs.items():
            for i, v in enumerate(poly(n)):
                if v:
                    out[i] = out[i] + c * v
        return cls(out)

    @classmethod
    def from_s(cls, coeffs: Mapping[int, Laurent | int]) -> "SolidTorusElement":
        resolved: dict[int, Laurent] = {}
        for n, c in coeffs.items():
            sign, m = _resolve_s(n)
            if sign:
                c = c if isinstance(c, Laurent) else Laurent.const(c)
                resolved[m] = resolved.get(m, Laurent()) + c * sign
        return cls._from_basis(resolved, chebyshev_s)

    @classmethod
    def from_t(cls, coeffs: Mapping[int, Laurent | int]) -> "SolidTorusElement":
        merged: dict[int, Laurent] = {}
        for n, c in coeffs.items():
            c = c if isinstance(c, Laurent) else Laurent.const(c)
            merged[abs(n)] = merged.get(abs(n), Laurent()) + c
        return cls._from_basis(merged, chebyshev_t)

    def _to_basis(self, poly, lead_at_zero: int) -> dict[int, Laurent]:
        rest = list(self.power)
        out: dict[int, Laurent] = {}
        for n in range(len(rest) - 1, -1, -1):
            c = rest[n]
            if not c:
                continue
            if n == 0:
                c = c * Fraction(1, lead_at_zero)
            out[n] = c
            for i, v in enumerate(poly(n)):
                if v:
                    rest[i] = rest[i] - c * v
        return dict(sorted(out.items()))

    def to_s(self) -> dict[int, Laurent]:
        return self._to_basis(chebyshev_s, 1)

    def to_t(self) -> dict[int, Laurent]:
        return self._to_basis(chebyshev_t, 2)

    def times_alpha(self) -> "SolidTorusElement":
        return SolidTorusElement((Laurent(),) + self.power)

    def __add__(self, other):
        n = max(len(self.power), len(other.power))
        a = self.power + (Laurent(),) * (n - len(self.power))
        b = other.power + (Laurent(),) * (n - len(other.power))
        return SolidTorusElement([x + y for x, y in zip(a, b)])

    def __eq__(self, other):
        return isinstance(other, SolidTorusElement) and self.power == other.power

    def __hash__(self):
        return hash(self.power)

    def __repr__(self):
        return "SolidTorusElement(S: " + ", ".join(f"{n}: {c}" for n, c in self.to_s().items()) + ")"


# ---------------------------------------------------------------------------
# the isomorphism


def _phi_curve(a: int, b: int) -> WeylElement:
    if a == 0 and b == 0:
        return ONE
    unit = _qpow(Fraction(-a * b, 2)) * (-1 if (a + b) % 2 else 1)
    return WeylElement.monomial(a, b, unit) + WeylElement.monomial(-a, -b, unit)


def phi(x: SkeinElement) -> WeylElement:
    """The isomorphism onto the even subring, extended linearly."""
    out = WeylElement()
    for (a, b), c in x._t.items():
        out = out + _phi_curve(a, b).map_coefficients(lambda v: v * c)
    return out


def phi_inverse(x: WeylElement) -> SkeinElement:
    """Inverse of :func:`phi` on even operators with integer exponents."""
    if not x.is_integral():
        raise NotInImage("half-integer exponents have no skein preimage")
    if tau(x) != x:
        raise NotEven(f"{x} is not fixed by tau")
    out: dict[tuple[int, int], Laurent] = {}
    for (a, b), c in x.items():
        if (a, b) != _canon(a, b):
            continue
        if (a, b) == (0, 0):
            out[(0, 0)] = c
            continue
        unit = _qpow(Fraction(-a * b, 2)) * (-1 if (a + b) % 2 else 1)
        out[(a, b)] = c.exact_div(unit)
    return SkeinElement(out)


def skein_mul(x: SkeinElement, y: SkeinElement) -> SkeinElement:
    """Skein product, computed as ``phi^-1(phi(x) phi(y))``."""
    return phi_inverse(weyl_mul(phi(x), phi(y)))


def product_to_sum(x: SkeinElement, y: SkeinElement) -> SkeinElement:
    """Skein product by the product-to-sum rule with ``t = q^(1/2)``.

    ``(a,b)*(c,d) = t^(ad-bc) (a+c,b+d) + t^-(ad-bc) (a-c,b-d)``, where a
    resulting ``(0,0)`` stands for two copies of the empty curve.  This is an
    independent route to :func:`skein_mul` used by the tests.
    """
    out = SkeinElement()
    for (a, b), c1 in x._t.items():
        for (c, d), c2 in y._t.items():
            coef = c1 * c2
            if (a, b) == (0, 0) or (c, d) == (0, 0):
                out = out + SkeinElement({(a + c, b + d): coef})
                continue
            det = a * d - b * c
            for (p, r), e in (((a + c, b + d), det), ((a - c, b - d), -det)):
                mult = 2 if (p, r) == (0, 0) else 1
                out = out + SkeinElement({(p, r): coef * _qpow(Fraction(e, 2)) * mult})
    return out


# ---------------------------------------------------------------------------
# action on the solid torus and the recursion it induces


def gelca_action(n: int, x: SkeinElement) -> SolidTorusElement:
    """Right action of ``x`` on ``T_n(alpha)``, returned in the S-basis data."""
    if n < 0:
        raise ValueError("the action is stated for n >= 0")
    coeffs: dict[int, Laurent] = {}

    def add(idx: int, c: Laurent):
        coeffs[idx] = coeffs.get(idx, Laurent()) + c

    for (a, b), c in x._t.items():
        base = c * _qpow(Fraction(a * b, 2)) * (-1 if b % 2 else 1)
        up = base * _qpow(n * b)
        down = base * _qpow(-n * b)
        add(n + a, up * _qpow(b))
        add(n + a - 2, -up * _qpow(-b))
        add(n - a - 2, -down * _qpow(b))
        add(n - a, down * _qpow(-b))
    return SolidTorusElement.from_s(coeffs)


def displayed_recursion_operator(x: SkeinElement) -> WeylElement:
    """The four-term operator sum, multiplied out with ``Q`` written left.

    For curves other than ``(0,0)`` this equals ``(E - E^-1) phi(x)``; a
    ``(0,0)`` term contributes twice that, since the action reads ``(0,0)``
    as ``T_0 = 2``.
    """
    out = WeylElement()
    for (a, b), c in x._t.items():
        unit = c * _qpow(Fraction(a * b, 2)) * (-1 if (a + b) % 2 else 1)
        pieces = [
            (_qpow(b), b, a + 1),
            (-_qpow(-b), b, a - 1),
            (-_qpow(b), -b, -a - 1),
            (_qpow(-b), -b, -a + 1),
        ]
        for coef, qe, ee in pieces:
            out = out + weyl_mul(WeylElement.monomial(0, qe, unit * coef), WeylElement.monomial(ee, 0))
    return out


def recursion_from_orthogonal(x: SkeinElement) -> tuple[WeylElement, WeylElement]:
    """Return ``(full, reduced)`` with ``reduced = phi(x)``.

    ``full = (E - E^-1) reduced`` is the operator read off the action; it is
    cross-checked against :func:`displayed_recursion_operator`.
    """
    reduced = phi(x)
    full = weyl_mul(E - E ** -1, reduced)
    c00 = x._t.get((0, 0))
    adjusted = x if c00 is None else x - SkeinElement({(0, 0): c00 * Fraction(1, 2)})
    if displayed_recursion_operator(adjusted) != full:
        raise OracleMismatch("four-term recursion operator disagrees with (E - E^-1) phi(x)")
    return full, reduced


def rec_combination(x: SkeinElement, J: DiscreteFunction, n: int) -> Laurent:
    """Evaluate the recursion induced by the action at index ``n`` on ``J``."""
    acc = Laurent()
    for (a, b), c in x._t.items():
        base = c * _qpow(Fraction(a * b, 2)) * (-1 if (a + b) % 2 else 1)
        acc = acc + base * _qpow(n * b) * (_qpow(b) * J(n + a + 1) - _qpow(-b) * J(n + a - 1))
        acc = acc + base * _qpow(-n * b) * (-_qpow(b) * J(n - a - 1) + _qpow(-b) * J(n - a + 1))
    return acc


def pairing_combination(x: SkeinElement, J: DiscreteFunction, n: int) -> Laurent:
    """Act on ``T_n`` and pair with the empty link via ``<S_j> = (-1)^j J_{j+1}``."""
    acc = Laurent()
    for j, c in gelca_action(n, x).to_s().items():
        acc = acc + c * J(j + 1) * (-1 if j % 2 else 1)
    return acc


# ---------------------------------------------------------------------------
# the worked torus-knot example and conventions


def gelca_element(k: int) -> SkeinElement:
    """``(1,-2k-3) - q^-4 (1,-2k+1) + q^((2k-5)/2) (0,2k+3) - q^((2k-1)/2) (0,2k-1)``."""
    return SkeinElement({
        (1, -2 * k - 3): 1,
        (1, -2 * k + 1): Laurent.monomial(-4, -1),
        (0, 2 * k + 3): Laurent.monomial(Fraction(2 * k - 5, 2)),
        (0, 2 * k - 1): Laurent.monomial(Fraction(2 * k - 1, 2), -1),
    })


def printed_recursion_element(k: int) -> WeylElement:
    """The operator for the left handed ``(2, 2k+1)`` torus knot, as printed."""
    m = WeylElement.monomial
    return (
        m(1, -2 * k - 3, Laurent.monomial(2, -1)) + m(-1, 2 * k + 3, Laurent.monomial(2, -1))
        + m(1, -2 * k + 1, Laurent.monomial(-4)) + m(-1, 2 * k - 1, Laurent.monomial(-4))
        + m(0, 2 * k + 3, Laurent.monomial(-2)) + m(0, -2 * k - 3, Laurent.monomial(-2))
        - m(0, 2 * k - 1) - m(0, -2 * k + 1)
    )


def find_unit(x: WeylElement, y: WeylElement) -> tuple[int, Fraction] | None:
    """Return ``(sign, e)`` with ``x = sign * q^e * y``, or ``None``."""
    if not y or not x:
        return None
    (key, cy), = [next(iter(y.dterms().items()))]
    cx = x.dterms().get(key)
    if cx is None:
        return None
    try:
        ratio = cx.exact_div(cy)
    except ValueError:
        return None
    if not ratio.is_monomial():
        return None
    (e, c), = ratio.terms()
    if c not in (1, -1):
        return None
    if y.map_coefficients(lambda v: v * ratio) != x:
        return None
    return int(c), e


@dataclass(frozen=True)
class Convention:
    """How an externally sourced operator is matched to our sequences.

    ``gelca_variable`` reads the printed ``q, Q`` as ``q^(1/2), Q^(1/2)``;
    ``mirror`` uses ``J_n(q^-1)``; ``shift`` uses ``J_{n+shift}``; ``sign``
    multiplies by ``(-1)^n``.  The default is the identity.
    """

    gelca_variable: bool = False
    mirror: bool = False
    shift: int = 0
    sign: bool = False

    def operator(self, x: WeylElement) -> WeylElement:
        return x.gelca_variable() if self.gelca_variable else x

    def sequence(self, J: DiscreteFunction) -> DiscreteFunction:
        if not (self.mirror or self.shift or self.sign):
            return J
        s, mir, sg = self.shift, self.mirror, self.sign

        def rule(n: int) -> Laurent:
            v = J(n + s)
            if mir:
                v = v.invert_variable()
            return -v if sg and n % 2 else v

        lo = None if J.lo is None else J.lo - s
        hi = None if J.hi is None else J.hi - s
        return DiscreteFunction(rule, lo, hi, f"{J.label}[{self.tag()}]")

    def tag(self) -> str:
        return f"gelca_variable={int(self.gelca_variable)},mirror={int(self.mirror)},shift={self.shift},sign={int(self.sign)}"

    def as_dict(self) -> dict:
        return {"gelca_variable": self.gelca_variable, "mirror": self.mirror, "shift": self.shift, "sign": self.sign}

    @staticmethod
    def candidates() -> list["Convention"]:
        return [
            Convention(g, m, s, sg)
            for g in (False, True)
            for m in (False, True)
            for s in (0, -1, 1)
            for sg in (False, True)
        ]


# the convention under which the printed torus-knot operators annihilate the
# oracle sequences (found by search, see verify_recursion)
GELCA = Convention(gelca_variable=True, mirror=True, shift=0, sign=False)
