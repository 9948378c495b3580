"""Exact coefficient arithmetic.

Everything downstream is built on four value types:

* :class:`Laurent` -- a Laurent polynomial in one variable whose exponents are
  half-integers, with rational coefficients (``Q[q^{+-1/2}]``).
* :class:`MultiLaurent` -- the same in several variables.
* :class:`TruncatedSeries` -- a power series cut off at a fixed order.
* :class:`RationalFn` -- a reduced quotient of polynomials in ``u`` over ``Q``.

Half-integer exponents are stored doubled, so ``q^(1/2)`` is the key ``1``
and ``q^-3`` is the key ``-6``.  All values are immutable.

Text grammar (used by every module and by the CLI)::

    poly   := ["-"] term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := number | name ["^" exp]
    number := int | int "/" int
    exp    := int | "-" int | "(" ["-"] int ["/" int] ")"

Examples: ``-q^2``, ``q^(-1/2)``, ``3/2*q^3``, ``lam*u^(-1)*q^(1/2) - 1``.
Output is canonical: terms sorted by descending exponent, coefficient ``1``
omitted, non-positive or fractional exponents parenthesised.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, PoleAtExpansionPoint

Number = int | Fraction

__all__ = [
    "Laurent",
    "MultiLaurent",
    "TruncatedSeries",
    "RationalFn",
    "laurent_mul",
    "series_expand",
    "parse_laurent",
    "parse_multi",
    "binomial",
    "rational_sqrt",
]


def _norm(c) -> Number:
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise TypeError(f"unsupported coefficient {c!r}")


def doubled(e) -> int:
    """Return ``2*e`` as an int, refusing exponents outside ``1/2 Z``."""
    if isinstance(e, int):
        return 2 * e
    d = Fraction(e) * 2
    if d.denominator != 1:
        raise ValueError(f"exponent {e} is not a half-integer")
    return int(d)


def binomial(e: Number, k: int) -> Number:
    """Generalised binomial coefficient ``C(e, k)`` for rational ``e``."""
    num = Fraction(1)
    for j in range(k):
        num *= e - j
    return _norm(num / factorial(k))


def rational_sqrt(x: Number) -> Fraction:
    x = Fraction(x)
    if x < 0:
        raise ValueError(f"{x} has no rational square root")
    n, d = _isqrt_exact(x.numerator), _isqrt_exact(x.denominator)
    if n is None or d is None:
        raise ValueError(f"{x} is not the square of a rational")
    return Fraction(n, d)


def _isqrt_exact(n: int):
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


# ---------------------------------------------------------------------------
# text format


def _fmt_num(c: Number) -> str:
    return str(c)


def _fmt_power(name: str, d: int) -> str:
    """Format ``name^(d/2)``; ``d`` is a doubled exponent."""
    if d == 2:
        return name
    e = Fraction(d, 2)
    if e.denominator == 1 and e > 0:
        return f"{name}^{e}"
    return f"{name}^({e})"


def _fmt_terms(items: Iterable[tuple[Number, str]]) -> str:
    """Join ``(coefficient, monomial)`` pairs; an empty monomial means 1."""
    out = []
    for c, mono in items:
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _fmt_num(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_num(a)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out) if out else "0"


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_INT = re.compile(r"[+-]?\d+$")
_RAT = re.compile(r"(\d+)(?:/(\d+))?$")


def _split_terms(s: str) -> list[str]:
    terms, buf, depth = [], "", 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and buf.strip() and not buf.rstrip().endswith(("^", "*")):
            terms.append(buf)
            buf = ch
        else:
            buf += ch
    if buf.strip():
        terms.append(buf)
    return terms


def _parse_exp(tok: str) -> Fraction:
    tok = tok.strip()
    if tok.startswith("(") and tok.endswith(")"):
        tok = tok[1:-1].strip()
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad exponent {tok!r}") from None


def _parse_term(term: str, names: Sequence[str]) -> tuple[Number, dict[str, int]]:
    term = term.replace(" ", "")
    sign = 1
    while term and term[0] in "+-":
        if term[0] == "-":
            sign = -sign
        term = term[1:]
    if not term:
        raise ParseError("empty term")
    coef: Number = sign
    powers: dict[str, int] = {}
    depth, buf, factors = 0, "", []
    for ch in term:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            factors.append(buf)
            buf = ""
        else:
            buf += ch
    factors.append(buf)
    for f in factors:
        if not f:
            raise ParseError(f"empty factor in {term!r}")
        m = _RAT.match(f)
        if m:
            coef = coef * Fraction(f)
            continue
        name, caret, exp = f.partition("^")
        if not _NAME.match(name) or name not in names:
            raise ParseError(f"unknown symbol {name!r} (expected one of {list(names)})")
        if caret and not exp:
            raise ParseError(f"missing exponent in {f!r}")
        e = _parse_exp(exp) if exp else Fraction(1)
        try:
            powers[name] = powers.get(name, 0) + doubled(e)
        except ValueError as err:
            raise ParseError(str(err)) from None
    return _norm(Fraction(coef)), powers


def _parse_poly(s: str, names: Sequence[str]) -> dict[tuple[int, ...], Number]:
    if not isinstance(s, str):
        raise ParseError(f"expected a string, got {type(s).__name__}")
    s = s.strip()
    if not s:
        raise ParseError("empty polynomial")
    if s.count("(") != s.count(")"):
        raise ParseError(f"unbalanced parentheses in {s!r}")
    out: dict[tuple[int, ...], Number] = {}
    for t in _split_terms(s):
        c, p = _parse_term(t, names)
        key = tuple(p.get(n, 0) for n in names)
        out[key] = _norm(out.get(key, 0) + c)
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# univariate Laurent polynomials


class Laurent:
    """Laurent polynomial in one variable with half-integer exponents.

    ``terms`` maps *doubled* exponents to rational coefficients.  Arithmetic
    with plain ``int``/``Fraction`` scalars is supported on both sides.
    """

    __slots__ = ("_t", "var", "_h")

    def __init__(self, terms: Mapping[int, Number] | None = None, var: str = "q"):
        t = {}
        if terms:
            for e, c in terms.items():
                c = _norm(c)
                if c:
                    t[int(e)] = c
        self._t = t
        self.var = var
        self._h = None

    @classmethod
    def _wrap(cls, t: dict, var: str) -> "Laurent":
        obj = cls.__new__(cls)
        obj._t = t
        obj.var = var
        obj._h = None
        return obj

    @classmethod
    def monomial(cls, exponent: Number = 0, coef: Number = 1, var: str = "q") -> "Laurent":
        return cls({doubled(exponent): coef}, var)

    @classmethod
    def const(cls, c: Number, var: str = "q") -> "Laurent":
        return cls({0: c}, var)

    @classmethod
    def parse(cls, s: str, var: str = "q") -> "Laurent":
        return cls({k[0]: v for k, v in _parse_poly(s, (var,)).items()}, var)

    # -- inspection -------------------------------------------------------
    @property
    def dterms(self) -> dict[int, Number]:
        """Copy of the doubled-exponent -> coefficient map."""
        return dict(self._t)

    def items(self):
        return self._t.items()

    def terms(self) -> list[tuple[Fraction, Number]]:
        return [(Fraction(d, 2), c) for d, c in sorted(self._t.items())]

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def is_integral(self) -> bool:
        """True when every exponent is an integer."""
        return all(d % 2 == 0 for d in self._t)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def min_exp(self) -> Fraction:
        return Fraction(min(self._t), 2)

    def max_exp(self) -> Fraction:
        return Fraction(max(self._t), 2)

    def coefficient(self, exponent: Number) -> Number:
        return self._t.get(doubled(exponent), 0)

    def constant(self) -> Number:
        return self._t.get(0, 0)

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other) -> "Laurent":
        if isinstance(other, Laurent):
            if other.var != self.var and other._t and self._t:
                raise ValueError(f"variable mismatch: {self.var} vs {other.var}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Laurent({0: other}, self.var)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        t = dict(self._t)
        for e, c in o._t.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = _norm(v)
            else:
                t.pop(e, None)
        return Laurent._wrap(t, self.var if self._t else o.var)

    __radd__ = __add__

    def __neg__(self):
        return Laurent._wrap({e: -c for e, c in self._t.items()}, self.var)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return Laurent._wrap({}, self.var)
            return Laurent._wrap({e: _norm(c * other) for e, c in self._t.items()}, self.var)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        t: dict[int, Number] = {}
        for e1, c1 in self._t.items():
            for e2, c2 in o._t.items():
                e = e1 + e2
                t[e] = t.get(e, 0) + c1 * c2
        return Laurent._wrap({e: _norm(c) for e, c in t.items() if c}, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * (Fraction(1) / other)
        if isinstance(other, Laurent):
            return self.exact_div(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("integer powers only")
        if k < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self._t.items()
            return Laurent._wrap({e * k: _norm(Fraction(1) / Fraction(c) ** -k)}, self.var)
        result = Laurent({0: 1}, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def exact_div(self, other: "Laurent") -> "Laurent":
        """Divide, raising ``ValueError`` unless the quotient is Laurent."""
        if not other:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if not self:
            return Laurent._wrap({}, self.var)
        if other.is_monomial():
            (e, c), = other._t.items()
            return Laurent._wrap(
                {d - e: _norm(Fraction(v) / c) for d, v in self._t.items()}, self.var
            )
        # long division on s = q^(1/2); parity classes are handled naturally
        num = dict(self._t)
        dtop = max(other._t)
        dlow = min(other._t)
        lead = other._t[dtop]
        quot: dict[int, Number] = {}
        low_bound = min(num) - dlow
        while num:
            top = max(num)
            shift = top - dtop
            if shift < low_bound:
                raise ValueError(f"{self} is not divisible by {other}")
            c = Fraction(num[top]) / lead
            quot[shift] = _norm(c)
            for e, v in other._t.items():
                k = e + shift
                nv = num.get(k, 0) - c * v
                if nv:
                    num[k] = nv
                else:
                    num.pop(k, None)
        return Laurent._wrap(quot, self.var)

    def __eq__(self, other):
        if isinstance(other, Laurent):
            return self._t == other._t and (self.var == other.var or not self._t)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._t == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            if not self._t:
                self._h = hash(0)
            elif set(self._t) == {0}:
                self._h = hash(self._t[0])
            else:
                self._h = hash((self.var, frozenset(self._t.items())))
        return self._h

    # -- transformations --------------------------------------------------
    def invert_variable(self) -> "Laurent":
        """Substitute ``var -> var^-1``."""
        return Laurent._wrap({-e: c for e, c in self._t.items()}, self.var)

    def scale_exponents(self, factor: Number) -> "Laurent":
        """Substitute ``var -> var^factor``."""
        return Laurent({doubled(Fraction(e, 2) * factor): c for e, c in self._t.items()}, self.var)

    def rename(self, var: str) -> "Laurent":
        return Laurent._wrap(dict(self._t), var)

    def derivative(self) -> "Laurent":
        t = {}
        for e, c in self._t.items():
            if e:
                t[e - 2] = _norm(c * Fraction(e, 2))
        return Laurent._wrap(t, self.var)

    def at_one(self) -> Number:
        return _norm(sum(self._t.values(), Fraction(0)))

    def evaluate(self, x: Number) -> Number:
        x = Fraction(x)
        if x == 1:
            return self.at_one()
        root = rational_sqrt(x) if not self.is_integral() else None
        total = Fraction(0)
        for e, c in self._t.items():
            if e % 2 == 0:
                total += c * x ** (e // 2)
            else:
                total += c * root ** e
        return _norm(total)

    def series(self, order: int, point: Number = 1) -> "TruncatedSeries":
        """Taylor coefficients in ``(var - point)`` through ``order``."""
        point = Fraction(point)
        if point == 0:
            raise PoleAtExpansionPoint("Laurent polynomials are expanded away from 0")
        coeffs = [Fraction(0)] * (order + 1)
        root = None
        if not self.is_integral() and point != 1:
            root = rational_sqrt(point)
        for e, c in self._t.items():
            ex = Fraction(e, 2)
            if point == 1:
                scale = Fraction(1)
            elif e % 2 == 0:
                scale = point ** (e // 2)
            else:
                scale = root ** e
            # (p + t)^e = p^e (1 + t/p)^e
            for k in range(order + 1):
                coeffs[k] += c * scale * binomial(ex, k) / point**k
        return TruncatedSeries(coeffs)

    def __str__(self):
        return _fmt_terms((c, _fmt_power(self.var, e) if e else "") for e, c in sorted(self._t.items(), reverse=True))

    def __repr__(self):
        return f"Laurent({str(self)!r}, var={self.var!r})"


def laurent_mul(x: Laurent, y: Laurent) -> Laurent:
    return x * y


def parse_laurent(s: str, var: str = "q") -> Laurent:
    return Laurent.parse(s, var)


# ---------------------------------------------------------------------------
# multivariate


class MultiLaurent:
    """Laurent polynomial in several named variables, half-integer exponents."""

    __slots__ = ("_t", "vars")

    def __init__(self, terms: Mapping[tuple[int, ...], Number] | None = None, vars: Sequence[str] = ("lam", "u", "q")):
        self.vars = tuple(vars)
        t = {}
        for k, c in (terms or {}).items():
            if len(k) != len(self.vars):
                raise ValueError("exponent vector has wrong length")
            c = _norm(c)
            if c:
                t[tuple(int(x) for x in k)] = c
        self._t = t

    @classmethod
    def _wrap(cls, t, vars):
        obj = cls.__new__(cls)
        obj._t = t
        obj.vars = vars
        return obj

    @classmethod
    def monomial(cls, exps: Mapping[str, Number], coef: Number = 1, vars=("lam", "u", "q")) -> "MultiLaurent":
        vars = tuple(vars)
        return cls({tuple(doubled(exps.get(v, 0)) for v in vars): coef}, vars)

    @classmethod
    def parse(cls, s: str, vars=("lam", "u", "q")) -> "MultiLaurent":
        vars = tuple(vars)
        return cls(_parse_poly(s, vars), vars)

    def items(self):
        return self._t.items()

    def __bool__(self):
        return bool(self._t)

    def _lift(self, other):
        if isinstance(other, MultiLaurent):
            if other.vars != self.vars:
                raise ValueError("variable mismatch")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiLaurent({(0,) * len(self.vars): other}, self.vars)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        t = dict(self._t)
        for k, c in o._t.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = _norm(v)
            else:
                t.pop(k, None)
        return MultiLaurent._wrap(t, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return MultiLaurent._wrap({k: -c for k, c in self._t.items()}, self.vars)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiLaurent._wrap({k: _norm(c * other) for k, c in self._t.items() if c * other}, self.vars)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        t: dict = {}
        for k1, c1 in self._t.items():
            for k2, c2 in o._t.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                t[k] = t.get(k, 0) + c1 * c2
        return MultiLaurent._wrap({k: _norm(c) for k, c in t.items() if c}, self.vars)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, MultiLaurent):
            return self.vars == other.vars and self._t == other._t
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self._t.items())))

    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"{var} is not a variable of {self.vars}") from None

    def partial(self, var: str) -> "MultiLaurent":
        """Plain partial derivative in ``var``."""
        i = self._index(var)
        t = {}
        for k, c in self._t.items():
            if k[i]:
                nk = k[:i] + (k[i] - 2,) + k[i + 1:]
                t[nk] = _norm(t.get(nk, 0) + c * Fraction(k[i], 2))
        return MultiLaurent._wrap({k: v for k, v in t.items() if v}, self.vars)

    def euler(self, var: str) -> "MultiLaurent":
        """Euler derivative ``var * d/dvar``."""
        i = self._index(var)
        return MultiLaurent._wrap(
            {k: _norm(c * Fraction(k[i], 2)) for k, c in self._t.items() if k[i]}, self.vars
        )

    def at_one(self, var: str) -> "MultiLaurent":
        """Substitute ``var = 1``, dropping it from the variable list."""
        i = self._index(var)
        vars = self.vars[:i] + self.vars[i + 1:]
        t: dict = {}
        for k, c in self._t.items():
            nk = k[:i] + k[i + 1:]
            t[nk] = t.get(nk, 0) + c
        return MultiLaurent._wrap({k: _norm(v) for k, v in t.items() if v}, vars)

    def to_laurent(self) -> Laurent:
        if len(self.vars) != 1:
            raise ValueError(f"{self.vars} has more than one variable")
        return Laurent({k[0]: c for k, c in self._t.items()}, self.vars[0])

    def coefficients_in(self, var: str) -> dict[int, "MultiLaurent"]:
        """Group by the doubled exponent of ``var``."""
        i = self._index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        out: dict[int, dict] = {}
        for k, c in self._t.items():
            out.setdefault(k[i], {})[k[:i] + k[i + 1:]] = c
        return {e: MultiLaurent._wrap(t, rest) for e, t in out.items()}

    def __str__(self):
        def mono(k):
            return "*".join(_fmt_power(v, e) for v, e in zip(self.vars, k) if e)

        # descending lexicographic in the exponent vector
        return _fmt_terms((c, mono(k)) for k, c in sorted(self._t.items(), reverse=True))

    def __repr__(self):
        return f"MultiLaurent({str(self)!r}, vars={self.vars!r})"


def parse_multi(s: str, vars=("lam", "u", "q")) -> MultiLaurent:
    return MultiLaurent.parse(s, vars)


# ---------------------------------------------------------------------------
# truncated power series


class TruncatedSeries:
    """Power series ``sum c_k h^k`` known through ``h^order``.

    Coefficients may be any ring elements supporting ``+``, ``*`` and mixing
    with ``int`` (rationals, :class:`Laurent`, :class:`MultiLaurent`).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        if not len(coeffs):
            raise ValueError("a truncated series needs at least one coefficient")
        self.coeffs = tuple(_norm(c) if isinstance(c, (int, Fraction)) else c for c in coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def binomial(cls, exponent: Number, order: int) -> "TruncatedSeries":
        """``(1 + h)^exponent``."""
        return cls([binomial(Fraction(exponent), k) for k in range(order + 1)])

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries":
        return cls([c] + [0] * order)

    def coefficient(self, m: int):
        """``<f>_m``; only defined for ``m <= order``."""
        if m < 0:
            return 0
        if m > self.order:
            raise IndexError(f"coefficient {m} beyond truncation order {self.order}")
        return self.coeffs[m]

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs[: order + 1])

    def _other(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return TruncatedSeries((self.coeffs[0] + other,) + self.coeffs[1:])
        n = min(self.order, o.order)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs[: n + 1], o.coeffs[: n + 1])])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return TruncatedSeries([c * other for c in self.coeffs])
        n = min(self.order, o.order)
        out = []
        for k in range(n + 1):
            acc = 0
            for i in range(k + 1):
                acc = acc + self.coeffs[i] * o.coeffs[k - i]
            out.append(acc)
        return TruncatedSeries(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("use reciprocal() for negative powers")
        result = TruncatedSeries.constant(1, self.order)
        for _ in range(k):
            result = result * self
        return result

    def reciprocal(self) -> "TruncatedSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise PoleAtExpansionPoint("series with zero constant term has no reciprocal")
        inv0 = Fraction(1) / Fraction(c0)
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = sum((self.coeffs[i] * out[k - i] for i in range(1, k + 1)), Fraction(0))
            out.append(-acc * inv0)
        return TruncatedSeries(out)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner)``; ``inner`` must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must vanish at 0")
        n = min(self.order, inner.order)
        result = TruncatedSeries.constant(self.coeffs[n], n)
        inner = inner.truncate(n)
        for c in reversed(self.coeffs[:n]):
            result = result * inner + c
        return result

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"TruncatedSeries({[str(c) for c in self.coeffs]})"


# ---------------------------------------------------------------------------
# univariate rational functions over Q


def _ptrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _padd(a, b):
    n = max(len(a), len(b))
    return _ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim(out)


def _pdivmod(a, b):
    a = [Fraction(x) for x in a]
    b = _ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(_ptrim(a)) >= len(b):
        a = _ptrim(a)
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, y in enumerate(b):
            a[i + shift] -= c * y
    return _ptrim(q), _ptrim(a)


def _pgcd(a, b):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    if not a:
        return [Fraction(1)]
    lead = Fraction(a[-1])
    return [Fraction(x) / lead for x in a]


def _peval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _ptaylor(p, x0, order):
    """Coefficients of ``p(x0 + t)`` up to ``t^order``."""
    out = []
    cur = [Fraction(c) for c in p]
    for k in range(order + 1):
        out.append(_peval(cur, x0) / factorial(k) if cur else Fraction(0))
        cur = [i * c for i, c in enumerate(cur)][1:]
    return out


class RationalFn:
    """Reduced rational function ``num(u)/den(u)`` over ``Q``.

    The denominator is monic and must not vanish at ``point`` (the ring of
    functions regular at ``u = point``).
    """

    __slots__ = ("num", "den", "point")

    def __init__(self, num: Sequence[Number], den: Sequence[Number] = (1,), point: Number = 1):
        num = _ptrim(Fraction(c) for c in num)
        den = _ptrim(Fraction(c) for c in den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = _pgcd(num, den) if num else den
        if num:
            num, _ = _pdivmod(num, g)
        den, _ = _pdivmod(den, g)
        lead = den[-1]
        self.num = tuple(_norm(c / lead) for c in num)
        self.den = tuple(_norm(c / lead) for c in den)
        self.point = _norm(Fraction(point))
        if _peval(self.den, Fraction(self.point)) == 0:
            raise PoleAtExpansionPoint(f"denominator vanishes at u={self.point}")

    @classmethod
    def from_laurent(cls, f: Laurent, point: Number = 1) -> "RationalFn":
        if not f.is_integral():
            raise ValueError("half-integer exponents are not rational functions of u")
        if not f:
            return cls([], point=point)
        low = min(0, int(f.min_exp()))
        num = [0] * (int(f.max_exp()) - low + 1)
        for e, c in f.terms():
            num[int(e) - low] = c
        den = [0] * (-low) + [1]
        return cls(num, den, point)

    def _coerce(self, other):
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return RationalFn([other], point=self.point)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFn(_padd(_pmul(self.num, o.den), _pmul(o.num, self.den)), _pmul(self.den, o.den), self.point)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn([-c for c in self.num], self.den, self.point)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFn(_pmul(self.num, o.num), _pmul(self.den, o.den), self.point)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(_pmul(self.num, o.den), _pmul(self.den, o.num), self.point)

    def __eq__(self, other):
        if isinstance(other, RationalFn):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, x: Number) -> Number:
        d = _peval(self.den, Fraction(x))
        if d == 0:
            raise PoleAtExpansionPoint(f"pole at u={x}")
        return _norm(_peval(self.num, Fraction(x)) / d)

    def taylor(self, order: int, point: Number | None = None) -> TruncatedSeries:
        x0 = Fraction(self.point if point is None else point)
        den = TruncatedSeries(_ptaylor(self.den, x0, order))
        if den.coeffs[0] == 0:
            raise PoleAtExpansionPoint(f"denominator vanishes at u={x0}")
        num = TruncatedSeries(_ptaylor(self.num, x0, order) if self.num else [0] * (order + 1))
        return num * den.reciprocal()

    def __str__(self):
        def p(c):
            return _fmt_terms((c[i], _fmt_power("u", 2 * i) if i else "") for i in reversed(range(len(c))) if c[i])

        if self.den == (1,):
            return p(self.num)
        return f"({p(self.num)})/({p(self.den)})"

    __repr__ = __str__


def series_expand(f, order: int = 4, point: Number = 1, var: str = "q") -> TruncatedSeries:
    """Exact Taylor expansion of ``f`` at ``point`` through ``order``.

    * :class:`RationalFn` -- in ``(u - point)``.
    * :class:`Laurent` -- in ``(var - point)``; for ``q`` at 1 this is the
      expansion in ``h = q - 1``.
    * :class:`MultiLaurent` -- in ``(var - point)`` with coefficients in the
      remaining variables.
    """
    if isinstance(f, RationalFn):
        return f.taylor(order, point)
    if isinstance(f, Laurent):
        return f.series(order, point)
    if isinstance(f, MultiLaurent):
        groups = f.coefficients_in(var)
        rest = f.vars[:f._index(var)] + f.vars[f._index(var) + 1:]
        out = [MultiLaurent._wrap({}, rest)] * (order + 1)
        for d, coeff in groups.items():
            s = Laurent({d: 1}, var).series(order, point)
            out = [o + coeff * c for o, c in zip(out, s.coeffs)]
        return TruncatedSeries(out)
    raise TypeError(f"cannot expand {type(f).__name__}")
