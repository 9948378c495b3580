"""The q-Weyl ring of difference operators and its action on sequences.

Elements are finite sums ``c(q) E^a Q^b`` kept in E-left normal order, with
``EQ = q QE``.  On a sequence ``f`` the generators act by
``(E f)_n = f_{n+1}`` and ``(Q f)_n = q^n f_n``.

Exponents ``a, b`` may be half-integers (stored doubled, like the Laurent
exponents) because normalising an annihilator introduces ``Q^(1/2)``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .coeffs import Laurent, _fmt_power, _split_terms, doubled
from .errors import OutOfRange, ParseError

__all__ = [
    "WeylElement",
    "DiscreteFunction",
    "weyl_mul",
    "weyl_apply",
    "tau",
    "z2_split",
    "reflect",
    "E",
    "Q",
    "ONE",
]

Key = tuple[int, int]


class WeylElement:
    """Finite sum of ``c_{a,b}(q) E^a Q^b``.

    ``terms`` maps doubled exponent pairs ``(2a, 2b)`` to :class:`Laurent`
    coefficients in ``q``.
    """

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[Key, Laurent | int | Fraction] | None = None):
        t = {}
        for k, c in (terms or {}).items():
            if not isinstance(c, Laurent):
                c = Laurent.const(c)
            if c:
                t[(int(k[0]), int(k[1]))] = c
        self._t = t

    @classmethod
    def _wrap(cls, t):
        obj = cls.__new__(cls)
        obj._t = t
        return obj

    @classmethod
    def monomial(cls, a=0, b=0, coef: Laurent | int | Fraction | str = 1) -> "WeylElement":
        if isinstance(coef, str):
            coef = Laurent.parse(coef)
        return cls({(doubled(a), doubled(b)): coef})

    @classmethod
    def scalar(cls, c) -> "WeylElement":
        return cls.monomial(0, 0, c)

    # -- inspection -------------------------------------------------------
    def items(self):
        """Yield ``((a, b), coef)`` with true (undoubled) exponents."""
        for (da, db), c in sorted(self._t.items()):
            yield (_half(da), _half(db)), c

    def dterms(self) -> dict[Key, Laurent]:
        return dict(self._t)

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def is_integral(self) -> bool:
        """True when no E or Q exponent is a proper half-integer."""
        return all(da % 2 == 0 and db % 2 == 0 for da, db in self._t)

    def coefficient(self, a, b) -> Laurent:
        return self._t.get((doubled(a), doubled(b)), Laurent())

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, WeylElement):
            return other
        if isinstance(other, (int, Fraction, Laurent)) and not isinstance(other, bool):
            return WeylElement({(0, 0): other})
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        t = dict(self._t)
        for k, c in o._t.items():
            v = t[k] + c if k in t else c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return WeylElement._wrap(t)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement._wrap({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return weyl_mul(self, o)

    def __rmul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return weyl_mul(o, self)

    def __pow__(self, k: int):
        if k < 0:
            if len(self._t) != 1:
                raise ValueError("only monomials are invertible")
            ((da, db), c), = self._t.items()
            if (da * db) % 2:
                raise ValueError("inverse needs q^(1/4)")
            # (E^aQ^b)(E^-aQ^-b) = q^{ab}
            twist = Laurent._wrap({-(da * db) // 2: 1}, "q")
            return WeylElement._wrap({(-da, -db): twist * c ** -1}) ** (-k)
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, WeylElement):
            return self._t == other._t
        if isinstance(other, (int, Fraction, Laurent)) and not isinstance(other, bool):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    # -- transforms -------------------------------------------------------
    def map_coefficients(self, fn: Callable[[Laurent], Laurent]) -> "WeylElement":
        return WeylElement({k: fn(c) for k, c in self._t.items()})

    def gelca_variable(self) -> "WeylElement":
        """Read the printed ``q`` and ``Q`` as a square root variable.

        Substitutes ``q -> q^(1/2)`` in every coefficient and ``Q -> Q^(1/2)``,
        leaving ``E`` alone.  This is a ring homomorphism.
        """
        out = {}
        for (da, db), c in self._t.items():
            if db % 2:
                raise ValueError("Q exponent is already a half-integer")
            out[(da, db // 2)] = c.scale_exponents(Fraction(1, 2))
        return WeylElement(out)

    def invert_q(self) -> "WeylElement":
        """Substitute ``q -> q^-1`` in the coefficients only."""
        return WeylElement._wrap({k: c.invert_variable() for k, c in self._t.items()})

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "terms": [
                {"a": _jexp(a), "b": _jexp(b), "coef": str(c)}
                for (a, b), c in self.items()
            ]
        }

    @classmethod
    def from_json(cls, obj) -> "WeylElement":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            terms = obj["terms"]
        except (KeyError, TypeError):
            raise ParseError("operator JSON needs a 'terms' list") from None
        out = ZERO
        for t in terms:
            try:
                a, b, c = _pexp(t["a"]), _pexp(t["b"]), Laurent.parse(str(t["coef"]))
            except KeyError as e:
                raise ParseError(f"term is missing {e}") from None
            out = out + WeylElement.monomial(a, b, c)
        return out

    @classmethod
    def parse(cls, s: str) -> "WeylElement":
        """Parse text such as ``-q^2*E*Q^(-5) + E^(-1) - 1``.

        Factors within a term are multiplied left to right in the ring, so
        ``Q*E`` is reordered to ``q^-1 E Q``.
        """
        if not isinstance(s, str) or not s.strip():
            raise ParseError("empty operator")
        s = s.replace(" ", "")
        total = ZERO
        for term in _split_terms(s):
            sign = 1
            while term and term[0] in "+-":
                sign = -sign if term[0] == "-" else sign
                term = term[1:]
            prod = WeylElement.scalar(sign)
            for f in _split_factors(term):
                name, caret, exp = f.partition("^")
                if name in ("E", "Q"):
                    if caret and not exp:
                        raise ParseError(f"missing exponent in {f!r}")
                    e = _pexp(exp.strip("()")) if exp else Fraction(1)
                    try:
                        mono = WeylElement.monomial(e, 0) if name == "E" else WeylElement.monomial(0, e)
                    except ValueError as err:
                        raise ParseError(str(err)) from None
                    prod = prod * mono
                elif f.startswith("(") and f.endswith(")"):
                    prod = prod * WeylElement.scalar(Laurent.parse(f[1:-1]))
                else:
                    prod = prod * WeylElement.scalar(Laurent.parse(f))
            total = total + prod
        return total

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for (da, db), c in sorted(self._t.items(), key=lambda kv: (-kv[0][0], -kv[0][1])):
            mono = "*".join(p for p in (_fmt_power("E", da) if da else "", _fmt_power("Q", db) if db else "") if p)
            if not mono:
                body = str(c)
            elif c == 1:
                body = mono
            elif c == -1:
                body = "-" + mono
            elif len(c) == 1:
                body = f"{c}*{mono}"
            else:
                body = f"({c})*{mono}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"WeylElement({str(self)!r})"


def _half(d: int):
    return d // 2 if d % 2 == 0 else Fraction(d, 2)


def _jexp(e):
    return e if isinstance(e, int) else str(e)


def _pexp(v) -> Fraction:
    try:
        return Fraction(v)
    except (ValueError, TypeError):
        raise ParseError(f"bad exponent {v!r}") from None


def _split_factors(term: str) -> list[str]:
    out, buf, depth = [], "", 0
    for ch in term:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append(buf)
            buf = ""
        else:
            buf += ch
    out.append(buf)
    if any(not f for f in out):
        raise ParseError(f"empty factor in {term!r}")
    return out


ZERO = WeylElement()
ONE = WeylElement({(0, 0): 1})
E = WeylElement({(2, 0): 1})
Q = WeylElement({(0, 2): 1})


def weyl_mul(x: WeylElement, y: WeylElement) -> WeylElement:
    """Normal-ordered product using ``(E^aQ^b)(E^cQ^d) = q^{-bc} E^{a+c} Q^{b+d}``."""
    t: dict[Key, Laurent] = {}
    for (a, b), c1 in x._t.items():
        for (c, d), c2 in y._t.items():
            # doubled q exponent of -b*c is -(2b)(2c)/2
            bc = b * c
            if bc % 2:
                raise ValueError("product leaves Q(q^(1/4)); exponents too fractional")
            coef = c1 * c2
            if bc:
                coef = Laurent._wrap({e - bc // 2: v for e, v in coef._t.items()}, "q")
            k = (a + c, b + d)
            t[k] = t[k] + coef if k in t else coef
    return WeylElement._wrap({k: v for k, v in t.items() if v})


def tau(x: WeylElement) -> WeylElement:
    """The involution ``E^a Q^b -> E^-a Q^-b`` (coefficients untouched)."""
    return WeylElement._wrap({(-a, -b): c for (a, b), c in x._t.items()})


def z2_split(x: WeylElement) -> tuple[WeylElement, WeylElement]:
    """Return ``(x_+, x_-)`` with ``x_+- = (x +- tau(x))/2``."""
    tx = tau(x)
    half = Fraction(1, 2)
    even = (x + tx).map_coefficients(lambda c: c * half)
    odd = (x - tx).map_coefficients(lambda c: c * half)
    return even, odd


# ---------------------------------------------------------------------------
# discrete functions


class DiscreteFunction:
    """A sequence ``n -> f_n(q)`` of Laurent polynomials.

    ``lo``/``hi`` bound the valid range (inclusive, ``None`` = unbounded).
    Sampling outside it raises :class:`OutOfRange`.
    """

    __slots__ = ("_rule", "lo", "hi", "label", "_memo")

    def __init__(self, rule: Callable[[int], Laurent], lo: int | None = None, hi: int | None = None, label: str = ""):
        self._rule = rule
        self.lo = lo
        self.hi = hi
        self.label = label
        self._memo: dict[int, Laurent] = {}

    @classmethod
    def from_table(cls, table: Mapping[int, Laurent | int | str], label: str = "table") -> "DiscreteFunction":
        data = {}
        for n, v in table.items():
            if isinstance(v, str):
                v = Laurent.parse(v)
            elif not isinstance(v, Laurent):
                v = Laurent.const(v)
            data[int(n)] = v
        if not data:
            raise ValueError("empty sample table")
        lo, hi = min(data), max(data)
        missing = [n for n in range(lo, hi + 1) if n not in data]
        if missing:
            raise ValueError(f"sample table has gaps at {missing}")
        return cls(data.__getitem__, lo, hi, label)

    @classmethod
    def closed_form(
        cls,
        terms: Iterable[tuple[Laurent | int, Fraction | int, Fraction | int]],
        denominator: Laurent | None = None,
        label: str = "closed form",
    ) -> "DiscreteFunction":
        """``f_n = sum c * q^(A n^2 + B n) / denominator``.

        ``A n^2 + B n`` must be a half-integer for every integer ``n``.
        """
        terms = [(c if isinstance(c, Laurent) else Laurent.const(c), Fraction(A), Fraction(B)) for c, A, B in terms]

        def rule(n: int) -> Laurent:
            acc = Laurent()
            for c, A, B in terms:
                acc = acc + c * Laurent.monomial(A * n * n + B * n)
            return acc.exact_div(denominator) if denominator is not None else acc

        return cls(rule, None, None, label)

    @classmethod
    def constant(cls, c=1) -> "DiscreteFunction":
        return cls.closed_form([(c, 0, 0)], label=f"constant {c}")

    @classmethod
    def quantum_integer(cls) -> "DiscreteFunction":
        """``[n] = (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2))``."""
        return cls.closed_form(
            [(1, 0, Fraction(1, 2)), (-1, 0, Fraction(-1, 2))],
            Laurent.parse("q^(1/2) - q^(-1/2)"),
            label="[n]",
        )

    def in_range(self, n: int) -> bool:
        return (self.lo is None or n >= self.lo) and (self.hi is None or n <= self.hi)

    def __call__(self, n: int) -> Laurent:
        if not self.in_range(n):
            raise OutOfRange(f"{self.label or 'sequence'} is not sampled at n={n} (range {self.lo}..{self.hi})")
        v = self._memo.get(n)
        if v is None:
            v = self._rule(n)
            self._memo[n] = v
        return v

    def table(self, lo: int, hi: int) -> dict[int, Laurent]:
        return {n: self(n) for n in range(lo, hi + 1)}

    def map(self, fn: Callable[[int, Laurent], Laurent], label: str = "") -> "DiscreteFunction":
        return DiscreteFunction(lambda n: fn(n, self(n)), self.lo, self.hi, label or self.label)

    def __repr__(self):
        return f"DiscreteFunction({self.label!r}, range={self.lo}..{self.hi})"


def weyl_apply(x: WeylElement, f: DiscreteFunction, n: int) -> Laurent:
    """``sum c_{a,b}(q) q^{(n+a) b} f_{n+a}(q)``."""
    acc = Laurent()
    for (da, db), c in x._t.items():
        if da % 2:
            raise ValueError("E must have an integer exponent to act on a sequence")
        a = da // 2
        val = f(n + a)
        if not val:
            continue
        shift = (n + a) * db  # doubled exponent of q^{(n+a) b}
        acc = acc + Laurent._wrap({e + shift: v for e, v in (c * val)._t.items()}, "q")
    return acc


def act(x: WeylElement, f: DiscreteFunction) -> DiscreteFunction:
    """``x`` applied to ``f`` as a new sequence, range shrunk as needed."""
    shifts = [da // 2 for da, _ in x._t] or [0]
    lo = None if f.lo is None else f.lo - min(shifts)
    hi = None if f.hi is None else f.hi - max(shifts)
    return DiscreteFunction(lambda n: weyl_apply(x, f, n), lo, hi, f"({x})({f.label})")


def reflect(f: DiscreteFunction) -> DiscreteFunction:
    """``(S f)(n) = f(-n)``; the range must be symmetric."""
    if (f.lo is None) != (f.hi is None) or (f.lo is not None and f.lo != -f.hi):
        raise OutOfRange(f"reflection needs a symmetric range, got {f.lo}..{f.hi}")
    return DiscreteFunction(lambda n: f(-n), f.lo, f.hi, f"S({f.label})")
