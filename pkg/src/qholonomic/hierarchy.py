"""From a q-difference operator to a triangular hierarchy of linear ODEs.

For ``X = sum c_{a,b}(q) E^a Q^b`` the characteristic polynomial is
``P(lam, u, q) = sum c_{a,b}(q) q^(ab) lam^a u^b``.  Writing ``q = 1 + h``,

    sum c_{a,b}(q) u^b q^(ab) f(u q^a) = sum_m h^m (D_m f)(u)

defines differential operators ``D_m`` of order at most ``m``.  If the loop
expansion ``sum_k Q_k(u) h^k`` is annihilated by ``X`` then every row
``sum_j D_{l+j} Q_{m-j}`` vanishes, where ``l`` is the first level with a
nonzero operator.  The rows are solved here as Taylor series at a point.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .coeffs import Laurent, MultiLaurent, TruncatedSeries
from .errors import AllZeroThroughM, OracleMismatch, ParseError, SingularAtExpansionPoint
from .weyl import WeylElement, weyl_mul

__all__ = [
    "CharPoly",
    "DiffOp",
    "Hierarchy",
    "LoopJet",
    "DegreeInvariants",
    "char_poly",
    "normalize_annihilator",
    "dm_operator",
    "dm_monomial_oracle",
    "displayed_d0",
    "displayed_d1",
    "displayed_d2",
    "second_order_operator",
    "degree_invariants",
    "build_hierarchy",
    "solve_hierarchy",
    "hierarchy_residuals",
]

VARS = ("lam", "u", "q")


class CharPoly:
    """``P(lam, u, q)`` as a :class:`MultiLaurent` in ``lam, u, q``."""

    __slots__ = ("P",)

    def __init__(self, P: MultiLaurent):
        if P.vars != VARS:
            raise ValueError(f"characteristic polynomials use variables {VARS}")
        self.P = P

    @classmethod
    def parse(cls, s: str) -> "CharPoly":
        return cls(MultiLaurent.parse(s, VARS))

    def __eq__(self, other):
        return isinstance(other, CharPoly) and self.P == other.P

    def __hash__(self):
        return hash(self.P)

    def __bool__(self):
        return bool(self.P)

    def derivative(self, n_lam: int, n_q: int) -> MultiLaurent:
        """``(lam d/dlam)^n_lam (d/dq)^n_q P``."""
        f = self.P
        for _ in range(n_q):
            f = f.partial("q")
        for _ in range(n_lam):
            f = f.euler("lam")
        return f

    def special(self, n_lam: int = 0, n_q: int = 0) -> Laurent:
        """The derivative above evaluated at ``lam = q = 1``, a Laurent in ``u``."""
        return self.derivative(n_lam, n_q).at_one("lam").at_one("q").to_laurent()

    def grouped(self) -> dict[tuple[int, int], Laurent]:
        """``{(2a, 2b): c~_{a,b}(q)}``."""
        out: dict[tuple[int, int], dict] = {}
        for (la, ub, qe), c in self.P.items():
            out.setdefault((la, ub), {})[qe] = c
        return {k: Laurent(v, "q") for k, v in out.items()}

    def __str__(self):
        return str(self.P)

    __repr__ = __str__


def char_poly(x: WeylElement) -> CharPoly:
    """Symbol of ``x`` with the twist ``c~_{a,b} = c_{a,b} q^(ab)``."""
    terms: dict[tuple[int, int, int], Fraction] = {}
    for (da, db), c in x.dterms().items():
        if (da * db) % 2:
            raise ValueError("the twist q^(ab) needs q^(1/4)")
        tw = da * db // 2
        for e, v in c.items():
            key = (da, db, e + tw)
            terms[key] = terms.get(key, 0) + v
    return CharPoly(MultiLaurent(terms, VARS))


def normalize_annihilator(x: WeylElement) -> WeylElement:
    """Turn an annihilator of ``J`` into one of ``J/[n]``.

    Multiplying a sequence by ``[n]`` is the operator
    ``(Q^(1/2) - Q^(-1/2)) / (q^(1/2) - q^(-1/2))``; clearing the constant
    leaves ``x (Q^(1/2) - Q^(-1/2))``.
    """
    half = WeylElement.monomial(0, Fraction(1, 2)) - WeylElement.monomial(0, Fraction(-1, 2))
    return weyl_mul(x, half)


# ---------------------------------------------------------------------------
# differential operators


class DiffOp:
    """``sum_j p_j(u) (d/du)^j`` with Laurent coefficients in ``u``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Laurent | int] = ()):
        c = [p if isinstance(p, Laurent) else Laurent.const(p, "u") for p in coeffs]
        c = [p.rename("u") for p in c]
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)

    @property
    def order(self):
        """Largest ``j`` with ``p_j != 0``; ``-inf`` for the zero operator."""
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def coefficient(self, j: int) -> Laurent:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else Laurent(var="u")

    def __eq__(self, other):
        return isinstance(other, DiffOp) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "DiffOp") -> "DiffOp":
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp([self.coefficient(j) + other.coefficient(j) for j in range(n)])

    def scale(self, c) -> "DiffOp":
        return DiffOp([p * c for p in self.coeffs])

    def apply(self, f: Laurent) -> Laurent:
        """Apply to a Laurent polynomial in ``u``."""
        f = f.rename("u")
        out = Laurent(var="u")
        for p in self.coeffs:
            out = out + p * f
            f = f.derivative()
        return out

    def coefficient_jets(self, order: int, point: Fraction) -> list[TruncatedSeries]:
        return [_jet_of(p, order, Fraction(point)) for p in self.coeffs]

    def apply_jet(self, jet: Sequence[Fraction], point: Fraction = Fraction(1)) -> list[Fraction]:
        """Taylor coefficients at ``point`` of ``D f`` given those of ``f``.

        Only the first ``len(jet) - order`` coefficients are determined.
        """
        if not self.coeffs:
            return [Fraction(0)] * len(jet)
        avail = len(jet) - 1 - self.order
        if avail < 0:
            return []
        pj = self.coefficient_jets(avail, point)
        out = []
        for i in range(avail + 1):
            acc = Fraction(0)
            for j, ser in enumerate(pj):
                for s in range(i + 1):
                    c = ser.coeffs[i - s]
                    if c:
                        acc += c * jet[s + j] * _falling(s + j, j)
            out.append(acc)
        return out

    def to_json(self) -> list[str]:
        return [str(p) for p in self.coeffs]

    @classmethod
    def from_json(cls, obj) -> "DiffOp":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls([Laurent.parse(s, "u") for s in obj])
        except TypeError as e:
            raise ParseError(str(e)) from None

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for j, p in enumerate(self.coeffs):
            if not p:
                continue
            d = "" if j == 0 else ("d/du" if j == 1 else f"(d/du)^{j}")
            if not d:
                parts.append(f"({p})")
            else:
                parts.append(d if p == 1 else f"({p})*{d}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOp({str(self)})"


def _falling(n: int, j: int) -> int:
    """``n! / (n - j)!``."""
    out = 1
    for i in range(j):
        out *= n - i
    return out


@lru_cache(maxsize=4096)
def _jet_cached(p: Laurent, order: int, point: Fraction) -> TruncatedSeries:
    return p.series(order, point)


def _jet_of(p: Laurent, order: int, point: Fraction) -> TruncatedSeries:
    return _jet_cached(p, order, point)


# ---------------------------------------------------------------------------
# the operators D_m


def dm_operator(P: CharPoly, m: int) -> DiffOp:
    """Coefficient of ``h^m`` in ``sum c~_{a,b}(1+h) u^b f(u (1+h)^a)``.

    Expands ``f(u(1+h)^a) = sum_j f^(j)(u) (u((1+h)^a - 1))^j / j!``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    coeffs: list[dict[int, Fraction]] = [dict() for _ in range(m + 1)]
    for (da, db), c in P.grouped().items():
        cser = c.series(m)
        a = Fraction(da, 2)
        step = TruncatedSeries.binomial(a, m) - 1
        power = TruncatedSeries.constant(Fraction(1), m)
        for j in range(m + 1):
            val = Fraction((cser * power).coefficient(m), math.factorial(j))
            if val:
                key = db + 2 * j
                coeffs[j][key] = coeffs[j].get(key, 0) + val
            power = power * step
    return DiffOp([Laurent(t, "u") for t in coeffs])


def dm_monomial_oracle(x: WeylElement | CharPoly, m: int, p: int, check: bool = True) -> Laurent:
    """``<X u^p>_m`` computed directly from ``X u^p = sum c q^(a(b+p)) u^(b+p)``.

    With ``check`` the result is compared against :func:`dm_operator`
    applied to ``u^p``; a disagreement raises :class:`OracleMismatch`.
    """
    P = x if isinstance(x, CharPoly) else char_poly(x)
    out: dict[int, Fraction] = {}
    for (da, db), c in P.grouped().items():
        # c~ q^{a p}
        shifted = c * Laurent.monomial(Fraction(da, 2) * p)
        v = shifted.series(m).coefficient(m)
        if v:
            out[db + 2 * p] = out.get(db + 2 * p, 0) + v
    direct = Laurent(out, "u")
    if check:
        via = dm_operator(P, m).apply(Laurent.monomial(p, var="u"))
        if via != direct:
            raise OracleMismatch(f"D_{m} u^{p}: expansion gives {via}, direct gives {direct}")
    return direct


def displayed_d0(P: CharPoly) -> DiffOp:
    return DiffOp([P.special()])


def displayed_d1(P: CharPoly) -> DiffOp:
    u = Laurent.monomial(1, var="u")
    return DiffOp([P.special(0, 1), P.special(1, 0) * u])


def displayed_d2(P: CharPoly) -> DiffOp:
    """The commonly quoted closed form of the second operator, taken literally.

    ``P_qq f + P_lq u f' + P_ll u^2 f'' + (P_ll - P_l) u f'``.  This is not
    the true coefficient of ``h^2``; see :func:`second_order_operator`.
    """
    u = Laurent.monomial(1, var="u")
    return DiffOp([
        P.special(0, 2),
        P.special(1, 1) * u + (P.special(2, 0) - P.special(1, 0)) * u,
        P.special(2, 0) * u * u,
    ])


def second_order_operator(P: CharPoly) -> DiffOp:
    """True ``D_2 = 1/2 [P_qq + 2 P_lq u d + P_ll u^2 d^2 + (P_ll - P_l) u d]``."""
    u = Laurent.monomial(1, var="u")
    half = Fraction(1, 2)
    return DiffOp([
        P.special(0, 2) * half,
        (P.special(1, 1) * 2 + P.special(2, 0) - P.special(1, 0)) * u * half,
        P.special(2, 0) * u * u * half,
    ])


@dataclass(frozen=True)
class DegreeInvariants:
    """``l`` and ``d`` from iterated derivatives ``P_I(1,u,1)``.

    ``d`` is the largest ``m`` with ``P_{I(l,m)} != 0`` (the order of
    ``D_0``); ``d_min`` is the smallest such ``m``, kept for comparison.
    """

    l: int
    d: int
    d_min: int
    nonzero: tuple[int, ...]


def degree_invariants(P: CharPoly, max_level: int) -> DegreeInvariants:
    """Compute ``l`` and ``d``; ``I(n,m)`` has ``m`` Euler and ``n-m`` ``q`` slots."""
    for n in range(max_level + 1):
        nz = tuple(m for m in range(n + 1) if P.special(m, n - m))
        if nz:
            return DegreeInvariants(n, max(nz), min(nz), nz)
    raise AllZeroThroughM(f"P_I(1,u,1) vanishes for every multi-index of length <= {max_level}")


# ---------------------------------------------------------------------------
# hierarchy


@dataclass(frozen=True)
class Hierarchy:
    """Operators ``D_m = cal D_{l+m}`` for ``m = 0..M-l``."""

    P: CharPoly
    l: int
    d: int
    ops: tuple[DiffOp, ...]
    M: int
    levels: tuple[DiffOp, ...]

    @property
    def regular(self) -> bool:
        return self.d == 1

    def to_json(self) -> dict:
        return {
            "P": str(self.P),
            "l": self.l,
            "d": self.d,
            "regular": self.regular,
            "M": self.M,
            "D": [op.to_json() for op in self.ops],
        }


def build_hierarchy(x: WeylElement | CharPoly, M: int) -> Hierarchy:
    """Compute ``cal D_0..cal D_M`` and cross-check ``l, d`` by derivatives."""
    if isinstance(x, WeylElement) and not x:
        raise ValueError("the zero operator has no hierarchy")
    P = x if isinstance(x, CharPoly) else char_poly(x)
    levels = tuple(dm_operator(P, m) for m in range(M + 1))
    nz = [m for m, op in enumerate(levels) if op]
    if not nz:
        raise AllZeroThroughM(f"D_m = 0 for every m <= {M}; raise M")
    l = nz[0]
    ops = levels[l:]
    d = ops[0].order
    inv = degree_invariants(P, M)
    if (inv.l, inv.d) != (l, d):
        raise OracleMismatch(f"(l, d) = ({l}, {d}) from the operators but ({inv.l}, {inv.d}) from P_I")
    return Hierarchy(P, l, d, ops, M, levels)


@dataclass(frozen=True)
class LoopJet:
    """Taylor coefficients ``jets[k][i]`` of ``Q_k`` at ``point``."""

    jets: tuple[tuple[Fraction, ...], ...]
    point: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "jets", tuple(tuple(Fraction(c) for c in j) for j in self.jets))
        object.__setattr__(self, "point", Fraction(self.point))

    @property
    def loops(self) -> int:
        return len(self.jets) - 1

    def __getitem__(self, k: int) -> tuple[Fraction, ...]:
        return self.jets[k]

    def truncate(self, order: int) -> "LoopJet":
        return LoopJet(tuple(j[: order + 1] for j in self.jets), self.point)

    def to_json(self) -> dict:
        return {"point": str(self.point), "jets": [[str(c) for c in j] for j in self.jets]}

    @classmethod
    def from_json(cls, obj) -> "LoopJet":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls(tuple(tuple(Fraction(c) for c in j) for j in obj["jets"]), Fraction(obj.get("point", "1")))
        except (KeyError, ValueError, TypeError) as e:
            raise ParseError(f"bad jet data: {e}") from None


def _solve_row(D0: DiffOp, rhs: Sequence[Fraction], seeds: Sequence[Fraction], top: int, point: Fraction) -> list[Fraction]:
    """Taylor coefficients ``c_0..c_top`` of ``f`` with ``D0 f = rhs``."""
    d = D0.order
    pj = D0.coefficient_jets(max(0, top - d), point)
    lead = pj[d].coeffs[0]
    if lead == 0:
        raise SingularAtExpansionPoint(f"leading coefficient {D0.coeffs[d]} of D_0 vanishes at u={point}")
    c = [Fraction(s) / math.factorial(i) for i, s in enumerate(seeds)] + [Fraction(0)] * (top + 1 - d)
    for i in range(top - d + 1):
        acc = Fraction(0)
        for j, ser in enumerate(pj):
            for s in range(i + 1):
                if j == d and s == i:
                    continue
                coef = ser.coeffs[i - s]
                if coef:
                    acc += coef * c[s + j] * _falling(s + j, j)
        c[i + d] = (Fraction(rhs[i]) - acc) / (lead * _falling(i + d, d))
    return c


def solve_hierarchy(
    h: Hierarchy,
    seeds: Sequence,
    loops: int,
    jet_order: int,
    point: Fraction | int = 1,
) -> LoopJet:
    """Solve ``D_0 Q_m = -sum_{j>=1} D_j Q_{m-j}`` row by row.

    ``seeds[k]`` lists the first ``d`` derivatives ``Q_k^(i)(point)``; a bare
    number is accepted when ``d = 1``.  Returned jets have ``jet_order + 1``
    Taylor coefficients.
    """
    point = Fraction(point)
    d, ops = h.d, h.ops
    if loops + 1 > len(ops):
        raise ValueError(f"{loops} loops need D_0..D_{loops}; build the hierarchy with M >= {h.l + loops}")
    seed_rows = []
    for k in range(loops + 1):
        s = seeds[k] if k < len(seeds) else None
        if s is None:
            raise ValueError(f"missing seed for Q_{k}")
        if not isinstance(s, (list, tuple)):
            s = [s]
        if len(s) != d:
            raise ValueError(f"Q_{k} needs {d} initial derivatives, got {len(s)}")
        seed_rows.append([Fraction(v) for v in s])
    need = [jet_order] * (loops + 1)
    for k in range(loops - 1, -1, -1):
        for m in range(k + 1, loops + 1):
            op = ops[m - k]
            if op:
                need[k] = max(need[k], need[m] - d + op.order)
    jets: list[list[Fraction]] = []
    for m in range(loops + 1):
        top = need[m]
        width = max(0, top - d + 1)
        rhs = [Fraction(0)] * width
        for j in range(1, m + 1):
            op = ops[j]
            if not op or not width:
                continue
            part = op.apply_jet(jets[m - j][: width + op.order], point)
            rhs = [r - v for r, v in zip(rhs, part)]
        jets.append(_solve_row(ops[0], rhs, seed_rows[m], top, point))
    return LoopJet(tuple(tuple(j[: jet_order + 1]) for j in jets), point)


@dataclass(frozen=True)
class RowResidual:
    row: int
    order: int
    values: tuple[Fraction, ...]

    @property
    def vanishes(self) -> bool:
        return not any(self.values)


def hierarchy_residuals(h: Hierarchy, jets: LoopJet) -> list[RowResidual]:
    """Evaluate ``sum_i D_{m-i} Q_i`` at every row with enough jet data."""
    out = []
    for m in range(min(jets.loops, len(h.ops) - 1) + 1):
        avail = math.inf
        for i in range(m + 1):
            op = h.ops[m - i]
            if op:
                avail = min(avail, len(jets[i]) - 1 - op.order)
        if avail == math.inf or avail < 0:
            continue
        avail = int(avail)
        total = [Fraction(0)] * (avail + 1)
        for i in range(m + 1):
            op = h.ops[m - i]
            if op:
                part = op.apply_jet(jets[i][: avail + 1 + op.order], jets.point)
                total = [a + b for a, b in zip(total, part)]
        out.append(RowResidual(m, avail, tuple(total)))
    return out
