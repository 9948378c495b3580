"""Colored Jones sequences from braid closures, and the loop-expansion bridge.

The colored Jones polynomial is computed from the sl2 R-matrix on the
``n``-dimensional representation, written in ``t = q^(1/4)``:

    R(e_i (x) e_j) = sum_k [i choose k] prod_{s<k} [n-1-j-s] (t^2 - t^-2)^k
                     t^(k(k-1)) t^((n-1-2(i-k))(n-1-2(j+k))) e_{j+k} (x) e_{i-k}

(the flip is already included).  The closure is the quantum trace with
``mu = diag(q^((n-1-2j)/2))`` and the framing is undone by
``theta = q^((n^2-1)/4)`` per crossing, so the unknot gives ``[n]``.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..coeffs import Laurent, RationalFn, TruncatedSeries
from ..errors import InconsistentSystem, OutOfRange, ParseError, ResourceLimit
from ..hierarchy import LoopJet
from ..skein import Convention
from ..weyl import DiscreteFunction, WeylElement, weyl_apply
from . import _kernels

__all__ = [
    "BraidWord",
    "JonesSequence",
    "RecursionReport",
    "BiJet",
    "colored_jones",
    "r_matrix",
    "verify_recursion",
    "ev",
    "extract_loop",
    "N_MAX",
]

N_MAX = 12
STRANDS_MAX = 4
WORD_MAX = 12
# evaluation-grid size limits for the state sum
_MEMORY_CAP = 4 * 10**7
_WORK_CAP = 6 * 10**9


# ---------------------------------------------------------------------------
# braids


@dataclass(frozen=True)
class BraidWord:
    """A braid on ``strands`` strands; ``word`` lists signed generator indices."""

    strands: int
    word: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(g) for g in self.word))
        if self.strands < 1:
            raise ValueError("a braid needs at least one strand")
        for g in self.word:
            if g == 0 or abs(g) > self.strands - 1:
                raise ValueError(f"generator {g} is out of range for {self.strands} strands")
        if not self.is_knot():
            raise ValueError(f"the closure of {self.word} on {self.strands} strands is not a knot")

    def permutation(self) -> list[int]:
        perm = list(range(self.strands))
        for g in self.word:
            i = abs(g) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        return perm

    def is_knot(self) -> bool:
        perm = self.permutation()
        seen, i = 0, 0
        while True:
            i = perm[i]
            seen += 1
            if i == 0:
                break
        return seen == self.strands

    @property
    def writhe(self) -> int:
        return sum(1 if g > 0 else -1 for g in self.word)

    def mirror(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-g for g in self.word))

    def key(self) -> str:
        return f"s={self.strands};w={','.join(map(str, self.word))}"

    def to_json(self) -> dict:
        return {"strands": self.strands, "word": list(self.word)}

    @classmethod
    def from_json(cls, obj) -> "BraidWord":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls(int(obj["strands"]), tuple(obj["word"]))
        except (KeyError, TypeError) as e:
            raise ParseError(f"bad braid: {e}") from None

    @classmethod
    def unknot(cls) -> "BraidWord":
        return cls(1, ())

    @classmethod
    def torus(cls, k: int) -> "BraidWord":
        """``sigma_1^(2k+1)`` on two strands, the ``(2, 2k+1)`` torus knot."""
        return cls(2, (1,) * (2 * k + 1))


# ---------------------------------------------------------------------------
# Laurent polynomials in t as {exponent: int}


def _tmul(a: dict, b: dict) -> dict:
    out: dict[int, int] = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _tadd(a: dict, b: dict, s: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + s * v
    return {k: v for k, v in out.items() if v}


def _tqint(m: int) -> dict:
    return {2 * (m - 1 - 2 * j): 1 for j in range(m)}


@lru_cache(maxsize=None)
def _tqbin(a: int, b: int) -> tuple:
    if b < 0 or b > a:
        return ()
    if b in (0, a):
        return ((0, 1),)
    left = _tmul({2 * b: 1}, dict(_tqbin(a - 1, b)))
    right = _tmul({-2 * (a - b): 1}, dict(_tqbin(a - 1, b - 1)))
    return tuple(sorted(_tadd(left, right).items()))


@lru_cache(maxsize=None)
def r_matrix(n: int, inverse: bool = False) -> dict:
    """Braiding on ``V_n (x) V_n`` as ``{(i, j): [((i', j'), poly_in_t), ...]}``."""
    if not inverse:
        out = {}
        for i, j in product(range(n), repeat=2):
            entries = []
            for k in range(0, i + 1):
                if j + k > n - 1:
                    break
                c = dict(_tqbin(i, k))
                for s in range(k):
                    c = _tmul(c, _tqint(n - 1 - j - s))
                for _ in range(k):
                    c = _tmul(c, {2: 1, -2: -1})
                c = _tmul(c, {k * (k - 1) + (n - 1 - 2 * (i - k)) * (n - 1 - 2 * (j + k)): 1})
                if c:
                    entries.append(((j + k, i - k), c))
            out[(i, j)] = entries
        return out
    # undo the flip, then invert the triangular part by back substitution:
    # U(e_i e_j) = sum_k c_k e_{i-k} e_{j+k} with monomial c_0
    fwd = r_matrix(n)
    unflipped = {key: [((y, x), c) for (x, y), c in v] for key, v in fwd.items()}
    inv: dict[tuple[int, int], dict] = {}
    for i in range(n):
        for j in range(n):
            terms = unflipped[(i, j)]
            (e0, c0), = [(k, c) for k, c in terms if k == (i, j)][0][1].items()
            acc = {(i, j): {-e0: 1}}
            for key, c in terms:
                if key == (i, j):
                    continue
                for k2, c2 in inv[key].items():
                    acc[k2] = _tadd(acc.get(k2, {}), _tmul(_tmul(c, c2), {-e0: c0}), -1)
            inv[(i, j)] = {k: v for k, v in acc.items() if v}
    # R^-1 = U^-1 P
    return {(i, j): sorted(inv[(j, i)].items()) for i, j in product(range(n), repeat=2)}


def _check_caps(b: BraidWord, n: int):
    if abs(n) > N_MAX:
        raise ResourceLimit(f"colour {n} exceeds the cap n_max={N_MAX}")
    if b.strands > STRANDS_MAX:
        raise ResourceLimit(f"{b.strands} strands exceed the cap of {STRANDS_MAX}")
    if len(b.word) > WORD_MAX:
        raise ResourceLimit(f"braid word length {len(b.word)} exceeds the cap of {WORD_MAX}")


def _state_sum(b: BraidWord, n: int) -> dict[int, int]:
    """Framing-corrected quantum trace of the closure, as ``{t_exponent: int}``."""
    s = b.strands
    mats = {1: r_matrix(n), -1: r_matrix(n, True)}
    blocks: dict[int, list[tuple[int, ...]]] = {}
    for st in product(range(n), repeat=s):
        blocks.setdefault(sum(st), []).append(st)

    def ext(sign):
        es = [e for v in mats[sign].values() for _, c in v for e in c]
        return min(es), max(es)

    def colnorm(sign):
        return max(sum(sum(abs(x) for x in c.values()) for _, c in v) for v in mats[sign].values())

    frame = -b.writhe * (n * n - 1)
    mu_span = 2 * (n - 1) * s
    lo = frame - mu_span + sum(ext(1 if g > 0 else -1)[0] for g in b.word)
    hi = frame + mu_span + sum(ext(1 if g > 0 else -1)[1] for g in b.word)
    span = hi - lo
    log_len = max(1, (span + 1 - 1).bit_length())
    L = 1 << log_len

    sizes = [len(v) for v in blocks.values()]
    if L * max(sizes) ** 2 > _MEMORY_CAP or L * sum(x**3 for x in sizes) * max(1, len(b.word)) > _WORK_CAP:
        raise ResourceLimit(f"state sum for n={n} on {s} strands is beyond desk scale")

    bound = n**s
    for g in b.word:
        bound *= colnorm(1 if g > 0 else -1)
    count, M = 0, 1
    primes = []
    while M <= 2 * bound:
        count += 1
        primes = _kernels.ntt_primes(log_len, count)
        M = math.prod(p for p, _ in primes)

    residues = []
    k = np.arange(L, dtype=np.int64)
    for p, g in primes:
        omega = pow(g, (p - 1) // L, p)
        W = _kernels._powers(omega, L, p)
        cache: dict[int, np.ndarray] = {}

        def evaluate(poly: dict) -> np.ndarray:
            key = id(poly)
            v = cache.get(key)
            if v is None:
                v = np.zeros(L, dtype=np.int64)
                for e, c in poly.items():
                    v = (v + (c % p) * W[(k * e) % L]) % p
                cache[key] = v
            return v

        total = np.zeros(L, dtype=np.int64)
        for states in blocks.values():
            B = len(states)
            index = {st: r for r, st in enumerate(states)}
            acc = np.zeros((L, B, B), dtype=np.int64)
            acc[:, np.arange(B), np.arange(B)] = 1
            for gen in b.word:
                i = abs(gen) - 1
                table = mats[1 if gen > 0 else -1]
                G = np.zeros((L, B, B), dtype=np.int64)
                for col, st in enumerate(states):
                    for (x, y), poly in table[(st[i], st[i + 1])]:
                        nst = st[:i] + (x, y) + st[i + 2:]
                        G[:, index[nst], col] = (G[:, index[nst], col] + evaluate(poly)) % p
                acc = _kernels.batched_matmul_mod(G, acc, p)
            for r, st in enumerate(states):
                mu = sum(2 * (n - 1 - 2 * x) for x in st)
                total = (total + acc[:, r, r] * W[(k * mu) % L]) % p
        # undo framing and shift to a polynomial of degree < L
        total = total * W[(k * (frame - lo)) % L] % p
        coeffs = _kernels.dft_mod(total, pow(omega, -1, p), p)
        coeffs = coeffs * pow(L, -1, p) % p
        residues.append(coeffs)
    ints = _kernels.crt_symmetric(residues, [p for p, _ in primes])
    return {lo + j: c for j, c in enumerate(ints) if c}


def colored_jones(b: BraidWord, n: int) -> Laurent:
    """``J_n(q)`` of the closure of ``b``, normalised so the unknot gives ``[n]``."""
    _check_caps(b, n)
    if n == 0:
        return Laurent()
    if n < 0:
        return -colored_jones(b, -n)
    tpoly = _state_sum(b, n)
    if any(e % 2 for e in tpoly):
        raise ArithmeticError("state sum left odd powers of q^(1/4)")
    return Laurent({e // 2: c for e, c in tpoly.items()})


# ---------------------------------------------------------------------------
# sequences


class _Cache:
    """On-disk table ``colored_jones.json`` keyed by braid, colour and convention."""

    FILE = "colored_jones.json"

    def __init__(self, directory: str | os.PathLike | None):
        self.path = Path(directory) / self.FILE if directory else None
        self.data: dict[str, str] = {}
        if self.path and self.path.exists():
            try:
                self.data = json.loads(self.path.read_text())
            except json.JSONDecodeError:
                self.data = {}

    @staticmethod
    def key(b: BraidWord, n: int) -> str:
        return f"{b.key()};n={n};conv=rmatrix-t4"

    def get(self, b, n):
        v = self.data.get(self.key(b, n))
        return Laurent.parse(v) if v is not None else None

    def put(self, b, n, value: Laurent):
        self.data[self.key(b, n)] = str(value)

    def flush(self):
        if not self.path:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(dict(sorted(self.data.items())), fh, indent=1, sort_keys=True)
        os.replace(tmp, self.path)


@dataclass
class JonesSequence:
    """Samples ``n -> J_n(q)`` on ``-nmax..nmax``.

    ``normalized`` sequences hold ``J_n/[n]`` and skip ``n = 0``.
    """

    label: str
    values: dict[int, Laurent]
    normalized: bool = False
    mirror: bool = False
    braid: BraidWord | None = None

    @classmethod
    def from_braid(cls, b: BraidWord, nmax: int, *, mirror: bool = False, cache_dir=None, label: str = "") -> "JonesSequence":
        """Compute ``J_1..J_nmax`` and extend by ``J_0 = 0``, ``J_-n = -J_n``."""
        _check_caps(b, nmax)
        cache = _Cache(cache_dir)
        vals: dict[int, Laurent] = {0: Laurent()}
        dirty = False
        for n in range(1, nmax + 1):
            v = cache.get(b, n)
            if v is None:
                v = colored_jones(b, n)
                cache.put(b, n, v)
                dirty = True
            if mirror:
                v = v.invert_variable()
            vals[n] = v
            vals[-n] = -v
        if dirty:
            cache.flush()
        return cls(label or b.key(), dict(sorted(vals.items())), False, mirror, b)

    @property
    def nmax(self) -> int:
        return max(self.values)

    def __call__(self, n: int) -> Laurent:
        try:
            return self.values[n]
        except KeyError:
            raise OutOfRange(f"{self.label} is not sampled at n={n}") from None

    def as_function(self) -> DiscreteFunction:
        m = self.nmax
        return DiscreteFunction(self.__call__, -m, m, self.label)

    def normalize(self) -> "JonesSequence":
        if self.normalized:
            return self
        qi = DiscreteFunction.quantum_integer()
        vals = {n: v.exact_div(qi(n)) for n, v in self.values.items() if n}
        return JonesSequence(self.label + "/[n]", vals, True, self.mirror, self.braid)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "normalized": self.normalized,
            "mirror": self.mirror,
            "braid": self.braid.to_json() if self.braid else None,
            "values": {str(n): str(v) for n, v in self.values.items()},
        }

    @classmethod
    def from_json(cls, obj) -> "JonesSequence":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            vals = {int(n): Laurent.parse(v) for n, v in obj["values"].items()}
        except (KeyError, AttributeError, ValueError) as e:
            raise ParseError(f"bad sequence table: {e}") from None
        braid = BraidWord.from_json(obj["braid"]) if obj.get("braid") else None
        return cls(obj.get("label", "table"), dict(sorted(vals.items())), bool(obj.get("normalized", False)), bool(obj.get("mirror", False)), braid)


# ---------------------------------------------------------------------------
# recursion check


@dataclass
class RecursionReport:
    passed: bool
    convention: Convention
    residuals: dict[int, Laurent]
    tried: list[tuple[str, bool]] = field(default_factory=list)

    def failures(self) -> list[int]:
        return [n for n, r in self.residuals.items() if r]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "convention": self.convention.as_dict(),
            "residuals": {str(n): str(r) for n, r in self.residuals.items()},
            "tried": [{"convention": t, "passed": ok} for t, ok in self.tried],
        }


def _residuals(x: WeylElement, f: DiscreteFunction, ns: Iterable[int]) -> dict[int, Laurent]:
    return {n: weyl_apply(x, f, n) for n in ns}


def verify_recursion(
    x: WeylElement,
    J: JonesSequence | DiscreteFunction,
    lo: int,
    hi: int,
    convention: Convention | str | None = None,
) -> RecursionReport:
    """Exact residuals of ``x`` on ``J`` for ``n`` in ``lo..hi``.

    ``convention="auto"`` tries every adapter setting (identity first) and
    keeps the first one that annihilates; the attempts are recorded.
    """
    f = J.as_function() if isinstance(J, JonesSequence) else J
    ns = range(lo, hi + 1)
    if convention == "auto":
        tried = []
        first = None
        for conv in Convention.candidates():
            try:
                res = _residuals(conv.operator(x), conv.sequence(f), ns)
            except (OutOfRange, ValueError):
                tried.append((conv.tag(), False))
                continue
            ok = not any(res.values())
            tried.append((conv.tag(), ok))
            if first is None:
                first = (conv, res)
            if ok:
                return RecursionReport(True, conv, res, tried)
        if first is None:
            raise OutOfRange(f"no convention could sample {lo}..{hi}")
        return RecursionReport(False, first[0], first[1], tried)
    conv = convention or Convention()
    res = _residuals(conv.operator(x), conv.sequence(f), ns)
    return RecursionReport(not any(res.values()), conv, res, [(conv.tag(), not any(res.values()))])


# ---------------------------------------------------------------------------
# the evaluation map u -> q^n


class BiJet:
    """Truncated ``F(h, t) = sum F[k][i] h^k t^i`` with ``h = q-1``, ``t = u-1``.

    Only total degree ``k + i <= order`` is kept, which is exactly what the
    evaluation ``u = q^n`` (so ``t = O(h)``) needs.
    """

    __slots__ = ("order", "F")

    def __init__(self, F: Sequence[Sequence], order: int):
        self.order = order
        self.F = tuple(
            tuple(Fraction(F[k][i]) if k < len(F) and i < len(F[k]) else Fraction(0) for i in range(order - k + 1))
            for k in range(order + 1)
        )

    @classmethod
    def from_rational(cls, f: RationalFn | Laurent, order: int) -> "BiJet":
        return cls.from_family([f], order)

    @classmethod
    def from_family(cls, fs: Sequence[RationalFn | Laurent], order: int) -> "BiJet":
        """``sum_k fs[k](u) h^k``, each expanded at ``u = 1``."""
        rows = []
        for k in range(order + 1):
            if k < len(fs):
                f = fs[k]
                if isinstance(f, Laurent):
                    f = RationalFn.from_laurent(f)
                rows.append(list(f.taylor(order - k, 1).coeffs))
            else:
                rows.append([0] * (order - k + 1))
        return cls(rows, order)

    @classmethod
    def from_jets(cls, jets: Sequence[Sequence], order: int) -> "BiJet":
        return cls(jets, order)

    def times_u(self) -> "BiJet":
        """Action of ``Q``: multiply by ``u = 1 + t``."""
        F = [[self.F[k][i] + (self.F[k][i - 1] if i else 0) for i in range(len(self.F[k]))] for k in range(self.order + 1)]
        return BiJet(F, self.order)

    def shift_u(self) -> "BiJet":
        """Action of ``E``: ``u -> q u``, i.e. ``t -> h + t + h t``."""
        M = self.order
        out = [[Fraction(0)] * (M - k + 1) for k in range(M + 1)]
        # powers of (h + t + h t) as {(a, b): coeff}
        base = {(1, 0): 1, (0, 1): 1, (1, 1): 1}
        power = {(0, 0): 1}
        for i in range(M + 1):
            for k in range(M + 1 - i):
                c = self.F[k][i]
                if not c:
                    continue
                for (a, b), v in power.items():
                    if k + a + b <= M:
                        out[k + a][b] += c * v
            nxt: dict = {}
            for (a, b), v in power.items():
                for (x, y), w in base.items():
                    if a + x + b + y <= M:
                        nxt[(a + x, b + y)] = nxt.get((a + x, b + y), 0) + v * w
            power = nxt
        return BiJet(out, M)

    def __add__(self, other: "BiJet") -> "BiJet":
        return BiJet([[a + b for a, b in zip(r, s)] for r, s in zip(self.F, other.F)], min(self.order, other.order))

    def scale(self, c) -> "BiJet":
        return BiJet([[a * c for a in r] for r in self.F], self.order)

    def __eq__(self, other):
        return isinstance(other, BiJet) and self.F == other.F


def ev(f, n: int, order: int = 4) -> TruncatedSeries:
    """Expand ``f(q, q^n)`` in ``h = q - 1`` through ``h^order``.

    ``f`` may be a :class:`RationalFn` or integral :class:`Laurent` in ``u``,
    a list of them (the coefficients of ``h^k``), or a :class:`BiJet`.
    """
    if isinstance(f, BiJet):
        F = f
        if F.order < order:
            raise ValueError("jet is truncated below the requested order")
    elif isinstance(f, (RationalFn, Laurent)):
        F = BiJet.from_rational(f, order)
    else:
        F = BiJet.from_family(list(f), order)
    tser = TruncatedSeries.binomial(n, order) - 1  # (1+h)^n - 1
    out = TruncatedSeries([Fraction(0)] * (order + 1))
    tp = TruncatedSeries.constant(Fraction(1), order)
    for i in range(order + 1):
        col = TruncatedSeries([F.F[k][i] if i < len(F.F[k]) else 0 for k in range(order + 1)])
        out = out + col * tp
        tp = tp * tser
    return out


# ---------------------------------------------------------------------------
# loop expansion from samples


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve an overdetermined exact system; every equation must hold."""
    m = len(rows[0])
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [v - f * w for v, w in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    if any(A[i][m] != 0 for i in range(r, len(A))):
        raise InconsistentSystem("loop-expansion equations are inconsistent")
    if len(pivots) < m:
        raise InconsistentSystem(f"system is underdetermined (rank {len(pivots)} of {m}); add samples")
    x = [Fraction(0)] * m
    for i, c in enumerate(pivots):
        x[c] = A[i][m]
    return x


def extract_loop(J: JonesSequence | DiscreteFunction, loops: int, order: int = 4, samples: Sequence[int] | None = None) -> LoopJet:
    """Taylor jets at ``u = 1`` of ``Q_0..Q_loops`` from a normalised sequence.

    Solves ``J_n(1+h) = sum_k Q_k((1+h)^n) h^k`` modulo ``h^(order+1)`` for the
    unknowns ``Q_k^(i)(1)/i!`` with ``k + i <= order``.  ``Q_k`` comes back with
    ``order - k + 1`` coefficients.
    """
    if isinstance(J, JonesSequence):
        if not J.normalized:
            raise ValueError("extract_loop expects a normalised sequence J/[n]")
        f = J.as_function()
        default = [n for n in sorted(J.values) if n > 0]
    else:
        f = J
        hi = J.hi if J.hi is not None else order + 8
        default = list(range(1, hi + 1))
    ns = list(samples) if samples is not None else default
    if loops > order:
        raise ValueError("loops must not exceed the h-order")
    if len(set(ns)) < order + 2:
        raise ValueError(f"need at least {order + 2} distinct samples, got {len(set(ns))}")
    unknowns = [(k, i) for k in range(order + 1) for i in range(order - k + 1)]
    rows, rhs = [], []
    for n in ns:
        series = f(n).series(order)
        tser = TruncatedSeries.binomial(n, order) - 1
        tpows = [TruncatedSeries.constant(Fraction(1), order)]
        for _ in range(order):
            tpows.append(tpows[-1] * tser)
        for m in range(order + 1):
            rows.append([Fraction(tpows[i].coefficient(m - k)) if m >= k else Fraction(0) for k, i in unknowns])
            rhs.append(Fraction(series.coefficient(m)))
    sol = dict(zip(unknowns, _solve_exact(rows, rhs)))
    jets = tuple(tuple(sol[(k, i)] for i in range(order - k + 1)) for k in range(loops + 1))
    return LoopJet(jets, Fraction(1))
