"""Modular arithmetic kernels for the braid state sum.

The state sum is evaluated at the ``L``-th roots of unity modulo a handful of
NTT-friendly primes below ``2**25``; exact integer coefficients are recovered
afterwards by an inverse transform and the Chinese remainder theorem.  With
residues below ``2**25`` every product fits in 50 bits, so int64 is safe as
long as at most ``2**13`` products are summed before reducing.

Two interchangeable backends are provided: numba-compiled loops and plain
numpy.  Set ``QHOLONOMIC_DISABLE_NUMBA=1`` to force numpy.
"""
from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "QHOLONOMIC_DISABLE_NUMBA"

try:
    if os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on"):
        raise ImportError("disabled by environment")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    HAVE_NUMBA = False

# sums of at most this many 50-bit products stay below 2**63
CHUNK = 4096


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy path


def batched_matmul_mod_numpy(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``(a @ b) % p`` for stacks of square matrices, shape ``(L, n, n)``."""
    n = a.shape[-1]
    if n <= CHUNK:
        return np.matmul(a, b) % p
    out = np.zeros(a.shape[:-1] + (b.shape[-1],), dtype=np.int64)
    for s in range(0, n, CHUNK):
        out = (out + np.matmul(a[..., s:s + CHUNK], b[..., s:s + CHUNK, :])) % p
    return out


def dft_mod_numpy(values: np.ndarray, root: int, p: int) -> np.ndarray:
    """``out[j] = sum_k values[k] * root**(j*k) mod p``."""
    L = values.shape[0]
    powers = _powers(root, L, p)
    idx = np.arange(L, dtype=np.int64)
    out = np.zeros(L, dtype=np.int64)
    for s in range(0, L, CHUNK):
        ks = idx[s:s + CHUNK]
        mat = powers[np.outer(idx, ks) % L]
        out = (out + mat @ values[s:s + CHUNK]) % p
    return out


def _powers(root: int, L: int, p: int) -> np.ndarray:
    out = np.empty(L, dtype=np.int64)
    acc = 1
    for i in range(L):
        out[i] = acc
        acc = acc * root % p
    return out


# ---------------------------------------------------------------------------
# numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _batched_matmul_mod_jit(a, b, p):
        L, n, m = a.shape
        k = b.shape[2]
        out = np.zeros((L, n, k), dtype=np.int64)
        for t in range(L):
            for i in range(n):
                for j in range(m):
                    v = a[t, i, j]
                    if v == 0:
                        continue
                    for c in range(k):
                        w = b[t, j, c]
                        if w != 0:
                            out[t, i, c] = (out[t, i, c] + v * w) % p
        return out

    @njit(cache=True)
    def _dft_mod_jit(values, powers, p):
        L = values.shape[0]
        out = np.zeros(L, dtype=np.int64)
        for j in range(L):
            acc = 0
            for k in range(L):
                v = values[k]
                if v != 0:
                    acc = (acc + v * powers[(j * k) % L]) % p
            out[j] = acc
        return out

    def batched_matmul_mod(a, b, p):
        return _batched_matmul_mod_jit(np.ascontiguousarray(a), np.ascontiguousarray(b), np.int64(p))

    def dft_mod(values, root, p):
        return _dft_mod_jit(np.ascontiguousarray(values), _powers(root, values.shape[0], p), np.int64(p))

else:
    batched_matmul_mod = batched_matmul_mod_numpy
    dft_mod = dft_mod_numpy


# ---------------------------------------------------------------------------
# primes and CRT


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out, i = [], 2
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            while n % i == 0:
                n //= i
        i += 1
    if n > 1:
        out.append(n)
    return out


_PRIME_CACHE: dict[int, list[tuple[int, int]]] = {}


def ntt_primes(log_len: int, count: int) -> list[tuple[int, int]]:
    """``count`` primes ``p < 2**25`` with ``2**log_len | p - 1``, plus a generator."""
    cached = _PRIME_CACHE.setdefault(log_len, [])
    if len(cached) < count:
        step = 1 << log_len
        c = ((1 << 25) - 1) // step
        seen = {p for p, _ in cached}
        while len(cached) < count:
            if c <= 0:
                raise ValueError("ran out of NTT primes")
            p = c * step + 1
            c -= 1
            if p in seen or not _is_prime(p):
                continue
            facs = _prime_factors(p - 1)
            g = 2
            while any(pow(g, (p - 1) // f, p) == 1 for f in facs):
                g += 1
            cached.append((p, g))
            seen.add(p)
    return cached[:count]


def crt_symmetric(residues: list[np.ndarray], primes: list[int]) -> list[int]:
    """Combine residue vectors into integers in ``(-M/2, M/2]``."""
    M = 1
    for p in primes:
        M *= p
    out = []
    for idx in range(len(residues[0])):
        x = 0
        for r, p in zip(residues, primes):
            Mi = M // p
            x += int(r[idx]) * Mi * pow(Mi, -1, p)
        x %= M
        if x > M // 2:
            x -= M
        out.append(x)
    return out
