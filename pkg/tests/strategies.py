"""Hypothesis strategies for the exact algebra types."""
from hypothesis import strategies as st

from qholonomic import Laurent, SkeinElement, WeylElement

coef = st.integers(-5, 5).filter(bool)


def laurents(span=6, half=True, max_terms=4):
    keys = st.integers(-2 * span, 2 * span) if half else st.integers(-span, span).map(lambda e: 2 * e)
    return st.dictionaries(keys, coef, max_size=max_terms).map(Laurent)


def weyls(span=3, half_coeffs=False, max_terms=4):
    key = st.tuples(st.integers(-span, span), st.integers(-span, span)).map(lambda ab: (2 * ab[0], 2 * ab[1]))
    return st.dictionaries(key, laurents(4, half_coeffs, 3), max_size=max_terms).map(WeylElement)


def skeins(span=4, max_terms=3):
    curve = st.tuples(st.integers(-span, span), st.integers(-span, span))
    return st.lists(st.tuples(curve, laurents(4, True, 2)), max_size=max_terms).map(
        lambda ts: sum((SkeinElement.curve(a, b, c) for (a, b), c in ts), SkeinElement())
    )
