import json
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qholonomic import DiscreteFunction, Laurent, RationalFn
from qholonomic.errors import InconsistentSystem, OutOfRange, ParseError, ResourceLimit
from qholonomic.oracle import BiJet, BraidWord, JonesSequence, colored_jones, ev, extract_loop, verify_recursion
from qholonomic.oracle import _kernels
from qholonomic.oracle.jones import _solve_exact
from qholonomic.skein import GELCA, printed_recursion_element

q = Laurent.monomial(1)
TREFOIL = BraidWord(2, (1, 1, 1))
FIGURE_EIGHT = BraidWord(3, (1, -2, 1, -2))


def _poch(a, k):
    out = Laurent.const(1)
    for i in range(k):
        out = out * (1 - a * q ** i)
    return out


def cyclotomic_trefoil(n):
    """Cyclotomic expansion of J_n/[n] for the left-handed trefoil."""
    return sum((q ** k * _poch(q ** (1 - n), k) * _poch(q ** (1 + n), k) for k in range(n)), Laurent())


def cyclotomic_figure_eight(n):
    total = Laurent()
    for k in range(n):
        term = Laurent.const(1)
        for j in range(1, k + 1):
            a, b = Fraction(n + j, 2), Fraction(n - j, 2)
            term = term * (Laurent.monomial(a) - Laurent.monomial(-a)) * (Laurent.monomial(b) - Laurent.monomial(-b))
        total = total + term
    return total


def test_trefoil_second_colour_frozen():
    assert colored_jones(TREFOIL, 2) == Laurent.parse("q^(-1/2) + q^(-3/2) + q^(-5/2) - q^(-9/2)")


def test_trefoil_against_cyclotomic_expansion():
    J = JonesSequence.from_braid(TREFOIL, 8).normalize()
    for n in range(1, 9):
        assert J(n) == cyclotomic_trefoil(n).invert_variable()


def test_figure_eight_against_cyclotomic_expansion():
    J = JonesSequence.from_braid(FIGURE_EIGHT, 4).normalize()
    for n in range(1, 5):
        assert J(n) == cyclotomic_figure_eight(n)


def test_mirror_braid_inverts_q():
    for n in range(1, 5):
        assert colored_jones(TREFOIL.mirror(), n) == colored_jones(TREFOIL, n).invert_variable()


def test_unknot_and_symmetric_extension():
    J = JonesSequence.from_braid(BraidWord.unknot(), 6)
    qi = DiscreteFunction.quantum_integer()
    assert all(J(n) == qi(n) for n in range(-6, 7))
    J = JonesSequence.from_braid(TREFOIL, 4)
    assert J(0) == 0 and J(-3) == -J(3)
    with pytest.raises(OutOfRange):
        J(5)


def test_braid_validation():
    with pytest.raises(ValueError):
        BraidWord(2, (1, 1))  # two-component link
    with pytest.raises(ValueError):
        BraidWord(2, (2,))
    with pytest.raises(ParseError):
        BraidWord.from_json({"word": [1]})
    assert BraidWord.torus(2).word == (1,) * 5


def test_resource_caps():
    with pytest.raises(ResourceLimit):
        JonesSequence.from_braid(TREFOIL, 13)
    with pytest.raises(ResourceLimit):
        colored_jones(BraidWord.torus(6), 2)


def test_cache_round_trip(cache_dir):
    first = JonesSequence.from_braid(TREFOIL, 3, cache_dir=cache_dir)
    path = os.path.join(cache_dir, "colored_jones.json")
    data = json.load(open(path))
    assert set(data) == {f"s=2;w=1,1,1;n={n};conv=rmatrix-t4" for n in (1, 2, 3)}
    again = JonesSequence.from_braid(TREFOIL, 3, cache_dir=cache_dir)
    assert again.values == first.values
    assert JonesSequence.from_json(first.to_json()).values == first.values


def test_verify_recursion_search_logs_attempts():
    J = JonesSequence.from_braid(TREFOIL, 6)
    rep = verify_recursion(printed_recursion_element(1), J, -4, 4, "auto")
    assert rep.passed and rep.convention == GELCA
    assert rep.tried[0] == ("gelca_variable=0,mirror=0,shift=0,sign=0", False)
    assert not verify_recursion(printed_recursion_element(1), J, -4, 4).passed


# kernels


@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_kernel_backends_agree(L, n, seed):
    p, g = _kernels.ntt_primes(3, 1)[0]
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, size=(L, n, n), dtype=np.int64)
    b = rng.integers(0, p, size=(L, n, n), dtype=np.int64)
    ref = np.array([[[sum(int(a[t, i, k]) * int(b[t, k, j]) for k in range(n)) % p for j in range(n)] for i in range(n)] for t in range(L)])
    assert (_kernels.batched_matmul_mod_numpy(a, b, p) == ref).all()
    assert (_kernels.batched_matmul_mod(a, b, p) == ref).all()
    v = rng.integers(0, p, size=8, dtype=np.int64)
    root = pow(g, (p - 1) // 8, p)
    want = [sum(int(v[k]) * pow(root, j * k, p) for k in range(8)) % p for j in range(8)]
    assert list(_kernels.dft_mod_numpy(v, root, p)) == want
    assert list(_kernels.dft_mod(v, root, p)) == want


def test_crt_symmetric():
    primes = [p for p, _ in _kernels.ntt_primes(4, 3)]
    for x in (0, 1, -1, 123456789012, -98765432109876):
        assert _kernels.crt_symmetric([np.array([x % p]) for p in primes], primes) == [x]


def test_numpy_backend_in_subprocess():
    code = "from qholonomic.oracle import colored_jones, BraidWord, backend; print(backend(), colored_jones(BraidWord(2,(1,1,1)), 4))"
    env = dict(os.environ, QHOLONOMIC_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split(" ", 1)
    assert out[0] == "numpy"
    assert Laurent.parse(out[1].strip()) == colored_jones(TREFOIL, 4)


# Ev and loop extraction


def test_ev_of_u_squared():
    assert ev(Laurent.monomial(2, var="u"), 3, 4) == ev(RationalFn([0, 0, 1]), 3, 4)
    assert ev(RationalFn([0, 0, 1]), 3, 4).coeffs == (1, 6, 15, 20, 15)


@given(st.integers(-3, 3))
def test_ev_family_adds_powers_of_h(n):
    f = RationalFn([1, 1])
    family = ev([f, f], n, 3)
    single = ev(f, n, 3)
    shifted = [0] + list(single.coeffs[:-1])
    assert list(family.coeffs) == [a + b for a, b in zip(single.coeffs, shifted)]


def test_extract_loop_recovers_exact_solution():
    f = DiscreteFunction(lambda n: q ** (2 * n), 1, 10)
    jets = extract_loop(f, 3, 4)
    assert jets[0] == (1, 2, 1, 0, 0)
    assert all(not any(j) for j in jets.jets[1:])


def test_extract_loop_trefoil_frozen():
    J = JonesSequence.from_braid(TREFOIL, 12, mirror=True).normalize()
    jets = extract_loop(J, 3, 4)
    assert jets.jets == ((1, 0, -1, 1, 0), (0, 0, -2, 2), (1, 0, -6), (1, 0))


def test_extract_loop_needs_enough_samples():
    f = DiscreteFunction(lambda n: q ** n, 1, 3)
    with pytest.raises(ValueError):
        extract_loop(f, 2, 4)


def test_exact_solver_detects_inconsistency():
    assert _solve_exact([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]], [Fraction(3), Fraction(2)]) == [1, 1]
    with pytest.raises(InconsistentSystem):
        _solve_exact([[Fraction(1)], [Fraction(1)]], [Fraction(1), Fraction(2)])


def test_bijet_shift_matches_direct_expansion():
    f = RationalFn([1, 2, 3], [3, 1])
    F = BiJet.from_rational(f, 4)
    for n in range(-2, 3):
        assert ev(F.shift_u(), n, 4) == ev(f, n + 1, 4)
