import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twcount.subsetfn import (
    RankedSetFunction,
    SetFunction,
    Universe,
    UniverseMismatch,
    mobius_forward,
    mobius_inverse,
    popcount,
    sign_I,
    sign_I_array,
    subset_convolve,
)


def inversions(a, b):
    return sum(1 for x in range(32) if a >> x & 1 for y in range(32) if b >> y & 1 and x > y)


def table(n, values):
    return SetFunction(Universe.of_size(n), np.array(values, dtype=object))


@st.composite
def set_functions(draw, nmax=6, lo=-50, hi=50, n=None):
    n = draw(st.integers(0, nmax)) if n is None else n
    vals = draw(st.lists(st.integers(lo, hi), min_size=1 << n, max_size=1 << n))
    return table(n, vals)


@st.composite
def same_universe(draw, count=2, nmax=6):
    n = draw(st.integers(0, nmax))
    return [draw(set_functions(n=n)) for _ in range(count)]


def test_sign_examples():
    U = Universe.of_size(4)
    assert sign_I(0, U.mask({1, 2})) == 1
    assert sign_I(U.mask({2}), U.mask({1})) == -1
    assert sign_I(U.mask({1, 3}), U.mask({2, 4})) == -1


@given(st.integers(0, 255), st.integers(0, 255))
def test_sign_matches_pair_count(a, b):
    assert sign_I(a, b) == (-1) ** inversions(a, b)
    assert int(sign_I_array(np.array([a]), np.array([b]), 8)[0]) == sign_I(a, b)


def test_claim_swap_exhaustive():
    for n in range(7):
        full = (1 << n) - 1
        for a in range(1 << n):
            rest = full & ~a
            for b in range(1 << n):
                if b & ~rest:
                    continue
                assert sign_I(a, b) * sign_I(b, a) == (-1) ** (popcount(a) * popcount(b))


def test_claim_split_exhaustive():
    for n in range(6):
        for labels in itertools.product(range(9), repeat=n):
            A = B = C = D = 0
            for p, lab in enumerate(labels):
                first, second = divmod(lab, 3)
                A |= (first == 1) << p
                B |= (first == 2) << p
                C |= (second == 1) << p
                D |= (second == 2) << p
            assert sign_I(A | B, C | D) == sign_I(A, C) * sign_I(A, D) * sign_I(B, C) * sign_I(B, D)


def test_mobius_examples():
    assert list(mobius_forward(table(2, [1, 0, 0, 0])).coeffs) == [1, 1, 1, 1]
    # U = {1, 2}: mask 1 = {1}, mask 3 = {1, 2}
    assert list(mobius_forward(table(2, [0, 1, 0, 0])).coeffs) == [0, 1, 0, 1]
    assert list(mobius_inverse(table(2, [1, 1, 1, 1])).coeffs) == [1, 0, 0, 0]
    assert list(mobius_inverse(table(2, [0, 1, 0, 1])).coeffs) == [0, 1, 0, 0]


@given(set_functions(nmax=8))
def test_mobius_matches_double_loop(f):
    got = mobius_forward(f).coeffs
    for x in range(1 << f.n):
        assert got[x] == sum(f.coeffs[a] for a in range(1 << f.n) if a & ~x == 0)


@given(set_functions(nmax=10, lo=-10**30, hi=10**30))
def test_mobius_roundtrip(f):
    assert mobius_inverse(mobius_forward(f)) == f
    assert mobius_forward(mobius_inverse(f)) == f


def brute_convolve(f, g):
    n = f.n
    out = [0] * (1 << n)
    for a in range(1 << n):
        for b in range(1 << n):
            if a & b == 0:
                out[a | b] += f.coeffs[a] * g.coeffs[b]
    return out


@given(same_universe(nmax=8))
def test_subset_convolve_brute(fg):
    f, g = fg
    assert list(subset_convolve(f, g).coeffs) == brute_convolve(f, g)


def test_subset_convolve_examples():
    n = 4
    f = table(n, [3, -1, 2, 5, 0, 1, 1, 7, 2, 0, 0, 4, -3, 1, 1, 9])
    unit = table(n, [1] + [0] * 15)
    assert subset_convolve(f, unit) == f
    ones = table(n, [1] * 16)
    assert list(subset_convolve(ones, ones).coeffs) == [2 ** popcount(x) for x in range(16)]


@given(same_universe(count=3, nmax=6))
def test_subset_convolve_commutative_associative(fgh):
    f, g, h = fgh
    assert subset_convolve(f, g) == subset_convolve(g, f)
    assert subset_convolve(subset_convolve(f, g), h) == subset_convolve(f, subset_convolve(g, h))


@given(set_functions(nmax=7))
def test_rank_split(f):
    ranked = RankedSetFunction.split(f)
    assert len(ranked.slices) == f.n + 1
    for r, s in enumerate(ranked.slices):
        assert all(v == 0 for x, v in enumerate(s.coeffs) if popcount(x) != r)
    assert ranked.combine() == f


def test_universe_guards():
    with pytest.raises(ValueError):
        Universe((3, 2))
    with pytest.raises(ValueError):
        Universe(tuple(range(31)))
    with pytest.raises(ValueError):
        SetFunction(Universe.of_size(2), np.zeros(3, dtype=object))
    with pytest.raises(UniverseMismatch):
        subset_convolve(table(1, [1, 1]), SetFunction(Universe((5,)), np.array([1, 1], dtype=object)))


def test_modular_mode():
    p = (1 << 61) - 1
    f = table(3, [p + 5, -2, 7, 1, 0, 3, 2, 1])
    g = table(3, [4, 1, -p, 9, 2, 2, 0, 1])
    exact = subset_convolve(f, g)
    assert list(subset_convolve(f, g, modulus=p).coeffs) == [int(v) % p for v in exact.coeffs]
