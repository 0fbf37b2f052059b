import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twcount.clifford import (
    CliffordElement,
    ComplexMatrix,
    NotInImage,
    RealBlockMatrix,
    Signature,
    clifford_mul_fast,
    clifford_mul_naive,
    clifford_mul_via_gamma,
    gamma_forward,
    gamma_inverse,
    integer_matmul,
    pauli_map,
    phi_forward,
    phi_forward_array,
    phi_inverse,
)
from twcount.subsetfn import sign_I


def elem(n, values):
    return CliffordElement.from_dict(n, values)


@st.composite
def elements(draw, n, bound=10**6):
    vals = draw(st.lists(st.integers(-bound, bound), min_size=1 << n, max_size=1 << n))
    return CliffordElement.from_array(vals)


@st.composite
def pairs(draw, nmax=8, count=2, bound=10**6):
    n = draw(st.integers(0, nmax))
    return [draw(elements(n, bound)) for _ in range(count)]


def test_naive_examples():
    x1, x2 = elem(2, {0b01: 1}), elem(2, {0b10: 1})
    assert clifford_mul_naive(x1, x2) == elem(2, {0b11: 1})
    assert clifford_mul_naive(x2, x1) == elem(2, {0b11: -1})
    a, b = elem(1, {0: 1, 1: 1}), elem(1, {0: 1, 1: -1})
    assert clifford_mul_naive(a, b) == elem(1, {})


def test_phi_generator_images():
    assert phi_forward(elem(2, {0b01: 1})) == ComplexMatrix.from_complex([[0, 1], [1, 0]])
    assert phi_forward(elem(2, {0b10: 1})) == ComplexMatrix.from_complex([[0, -1j], [1j, 0]])
    assert phi_forward(elem(2, {0b11: 1})) == ComplexMatrix.from_complex([[1j, 0], [0, -1j]])


def monomial_images(n):
    re, im = phi_forward_array(np.eye(1 << n, dtype=np.int64), n)
    return re.astype(float) + 1j * im.astype(float)


def test_phi_monomial_law_exhaustive():
    for n in range(9):
        mats = monomial_images(n)
        for a in range(1 << n):
            prod = mats[a] @ mats
            want = np.array([sign_I(a, b) for b in range(1 << n)])[:, None, None] * mats[a ^ np.arange(1 << n)]
            assert np.array_equal(prod, want), n


def test_generator_relations_and_injectivity():
    for n in range(11):
        gens = monomial_images(n)[[1 << i for i in range(n)]]
        eye = np.eye(gens.shape[-1]) if n else None
        for i in range(n):
            assert np.array_equal(gens[i] @ gens[i], eye)
            for j in range(i):
                assert np.array_equal(gens[i] @ gens[j], -(gens[j] @ gens[i]))
        index, _ = pauli_map(n)
        assert len(set(index.tolist())) == 1 << n


def test_phi_inverse_examples_and_errors():
    assert phi_inverse(ComplexMatrix.from_complex(np.eye(4)), 4) == CliffordElement.scalar(4)
    with pytest.raises(NotInImage):
        phi_inverse(ComplexMatrix.from_complex([[1, 0], [0, -1]]), 1)  # Z is not reached with one generator
    with pytest.raises(NotInImage):
        phi_inverse(ComplexMatrix.from_complex([[1j, 0], [0, 1j]]), 2)  # i times identity
    with pytest.raises(NotInImage):
        phi_inverse(ComplexMatrix.from_complex([[1, 0], [0, 0]]), 2)  # (e + x12 / i) / 2 has half-integer coefficients


@given(pairs(nmax=10, count=1, bound=10**18))
def test_phi_roundtrip(fs):
    (f,) = fs
    assert phi_inverse(phi_forward(f), f.n) == f


@given(pairs(nmax=8))
def test_phi_product_is_naive_product(fg):
    f, g = fg
    assert phi_inverse(phi_forward(f) @ phi_forward(g), f.n) == clifford_mul_naive(f, g)


@given(pairs(nmax=10))
def test_fast_matches_naive(fg):
    f, g = fg
    assert clifford_mul_fast(f, g) == clifford_mul_naive(f, g)


def test_fast_examples():
    f = elem(5, {0: 3, 0b101: -2, 0b11111: 7})
    assert clifford_mul_fast(f, CliffordElement.scalar(5)) == f
    s = elem(2, {0b01: 1, 0b10: 1})
    assert clifford_mul_fast(s, s) == elem(2, {0: 2})


def test_big_coefficients_take_the_exact_path():
    f = CliffordElement.from_array([10**40 + i for i in range(16)])
    g = CliffordElement.from_array([-(10**35) * i for i in range(16)])
    assert clifford_mul_fast(f, g) == clifford_mul_naive(f, g)


@given(pairs(nmax=8, count=3, bound=100))
def test_associative(fgh):
    f, g, h = fgh
    assert clifford_mul_fast(clifford_mul_fast(f, g), h) == clifford_mul_fast(f, clifford_mul_fast(g, h))


@given(pairs(nmax=6))
def test_gamma_path(fg):
    f, g = fg
    naive = clifford_mul_naive(f, g)
    assert clifford_mul_via_gamma(f, g) == naive
    assert clifford_mul_via_gamma(f, g) == clifford_mul_fast(f, g)


def balanced(k):
    return Signature(k, k)


@given(st.integers(1, 3).flatmap(lambda k: st.tuples(st.just(k), elements(2 * k, 1000), elements(2 * k, 1000))))
def test_gamma_homomorphism(kuv):
    k, u, v = kuv
    sig = balanced(k)
    gu, gv = gamma_forward(u, sig), gamma_forward(v, sig)
    prod = integer_matmul(gu.entries, gv.entries, "classical")
    assert gamma_inverse(RealBlockMatrix(k, prod)) == clifford_mul_naive(u, v, sig)
    assert gamma_inverse(gu) == u
    added = gamma_forward(u + v, sig).entries
    assert np.array_equal(added, gu.entries + gv.entries)


def test_gamma_examples():
    sig = balanced(2)
    assert np.array_equal(gamma_forward(CliffordElement.scalar(4), sig).entries, np.eye(4, dtype=int))
    assert gamma_inverse(RealBlockMatrix(2, np.eye(4, dtype=object))) == CliffordElement.scalar(4)
    with pytest.raises(ValueError):
        gamma_forward(CliffordElement.scalar(3), Signature(2, 1))


def test_signature_and_caps():
    x1 = elem(2, {0b01: 1})
    sig = Signature(1, 1)
    assert clifford_mul_naive(elem(2, {0b10: 1}), elem(2, {0b10: 1}), sig) == elem(2, {0: -1})
    assert clifford_mul_naive(x1, x1, sig) == elem(2, {0: 1})
    with pytest.raises(ValueError):
        clifford_mul_via_gamma(CliffordElement.scalar(13), CliffordElement.scalar(13))
