import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complete, nice, path
from twcount import steiner
from twcount.bench import random_steiner_table
from twcount.dpcore import CapacityError, digits
from twcount.instance import FormatError, Graph, make_nice, random_instance
from twcount.oracle import brute_count_steiner
from twcount.verify import per_node_steiner

# frozen from the brute-force subtree counter
TRIANGLE_12 = [0, 1, 3]
K4_ALL = [0, 0, 0, 16]


@pytest.mark.parametrize("mode", ["fast", "naive"])
def test_examples(mode):
    assert steiner.count_steiner(complete(3), {1, 2}, nice(complete(3)), mode) == TRIANGLE_12
    assert steiner.count_steiner(complete(4), {1, 2, 3, 4}, nice(complete(4)), mode) == K4_ALL
    g = path(5)
    assert steiner.count_steiner(g, {3}, nice(g), mode)[0] == 1
    assert steiner.count_steiner(g, {1, 5}, nice(g), mode) == [0, 0, 0, 0, 1]


def test_leaf_and_introduce():
    assert steiner.leaf_table().data.tolist() == [[1]]
    t = steiner.introduce_vertex(steiner.leaf_table(), 4, (4,), terminal=True)
    assert all(v == 0 for v in t.data[:, steiner.EMPTY])
    assert t.value(1, (1,)) == 1
    free = steiner.introduce_vertex(steiner.leaf_table(), 4, (4,), terminal=False)
    assert free.value(0, (steiner.EMPTY,)) == 1 and free.value(1, (1,)) == 1


def random_pair(k, seed):
    rng = np.random.default_rng(seed)
    return random_steiner_table(k, rng), random_steiner_table(k, rng)


@given(st.integers(0, 4), st.integers(0, 10**6))
def test_fast_join_matches_naive(k, seed):
    f, g = random_pair(k, seed)
    levels = k + 4
    assert (steiner.join_fast(f, g, k, levels) == steiner.join_naive(f, g, k, levels)).all()


def balanced(f, k):
    """Keep codes with as many f1-only as f2-only matches, i.e. |s_1| = |s_2| as in every DP table."""
    dig = digits(steiner.RADIX, k)
    keep = (dig == steiner.BITS_CODE[(1, 1, 0)]).sum(axis=1) == (dig == steiner.BITS_CODE[(1, 0, 1)]).sum(axis=1)
    return np.where(keep[None, :], f, 0)


@given(st.integers(0, 4), st.integers(0, 10**6))
def test_join_is_symmetric(k, seed):
    f, g = (balanced(t, k) for t in random_pair(k, seed))
    levels = k + 4
    assert (steiner.join_fast(f, g, k, levels) == steiner.join_fast(g, f, k, levels)).all()
    assert (steiner.join_naive(f, g, k, levels) == steiner.join_naive(g, f, k, levels)).all()


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_neutral_element(k):
    f, _ = random_pair(k, k)
    levels = k + 2
    dig = digits(steiner.RADIX, k)
    unit = np.zeros((levels, steiner.RADIX**k), dtype=object)
    plain = np.all((dig == steiner.EMPTY) | (dig == 1), axis=1)
    for c in np.flatnonzero(plain):
        unit[int((dig[c] == 1).sum()), c] = 1
    for join in (steiner.join_fast, steiner.join_naive):
        assert (join(f, unit, k, levels) == f).all()


@given(st.integers(2, 8), st.integers(1, 3), st.integers(0, 10**6))
def test_counts_match_brute_force(n, tw, seed):
    g, td = random_instance(n, tw, seed)
    K = {1 + seed % n, 1 + (seed // 7) % n}
    nd = make_nice(td, g)
    want = brute_count_steiner(g, K)
    assert steiner.count_steiner(g, K, nd, "fast") == want
    assert steiner.count_steiner(g, K, nd, "naive") == want


def test_modular_counts():
    g, td = random_instance(9, 3, 5)
    nd = make_nice(td, g)
    K = {2, 7}
    exact = steiner.count_steiner(g, K, nd)
    assert steiner.count_steiner(g, K, nd, modulus=7) == [c % 7 for c in exact]


def test_per_node_tables_match_definition():
    for seed in range(6):
        g, td = random_instance(5, 2, seed)
        assert per_node_steiner(g, {1, 3}, make_nice(td, g)) == []


def test_id_order_breaks_the_join_identity():
    bad = 0
    for seed in range(40):
        g, td = random_instance(6, 3, seed)
        bad += bool(per_node_steiner(g, {1 + seed % 6}, make_nice(td, g), modes=("naive",), order="id"))
    assert bad > 0


def test_errors():
    g = complete(3)
    nd = nice(g)
    with pytest.raises(FormatError):
        steiner.count_steiner(g, set(), nd)
    with pytest.raises(FormatError):
        steiner.count_steiner(g, {9}, nd)
    with pytest.raises(ValueError):
        steiner.count_steiner(g, {1}, nd, mode="slow")
    big = complete(11)
    with pytest.raises(CapacityError):
        steiner.count_steiner(big, {1}, nice(big))
    y = steiner.SteinerTable((1,), np.zeros((2, 5), dtype=object))
    z = steiner.SteinerTable((2,), np.zeros((2, 5), dtype=object))
    with pytest.raises(ValueError):
        steiner.steiner_join(y, z, 2)


def test_single_vertex_graph():
    g = Graph(1, ())
    assert steiner.count_steiner(g, {1}, nice(g)) == [1]
