"""Acceptance criteria 1-8.  Each test prints one PASS/FAIL line (also repeated in the terminal summary)."""

import itertools
import time

import numpy as np
import pytest

from conftest import complete, cycle, elimination_td, k33, nice, petersen
from twcount import hamiltonian as ham
from twcount import oracle, steiner
from twcount.bench import bench_rows, log_slope, random_ham_table
from twcount.clifford import (
    CliffordElement,
    RealBlockMatrix,
    Signature,
    clifford_mul_fast,
    clifford_mul_naive,
    clifford_mul_via_gamma,
    gamma_forward,
    gamma_inverse,
    integer_matmul,
    phi_forward_array,
)
from twcount.dpcore import SpaceMeter
from twcount.instance import make_nice, random_instance
from twcount.nsc import nsc2_array, nsc2_naive_array, nsc_array, nsc_naive_array
from twcount.subsetfn import mobius_array, popcount, popcounts, sign_I, subset_convolve_array, zeta_array
from twcount.verify import per_node_hamiltonian, per_node_steiner


def brute_convolve(f, g, n):
    out = [0] * (1 << n)
    for x in range(1 << n):
        a = x
        while True:
            out[x] += f[a] * g[x ^ a]
            if a == 0:
                break
            a = (a - 1) & x
    return out


# -- 1 -------------------------------------------------------------------------


def test_criterion_1_algebra(report):
    t0 = time.perf_counter()
    for n in range(6):
        full = (1 << n) - 1
        for a in range(1 << n):
            for b in range(1 << n):
                if a & b == 0:
                    assert sign_I(a, b) * sign_I(b, a) == (-1) ** (popcount(a) * popcount(b))
        for labels in itertools.product(range(9), repeat=n):
            A = B = C = D = 0
            for p, lab in enumerate(labels):
                first, second = divmod(lab, 3)
                A |= (first == 1) << p
                B |= (first == 2) << p
                C |= (second == 1) << p
                D |= (second == 2) << p
            assert sign_I(A | B, C | D) == sign_I(A, C) * sign_I(A, D) * sign_I(B, C) * sign_I(B, D)
        assert full >= 0
    rng = np.random.default_rng(1)
    cases = 0
    for i in range(1000):
        n = i % 9
        f = rng.integers(-10**9, 10**9, size=1 << n).astype(object)
        if i % 2:
            assert list(mobius_array(zeta_array(f, n), n)) == list(f)
        else:
            g = rng.integers(-10**9, 10**9, size=1 << n).astype(object)
            assert list(subset_convolve_array(f, g, n)) == brute_convolve(f, g, n)
        cases += 1
    dt = time.perf_counter() - t0
    ok = dt < 30
    report("1", ok, f"claims exhaustive n<=5, {cases} random roundtrip/convolution cases exact, {dt:.1f}s (limit 30s)")
    assert ok


# -- 2 -------------------------------------------------------------------------


def test_criterion_2_clifford(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    for i in range(200):
        n = i % 11
        f = CliffordElement.from_array(rng.integers(-10**6, 10**6 + 1, size=1 << n).astype(object))
        g = CliffordElement.from_array(rng.integers(-10**6, 10**6 + 1, size=1 << n).astype(object))
        naive = clifford_mul_naive(f, g)
        assert clifford_mul_fast(f, g) == naive
        assert clifford_mul_via_gamma(f, g) == naive
    for n in range(9):
        re, im = phi_forward_array(np.eye(1 << n, dtype=np.int64), n)
        mats = re.astype(float) + 1j * im.astype(float)
        for a in range(1 << n):
            signs = np.array([sign_I(a, b) for b in range(1 << n)])[:, None, None]
            assert np.array_equal(mats[a] @ mats, signs * mats[a ^ np.arange(1 << n)])
    sig = Signature(3, 3)
    for _ in range(50):
        u = CliffordElement.from_array(rng.integers(-10**6, 10**6 + 1, size=64).astype(object))
        v = CliffordElement.from_array(rng.integers(-10**6, 10**6 + 1, size=64).astype(object))
        prod = integer_matmul(gamma_forward(u, sig).entries, gamma_forward(v, sig).entries)
        assert gamma_inverse(RealBlockMatrix(3, prod)) == clifford_mul_naive(u, v, sig)
    dt = time.perf_counter() - t0
    ok = dt < 120
    report("2", ok, f"200 pairs n<=10 fast=naive=gamma, monomial law n<=8 exhaustive, Cl(3,3) gamma homomorphism x50, {dt:.1f}s (limit 120s)")
    assert ok


# -- 3 -------------------------------------------------------------------------


def test_criterion_3_nsc(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    for i in range(200):
        n = i % 9
        f = rng.integers(-10**6, 10**6, size=1 << n).astype(object)
        g = rng.integers(-10**6, 10**6, size=1 << n).astype(object)
        assert list(nsc_array(f, g, n)) == list(nsc_naive_array(f, g, n))
    for i in range(200):
        n = i % 5
        f = rng.integers(-10**6, 10**6, size=1 << (2 * n)).astype(object)
        g = rng.integers(-10**6, 10**6, size=1 << (2 * n)).astype(object)
        assert list(nsc2_array(f, g, n)) == list(nsc2_naive_array(f, g, n))
    for i in range(60):
        n = i % 7
        f, g, h = (rng.integers(-99, 100, size=1 << n).astype(object) for _ in range(3))
        assert list(nsc_array(nsc_array(f, g, n), h, n)) == list(nsc_array(f, nsc_array(g, h, n), n))
    dt = time.perf_counter() - t0
    ok = dt < 120
    report("3", ok, f"nsc 200 pairs n<=8, nsc2 200 pairs n<=4, 60 associativity triples, {dt:.1f}s (limit 120s)")
    assert ok


# -- 4 -------------------------------------------------------------------------


def _mu_graded_product(f, g, d, m):
    """oslash through mu: graded by |E1|, |E2| and the parity of |B2| + |C2|."""
    pcE = popcounts(m)
    odd = popcounts(2 * d) & 1
    out = np.zeros(f.shape, dtype=object)
    for e1, e2, parity in itertools.product(range(m + 1), range(m + 1), (0, 1)):
        fe = np.where((pcE == e1)[:, None], f, 0)
        ge = np.where((pcE == e2)[:, None] & (odd == parity)[None, :], g, 0)
        zf, zg = ham.mu_forward(fe, m), ham.mu_forward(ge, m)
        rows = np.array([nsc2_array(zf[x], zg[x], d) for x in range(1 << m)], dtype=object).reshape(f.shape)
        out = out + np.where((pcE == e1 + e2)[:, None], ham.mu_inverse(rows, m), 0) * (-1) ** (e1 * parity)
    return out


def test_criterion_4_join_algebra(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    tables = 0
    for i in range(120):
        k = i % 4
        f, g = random_ham_table(k, rng), random_ham_table(k, rng)
        tf, tg = ham.tau_forward(f, k), ham.tau_forward(g, k)
        assert (ham.tau_inverse(tf, k) == f).all()
        relaxed = oracle.set_join_brute(f, g, k, union=True, keep_all=True)
        for d in range(k + 1):
            masks, idx = ham.family_index(k, d)
            for row, D in enumerate(masks):
                fd, gd = tf[idx[row]], tg[idx[row]]
                assert fd.tolist() == oracle.tau_brute(f, k, D)
                prod = ham.oslash_multiply(fd, gd, d, k - d)
                assert prod.tolist() == oracle.oslash_brute(fd, gd, d, k - d)
                assert prod.tolist() == oracle.tau_brute(relaxed, k, D)
                assert (_mu_graded_product(fd, gd, d, k - d) == prod).all()
                assert (ham.mu_inverse(ham.mu_forward(fd, k - d), k - d) == fd).all()
        assert list(ham.join6_fast(f, g, k)) == oracle.set_join_brute(f, g, k)
        tables += 2
    dt = time.perf_counter() - t0
    ok = dt < 120 and tables >= 100
    report("4", ok, f"{tables} random allowed tables |bag|<=3: tau roundtrip/direct/homomorphism, mu homomorphism, oslash=brute, {dt:.1f}s (limit 120s)")
    assert ok


# -- 5 -------------------------------------------------------------------------


def test_criterion_5_per_node(report):
    t0 = time.perf_counter()
    instances = checked = 0
    for seed in range(200):
        n = 3 + seed % 4
        tw = 1 + seed % 3
        g, td = random_instance(n, tw, seed)
        nd = make_nice(td, g)
        K = {1 + seed % n, 1 + (seed * 7) % n}
        assert per_node_steiner(g, K, nd) == []
        assert per_node_hamiltonian(g, nd) == []
        instances += 1
        checked += 2 * len(nd.nodes)
    dt = time.perf_counter() - t0
    ok = dt < 300
    report("5", ok, f"{instances} instances |V|<=6 tw<=3, {checked} node tables x 2 join modes equal the state definitions, {dt:.1f}s (limit 300s)")
    assert ok


# -- 6 -------------------------------------------------------------------------


KNOWN_HAM = {"K4": 3, "C5": 1, "K5": 12, "K33": 6, "Petersen": 0}


def test_criterion_6_end_to_end(report):
    t0 = time.perf_counter()
    for mode in ("fast", "naive"):
        assert steiner.count_steiner(complete(3), {1, 2}, nice(complete(3)), mode)[1:3] == [1, 3]
        assert steiner.count_steiner(complete(4), {1, 2, 3, 4}, nice(complete(4)), mode)[3] == 16
        graphs = {"K4": (complete(4), None), "C5": (cycle(5), None), "K5": (complete(5), None), "K33": (k33(), None), "Petersen": (petersen(), elimination_td(petersen()))}
        for name, (g, td) in graphs.items():
            assert ham.count_hamiltonian(g, nice(g, td), mode) == KNOWN_HAM[name], name
    for seed in range(100):
        n = 3 + seed % 8
        tw = 1 + seed % 4
        g, td = random_instance(n, tw, 1000 + seed)
        assert g.is_connected()
        nd = make_nice(td, g)
        K = {1 + seed % n, 1 + (seed * 3) % n, n}
        want = oracle.brute_count_steiner(g, K)
        assert steiner.count_steiner(g, K, nd, "fast") == want == steiner.count_steiner(g, K, nd, "naive")
        want = oracle.brute_count_hamiltonian(g)
        assert ham.count_hamiltonian(g, nd, "fast") == want == ham.count_hamiltonian(g, nd, "naive")
    dt = time.perf_counter() - t0
    ok = dt < 300
    report("6", ok, f"named counts (1,3), 16, K4=3 C5=1 K5=12 K33=6 Petersen=0; 100 random graphs |V|<=10 tw<=4 fast=naive=brute, {dt:.1f}s (limit 300s)")
    assert ok


# -- 7 -------------------------------------------------------------------------


SCALING = {}


def _scaling(problem, bags):
    if problem not in SCALING:
        rows = bench_rows(problem, bags, seed=7)
        naive = [r["naive_ns"] for r in rows]
        fast = [r["fast_ns"] for r in rows]
        SCALING[problem] = (rows, log_slope(bags, naive), log_slope(bags, fast))
    return SCALING[problem]


def _describe(rows, s_naive, s_fast):
    last = rows[-1]
    return (
        f"slope fast {s_fast:.2f} vs naive {s_naive:.2f}; bag {last['bag']}: "
        f"fast {last['fast_ns'] / 1e9:.2f}s vs naive {last['naive_ns'] / 1e9:.2f}s"
    )


@pytest.mark.slow
def test_criterion_7_steiner_scaling(report):
    rows, s_naive, s_fast = _scaling("steiner", [4, 5, 6, 7, 8])
    ok = s_fast < s_naive and rows[-1]["fast_ns"] < rows[-1]["naive_ns"]
    report("7 (steiner, bags 4..8)", ok, _describe(rows, s_naive, s_fast))
    assert ok


@pytest.mark.slow
def test_criterion_7_hamiltonian_slope(report):
    rows, s_naive, s_fast = _scaling("hamiltonian", [4, 5, 6, 7])
    ok = s_fast < s_naive
    report("7 (hamiltonian slope, bags 4..7)", ok, _describe(rows, s_naive, s_fast))
    assert ok


@pytest.mark.slow
def test_criterion_7_hamiltonian_fast_beats_naive(report):
    rows, s_naive, s_fast = _scaling("hamiltonian", [4, 5, 6, 7])
    ok = rows[-1]["fast_ns"] < rows[-1]["naive_ns"]
    report("7 (hamiltonian wall time at bag 7)", ok, _describe(rows, s_naive, s_fast))
    assert ok


# -- 8 -------------------------------------------------------------------------

STEINER_SPACE_FACTOR = 16  # per vertex-count level
HAM_SPACE_FACTOR = 32


def test_criterion_8_space(report):
    ratios = {"steiner": {}, "hamiltonian": {}}
    n = 12
    for tw in (3, 4, 5):
        for seed in range(3):
            g, td = random_instance(n, tw, 80 + seed)
            nd = make_nice(td, g)
            assert nd.width == tw
            meter = SpaceMeter()
            steiner.count_steiner(g, {1, n}, nd, "fast", meter=meter)
            ratios["steiner"][tw, seed] = meter.peak / ((n + 1) * 5**tw)
            meter = SpaceMeter()
            ham.count_hamiltonian(g, nd, "fast", meter=meter)
            ratios["hamiltonian"][tw, seed] = meter.peak / 6**tw
    s_max = max(ratios["steiner"].values())
    h_max = max(ratios["hamiltonian"].values())
    ok = s_max <= STEINER_SPACE_FACTOR and h_max <= HAM_SPACE_FACTOR
    report(
        "8",
        ok,
        f"peak entries / ((n+1) 5^tw) <= {s_max:.1f} (bound {STEINER_SPACE_FACTOR}), "
        f"peak / 6^tw <= {h_max:.1f} (bound {HAM_SPACE_FACTOR}) over tw in 3,4,5",
    )
    assert ok
