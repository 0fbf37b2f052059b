"""Randomized and exhaustive algebra checks, run by ``twcount selftest``."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from . import hamiltonian, oracle
from .bench import random_ham_table
from .clifford import CliffordElement, clifford_mul_fast, clifford_mul_naive, clifford_mul_via_gamma, phi_forward, phi_inverse
from .nsc import nsc2_array, nsc2_naive_array, nsc_array, nsc_naive_array
from .subsetfn import mobius_array, sign_I, subset_convolve_array, zeta_array


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    seconds: float
    detail: str = ""


def _subset_convolve_brute(f, g, n):
    out = [0] * (1 << n)
    for x in range(1 << n):
        a = x
        while True:
            out[x] += int(f[a]) * int(g[x ^ a])
            if a == 0:
                break
            a = (a - 1) & x
    return out


def check_claims(nmax: int = 5) -> int:
    """Swap and split rules of ``sign_I`` over all disjoint configurations."""
    cases = 0
    for n in range(nmax + 1):
        for a in range(1 << n):
            rest = ((1 << n) - 1) & ~a
            b = rest
            while True:
                assert sign_I(a, b) * sign_I(b, a) == (-1) ** (bin(a).count("1") * bin(b).count("1"))
                cases += 1
                if b == 0:
                    break
                b = (b - 1) & rest
    for n in range(min(nmax, 4) + 1):
        # A, B disjoint and C, D disjoint: four labels per position (none, A, B) x (none, C, D)
        for labels in itertools.product(range(9), repeat=n):
            A = B = C = D = 0
            for p, lab in enumerate(labels):
                first, second = divmod(lab, 3)
                A |= (first == 1) << p
                B |= (first == 2) << p
                C |= (second == 1) << p
                D |= (second == 2) << p
            assert sign_I(A | B, C | D) == sign_I(A, C) * sign_I(A, D) * sign_I(B, C) * sign_I(B, D)
            cases += 1
    return cases


def check_subset_transforms(rng: np.random.Generator, trials: int = 40, nmax: int = 8) -> int:
    for _ in range(trials):
        n = int(rng.integers(0, nmax + 1))
        f = rng.integers(-50, 51, size=1 << n).astype(object)
        g = rng.integers(-50, 51, size=1 << n).astype(object)
        assert list(mobius_array(zeta_array(f, n), n)) == list(f)
        assert list(zeta_array(mobius_array(f, n), n)) == list(f)
        assert list(subset_convolve_array(f, g, n)) == _subset_convolve_brute(f, g, n)
    return trials


def check_clifford(rng: np.random.Generator, trials: int = 30, nmax: int = 8) -> int:
    for _ in range(trials):
        n = int(rng.integers(0, nmax + 1))
        f = CliffordElement.from_array(rng.integers(-10**6, 10**6 + 1, size=1 << n).astype(object))
        g = CliffordElement.from_array(rng.integers(-10**6, 10**6 + 1, size=1 << n).astype(object))
        naive = clifford_mul_naive(f, g)
        assert clifford_mul_fast(f, g) == naive
        assert phi_inverse(phi_forward(f), n) == f
        if n <= 5:
            assert clifford_mul_via_gamma(f, g) == naive
    return trials


def check_nsc(rng: np.random.Generator, trials: int = 30) -> int:
    for _ in range(trials):
        n = int(rng.integers(0, 7))
        f = rng.integers(-9, 10, size=1 << n).astype(object)
        g = rng.integers(-9, 10, size=1 << n).astype(object)
        assert list(nsc_array(f, g, n)) == list(nsc_naive_array(f, g, n))
        m = int(rng.integers(0, 4))
        f2 = rng.integers(-9, 10, size=1 << (2 * m)).astype(object)
        g2 = rng.integers(-9, 10, size=1 << (2 * m)).astype(object)
        assert list(nsc2_array(f2, g2, m)) == list(nsc2_naive_array(f2, g2, m))
    return trials


def check_join_algebra(rng: np.random.Generator, trials: int = 12, kmax: int = 3) -> int:
    """tau roundtrip and direct form, the homomorphism onto the oslash products, fast join."""
    for _ in range(trials):
        k = int(rng.integers(0, kmax + 1))
        f, g = random_ham_table(k, rng), random_ham_table(k, rng)
        fam_f, fam_g = hamiltonian.tau_forward(f, k), hamiltonian.tau_forward(g, k)
        assert list(hamiltonian.tau_inverse(fam_f, k)) == list(f)
        relaxed = oracle.set_join_brute(f, g, k, union=True, keep_all=True)
        for d in range(k + 1):
            masks, idx = hamiltonian.family_index(k, d)
            for row, D in enumerate(masks):
                fd, gd = fam_f[idx[row]], fam_g[idx[row]]
                assert fd.tolist() == oracle.tau_brute(f, k, D)
                prod = hamiltonian.oslash_multiply(fd, gd, d, k - d)
                assert prod.tolist() == oracle.oslash_brute(fd, gd, d, k - d)
                assert prod.tolist() == oracle.tau_brute(relaxed, k, D)
                m = k - d
                assert (hamiltonian.mu_inverse(hamiltonian.mu_forward(fd, m), m) == fd).all()
        assert list(hamiltonian.join6_fast(f, g, k)) == oracle.set_join_brute(f, g, k)
    return trials


SUITES = (
    ("sign rules", lambda rng: check_claims()),
    ("subset transforms", check_subset_transforms),
    ("clifford products", check_clifford),
    ("nsc / nsc2", check_nsc),
    ("join algebra", check_join_algebra),
)


def run_selftest(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for name, fn in SUITES:
        t0 = time.perf_counter()
        try:
            cases = fn(rng)
            results.append(CheckResult(name, True, cases, time.perf_counter() - t0))
        except AssertionError as exc:
            results.append(CheckResult(name, False, 0, time.perf_counter() - t0, str(exc) or "property violated"))
    return results
