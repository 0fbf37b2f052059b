"""Join timing on random tables with the right support, for the scaling check and the CLI."""

from __future__ import annotations

import time

import numpy as np

from . import hamiltonian, steiner
from .dpcore import HAM_BAG_CAP, STEINER_BAG_CAP, CapacityError, digits

EXTRA_LEVELS = 2  # Steiner entries sit at levels |A| and |A| + 1


def random_steiner_table(k: int, rng: np.random.Generator, spread: int = 3) -> np.ndarray:
    """``(k + EXTRA_LEVELS, 5**k)`` table with entries only where ``i - |A|`` is 0 or 1."""
    a = (digits(steiner.RADIX, k) > 0).sum(axis=1)
    out = np.zeros((k + EXTRA_LEVELS, 5**k), dtype=object)
    for r in range(EXTRA_LEVELS):
        out[a + r, np.arange(5**k)] = rng.integers(-spread, spread + 1, size=5**k).astype(object)
    return out


def random_ham_table(k: int, rng: np.random.Generator, spread: int = 3) -> np.ndarray:
    return rng.integers(-spread, spread + 1, size=6**k).astype(object)


def time_join(problem: str, k: int, mode: str, seed: int = 0, repeats: int = 1) -> int:
    """Best wall time in nanoseconds of one join of two random tables with ``k`` bag vertices."""
    cap = STEINER_BAG_CAP if problem == "steiner" else HAM_BAG_CAP
    if not 0 <= k <= cap:
        raise CapacityError(f"bag size {k} outside 0..{cap}")
    rng = np.random.default_rng(seed)
    if problem == "steiner":
        f, g = random_steiner_table(k, rng), random_steiner_table(k, rng)
        levels = k + 2 * EXTRA_LEVELS
        run = (lambda: steiner.join_naive(f, g, k, levels)) if mode == "naive" else (lambda: steiner.join_fast(f, g, k, levels))
    elif problem == "hamiltonian":
        f, g = random_ham_table(k, rng), random_ham_table(k, rng)
        run = (lambda: hamiltonian.join6_naive(f, g, k)) if mode == "naive" else (lambda: hamiltonian.join6_fast(f, g, k))
    else:
        raise ValueError(f"unknown problem {problem!r}")
    best = None
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        run()
        dt = time.perf_counter_ns() - t0
        best = dt if best is None else min(best, dt)
    return best


def bench_rows(problem: str, bags, seed: int = 0, repeats: int = 1, modes=("naive", "fast")) -> list[dict]:
    """One row per bag size: ``{"bag", "naive_ns", "fast_ns"}`` (modes not run are omitted)."""
    rows = []
    for k in bags:
        row = {"bag": int(k)}
        for mode in modes:
            row[f"{mode}_ns"] = time_join(problem, int(k), mode, seed, repeats)
        rows.append(row)
    return rows


def log_slope(bags, times) -> float:
    """Least-squares slope of ``ln(time)`` against bag size."""
    return float(np.polyfit(np.asarray(bags, dtype=float), np.log(np.asarray(times, dtype=float)), 1)[0])
