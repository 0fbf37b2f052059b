"""Plumbing shared by the Steiner and Hamiltonian dynamic programs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .clifford import _as_object, compact
from .instance import NiceDecomposition

# Sizes above these trip the capacity guard of the drivers and the bench.
STEINER_BAG_CAP = 10
HAM_BAG_CAP = 9


class CapacityError(ValueError):
    """Input exceeds a documented size cap."""


@dataclass
class SpaceMeter:
    """Counts live table entries; ``peak`` is the high-water mark."""

    live: int = 0
    peak: int = 0
    log: list = field(default_factory=list)

    def hold(self, entries: int) -> None:
        self.live += int(entries)
        self.peak = max(self.peak, self.live)

    def release(self, entries: int) -> None:
        self.live -= int(entries)

    def transient(self, entries: int) -> None:
        """Record a short-lived buffer that is freed right away."""
        self.hold(entries)
        self.release(entries)


def ordered_bag(nd: NiceDecomposition, x: int, rank: dict[int, int]) -> tuple[int, ...]:
    """Bag of node ``x`` sorted by the global vertex order; DP positions follow this order."""
    return tuple(sorted(nd.nodes[x].bag, key=rank.__getitem__))


def reduce_mod(arr: np.ndarray, modulus: int | None) -> np.ndarray:
    return arr if modulus is None else arr % modulus


def exact(arr: np.ndarray) -> np.ndarray:
    return _as_object(np.asarray(arr))


@lru_cache(maxsize=None)
def digits(radix: int, k: int) -> np.ndarray:
    """``(radix**k, k)`` array of per-position codes; position 0 is the most significant digit."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((radix,) * k).reshape(k, -1).T
    out = np.ascontiguousarray(grid, dtype=np.int64)
    out.setflags(write=False)
    return out


def encode(dig: np.ndarray, radix: int) -> np.ndarray:
    k = dig.shape[-1]
    weights = radix ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return dig @ weights


def pair_sign(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Row-wise ``I(first, second)`` for boolean position arrays of shape ``(..., k)``.

    Counts pairs ``p > q`` with ``p`` in ``first`` and ``q`` in ``second``.
    """
    first = first.astype(np.int64)
    below = np.cumsum(second.astype(np.int64), axis=-1) - second.astype(np.int64)
    return 1 - 2 * ((first * below).sum(axis=-1) & 1)


def bits_above(bits: np.ndarray, pos: int) -> np.ndarray:
    """Number of set positions strictly after ``pos`` (higher rank) in each row."""
    return bits[..., pos + 1 :].sum(axis=-1)


# -- the naive per-vertex pairing join ---------------------------------------------


@dataclass(frozen=True)
class PairRule:
    """Compatible code pairs of one vertex.

    Each pair is ``(code_y, code_z, code_x, b_y, b_z, c_y, c_z)``; the last four
    bits say whether the vertex lies in the first/second index set of either
    side, which drives the ``I(B_y, B_z) I(C_y, C_z)`` sign.
    """

    radix: int
    pairs: tuple[tuple[int, int, int, int, int, int, int], ...]


@lru_cache(maxsize=None)
def _block(rule: PairRule, width: int):
    p = np.array(rule.pairs, dtype=np.int64)
    combos = np.array(list(itertools.product(range(len(p)), repeat=width)), dtype=np.int64).reshape(len(p) ** width, width)
    sel = p[combos]  # (N, width, 7)
    y = encode(sel[..., 0], rule.radix)
    z = encode(sel[..., 1], rule.radix)
    x = encode(sel[..., 2], rule.radix)
    by, bz, cy, cz = (sel[..., j].astype(bool) for j in (3, 4, 5, 6))
    sign = pair_sign(by, bz) * pair_sign(cy, cz)
    return y, z, x, sign, by.sum(-1), bz.sum(-1), cy.sum(-1), cz.sum(-1)


def pairing_join(f: np.ndarray, g: np.ndarray, k: int, rule: PairRule, modulus: int | None = None, chunk: int = 200_000) -> np.ndarray:
    """Direct evaluation of a join by enumerating compatible per-vertex code pairs.

    ``f`` and ``g`` are ``(levels, radix**k)``; the result convolves the level
    axis, so it has ``Lf + Lg - 1`` levels.  Positions are in increasing rank.
    """
    R = rule.radix
    P = len(rule.pairs)
    Lf, Lg = f.shape[0], g.shape[0]
    inner = 0
    while inner < k and P ** (inner + 1) <= chunk:
        inner += 1
    outer = k - inner
    yi, zi, xi, si, by_i, _, cy_i, _ = _block(rule, inner)
    yo, zo, xo, so, _, bz_o, _, cz_o = _block(rule, outer)
    order = np.argsort(xi, kind="stable")
    xs = xi[order]
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ux = xs[starts]

    bound = max(_max_abs(f), 1) * max(_max_abs(g), 1) * min(Lf, Lg) * P**k
    dtype = np.int64 if bound < 1 << 62 else object
    fw = compact(f).astype(dtype).reshape(Lf, R**outer, R**inner)
    gw = compact(g).astype(dtype).reshape(Lg, R**outer, R**inner)
    f_live = np.any(fw != 0, axis=(0, 2))
    g_live = np.any(gw != 0, axis=(0, 2))
    out = np.zeros((Lf + Lg - 1, R**outer, R**inner), dtype=dtype)
    # cross-part sign: an inner position always outranks an outer one
    for j in range(len(yo)):
        if not (f_live[yo[j]] and g_live[zo[j]]):
            continue
        cross = 1 - 2 * ((by_i * bz_o[j] + cy_i * cz_o[j]) & 1)
        s = (si * cross * so[j])[order]
        F = fw[:, yo[j], yi[order]]
        G = gw[:, zo[j], zi[order]] * s
        acc = np.zeros((Lf + Lg - 1, len(s)), dtype=dtype)
        for l in range(Lf):
            acc[l : l + Lg] += F[l] * G
        out[:, xo[j], ux] += np.add.reduceat(acc, starts, axis=1)
        if modulus is not None:
            out[:, xo[j], ux] %= modulus
    out = exact(out.reshape(Lf + Lg - 1, R**k))
    return reduce_mod(out, modulus)


def _max_abs(arr) -> int:
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0
    return int(max(arr.max(), -arr.min()))
