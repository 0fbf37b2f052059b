"""Dense subset-indexed integer tables and the transforms over the subset lattice.

A :class:`SetFunction` stores ``2**n`` exact integers, one per subset of an
ordered universe.  Subsets are bit masks: bit ``i`` stands for the ``i``-th
universe element in ascending order.  The array kernels at the bottom of the
module work on raw numpy arrays whose *last* axis is the subset axis, so they
can be batched over any number of leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

MAX_UNIVERSE = 30


class UniverseMismatch(ValueError):
    pass


def _exact(values) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    if arr.ndim != 1:
        raise ValueError("coefficient table must be one-dimensional")
    return arr


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """popcount of every mask below ``2**n`` as an int64 array."""
    pc = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        pc[1 << bit : 1 << (bit + 1)] = pc[: 1 << bit] + 1
    pc.setflags(write=False)
    return pc


def sign_I(a: int, b: int) -> int:
    """``(-1)`` to the number of pairs ``(x, y)`` in ``a x b`` with ``x > y``."""
    parity = 0
    while b:
        low = b & -b
        parity ^= popcount(a & ~((low << 1) - 1)) & 1
        b ^= low
    return -1 if parity else 1


def sign_I_array(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Vectorised :func:`sign_I` over int64 mask arrays (broadcasting)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    pc = popcounts(n)
    parity = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    for bit in range(n):
        above = pc[(a >> (bit + 1))] if n else 0
        parity ^= ((b >> bit) & 1) * (above & 1)
    return 1 - 2 * parity


@dataclass(frozen=True)
class Universe:
    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(int(e) for e in self.elements)
        if any(x >= y for x, y in zip(els, els[1:])):
            raise ValueError("universe elements must be strictly increasing")
        if len(els) > MAX_UNIVERSE:
            raise ValueError(f"universe of size {len(els)} exceeds cap {MAX_UNIVERSE}")
        object.__setattr__(self, "elements", els)

    @classmethod
    def of_size(cls, n: int) -> "Universe":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.elements)

    def mask(self, subset) -> int:
        pos = {e: i for i, e in enumerate(self.elements)}
        m = 0
        for e in subset:
            m |= 1 << pos[e]
        return m

    def subset(self, mask: int) -> tuple[int, ...]:
        return tuple(e for i, e in enumerate(self.elements) if mask >> i & 1)


@dataclass(frozen=True)
class SetFunction:
    universe: Universe
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = _exact(self.coeffs)
        if len(coeffs) != 1 << self.universe.n:
            raise ValueError(f"expected {1 << self.universe.n} coefficients, got {len(coeffs)}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, universe: Universe) -> "SetFunction":
        return cls(universe, np.zeros(1 << universe.n, dtype=object))

    @classmethod
    def from_dict(cls, universe: Universe, values: dict) -> "SetFunction":
        """Build from ``{subset_or_mask: value}``; subsets are iterables of elements."""
        coeffs = np.zeros(1 << universe.n, dtype=object)
        for key, v in values.items():
            m = key if isinstance(key, int) else universe.mask(key)
            coeffs[m] += v
        return cls(universe, coeffs)

    @property
    def n(self) -> int:
        return self.universe.n

    def __getitem__(self, subset) -> int:
        m = subset if isinstance(subset, int) else self.universe.mask(subset)
        return self.coeffs[m]

    def __add__(self, other: "SetFunction") -> "SetFunction":
        _same_universe(self, other)
        return SetFunction(self.universe, self.coeffs + other.coeffs)

    def __sub__(self, other: "SetFunction") -> "SetFunction":
        _same_universe(self, other)
        return SetFunction(self.universe, self.coeffs - other.coeffs)

    def __neg__(self) -> "SetFunction":
        return SetFunction(self.universe, -self.coeffs)

    def scale(self, k: int) -> "SetFunction":
        return SetFunction(self.universe, self.coeffs * k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.universe == other.universe and all(
            int(x) == int(y) for x, y in zip(self.coeffs, other.coeffs)
        )

    __hash__ = None  # type: ignore[assignment]

    def reduce(self, modulus: int | None) -> "SetFunction":
        if modulus is None:
            return self
        return SetFunction(self.universe, self.coeffs % modulus)

    def support(self) -> list[int]:
        return [m for m, v in enumerate(self.coeffs) if v]

    def ranked(self) -> "RankedSetFunction":
        return RankedSetFunction.split(self)


@dataclass(frozen=True)
class RankedSetFunction:
    """Split of a set function by subset size: ``slices[r]`` lives on ``|X| = r``."""

    slices: tuple[SetFunction, ...]

    @classmethod
    def split(cls, f: SetFunction) -> "RankedSetFunction":
        pc = popcounts(f.n)
        out = []
        for r in range(f.n + 1):
            c = np.zeros_like(f.coeffs)
            sel = pc == r
            c[sel] = f.coeffs[sel]
            out.append(SetFunction(f.universe, c))
        return cls(tuple(out))

    def combine(self) -> SetFunction:
        total = self.slices[0].coeffs.copy()
        for s in self.slices[1:]:
            total = total + s.coeffs
        return SetFunction(self.slices[0].universe, total)


def _same_universe(f: SetFunction, g: SetFunction) -> None:
    if f.universe != g.universe:
        raise UniverseMismatch(f"universes differ: {f.universe.elements} vs {g.universe.elements}")


# -- array kernels (subset axis last) ----------------------------------------


def zeta_array(arr: np.ndarray, n: int, modulus: int | None = None) -> np.ndarray:
    """In-place-style butterfly ``out[X] = sum_{A <= X} arr[A]`` along the last axis."""
    out = np.array(arr, copy=True)
    lead = out.shape[:-1]
    for bit in range(n):
        v = out.reshape(lead + (1 << (n - bit - 1), 2, 1 << bit))
        v[..., 1, :] += v[..., 0, :]
        if modulus is not None:
            v[..., 1, :] %= modulus
    return out


def mobius_array(arr: np.ndarray, n: int, modulus: int | None = None) -> np.ndarray:
    out = np.array(arr, copy=True)
    lead = out.shape[:-1]
    for bit in range(n):
        v = out.reshape(lead + (1 << (n - bit - 1), 2, 1 << bit))
        v[..., 1, :] -= v[..., 0, :]
        if modulus is not None:
            v[..., 1, :] %= modulus
    return out


def rank_split_array(arr: np.ndarray, n: int) -> np.ndarray:
    """Stack of ``n + 1`` copies of ``arr``, copy ``r`` zeroed off popcount ``r``."""
    pc = popcounts(n)
    out = np.zeros((n + 1,) + arr.shape, dtype=arr.dtype)
    for r in range(n + 1):
        sel = pc == r
        out[r][..., sel] = arr[..., sel]
    return out


def subset_convolve_array(f: np.ndarray, g: np.ndarray, n: int, modulus: int | None = None) -> np.ndarray:
    pc = popcounts(n)
    fr = zeta_array(rank_split_array(f, n), n, modulus)
    gr = zeta_array(rank_split_array(g, n), n, modulus)
    out = np.zeros(np.broadcast_shapes(f.shape, g.shape), dtype=np.result_type(f, g))
    for r in range(n + 1):
        acc = fr[0] * gr[r]
        for i in range(1, r + 1):
            acc = acc + fr[i] * gr[r - i]
        if modulus is not None:
            acc %= modulus
        h = mobius_array(acc, n, modulus)
        sel = pc == r
        out[..., sel] = h[..., sel]
    return out


# -- public operations --------------------------------------------------------


def mobius_forward(f: SetFunction, modulus: int | None = None) -> SetFunction:
    """Zeta transform: ``result(X) = sum of f(A) over A subset of X``."""
    return SetFunction(f.universe, zeta_array(f.coeffs, f.n, modulus))


def mobius_inverse(g: SetFunction, modulus: int | None = None) -> SetFunction:
    return SetFunction(g.universe, mobius_array(g.coeffs, g.n, modulus))


def subset_convolve(f: SetFunction, g: SetFunction, modulus: int | None = None) -> SetFunction:
    """``(f * g)(X) = sum over A disjoint-union B = X of f(A) g(B)`` via ranked zeta transforms."""
    _same_universe(f, g)
    return SetFunction(f.universe, subset_convolve_array(f.coeffs, g.coeffs, f.n, modulus))


def submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def masks_to_positions(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def from_values(values: Sequence[int], universe: Universe | None = None) -> SetFunction:
    vals = list(values)
    n = (len(vals) - 1).bit_length() if vals else 0
    if universe is None:
        universe = Universe.of_size(n)
    return SetFunction(universe, np.array(vals, dtype=object))
