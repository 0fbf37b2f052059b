"""Sign-twisted (non-commutative) subset convolutions.

``nsc``:  (f <> g)(X)    = sum_{A + B = X} f(A) g(B) I(A, B)
``nsc2``: (f <>2 g)(X,Y) = sum_{X1 + X2 = X, Y1 + Y2 = Y} f(X1,Y1) g(X2,Y2) I(X1,X2) I(Y1,Y2)

where ``+`` is disjoint union.  The fast paths split operands by subset size,
multiply every size pair in the Clifford algebra through its matrix image
and keep only the products whose support has the summed size.  Products that
land on the same target size are accumulated in the matrix domain so each
target size needs a single inverse transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .clifford import _FLOAT_EXACT, _as_object, _max_abs, compact, gaussian_matmul, phi_forward_array, phi_inverse_array, qubits
from .subsetfn import SetFunction, Universe, UniverseMismatch, popcounts, rank_split_array, sign_I, submasks

NSC_FAST_CAP = 20
NSC2_FAST_CAP = 10


@dataclass(frozen=True)
class PairSetFunction:
    """Function on pairs ``(X, Y)`` of subsets, stored at index ``(Y << n) | X``."""

    universe: Universe
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=object)
        if coeffs.shape != (1 << (2 * self.universe.n),):
            raise ValueError(f"expected {1 << (2 * self.universe.n)} coefficients")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_dict(cls, universe: Universe, values: dict) -> "PairSetFunction":
        n = universe.n
        coeffs = np.zeros(1 << (2 * n), dtype=object)
        for (x, y), v in values.items():
            xm = x if isinstance(x, int) else universe.mask(x)
            ym = y if isinstance(y, int) else universe.mask(y)
            coeffs[(ym << n) | xm] += v
        return cls(universe, coeffs)

    @property
    def n(self) -> int:
        return self.universe.n

    def __getitem__(self, xy) -> int:
        x, y = xy
        xm = x if isinstance(x, int) else self.universe.mask(x)
        ym = y if isinstance(y, int) else self.universe.mask(y)
        return self.coeffs[(ym << self.n) | xm]

    def __eq__(self, other):
        if not isinstance(other, PairSetFunction):
            return NotImplemented
        return self.universe == other.universe and all(int(a) == int(b) for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]


# -- array kernels -------------------------------------------------------------


@lru_cache(maxsize=None)
def _parity_split(t: int) -> tuple[np.ndarray, np.ndarray]:
    """Row indices of even and odd popcount; the Z-parity eigenspaces of the image."""
    pc = popcounts(t)
    return np.flatnonzero(pc % 2 == 0), np.flatnonzero(pc % 2 == 1)


def _to_blocks(m, parity: int, t: int):
    """Compress a matrix of known grade into its two nonzero half blocks.

    Even elements commute with the parity operator (block diagonal), odd
    elements anticommute with it (block off-diagonal).
    """
    ev, od = _parity_split(t)
    rows = (ev, od)
    cols = (ev, od) if parity == 0 else (od, ev)
    return [m[..., rows[h][:, None], cols[h][None, :]] for h in (0, 1)]


def _from_blocks(b0, b1, parity: int, t: int, lead) -> np.ndarray:
    ev, od = _parity_split(t)
    side = 1 << t
    out = np.zeros(tuple(lead) + (side, side), dtype=b0.dtype)
    rows = (ev, od)
    cols = (ev, od) if parity == 0 else (od, ev)
    out[..., rows[0][:, None], cols[0][None, :]] = b0
    out[..., rows[1][:, None], cols[1][None, :]] = b1
    return out


def _common(a, b):
    if a.dtype == b.dtype:
        return a, b
    return _as_object(a), _as_object(b)


def _cat(parts, axis):
    # concatenate keeps the inputs' memory layout; BLAS wants C order
    out = np.concatenate(np.broadcast_arrays(*parts), axis=axis) if len(parts) > 1 else parts[0]
    return np.ascontiguousarray(out)


@dataclass
class NscImage:
    """Rank-split matrix image of a batch of set functions, reusable across many products.

    ``ranks[i]`` is ``None`` when the size-``i`` slice vanishes, otherwise the
    ``(re_blocks, im_blocks)`` parity-compressed image of that slice.  Small
    images also keep complex128 copies of the blocks in ``cplx`` so products
    can go straight to BLAS.
    """

    n: int
    shape: tuple
    ranks: list
    scalar: np.ndarray | None = None  # n == 0: the values themselves
    cplx: list | None = None
    bounds: list | None = None  # max |entry| of each rank image


def nsc_image(arr: np.ndarray, n: int) -> NscImage:
    arr = np.asarray(arr)
    if n == 0:
        return NscImage(0, arr.shape, [], np.asarray(arr, dtype=object))
    # matrix entries are signed sums of at most 2**n coefficients
    arr = compact(arr, 1 << n)
    ranked = rank_split_array(arr, n)
    live = [i for i, s in enumerate(ranked) if np.any(s != 0)]
    ranks: list = [None] * (n + 1)
    cplx: list = [None] * (n + 1)
    bounds = [0] * (n + 1)
    if live:
        re, im = phi_forward_array(ranked[live], n)
        t = qubits(n)
        for j, i in enumerate(live):
            rb, ib = _to_blocks(re[j], i & 1, t), _to_blocks(im[j], i & 1, t)
            ranks[i] = (rb, ib)
            bounds[i] = max(_max_abs(re[j]), _max_abs(im[j]))
            if bounds[i] < _FLOAT_EXACT:
                cplx[i] = [rb[h].astype(np.float64) + 1j * ib[h].astype(np.float64) for h in (0, 1)]
    return NscImage(n, arr.shape, ranks, cplx=cplx, bounds=bounds)


def image_rows(img: NscImage, rows: np.ndarray) -> NscImage:
    """Restrict an image to some entries of its last batch axis."""
    if img.n == 0:
        return NscImage(0, img.shape[:-2] + (len(rows),) + img.shape[-1:], [], img.scalar[..., rows, :])
    take = lambda blocks: None if blocks is None else [b[..., rows, :, :] for b in blocks]  # noqa: E731
    ranks = [None if r is None else (take(r[0]), take(r[1])) for r in img.ranks]
    cplx = [take(c) for c in img.cplx]
    return NscImage(img.n, img.shape[:-2] + (len(rows),) + img.shape[-1:], ranks, cplx=cplx, bounds=img.bounds)


def _block_product(pieces, backend):
    """``sum_j L_j @ R_j`` over ``(left_rank, right_rank, fm, gm, h, src)`` pieces."""
    bound = 0
    fast = backend == "auto"
    for i, j, fm, gm, h, src in pieces:
        inner = fm.ranks[i][0][h].shape[-1]
        bound += 2 * fm.bounds[i] * gm.bounds[j] * inner
        fast = fast and fm.cplx[i] is not None and gm.cplx[j] is not None
    if fast and bound < _FLOAT_EXACT:
        left = _cat([fm.cplx[i][h] for i, j, fm, gm, h, src in pieces], -1)
        right = _cat([gm.cplx[j][src] for i, j, fm, gm, h, src in pieces], -2)
        p = np.matmul(left, right)
        return np.rint(p.real).astype(np.int64), np.rint(p.imag).astype(np.int64)
    lre = _cat([fm.ranks[i][0][h] for i, j, fm, gm, h, src in pieces], -1)
    lim = _cat([fm.ranks[i][1][h] for i, j, fm, gm, h, src in pieces], -1)
    rre = _cat([gm.ranks[j][0][src] for i, j, fm, gm, h, src in pieces], -2)
    rim = _cat([gm.ranks[j][1][src] for i, j, fm, gm, h, src in pieces], -2)
    return gaussian_matmul(lre, lim, rre, rim, backend)


def nsc_accumulate(pairs, n: int, backend: str = "auto", modulus: int | None = None) -> np.ndarray:
    """``sum_k nsc(f_k, g_k)`` from precomputed images (leading axes broadcast)."""
    shape = np.broadcast_shapes(*(a.shape for a, _ in pairs), *(b.shape for _, b in pairs))
    if n == 0:
        total = sum(a.scalar * b.scalar for a, b in pairs)
        out = np.broadcast_to(total, shape).copy()
        return out % modulus if modulus is not None else out
    pc = popcounts(n)
    t = qubits(n)
    out = np.zeros(shape, dtype=object)
    lead = shape[:-1]
    for r in range(n + 1):
        # block h of the product: left block h times right block (h if left even else 1 - h)
        parts = {0: [], 1: []}
        for fm, gm in pairs:
            for i in range(r + 1):
                if fm.ranks[i] is None or gm.ranks[r - i] is None:
                    continue
                for h in (0, 1):
                    parts[h].append((i, r - i, fm, gm, h, h if i % 2 == 0 else 1 - h))
        if not parts[0]:
            continue
        # one block product per half: [F_0 | F_1 | ...] @ [G_r; G_{r-1}; ...]
        blocks = [_block_product(parts[h], backend) for h in (0, 1)]
        (re0, im0), (re1, im1) = blocks
        blead = np.broadcast_shapes(re0.shape[:-2], re1.shape[:-2])
        re = _from_blocks(*_common(re0, re1), r & 1, t, blead)
        im = _from_blocks(*_common(im0, im1), r & 1, t, blead)
        if modulus is not None:
            re, im = _as_object(re) % modulus, _as_object(im) % modulus
        h = phi_inverse_array(re, im, n, modulus)
        sel = pc == r
        out[..., sel] = np.broadcast_to(h, lead + h.shape[-1:])[..., sel]
    return out


def nsc_sum_array(pairs, n: int, backend: str = "auto", modulus: int | None = None) -> np.ndarray:
    """``sum_k nsc(f_k, g_k)`` for arrays with the subset axis last (leading axes batch)."""
    return nsc_accumulate([(nsc_image(f, n), nsc_image(g, n)) for f, g in pairs], n, backend, modulus)


def nsc_array(f: np.ndarray, g: np.ndarray, n: int, backend: str = "auto", modulus: int | None = None) -> np.ndarray:
    return nsc_sum_array([(f, g)], n, backend, modulus)


def _parity_masks(n: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << (2 * n), dtype=np.int64)
    pc = popcounts(n)
    x_odd = (pc[idx & ((1 << n) - 1)] & 1).astype(bool)
    y_odd = (pc[idx >> n] & 1).astype(bool)
    return x_odd, y_odd


def nsc2_left_image(f: np.ndarray, n: int) -> tuple[NscImage, NscImage]:
    """Images of the left operand split by the parity of ``|Y|``."""
    _, y_odd = _parity_masks(n)
    return nsc_image(np.where(y_odd, 0, f), 2 * n), nsc_image(np.where(y_odd, f, 0), 2 * n)


def nsc2_right_image(g: np.ndarray, n: int) -> tuple[NscImage, NscImage]:
    """Images of ``g`` and of ``g`` with odd-``|X|`` entries negated."""
    x_odd, _ = _parity_masks(n)
    return nsc_image(g, 2 * n), nsc_image(np.where(x_odd, -np.asarray(g), g), 2 * n)


def nsc2_pairs(left: tuple[NscImage, NscImage], right: tuple[NscImage, NscImage]) -> list:
    # f0 <> (g0 + g1) + f1 <> (g0 - g1), both on the doubled universe with Y above X
    return [(left[0], right[0]), (left[1], right[1])]


def nsc2_array(f: np.ndarray, g: np.ndarray, n: int, backend: str = "auto", modulus: int | None = None) -> np.ndarray:
    """Batched NSC2 on arrays indexed by ``(Y << n) | X`` along the last axis."""
    pairs = nsc2_pairs(nsc2_left_image(f, n), nsc2_right_image(g, n))
    return nsc_accumulate(pairs, 2 * n, backend, modulus)


def nsc_naive_array(f: np.ndarray, g: np.ndarray, n: int) -> np.ndarray:
    full = (1 << n) - 1
    out = np.zeros(1 << n, dtype=object)
    for a in range(1 << n):
        fv = f[a]
        if not fv:
            continue
        for b in submasks(full ^ a):
            gv = g[b]
            if gv:
                out[a | b] += fv * gv * sign_I(a, b)
    return out


def nsc2_naive_array(f: np.ndarray, g: np.ndarray, n: int) -> np.ndarray:
    full = (1 << n) - 1
    low = full
    out = np.zeros(1 << (2 * n), dtype=object)
    g_support = {i for i in range(1 << (2 * n)) if g[i]}
    for i1 in range(1 << (2 * n)):
        fv = f[i1]
        if not fv:
            continue
        x1, y1 = i1 & low, i1 >> n
        for x2 in submasks(full ^ x1):
            sx = sign_I(x1, x2)
            for y2 in submasks(full ^ y1):
                i2 = (y2 << n) | x2
                if i2 in g_support:
                    out[((y1 | y2) << n) | x1 | x2] += fv * g[i2] * sx * sign_I(y1, y2)
    return out


# -- public operations -----------------------------------------------------------


def nsc(f: SetFunction, g: SetFunction, mode: str = "fast", backend: str = "auto", modulus: int | None = None) -> SetFunction:
    if f.universe != g.universe:
        raise UniverseMismatch("nsc operands live on different universes")
    n = f.n
    if mode == "naive":
        out = nsc_naive_array(f.coeffs, g.coeffs, n)
        if modulus is not None:
            out = out % modulus
    elif mode == "fast":
        if n > NSC_FAST_CAP:
            raise ValueError(f"fast nsc supports at most {NSC_FAST_CAP} elements")
        out = nsc_array(f.coeffs, g.coeffs, n, backend, modulus)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SetFunction(f.universe, out)


def nsc2(f: PairSetFunction, g: PairSetFunction, mode: str = "fast", backend: str = "auto", modulus: int | None = None) -> PairSetFunction:
    if f.universe != g.universe:
        raise UniverseMismatch("nsc2 operands live on different universes")
    n = f.n
    if mode == "naive":
        out = nsc2_naive_array(f.coeffs, g.coeffs, n)
        if modulus is not None:
            out = out % modulus
    elif mode == "fast":
        if n > NSC2_FAST_CAP:
            raise ValueError(f"fast nsc2 supports at most {NSC2_FAST_CAP} elements")
        out = nsc2_array(f.coeffs, g.coeffs, n, backend, modulus)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return PairSetFunction(f.universe, out)
