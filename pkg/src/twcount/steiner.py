"""Counting Steiner trees of every size over a nice tree decomposition.

Each node keeps ``A_x(i, s_Y, s_1, s_2)``: a signed count of vertex sets ``Y``
(``|Y| = i``) together with edge sets ``X`` and a pair of bijections from ``X``
onto ``Y`` minus ``v1`` minus the bag vertices switched off in ``s_1`` (resp.
``s_2``).  At the root, ``A_r(i + 1)`` is the number of trees with ``i`` edges
that contain every terminal (Cauchy-Binet on the reduced incidence matrix).

Per bag vertex the state is one of five codes::

    0 = (0,0,0)  not in Y        1 = (1,0,0)  in Y, unmatched
    2 = (1,0,1)  matched by f2   3 = (1,1,0)  matched by f1   4 = (1,1,1)  both

A table is an object array of shape ``(levels, 5**k)``; positions follow the
global vertex order, position 0 being the most significant base-5 digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .dpcore import STEINER_BAG_CAP, CapacityError, PairRule, SpaceMeter, digits, encode, exact, ordered_bag, pairing_join, reduce_mod
from .instance import FORGET, INTRODUCE_EDGE, INTRODUCE_VERTEX, JOIN, LEAF, FormatError, Graph, NiceDecomposition, nice_violations
from .nsc import nsc2_left_image, nsc2_pairs, nsc2_right_image, nsc_accumulate

RADIX = 5
EMPTY, IN_Y, IN_Y2, IN_Y1, IN_Y12 = range(5)
CODE_BITS = {EMPTY: (0, 0, 0), IN_Y: (1, 0, 0), IN_Y2: (1, 0, 1), IN_Y1: (1, 1, 0), IN_Y12: (1, 1, 1)}
BITS_CODE = {v: c for c, v in CODE_BITS.items()}
_S1 = np.array([0, 0, 0, 1, 1])
_S2 = np.array([0, 0, 1, 0, 1])
_CLEAR1 = np.array([0, 1, 2, 1, 2])  # drop the f1 match
_CLEAR2 = np.array([0, 1, 1, 3, 3])  # drop the f2 match


@dataclass
class SteinerTable:
    bag: tuple[int, ...]
    data: np.ndarray  # (levels, 5**len(bag)); level = |Y|

    @property
    def size(self) -> int:
        return int(self.data.size)

    def value(self, i: int, codes: tuple[int, ...]) -> int:
        if not 0 <= i < self.data.shape[0]:
            return 0
        return self.data[i, int(encode(np.array(codes, dtype=np.int64), RADIX)) if codes else 0]


def _rule() -> PairRule:
    pairs = [(EMPTY, EMPTY, EMPTY, 0, 0, 0, 0)]
    for cy, (_, b1, c1) in CODE_BITS.items():
        for cz, (_, b2, c2) in CODE_BITS.items():
            if cy == EMPTY or cz == EMPTY or b1 & b2 or c1 & c2:
                continue
            pairs.append((cy, cz, BITS_CODE[(1, b1 | b2, c1 | c2)], b1, b2, c1, c2))
    return PairRule(RADIX, tuple(pairs))


STEINER_RULE = _rule()


# -- non-join transitions -----------------------------------------------------------


def _cube(data: np.ndarray, k: int) -> np.ndarray:
    return data.reshape((data.shape[0],) + (RADIX,) * k)


def leaf_table() -> SteinerTable:
    return SteinerTable((), exact(np.ones((1, 1), dtype=np.int64)))


def introduce_vertex(child: SteinerTable, v: int, bag: tuple[int, ...], terminal: bool) -> SteinerTable:
    k = len(bag)
    p = bag.index(v)
    L = child.data.shape[0]
    out = np.zeros((L + 1,) + (RADIX,) * k, dtype=object)
    view = np.moveaxis(out, p + 1, 0)
    src = _cube(child.data, k - 1)
    if not terminal:
        view[EMPTY][:L] = src
    view[IN_Y][1:] = src
    return SteinerTable(bag, out.reshape(L + 1, -1))


@lru_cache(maxsize=None)
def _edge_terms(k: int, pu: int, pv: int, skip: tuple[int, ...]):
    """(target, source, factor-without-incidence, w1, w2) index arrays for an introduce-edge step."""
    D = digits(RADIX, k)
    terms = []
    ends = [p for p in dict.fromkeys((pu, pv)) if p not in skip]
    for w1 in ends:
        for w2 in ends:
            ok = (D[:, pu] > 0) & (D[:, pv] > 0) & (_S1[D[:, w1]] == 1) & (_S2[D[:, w2]] == 1)
            tgt = np.flatnonzero(ok)
            src = D[tgt].copy()
            src[:, w1] = _CLEAR1[src[:, w1]]
            src[:, w2] = _CLEAR2[src[:, w2]]
            # inserting the newest edge above every matched vertex of higher rank
            inv = _S1[src[:, w1 + 1 :]].sum(axis=1) + _S2[src[:, w2 + 1 :]].sum(axis=1)
            terms.append((tgt, encode(src, RADIX), 1 - 2 * (inv & 1), w1, w2))
    return terms


def introduce_edge(child: SteinerTable, g: Graph, e: int, v1: int) -> SteinerTable:
    bag = child.bag
    u, v = g.edges[e]
    pu, pv = bag.index(u), bag.index(v)
    skip = tuple(p for p in (pu, pv) if bag[p] == v1)
    out = child.data.copy()
    for tgt, src, sign, w1, w2 in _edge_terms(len(bag), pu, pv, skip):
        coef = g.incidence(bag[w1], e) * g.incidence(bag[w2], e)
        out[:, tgt] += child.data[:, src] * (sign * coef).astype(object)
    return SteinerTable(bag, out)


def forget_vertex(child: SteinerTable, v: int, bag: tuple[int, ...], v1: int) -> SteinerTable:
    k = len(child.bag)
    p = child.bag.index(v)
    view = np.moveaxis(_cube(child.data, k), p + 1, 0)
    out = view[EMPTY] + view[IN_Y12]
    if v == v1:
        out = out + view[IN_Y]
    return SteinerTable(bag, np.ascontiguousarray(out).reshape(child.data.shape[0], -1))


# -- join ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def _active(k: int) -> np.ndarray:
    """``|s_Y^{-1}(1)|`` of every code."""
    return (digits(RADIX, k) > 0).sum(axis=1)


def _shift_levels(conv: np.ndarray, k: int, levels: int) -> np.ndarray:
    """``out[i, x] = conv[i + |A(x)|, x]`` truncated to ``levels`` rows."""
    a = _active(k)
    out = np.zeros((levels, conv.shape[1]), dtype=object)
    for r in range(k + 1):
        cols = np.flatnonzero(a == r)
        top = min(levels, conv.shape[0] - r)
        if top > 0:
            out[:top, cols] = conv[r : r + top][:, cols]
        if conv.shape[0] - r > levels and np.any(conv[r + levels :, cols] != 0):
            raise RuntimeError("join produced a vertex count beyond the subtree size")
    return out


def join_naive(f: np.ndarray, g: np.ndarray, k: int, levels: int, modulus: int | None = None) -> np.ndarray:
    conv = pairing_join(f, g, k, STEINER_RULE, modulus)
    return _shift_levels(conv, k, levels)


@lru_cache(maxsize=None)
def _pair_index(k: int, a: int) -> np.ndarray:
    """For every position set ``A`` of size ``a``: flat code index of each ``(C << a) | B`` with ``B, C <= A``."""
    masks = [m for m in range(1 << k) if bin(m).count("1") == a]
    idx = np.zeros((len(masks), 1 << (2 * a)), dtype=np.int64)
    sub = np.arange(1 << (2 * a))
    bsub, csub = sub & ((1 << a) - 1), sub >> a
    weights = RADIX ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for row, m in enumerate(masks):
        pos = [p for p in range(k) if m >> p & 1]
        code = np.zeros(len(sub), dtype=np.int64)
        for j, p in enumerate(pos):
            b = (bsub >> j) & 1
            c = (csub >> j) & 1
            # (b, c) -> Y, Y2, Y1, Y12
            code = code + weights[p] * (1 + c + 2 * b)
        idx[row] = code
    return idx


def join_fast(f: np.ndarray, g: np.ndarray, k: int, levels: int, modulus: int | None = None, meter: SpaceMeter | None = None, backend: str = "auto") -> np.ndarray:
    """Join through one NSC2 per active set ``A`` (batched over all ``A`` of equal size)."""
    f = reduce_mod(f, modulus)
    g = reduce_mod(g, modulus)
    out = np.zeros((levels, RADIX**k), dtype=object)
    for a in range(k + 1):
        idx = _pair_index(k, a)
        F = f[:, idx]  # (Lf, #A, 4**a)
        G = g[:, idx]
        if meter is not None:
            meter.transient(F.size + G.size)
        left = {i: nsc2_left_image(F[i], a) for i in range(F.shape[0]) if np.any(F[i] != 0)}
        right = {j: nsc2_right_image(G[j], a) for j in range(G.shape[0]) if np.any(G[j] != 0)}
        for t in range(a, a + levels):
            pairs = []
            for i, li in left.items():
                if t - i in right:
                    pairs += nsc2_pairs(li, right[t - i])
            if pairs:
                out[t - a, idx] = nsc_accumulate(pairs, 2 * a, backend, modulus)
        spill = [i + j for i in left for j in right if i + j >= a + levels]
        for t in sorted(set(spill)):
            pairs = []
            for i, li in left.items():
                if t - i in right:
                    pairs += nsc2_pairs(li, right[t - i])
            if np.any(nsc_accumulate(pairs, 2 * a, backend, modulus) != 0):
                raise RuntimeError("join produced a vertex count beyond the subtree size")
    return out


def steiner_join(y: SteinerTable, z: SteinerTable, levels: int, mode: str = "fast", modulus: int | None = None, meter: SpaceMeter | None = None) -> SteinerTable:
    if y.bag != z.bag:
        raise ValueError(f"join children have different bags: {y.bag} vs {z.bag}")
    k = len(y.bag)
    if mode == "naive":
        data = join_naive(y.data, z.data, k, levels, modulus)
    elif mode == "fast":
        data = join_fast(y.data, z.data, k, levels, modulus, meter)
    else:
        raise ValueError(f"unknown join mode {mode!r}")
    return SteinerTable(y.bag, data)


# -- driver ----------------------------------------------------------------------


NodeHook = Callable[[int, SteinerTable], SteinerTable | None]


def steiner_tables(g: Graph, terminals, nd: NiceDecomposition, mode: str = "fast", order: str = "forget", modulus: int | None = None, meter: SpaceMeter | None = None, hook: NodeHook | None = None) -> SteinerTable:
    """Run the DP bottom-up and return the root table.

    ``hook(x, table)`` sees every node's table right after it is built and may
    return a replacement (used to inject faults in tests).
    """
    K = frozenset(terminals)
    if not K:
        raise FormatError("terminal set is empty")
    if not K <= set(g.vertices):
        raise FormatError("terminal outside the vertex set")
    if mode not in ("fast", "naive"):
        raise ValueError(f"unknown join mode {mode!r}")
    bad = nice_violations(nd)
    if bad:
        raise FormatError(f"invalid nice decomposition: {bad[0]}")
    if nd.width + 1 > STEINER_BAG_CAP:
        raise CapacityError(f"bag size {nd.width + 1} exceeds cap {STEINER_BAG_CAP}")
    rank = nd.vertex_order(order)
    v1 = min(K)
    meter = meter if meter is not None else SpaceMeter()
    sizes = {}
    tables: dict[int, SteinerTable] = {}
    for x in nd.postorder():
        node = nd.nodes[x]
        bag = ordered_bag(nd, x, rank)
        kids = [tables.pop(c) for c in node.children]
        if node.kind == LEAF:
            t = leaf_table()
        elif node.kind == INTRODUCE_VERTEX:
            t = introduce_vertex(kids[0], node.vertex, bag, node.vertex in K)
        elif node.kind == INTRODUCE_EDGE:
            t = introduce_edge(kids[0], g, node.edge, v1)
        elif node.kind == FORGET:
            t = forget_vertex(kids[0], node.vertex, bag, v1)
        elif node.kind == JOIN:
            t = steiner_join(kids[0], kids[1], len(nd.scope_vertices(x)) + 1, mode, modulus, meter)
        else:  # pragma: no cover - nice_violations rejects this
            raise ValueError(node.kind)
        t = SteinerTable(t.bag, reduce_mod(t.data, modulus))
        meter.hold(t.size)
        for kid in node.children:
            meter.release(sizes.pop(kid))
        if hook is not None:
            t = hook(x, t) or t
        sizes[x] = t.size
        tables[x] = t
    return tables[nd.root]


def count_steiner(g: Graph, terminals, nd: NiceDecomposition, mode: str = "fast", order: str = "forget", modulus: int | None = None, meter: SpaceMeter | None = None, hook: NodeHook | None = None) -> list[int]:
    """``counts[i]`` = number of trees with ``i`` edges whose vertex set contains every terminal."""
    root = steiner_tables(g, terminals, nd, mode, order, modulus, meter, hook)
    levels = root.data[:, 0]
    return [int(levels[i + 1]) if i + 1 < len(levels) else 0 for i in range(max(g.n, 1))]
