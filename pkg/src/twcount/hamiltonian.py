"""Counting Hamiltonian cycles over a nice tree decomposition.

``A_x(s_deg, s_1, s_2)`` is a signed count of edge sets ``X`` (degree 2 at
forgotten vertices, ``s_deg`` on the bag), subsets ``S`` of ``X`` and pairs of
bijections from ``S`` onto the forgotten vertices other than ``v1`` plus the
bag vertices switched on in ``s_1`` (resp. ``s_2``).  The root value is ``n``
times the number of Hamiltonian cycles.

Bag vertices other than ``v1`` carry one of six codes, stored by index::

    index       0      1      2      3      4      5
    raw       000    100    101    110    111    211     (s_deg, s_1, s_2)
    set form  000    100    101    010    011    111     ([in A], [in B], [in C])

``v1`` is never matched, so its axis only records its degree (0, 1 or 2).
Joins slice that axis off and run on the six-code part alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .clifford import compact
from .dpcore import HAM_BAG_CAP, CapacityError, PairRule, SpaceMeter, digits, exact, ordered_bag, pair_sign, pairing_join, reduce_mod
from .instance import FORGET, INTRODUCE_EDGE, INTRODUCE_VERTEX, JOIN, LEAF, FormatError, Graph, NiceDecomposition, nice_violations
from .nsc import nsc2_left_image, nsc2_pairs, nsc2_right_image, nsc_accumulate
from .subsetfn import mobius_array, popcounts, zeta_array

RAW = ((0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1), (2, 1, 1))
SETS = ((0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 1, 0), (0, 1, 1), (1, 1, 1))
V1_CODES = ((0, 0, 0), (1, 0, 0), (2, 0, 0))
_RAW_INDEX = {c: i for i, c in enumerate(RAW)}
_IN_A = np.array([c[0] for c in SETS])


def translate_states(table: dict) -> dict:
    """Recode ``{codes: value}`` from raw ``(s_deg, s_1, s_2)`` triples to set triples."""
    out = {}
    for codes, v in table.items():
        try:
            out[tuple(SETS[_RAW_INDEX[tuple(c)]] for c in codes)] = v
        except KeyError:
            raise ValueError(f"disallowed triple in {codes}") from None
    return out


def untranslate_states(table: dict) -> dict:
    back = {c: RAW[i] for i, c in enumerate(SETS)}
    out = {}
    for codes, v in table.items():
        try:
            out[tuple(back[tuple(c)] for c in codes)] = v
        except KeyError:
            raise ValueError(f"disallowed triple in {codes}") from None
    return out


@dataclass
class HamTable:
    bag: tuple[int, ...]
    v1: int
    data: np.ndarray  # flat, radices per position: 3 for v1, else 6

    @property
    def radices(self) -> tuple[int, ...]:
        return tuple(3 if v == self.v1 else 6 for v in self.bag)

    @property
    def size(self) -> int:
        return int(self.data.size)

    def cube(self) -> np.ndarray:
        return self.data.reshape(self.radices)

    def as_dict(self) -> dict:
        """Nonzero entries keyed by raw triples per bag vertex."""
        cube = self.cube()
        if not self.bag:
            return {(): cube[()]} if cube[()] != 0 else {}
        out = {}
        for idx in zip(*np.nonzero(cube != 0)):
            codes = tuple(V1_CODES[i] if v == self.v1 else RAW[i] for v, i in zip(self.bag, idx))
            out[codes] = cube[idx]
        return out


def _rule() -> PairRule:
    pairs = []
    for iy, (ay, by, cy) in enumerate(SETS):
        for iz, (az, bz, cz) in enumerate(SETS):
            if ay & az or by & bz or cy & cz:
                continue
            x = (ay | az, by | bz, cy | cz)
            if x in SETS:
                pairs.append((iy, iz, SETS.index(x), by, bz, cy, cz))
    return PairRule(6, tuple(pairs))


HAM_RULE = _rule()


# -- non-join transitions --------------------------------------------------------------


def leaf_table(v1: int) -> HamTable:
    return HamTable((), v1, exact(np.ones(1, dtype=np.int64)))


def introduce_vertex(child: HamTable, v: int, bag: tuple[int, ...]) -> HamTable:
    t = HamTable(bag, child.v1, None)  # type: ignore[arg-type]
    out = np.zeros(t.radices, dtype=object)
    np.moveaxis(out, bag.index(v), 0)[0] = child.cube()
    t.data = out.reshape(-1)
    return t


@lru_cache(maxsize=None)
def _decode(radices: tuple[int, ...]):
    """Per-code arrays of degree, s_1, s_2 for every position (shape ``(N, k)`` each)."""
    k = len(radices)
    grid = np.indices(radices).reshape(k, -1).T if k else np.zeros((1, 0), dtype=np.int64)
    deg = np.zeros_like(grid)
    s1 = np.zeros_like(grid)
    s2 = np.zeros_like(grid)
    for p, r in enumerate(radices):
        table = np.array(V1_CODES if r == 3 else RAW)
        deg[:, p], s1[:, p], s2[:, p] = table[grid[:, p]].T
    return grid, deg, s1, s2


def _encode(deg, s1, s2, radices) -> np.ndarray:
    """Flat index of raw triples; -1 where a triple is not a stored code."""
    lut6 = -np.ones((4, 2, 2), dtype=np.int64)
    for i, (d, a, b) in enumerate(RAW):
        lut6[d, a, b] = i
    lut3 = -np.ones((4, 2, 2), dtype=np.int64)
    for i, (d, a, b) in enumerate(V1_CODES):
        lut3[d, a, b] = i
    idx = np.zeros(deg.shape[0], dtype=np.int64)
    ok = np.ones(deg.shape[0], dtype=bool)
    for p, r in enumerate(radices):
        lut = lut3 if r == 3 else lut6
        d = np.clip(deg[:, p], 0, 3)
        c = lut[d, s1[:, p], s2[:, p]]
        ok &= (c >= 0) & (deg[:, p] >= 0)
        idx = idx * r + np.maximum(c, 0)
    return np.where(ok, idx, -1)


@lru_cache(maxsize=None)
def _edge_terms(radices: tuple[int, ...], pu: int, pv: int):
    """(target, source, sign) index arrays for every way an introduced edge enters X."""
    _, deg, s1, s2 = _decode(radices)
    terms = []
    up = (deg[:, pu] >= 1) & (deg[:, pv] >= 1)
    # e in X but not in S: both degrees drop by one in the source
    sdeg = deg.copy()
    sdeg[:, pu] -= 1
    sdeg[:, pv] -= 1
    src = _encode(sdeg, s1, s2, radices)
    tgt = np.flatnonzero(up & (src >= 0))
    terms.append((tgt, src[tgt], np.ones(len(tgt), dtype=np.int64), None, None))
    # e in S, matched to w1 under f1 and to w2 under f2 (never v1)
    ends = [p for p in dict.fromkeys((pu, pv)) if radices[p] == 6]
    for w1 in ends:
        for w2 in ends:
            t1, t2 = s1.copy(), s2.copy()
            t1[:, w1] = 0
            t2[:, w2] = 0
            src = _encode(sdeg, t1, t2, radices)
            tgt = np.flatnonzero(up & (s1[:, w1] == 1) & (s2[:, w2] == 1) & (src >= 0))
            inv = t1[tgt, w1 + 1 :].sum(axis=1) + t2[tgt, w2 + 1 :].sum(axis=1)
            terms.append((tgt, src[tgt], 1 - 2 * (inv & 1), w1, w2))
    return terms


def introduce_edge(child: HamTable, g: Graph, e: int) -> HamTable:
    bag = child.bag
    u, v = g.edges[e]
    out = child.data.copy()
    for tgt, src, sign, w1, w2 in _edge_terms(child.radices, bag.index(u), bag.index(v)):
        coef = 1 if w1 is None else g.incidence(bag[w1], e) * g.incidence(bag[w2], e)
        out[tgt] += child.data[src] * (sign * coef).astype(object)
    return HamTable(bag, child.v1, out)


def forget_vertex(child: HamTable, v: int, bag: tuple[int, ...]) -> HamTable:
    view = np.moveaxis(child.cube(), child.bag.index(v), 0)
    # degree two, and matched under both maps unless it is v1
    keep = 2 if v == child.v1 else 5
    return HamTable(bag, child.v1, np.ascontiguousarray(view[keep]).reshape(-1))


# -- tau, mu and the oslash product ------------------------------------------------------

# roles after tau, per vertex: inside D with (b, c) = 00, 01, 10, 11; outside D with e = 0, 1
_TAU = np.array(
    [
        [1, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 1],
        [1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0],
    ],
    dtype=np.int64,
)
_TAU_INV = np.array(
    [
        [0, 0, 0, 0, 1, 0],
        [1, 0, 0, 0, -1, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 1, 0, -1],
    ],
    dtype=np.int64,
)


@lru_cache(maxsize=None)
def _tau_sign(k: int) -> np.ndarray:
    """``I(B, E) I(C, E)`` for every role vector."""
    R = digits(6, k)
    b = (R == 2) | (R == 3)
    c = (R == 1) | (R == 3)
    e = R == 5
    return pair_sign(b, e) * pair_sign(c, e)


def _per_vertex(arr: np.ndarray, k: int, mat: np.ndarray) -> np.ndarray:
    lead = arr.shape[:-1]
    x = arr.reshape(lead + (6,) * k)
    m = mat if arr.dtype != object else mat.astype(object)
    for ax in range(k):
        axis = len(lead) + ax
        x = np.moveaxis(np.tensordot(m, x, axes=([1], [axis])), 0, axis)
    return x.reshape(lead + (6**k,))


def tau_forward(f: np.ndarray, k: int) -> np.ndarray:
    """All ``tau_D f`` at once, indexed by per-vertex role (see :func:`family_index`)."""
    return _per_vertex(np.asarray(f), k, _TAU) * _tau_sign(k)


def tau_inverse(fam: np.ndarray, k: int) -> np.ndarray:
    return _per_vertex(np.asarray(fam) * _tau_sign(k), k, _TAU_INV)


@lru_cache(maxsize=None)
def family_index(k: int, d: int) -> tuple[tuple[int, ...], np.ndarray]:
    """Masks ``D`` with ``|D| = d`` and, per ``D``, the role-vector index of ``(E, (C << d) | B)``.

    ``E`` runs over subsets of the positions outside ``D``, ``B`` and ``C`` over
    subsets of ``D``; bits follow increasing position.
    """
    masks = tuple(m for m in range(1 << k) if bin(m).count("1") == d)
    out = np.zeros((len(masks), 1 << (k - d), 1 << (2 * d)), dtype=np.int64)
    E = np.arange(1 << (k - d))[:, None]
    BC = np.arange(1 << (2 * d))[None, :]
    B, C = BC & ((1 << d) - 1), BC >> d
    for row, m in enumerate(masks):
        inside = [p for p in range(k) if m >> p & 1]
        outside = [p for p in range(k) if not m >> p & 1]
        idx = np.zeros((1 << (k - d), 1 << (2 * d)), dtype=np.int64)
        for p in range(k):
            if p in inside:
                j = inside.index(p)
                role = 2 * ((B >> j) & 1) + ((C >> j) & 1)
            else:
                j = outside.index(p)
                role = 4 + ((E >> j) & 1)
            idx = idx * 6 + role
        out[row] = idx
    return masks, out


def mu_forward(h: np.ndarray, m: int) -> np.ndarray:
    """Zeta transform over the ``E`` axis (axis -2) of ``(..., 2**m, 4**d)`` arrays."""
    return np.swapaxes(zeta_array(np.swapaxes(h, -1, -2), m), -1, -2)


def mu_inverse(h: np.ndarray, m: int) -> np.ndarray:
    return np.swapaxes(mobius_array(np.swapaxes(h, -1, -2), m), -1, -2)


@lru_cache(maxsize=None)
def _bc_odd(d: int) -> np.ndarray:
    return popcounts(2 * d) % 2 == 1


def oslash_ranked(fs: dict, gs: dict, d: int, m: int, modulus: int | None = None, backend: str = "auto", smax: int | None = None) -> dict:
    """Graded ``oslash`` products of families in ``H_D`` (batched over leading axes).

    ``fs`` and ``gs`` map a grade to an array ``(..., 2**m, 4**d)`` over
    ``(E, (C << d) | B)``.  Returns ``{s: sum_{a1 + a2 = s} fs[a1] oslash gs[a2]}``
    for ``s <= smax``.
    """
    pcE = popcounts(m)
    odd = _bc_odd(d)
    zf, zg = {}, {}
    for a, f in fs.items():
        for e in range(m + 1):
            part = np.where((pcE == e)[:, None], f, 0)
            if np.any(part != 0):
                zf[a, e] = mu_forward(compact(part), m)
    for a, g in gs.items():
        for e in range(m + 1):
            part = np.where((pcE == e)[:, None], g, 0)
            if np.any(part != 0):
                # (-1)^{|E1| (|B2| + |C2|)}: odd-|E1| partners see odd-parity entries negated
                flipped = np.where(odd[None, :], -part, part)
                zg[a, e] = (mu_forward(compact(part), m), mu_forward(compact(flipped), m))
    lead = np.broadcast_shapes(*(np.shape(v) for v in fs.values()), *(np.shape(v) for v in gs.values()))
    zeta_out: dict = {}
    # After the zeta transform a grade-e piece vanishes on rows |E'| < e, and the
    # Moebius step reads grade t only on rows |E'| <= t; work one row size at a time.
    for j in range(m + 1):
        rows = np.flatnonzero(pcE == j)
        left = {key: nsc2_left_image(v[..., rows, :], d) for key, v in zf.items() if key[1] <= j}
        right = {key: tuple(nsc2_right_image(w[..., rows, :], d) for w in v) for key, v in zg.items() if key[1] <= j}
        targets = sorted({(a1 + a2, e1 + e2) for a1, e1 in left for a2, e2 in right})
        for s_, t in targets:
            if t < j or (smax is not None and s_ > smax):
                continue
            pairs = []
            for (a1, e1), li in left.items():
                ri = right.get((s_ - a1, t - e1))
                if ri is not None:
                    pairs += nsc2_pairs(li, ri[e1 & 1])
            if not pairs:
                continue
            if (s_, t) not in zeta_out:
                zeta_out[s_, t] = np.zeros(lead, dtype=object)
            zeta_out[s_, t][..., rows, :] = nsc_accumulate(pairs, 2 * d, backend, modulus)
    out = {}
    for (s_, t), z in zeta_out.items():
        h = np.where((pcE == t)[:, None], mu_inverse(z, m), 0)
        out[s_] = out[s_] + h if s_ in out else h
    return {s_: reduce_mod(h, modulus) for s_, h in out.items()}


def oslash_multiply(f: np.ndarray, g: np.ndarray, d: int, m: int, modulus: int | None = None) -> np.ndarray:
    """``f oslash g`` for single ``H_D`` elements shaped ``(2**m, 4**d)``."""
    res = oslash_ranked({0: f}, {0: g}, d, m, modulus)
    return res.get(0, np.zeros(np.broadcast_shapes(np.shape(f), np.shape(g)), dtype=object))


# -- joins ---------------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _a_size(k: int) -> np.ndarray:
    return _IN_A[digits(6, k)].sum(axis=1) if k else np.zeros(1, dtype=np.int64)


def join6_naive(f: np.ndarray, g: np.ndarray, k: int, modulus: int | None = None) -> np.ndarray:
    return pairing_join(f[None, :], g[None, :], k, HAM_RULE, modulus)[0]


def join6_fast(f: np.ndarray, g: np.ndarray, k: int, modulus: int | None = None, meter: SpaceMeter | None = None, backend: str = "auto") -> np.ndarray:
    """Set-form join ``sum f(A1,B1,C1) g(A2,B2,C2) I I`` over disjoint splits, through tau."""
    f = reduce_mod(exact(f), modulus)
    g = reduce_mod(exact(g), modulus)
    asz = _a_size(k)
    tf = {a: tau_forward(np.where(asz == a, f, 0), k) for a in range(k + 1) if np.any(f[asz == a] != 0)}
    tg = {a: tau_forward(np.where(asz == a, g, 0), k) for a in range(k + 1) if np.any(g[asz == a] != 0)}
    if meter is not None:
        meter.transient((len(tf) + len(tg)) * 6**k)
    fam: dict[int, np.ndarray] = {}
    for d in range(k + 1):
        _, idx = family_index(k, d)
        # tau_D only sees A inside D
        fs = {a: t[idx] for a, t in tf.items() if a <= d}
        gs = {a: t[idx] for a, t in tg.items() if a <= d}
        if not fs or not gs:
            continue
        for s, h in oslash_ranked(fs, gs, d, k - d, modulus, backend, smax=k).items():
            if s not in fam:
                fam[s] = np.zeros(6**k, dtype=object)
            fam[s][idx] = h
    out = np.zeros(6**k, dtype=object)
    for s, h in fam.items():
        prod = tau_inverse(h, k)
        out = out + np.where(asz == s, prod, 0)
    return reduce_mod(out, modulus)


def ham_join(y: HamTable, z: HamTable, mode: str = "fast", modulus: int | None = None, meter: SpaceMeter | None = None) -> HamTable:
    if y.bag != z.bag:
        raise ValueError(f"join children have different bags: {y.bag} vs {z.bag}")
    bag = y.bag
    k6 = sum(1 for r in y.radices if r == 6)
    if mode == "naive":
        core = lambda a, b: join6_naive(a, b, k6, modulus)  # noqa: E731
    elif mode == "fast":
        core = lambda a, b: join6_fast(a, b, k6, modulus, meter)  # noqa: E731
    else:
        raise ValueError(f"unknown join mode {mode!r}")
    if y.v1 not in bag:
        return HamTable(bag, y.v1, core(y.data, z.data))
    # v1 carries only a degree, which adds up with no sign
    p = bag.index(y.v1)
    fy = np.moveaxis(y.cube(), p, 0).reshape(3, -1)
    fz = np.moveaxis(z.cube(), p, 0).reshape(3, -1)
    out = np.zeros((3, fy.shape[1]), dtype=object)
    for dy in range(3):
        for dz in range(3 - dy):
            if np.any(fy[dy] != 0) and np.any(fz[dz] != 0):
                out[dy + dz] += core(fy[dy], fz[dz])
    rest = tuple(r for v, r in zip(bag, y.radices) if v != y.v1)
    cube = np.moveaxis(out.reshape((3,) + rest), 0, p)
    return HamTable(bag, y.v1, reduce_mod(np.ascontiguousarray(cube).reshape(-1), modulus))


# -- driver ----------------------------------------------------------------------------------


NodeHook = Callable[[int, HamTable], HamTable | None]


def ham_tables(g: Graph, nd: NiceDecomposition, mode: str = "fast", order: str = "forget", modulus: int | None = None, meter: SpaceMeter | None = None, hook: NodeHook | None = None, v1: int = 1) -> HamTable:
    if mode not in ("fast", "naive"):
        raise ValueError(f"unknown join mode {mode!r}")
    bad = nice_violations(nd)
    if bad:
        raise FormatError(f"invalid nice decomposition: {bad[0]}")
    if nd.width + 1 > HAM_BAG_CAP:
        raise CapacityError(f"bag size {nd.width + 1} exceeds cap {HAM_BAG_CAP}")
    rank = nd.vertex_order(order)
    meter = meter if meter is not None else SpaceMeter()
    tables: dict[int, HamTable] = {}
    for x in nd.postorder():
        node = nd.nodes[x]
        bag = ordered_bag(nd, x, rank)
        kids = [tables.pop(c) for c in node.children]
        if node.kind == LEAF:
            t = leaf_table(v1)
        elif node.kind == INTRODUCE_VERTEX:
            t = introduce_vertex(kids[0], node.vertex, bag)
        elif node.kind == INTRODUCE_EDGE:
            t = introduce_edge(kids[0], g, node.edge)
        elif node.kind == FORGET:
            t = forget_vertex(kids[0], node.vertex, bag)
        elif node.kind == JOIN:
            t = ham_join(kids[0], kids[1], mode, modulus, meter)
        else:  # pragma: no cover
            raise ValueError(node.kind)
        t = HamTable(t.bag, t.v1, reduce_mod(t.data, modulus))
        meter.hold(t.size)
        for kid in kids:
            meter.release(kid.size)
        if hook is not None:
            t = hook(x, t) or t
        tables[x] = t
    return tables[nd.root]


def count_hamiltonian(g: Graph, nd: NiceDecomposition, mode: str = "fast", order: str = "forget", modulus: int | None = None, meter: SpaceMeter | None = None, hook: NodeHook | None = None) -> int:
    if g.n < 3:
        raise ValueError("Hamiltonian cycles need at least 3 vertices")
    root = ham_tables(g, nd, mode, order, modulus, meter, hook)
    total = int(root.data[0])
    if modulus is not None:
        if np.gcd(g.n, modulus) != 1:
            raise ValueError(f"n = {g.n} has no inverse modulo {modulus}; pick a modulus coprime to n")
        return total * pow(g.n, -1, modulus) % modulus
    q, r = divmod(total, g.n)
    if r:
        raise RuntimeError(f"root value {total} is not divisible by n = {g.n}")
    return q
