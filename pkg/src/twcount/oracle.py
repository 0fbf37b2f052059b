"""Ground truth: brute-force counters and direct evaluation of the DP state definitions.

Nothing here shares code with the dynamic programs beyond the instance types;
the evaluators expand the defining sums literally (subsets, edge sets, and
order-respecting maps with inversion-count signs).
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .instance import Graph, NiceDecomposition

STEINER_BRUTE_CAP = (16, 20)  # vertices, edges
HAM_BRUTE_CAP = 14
EVAL_CAP = (8, 12)  # |V_x|, |E_x|

# Steiner codes (s_Y, s_1, s_2) and Hamiltonian codes (s_deg, s_1, s_2) in table order
STEINER_CODES = ((0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1))
HAM_CODES = ((0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1), (2, 1, 1))


class TooLarge(ValueError):
    pass


# -- brute-force counters --------------------------------------------------------


def brute_count_steiner(g: Graph, terminals) -> list[int]:
    """Per-size counts of subtrees containing every terminal, by growing trees edge by edge.

    Every subtree through the smallest terminal is generated exactly once
    (each frontier edge is either taken or banned for the rest of the branch).
    """
    K = frozenset(terminals)
    if not K:
        raise ValueError("terminal set is empty")
    if g.n > STEINER_BRUTE_CAP[0] or g.m > STEINER_BRUTE_CAP[1]:
        raise TooLarge(f"brute force is capped at {STEINER_BRUTE_CAP[0]} vertices and {STEINER_BRUTE_CAP[1]} edges")
    inc = {v: [] for v in g.vertices}
    for e, (u, v) in enumerate(g.edges):
        inc[u].append(e)
        inc[v].append(e)
    counts = [0] * max(g.n, 1)
    root = min(K)

    def grow(verts: frozenset, size: int, frontier: tuple, banned: frozenset):
        if K <= verts:
            counts[size] += 1
        for j, e in enumerate(frontier):
            u, v = g.edges[e]
            new = v if u in verts else u
            # take e; every frontier edge before it is banned in this branch
            ban = banned | frozenset(frontier[:j])
            nverts = verts | {new}
            nfront = tuple(f for f in frontier[j + 1 :] if not (g.edges[f][0] in nverts and g.edges[f][1] in nverts))
            nfront += tuple(f for f in inc[new] if f not in ban and f != e and (g.edges[f][0] not in nverts or g.edges[f][1] not in nverts) and f not in nfront)
            grow(nverts, size + 1, nfront, ban)

    grow(frozenset({root}), 0, tuple(inc[root]), frozenset())
    return counts


def brute_count_hamiltonian(g: Graph) -> int:
    """Undirected Hamiltonian cycles via a subset DP over paths from vertex 1."""
    n = g.n
    if n < 3:
        raise ValueError("Hamiltonian cycles need at least 3 vertices")
    if n > HAM_BRUTE_CAP:
        raise TooLarge(f"brute force is capped at {HAM_BRUTE_CAP} vertices")
    adj = g.adjacency()
    # paths[mask][v]: directed paths from vertex 1 visiting exactly mask, ending at v
    paths = [dict() for _ in range(1 << n)]
    paths[1][1] = 1
    for mask in range(1, 1 << n, 2):
        for v, c in paths[mask].items():
            for w in adj[v]:
                bit = 1 << (w - 1)
                if not mask & bit:
                    paths[mask | bit][w] = paths[mask | bit].get(w, 0) + c
    full = (1 << n) - 1
    closed = sum(c for v, c in paths[full].items() if 1 in adj[v])
    return closed // 2


def permutation_count_hamiltonian(g: Graph) -> int:
    """Cross-check by enumerating vertex orders (use for tiny graphs only)."""
    n = g.n
    if n < 3:
        raise ValueError("Hamiltonian cycles need at least 3 vertices")
    if n > 9:
        raise TooLarge("permutation enumeration is capped at 9 vertices")
    es = set(g.edges)
    has = lambda a, b: (min(a, b), max(a, b)) in es  # noqa: E731
    total = 0
    for perm in itertools.permutations(range(2, n + 1)):
        cyc = (1,) + perm
        if all(has(cyc[i], cyc[(i + 1) % n]) for i in range(n)):
            total += 1
    return total // 2


# -- definitional evaluators ---------------------------------------------------------


def _signed_maps(g: Graph, X: tuple[int, ...], R: frozenset[int], vrank: dict, bijective: bool) -> int:
    """Sum over order-respecting maps ``f: X -> R`` (injective, optionally onto) of ``sgn(f) prod a_{f(e), e}``.

    ``X`` must be sorted by edge rank; ``sgn`` is the parity of inverted pairs.
    """
    if len(X) > len(R) or (bijective and len(X) != len(R)):
        return 0

    @lru_cache(maxsize=None)
    def rec(j: int, used: frozenset) -> int:
        if j == len(X):
            return 1
        e = X[j]
        total = 0
        for w in g.edges[e]:
            if w in R and w not in used:
                # the new image is inverted against every earlier image of higher rank
                inv = sum(1 for u in used if vrank[u] > vrank[w])
                total += (-1) ** inv * g.incidence(w, e) * rec(j + 1, used | {w})
        return total

    return rec(0, frozenset())


def _scope(nd: NiceDecomposition, x: int):
    vs = nd.scope_vertices(x)
    es = nd.scope_edges(x)
    if len(vs) > EVAL_CAP[0] or len(es) > EVAL_CAP[1]:
        raise TooLarge(f"node scope exceeds {EVAL_CAP}")
    return vs, es


def steiner_definition_table(nd: NiceDecomposition, x: int, terminals, v1: int, order: str = "forget", bijective: bool = True) -> dict:
    """All nonzero values ``{(i, codes): value}`` of the Steiner state function at node ``x``.

    ``codes`` lists one index into :data:`STEINER_CODES` per bag vertex, bag
    vertices taken in the global order.
    """
    g = nd.graph
    K = frozenset(terminals)
    vrank = nd.vertex_order(order)
    erank = nd.edge_rank
    vs, es = _scope(nd, x)
    bag = tuple(sorted(nd.nodes[x].bag, key=vrank.__getitem__))
    out: dict = {}
    free = sorted(vs - set(bag))
    for ysize in range(len(vs) + 1):
        for Y in itertools.combinations(sorted(vs), ysize):
            Y = frozenset(Y)
            if not (K & vs) <= Y:
                continue
            inner = sorted((e for e in es if g.edges[e][0] in Y and g.edges[e][1] in Y), key=erank.__getitem__)
            gone = frozenset(v for v in free if v in Y and v != v1)
            ybag = [v for v in bag if v in Y and v != v1]
            for xs in range(len(inner) + 1):
                for X in itertools.combinations(inner, xs):
                    for S1 in _subsets(ybag):
                        p1 = _signed_maps(g, X, gone | S1, vrank, bijective)
                        if not p1:
                            continue
                        for S2 in _subsets(ybag):
                            p2 = _signed_maps(g, X, gone | S2, vrank, bijective)
                            if not p2:
                                continue
                            codes = tuple(STEINER_CODES.index((int(v in Y), int(v in S1), int(v in S2))) for v in bag)
                            key = (ysize, codes)
                            out[key] = out.get(key, 0) + p1 * p2
    return {k: v for k, v in out.items() if v}


def ham_definition_table(nd: NiceDecomposition, x: int, v1: int, order: str = "forget", bijective: bool = True) -> dict:
    """All nonzero values ``{codes: value}`` of the Hamiltonian state function at node ``x``.

    ``codes`` holds one raw ``(s_deg, s_1, s_2)`` triple per bag vertex in the global order.
    """
    g = nd.graph
    vrank = nd.vertex_order(order)
    erank = nd.edge_rank
    vs, es = _scope(nd, x)
    bag = tuple(sorted(nd.nodes[x].bag, key=vrank.__getitem__))
    free = frozenset(vs - set(bag))
    gone = frozenset(v for v in free if v != v1)
    edges = sorted(es, key=erank.__getitem__)
    out: dict = {}
    for xs in range(len(edges) + 1):
        for X in itertools.combinations(edges, xs):
            deg = {v: 0 for v in vs}
            for e in X:
                for w in g.edges[e]:
                    deg[w] += 1
            if any(deg[v] != 2 for v in free) or any(deg[v] > 2 for v in bag):
                continue
            cand = [v for v in bag if v != v1 and deg[v] > 0]
            for ss in range(len(X) + 1):
                for S in itertools.combinations(X, ss):
                    for S1 in _subsets(cand):
                        p1 = _signed_maps(g, S, gone | S1, vrank, bijective)
                        if not p1:
                            continue
                        for S2 in _subsets(cand):
                            p2 = _signed_maps(g, S, gone | S2, vrank, bijective)
                            if not p2:
                                continue
                            codes = tuple((deg[v], int(v in S1), int(v in S2)) for v in bag)
                            out[codes] = out.get(codes, 0) + p1 * p2
    return {k: v for k, v in out.items() if v}


def eval_state_definition(problem: str, nd: NiceDecomposition, x: int, state, *, terminals=(), v1: int | None = None, order: str = "forget", bijective: bool = True) -> int:
    """Value of one state at node ``x``.

    Steiner: ``state = (i, codes)`` with raw ``(s_Y, s_1, s_2)`` triples per bag vertex.
    Hamiltonian: ``state = codes`` with raw ``(s_deg, s_1, s_2)`` triples.
    """
    if problem == "steiner":
        v1 = min(terminals) if v1 is None else v1
        i, codes = state
        table = steiner_definition_table(nd, x, terminals, v1, order, bijective)
        idx = tuple(STEINER_CODES.index(tuple(c)) if tuple(c) in STEINER_CODES else -1 for c in codes)
        if -1 in idx:
            return 0  # s_Y(v) = 0 forces s_1(v) = s_2(v) = 0
        return table.get((i, idx), 0)
    if problem == "hamiltonian":
        v1 = 1 if v1 is None else v1
        table = ham_definition_table(nd, x, v1, order, bijective)
        return table.get(tuple(tuple(c) for c in state), 0)
    raise ValueError(f"unknown problem {problem!r}")


def _subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        for c in itertools.combinations(items, r):
            yield frozenset(c)


# -- Hamiltonian join algebra, by direct summation -------------------------------------

# per-vertex (in A, in B, in C) of the six allowed triples, in table order
HAM_SETS = ((0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 1, 0), (0, 1, 1), (1, 1, 1))


def _sign(first: int, second: int) -> int:
    """``I(first, second)`` for bit masks: parity of pairs ``p > q``, ``p`` in first, ``q`` in second."""
    inv = 0
    for p in range(first.bit_length()):
        if first >> p & 1:
            inv += bin(second & ((1 << p) - 1)).count("1")
    return -1 if inv & 1 else 1


def _sets_of(index: int, k: int) -> tuple[int, int, int]:
    """``(A, B, C)`` masks of a 6-code table index; position ``p`` is bit ``p``, position 0 first."""
    A = B = C = 0
    for p in range(k - 1, -1, -1):
        a, b, c = HAM_SETS[index % 6]
        A |= a << p
        B |= b << p
        C |= c << p
        index //= 6
    return A, B, C


def _index_of(A: int, B: int, C: int, k: int) -> int | None:
    idx = 0
    for p in range(k):
        t = (A >> p & 1, B >> p & 1, C >> p & 1)
        if t not in HAM_SETS:
            return None
        idx = idx * 6 + HAM_SETS.index(t)
    return idx


def _triples(f, k: int) -> dict:
    """``{(A, B, C): value}`` from a 6-code table or pass a triple dict through."""
    if isinstance(f, dict):
        return {key: int(v) for key, v in f.items() if v}
    return {_sets_of(i, k): int(v) for i, v in enumerate(f) if v}


def set_join_brute(f, g, k: int, union: bool = False, keep_all: bool = False):
    """``sum f(A1,B1,C1) g(A2,B2,C2) I(B1,B2) I(C1,C2)`` over disjoint B and C splits.

    ``A1`` and ``A2`` are disjoint unless ``union`` is set, which gives the
    relaxed product where only ``A1 | A2 = A`` is asked.  By default only the
    allowed output triples are returned, as a 6-code table; ``keep_all``
    returns every output triple as a dict (products of allowed triples can
    leave them, e.g. ``(A,B,C) = (1,0,0) (0,1,0) -> (1,1,0)`` at one vertex).
    """
    full: dict = {}
    fs, gs = _triples(f, k), _triples(g, k)
    for (A1, B1, C1), fv in fs.items():
        for (A2, B2, C2), gv in gs.items():
            if B1 & B2 or C1 & C2 or (A1 & A2 and not union):
                continue
            key = (A1 | A2, B1 | B2, C1 | C2)
            full[key] = full.get(key, 0) + fv * gv * _sign(B1, B2) * _sign(C1, C2)
    if keep_all:
        return {key: v for key, v in full.items() if v}
    out = [0] * 6**k
    for key, v in full.items():
        idx = _index_of(*key, k)
        if idx is not None:
            out[idx] += v
    return out


def tau_brute(f, k: int, D: int) -> list[list[int]]:
    """``(tau_D f)(E, B, C) = I(B,E) I(C,E) sum_{A <= D} f(A, B|E, C|E)`` as rows ``E`` by ``(C << d) | B``.

    ``f`` is a 6-code table or a dict over arbitrary triples.  ``E`` is indexed
    over the positions outside ``D`` and ``B``, ``C`` over the positions
    inside, both in increasing position.
    """
    inside = [p for p in range(k) if D >> p & 1]
    outside = [p for p in range(k) if not D >> p & 1]
    d = len(inside)
    spread = lambda mask, pos: sum(1 << p for j, p in enumerate(pos) if mask >> j & 1)  # noqa: E731
    by_bc: dict = {}
    for (A, B, C), v in _triples(f, k).items():
        if A & ~D == 0:
            by_bc[B, C] = by_bc.get((B, C), 0) + v
    out = [[0] * (1 << (2 * d)) for _ in range(1 << len(outside))]
    for e in range(1 << len(outside)):
        E = spread(e, outside)
        for bc in range(1 << (2 * d)):
            B, C = spread(bc & ((1 << d) - 1), inside), spread(bc >> d, inside)
            out[e][bc] = _sign(B, E) * _sign(C, E) * by_bc.get((B | E, C | E), 0)
    return out


def oslash_brute(f, g, d: int, m: int) -> list[list[int]]:
    """Quintuple loop over the ``oslash`` display for ``(2**m, 4**d)`` arrays indexed ``[E][(C << d) | B]``."""
    full = 1 << (2 * d)
    low = (1 << d) - 1
    out = [[0] * full for _ in range(1 << m)]
    for E1 in range(1 << m):
        for E2 in range(1 << m):
            if E1 & E2:
                continue
            for x in range(full):
                fv = int(f[E1][x])
                if not fv:
                    continue
                B1, C1 = x & low, x >> d
                for y in range(full):
                    gv = int(g[E2][y])
                    if not gv:
                        continue
                    B2, C2 = y & low, y >> d
                    if B1 & B2 or C1 & C2:
                        continue
                    sign = _sign(B1, B2) * _sign(C1, C2) * (-1) ** (bin(E1).count("1") * (bin(B2).count("1") + bin(C2).count("1")))
                    out[E1 | E2][((C1 | C2) << d) | B1 | B2] += fv * gv * sign
    return out
