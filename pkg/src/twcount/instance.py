"""Graphs, tree decompositions and their nice refinements.

Input follows the PACE 2017 text formats::

    c optional comments
    p tw <n> <m>          # .gr header, then m lines "u v"
    s td <bags> <w+1> <n> # .td header, then "b <id> <v...>" lines and "i j" tree edges

Vertex ids are 1-based.  Internally bag ids are 0-based positions.
"""

from __future__ import annotations

import random
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

LEAF = "leaf"
INTRODUCE_VERTEX = "introduce_vertex"
INTRODUCE_EDGE = "introduce_edge"
FORGET = "forget"
JOIN = "join"


class FormatError(ValueError):
    """Malformed input text or an instance violating its structural contract."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        norm = []
        for u, v in self.edges:
            if u == v:
                raise FormatError(f"loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise FormatError(f"edge ({u}, {v}) has an id outside 1..{self.n}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise FormatError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def incidence(self, v: int, e: int) -> int:
        """Entry of the oriented incidence matrix: +1 at the smaller endpoint, -1 at the larger."""
        a, b = self.edges[e]
        return 1 if v == a else -1 if v == b else 0

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        adj = self.adjacency()
        seen = {1}
        todo = [1]
        while todo:
            for w in adj[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    width: int | None = None
    violation: str | None = None
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


# -- parsing ------------------------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield lineno, line.split()


def _ints(tokens, lineno) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from None


def parse_graph(text: str) -> Graph:
    lines = _content_lines(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError("missing 'p tw' header") from None
    if len(head) != 4 or head[:2] != ["p", "tw"]:
        raise FormatError(f"line {lineno}: malformed header {' '.join(head)!r}")
    n, m = _ints(head[2:], lineno)
    edges = []
    for lineno, toks in lines:
        if len(toks) != 2:
            raise FormatError(f"line {lineno}: expected an edge 'u v'")
        u, v = _ints(toks, lineno)
        if u == v:
            raise FormatError(f"line {lineno}: loop at vertex {u}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise FormatError(f"line {lineno}: vertex id out of range 1..{n}")
        edges.append((u, v))
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, tuple(edges))


def parse_td(text: str, g: Graph) -> TreeDecomposition:
    lines = _content_lines(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError("missing 's td' header") from None
    if len(head) != 5 or head[:2] != ["s", "td"]:
        raise FormatError(f"line {lineno}: malformed header {' '.join(head)!r}")
    nbags, max_bag, nverts = _ints(head[2:], lineno)
    if nverts != g.n:
        raise FormatError(f"decomposition is for {nverts} vertices, graph has {g.n}")
    bags: dict[int, frozenset[int]] = {}
    tree_edges = []
    for lineno, toks in lines:
        if toks[0] == "b":
            if len(toks) < 2:
                raise FormatError(f"line {lineno}: bag line without id")
            ids = _ints(toks[1:], lineno)
            bid, verts = ids[0], ids[1:]
            if not 1 <= bid <= nbags:
                raise FormatError(f"line {lineno}: bag id {bid} out of range 1..{nbags}")
            if bid in bags:
                raise FormatError(f"line {lineno}: bag {bid} defined twice")
            if any(not 1 <= v <= g.n for v in verts):
                raise FormatError(f"line {lineno}: vertex id out of range")
            bags[bid] = frozenset(verts)
        else:
            if len(toks) != 2:
                raise FormatError(f"line {lineno}: expected a tree edge 'i j'")
            i, j = _ints(toks, lineno)
            if not (1 <= i <= nbags and 1 <= j <= nbags):
                raise FormatError(f"line {lineno}: tree edge endpoint out of range")
            tree_edges.append((i - 1, j - 1))
    if len(bags) != nbags:
        raise FormatError(f"header announces {nbags} bags, found {len(bags)}")
    if max((len(b) for b in bags.values()), default=0) > max_bag:
        raise FormatError(f"a bag exceeds the announced size {max_bag}")
    return TreeDecomposition(tuple(bags[i] for i in range(1, nbags + 1)), tuple(tree_edges))


def parse_terminals(text: str, g: Graph | None = None) -> frozenset[int]:
    terms = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.split():
            try:
                v = int(tok)
            except ValueError:
                raise FormatError(f"line {lineno}: bad terminal {tok!r}") from None
            if g is not None and not 1 <= v <= g.n:
                raise FormatError(f"line {lineno}: terminal {v} is not a vertex")
            terms.add(v)
    return frozenset(terms)


def format_graph(g: Graph) -> str:
    return "".join([f"p tw {g.n} {g.m}\n"] + [f"{u} {v}\n" for u, v in g.edges])


def format_td(td: TreeDecomposition, n: int) -> str:
    out = [f"s td {len(td.bags)} {td.width + 1} {n}\n"]
    for i, bag in enumerate(td.bags, 1):
        out.append(" ".join(["b", str(i)] + [str(v) for v in sorted(bag)]) + "\n")
    out += [f"{i + 1} {j + 1}\n" for i, j in td.tree_edges]
    return "".join(out)


# -- validation ------------------------------------------------------------------


def _components(nodes: Iterable[int], adj: dict[int, list[int]]) -> list[set[int]]:
    nodes = set(nodes)
    comps = []
    while nodes:
        start = min(nodes)
        comp = {start}
        todo = [start]
        while todo:
            for w in adj[todo.pop()]:
                if w in nodes and w not in comp:
                    comp.add(w)
                    todo.append(w)
        nodes -= comp
        comps.append(comp)
    return comps


def validate_td(td: TreeDecomposition, g: Graph) -> ValidationReport:
    k = len(td.bags)
    if k == 0:
        return ValidationReport(False, violation="disconnected bag tree", witness=())
    adj: dict[int, list[int]] = {i: [] for i in range(k)}
    for i, j in td.tree_edges:
        if i == j or not (0 <= i < k and 0 <= j < k):
            return ValidationReport(False, violation="disconnected bag tree", witness=(i, j))
        adj[i].append(j)
        adj[j].append(i)
    comps = _components(range(k), adj)
    if len(td.tree_edges) != k - 1 or len(comps) != 1:
        witness = tuple(sorted(min(c) for c in comps)[:2]) if len(comps) > 1 else tuple(td.tree_edges)
        return ValidationReport(False, violation="disconnected bag tree", witness=witness)
    for u, v in g.edges:
        if not any(u in b and v in b for b in td.bags):
            return ValidationReport(False, violation="uncovered edge", witness=(u, v))
    for v in g.vertices:
        holders = [i for i, b in enumerate(td.bags) if v in b]
        if not holders:
            return ValidationReport(False, violation="vertex in no bag", witness=(v,))
        parts = _components(holders, adj)
        if len(parts) > 1:
            return ValidationReport(False, violation="disconnected vertex subtree", witness=(v, min(parts[0]), min(parts[1])))
    return ValidationReport(True, width=td.width)


# -- nice decompositions -------------------------------------------------------------


@dataclass
class NiceNode:
    kind: str
    bag: tuple[int, ...]
    children: list[int] = field(default_factory=list)
    parent: int | None = None
    vertex: int | None = None
    edge: int | None = None  # index into Graph.edges


@dataclass
class NiceDecomposition:
    nodes: list[NiceNode]
    root: int
    graph: Graph

    def postorder(self) -> list[int]:
        out = []
        stack = [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done:
                out.append(x)
                continue
            stack.append((x, True))
            for c in reversed(self.nodes[x].children):
                stack.append((c, False))
        return out

    @property
    def width(self) -> int:
        return max(len(nd.bag) for nd in self.nodes) - 1

    @cached_property
    def forget_rank(self) -> dict[int, int]:
        """Vertex -> position of its forget node in post-order (vertices forgotten earlier rank lower)."""
        rank = {}
        for x in self.postorder():
            node = self.nodes[x]
            if node.kind == FORGET:
                rank[node.vertex] = len(rank)
        return rank

    @cached_property
    def edge_rank(self) -> dict[int, int]:
        rank = {}
        for x in self.postorder():
            node = self.nodes[x]
            if node.kind == INTRODUCE_EDGE:
                rank[node.edge] = len(rank)
        return rank

    def vertex_order(self, kind: str = "forget") -> dict[int, int]:
        """Global linear order on vertices as ``vertex -> rank``.

        ``forget`` ranks by forget time, so at every node the vertices already
        forgotten precede the bag; ``id`` is plain vertex-id order.
        """
        if kind == "forget":
            return dict(self.forget_rank)
        if kind == "id":
            return {v: v for v in self.graph.vertices}
        raise ValueError(f"unknown vertex order {kind!r}")

    @cached_property
    def _scopes(self) -> list[tuple[frozenset[int], frozenset[int]]]:
        scopes: list = [None] * len(self.nodes)
        for x in self.postorder():
            node = self.nodes[x]
            vs: set[int] = set()
            es: set[int] = set()
            for c in node.children:
                vs |= scopes[c][0]
                es |= scopes[c][1]
            if node.kind == INTRODUCE_VERTEX:
                vs.add(node.vertex)
            elif node.kind == INTRODUCE_EDGE:
                es.add(node.edge)
            scopes[x] = (frozenset(vs), frozenset(es))
        return scopes

    def scope_vertices(self, x: int) -> frozenset[int]:
        return self._scopes[x][0]

    def scope_edges(self, x: int) -> frozenset[int]:
        return self._scopes[x][1]


def nice_violations(nd: NiceDecomposition) -> list[str]:
    """All broken nice-decomposition invariants (empty when the decomposition is nice)."""
    g = nd.graph
    bad = []
    if nd.nodes[nd.root].bag:
        bad.append("root bag is not empty")
    if nd.nodes[nd.root].parent is not None:
        bad.append("root has a parent")
    introduced: dict[int, int] = defaultdict(int)
    for x, node in enumerate(nd.nodes):
        bag = set(node.bag)
        if list(node.bag) != sorted(node.bag):
            bad.append(f"node {x}: bag not sorted")
        for c in node.children:
            if nd.nodes[c].parent != x:
                bad.append(f"node {x}: child {c} has wrong parent")
        kids = [set(nd.nodes[c].bag) for c in node.children]
        if node.kind == LEAF:
            if node.children or bag:
                bad.append(f"node {x}: leaf must be childless with an empty bag")
        elif node.kind == INTRODUCE_VERTEX:
            if len(kids) != 1 or kids[0] | {node.vertex} != bag or node.vertex in kids[0]:
                bad.append(f"node {x}: bad introduce of {node.vertex}")
        elif node.kind == FORGET:
            if len(kids) != 1 or bag | {node.vertex} != kids[0] or node.vertex in bag:
                bad.append(f"node {x}: bad forget of {node.vertex}")
        elif node.kind == INTRODUCE_EDGE:
            u, v = g.edges[node.edge]
            introduced[node.edge] += 1
            if len(kids) != 1 or kids[0] != bag or u not in bag or v not in bag:
                bad.append(f"node {x}: bad introduce of edge {g.edges[node.edge]}")
        elif node.kind == JOIN:
            if len(kids) != 2 or any(k != bag for k in kids):
                bad.append(f"node {x}: join children must be two copies of its bag")
        else:
            bad.append(f"node {x}: unknown kind {node.kind}")
    for e in range(g.m):
        if introduced[e] != 1:
            bad.append(f"edge {g.edges[e]} introduced {introduced[e]} times")
    # vertices: each forgotten exactly once, and every introduction lies below that forget
    forgets = defaultdict(list)
    for x, node in enumerate(nd.nodes):
        if node.kind == FORGET:
            forgets[node.vertex].append(x)
    for v in g.vertices:
        if len(forgets[v]) != 1:
            bad.append(f"vertex {v} forgotten {len(forgets[v])} times")
    for x, node in enumerate(nd.nodes):
        if node.kind == INTRODUCE_VERTEX and len(forgets[node.vertex]) == 1:
            y = x
            while y is not None and y != forgets[node.vertex][0]:
                y = nd.nodes[y].parent
            if y is None:
                bad.append(f"node {x}: vertex {node.vertex} introduced outside its forget subtree")
    return bad


def make_nice(td: TreeDecomposition, g: Graph) -> NiceDecomposition:
    report = validate_td(td, g)
    if not report:
        raise FormatError(f"invalid tree decomposition: {report.violation} {report.witness}")
    k = len(td.bags)
    adj: dict[int, list[int]] = {i: [] for i in range(k)}
    for i, j in td.tree_edges:
        adj[i].append(j)
        adj[j].append(i)
    parent = {0: None}
    depth = {0: 0}
    order = []
    todo = deque([0])
    while todo:
        b = todo.popleft()
        order.append(b)
        for c in sorted(adj[b]):
            if c not in parent:
                parent[c] = b
                depth[c] = depth[b] + 1
                todo.append(c)
    children = {b: sorted(c for c in adj[b] if parent.get(c) == b) for b in range(k)}

    # each edge goes to the shallowest bag holding both endpoints, smaller id on ties
    assigned: dict[int, list[int]] = defaultdict(list)
    for e, (u, v) in enumerate(g.edges):
        holder = min((b for b in range(k) if u in td.bags[b] and v in td.bags[b]), key=lambda b: (depth[b], b))
        assigned[holder].append(e)

    nodes: list[NiceNode] = []

    def add(kind, bag, kids=(), vertex=None, edge=None) -> int:
        x = len(nodes)
        nodes.append(NiceNode(kind, tuple(sorted(bag)), list(kids), None, vertex, edge))
        for c in kids:
            nodes[c].parent = x
        return x

    def retarget(x: int, target: frozenset[int]) -> int:
        bag = set(nodes[x].bag)
        for v in sorted(bag - target):
            bag.discard(v)
            x = add(FORGET, bag, [x], vertex=v)
        for v in sorted(target - bag):
            bag.add(v)
            x = add(INTRODUCE_VERTEX, bag, [x], vertex=v)
        return x

    top: dict[int, int] = {}
    for b in reversed(order):
        bag = td.bags[b]
        branches = [retarget(top.pop(c), bag) for c in children[b]]
        if not branches:
            branches = [retarget(add(LEAF, ()), bag)]
        x = branches[0]
        for y in branches[1:]:
            x = add(JOIN, bag, [x, y])
        for e in assigned[b]:
            x = add(INTRODUCE_EDGE, bag, [x], edge=e)
        top[b] = x
    root = retarget(top.pop(0), frozenset())
    return NiceDecomposition(nodes, root, g)


# -- random instances ---------------------------------------------------------------


def random_instance(n: int, tw: int, seed: int | None = None, connected: bool = True, density: float = 0.6) -> tuple[Graph, TreeDecomposition]:
    """A random partial ``tw``-tree on ``n`` vertices together with a width-``tw`` decomposition.

    Vertices arrive in random order; each new vertex joins a subset of an
    existing bag.  With ``connected`` every arriving vertex gets at least one
    edge to that subset, so the graph is connected.
    """
    rng = random.Random(seed)
    if n < 1:
        raise ValueError("need at least one vertex")
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    first = labels[: min(n, tw + 1)]
    bags = [frozenset(first)]
    tree_edges: list[tuple[int, int]] = []
    edges: set[tuple[int, int]] = set()
    for i, u in enumerate(first):
        for v in first[:i]:
            if rng.random() < density:
                edges.add((min(u, v), max(u, v)))
    if connected:
        for i in range(1, len(first)):
            if not any(first[i] in e and any(w in e for w in first[:i]) for e in edges):
                v = rng.choice(first[:i])
                edges.add((min(first[i], v), max(first[i], v)))
    for v in labels[len(first):]:
        host = rng.randrange(len(bags))
        pool = sorted(bags[host])
        size = rng.randint(1 if connected else 0, min(tw, len(pool)))
        sub = rng.sample(pool, size)
        nbrs = [w for w in sub if rng.random() < density]
        if connected and not nbrs and sub:
            nbrs = [rng.choice(sub)]
        for w in nbrs:
            edges.add((min(v, w), max(v, w)))
        bags.append(frozenset(sub) | {v})
        tree_edges.append((host, len(bags) - 1))
    g = Graph(n, tuple(sorted(edges)))
    return g, TreeDecomposition(tuple(bags), tuple(tree_edges))


def single_bag_decomposition(g: Graph) -> TreeDecomposition:
    return TreeDecomposition((frozenset(g.vertices),), ())
