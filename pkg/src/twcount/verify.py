"""Cross-checks of the dynamic programs against the oracles: end-to-end counts and per-node tables."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import hamiltonian, oracle, steiner
from .dpcore import digits
from .instance import Graph, NiceDecomposition

JOIN_MODES = ("naive", "fast")


@dataclass(frozen=True)
class Mismatch:
    what: str  # "count" or "node"
    mode: str
    node: int | None = None
    state: object = None
    expected: object = None
    got: object = None

    def describe(self) -> str:
        if self.what == "node":
            return f"node {self.node} ({self.mode} join): state {self.state} expected {self.expected} got {self.got}"
        return f"{self.mode} count: expected {self.expected} got {self.got}"


def steiner_table_dict(t: steiner.SteinerTable) -> dict:
    """Nonzero entries as ``{(i, codes): value}`` with one code index per bag vertex."""
    dig = digits(steiner.RADIX, len(t.bag))
    out = {}
    for i in range(t.data.shape[0]):
        for c in np.flatnonzero(t.data[i] != 0):
            out[i, tuple(int(v) for v in dig[c])] = int(t.data[i, c])
    return out


def _ham_stored(ref: dict, t: hamiltonian.HamTable) -> dict:
    # codes outside the six triples (and v1 beyond its degree) carry no table entry
    keep = {}
    for codes, v in ref.items():
        ok = all((c in hamiltonian.V1_CODES) if u == t.v1 else (c in hamiltonian.RAW) for u, c in zip(t.bag, codes))
        if ok:
            keep[codes] = v
    return keep


def _first_difference(ref: dict, mine: dict):
    for key in sorted(set(ref) | set(mine), key=repr):
        if ref.get(key, 0) != mine.get(key, 0):
            return key, ref.get(key, 0), mine.get(key, 0)
    return None


Corruptor = Callable[[int, object], object]


def per_node_steiner(g: Graph, terminals, nd: NiceDecomposition, modes=JOIN_MODES, order: str = "forget", corrupt: Corruptor | None = None) -> list[Mismatch]:
    """Compare every node table with the definitional evaluator."""
    K = frozenset(terminals)
    out: list[Mismatch] = []
    for mode in modes:
        def hook(x, t, mode=mode):
            if corrupt is not None:
                t = corrupt(x, t) or t
            diff = _first_difference(oracle.steiner_definition_table(nd, x, K, min(K), order), steiner_table_dict(t))
            # errors propagate upward; only the first disagreeing node is reported
            if diff is not None and not any(m.mode == mode for m in out):
                out.append(Mismatch("node", mode, x, diff[0], diff[1], diff[2]))
            return t

        steiner.steiner_tables(g, K, nd, mode, order, hook=hook)
    return out


def per_node_hamiltonian(g: Graph, nd: NiceDecomposition, modes=JOIN_MODES, order: str = "forget", corrupt: Corruptor | None = None) -> list[Mismatch]:
    out: list[Mismatch] = []
    for mode in modes:
        def hook(x, t, mode=mode):
            if corrupt is not None:
                t = corrupt(x, t) or t
            ref = _ham_stored(oracle.ham_definition_table(nd, x, 1, order), t)
            diff = _first_difference(ref, t.as_dict())
            # errors propagate upward; only the first disagreeing node is reported
            if diff is not None and not any(m.mode == mode for m in out):
                out.append(Mismatch("node", mode, x, diff[0], diff[1], diff[2]))
            return t

        hamiltonian.ham_tables(g, nd, mode, order, hook=hook)
    return out


def check_counts(problem: str, g: Graph, nd: NiceDecomposition, terminals=(), modes=JOIN_MODES, corrupt: Corruptor | None = None) -> list[Mismatch]:
    """Fast and naive counts against the brute-force counter."""
    out = []
    if problem == "steiner":
        expected = oracle.brute_count_steiner(g, terminals)
        for mode in modes:
            got = steiner.count_steiner(g, terminals, nd, mode, hook=corrupt)
            if got != expected:
                out.append(Mismatch("count", mode, expected=expected, got=got))
    elif problem == "hamiltonian":
        expected = oracle.brute_count_hamiltonian(g)
        for mode in modes:
            got = hamiltonian.count_hamiltonian(g, nd, mode, hook=corrupt)
            if got != expected:
                out.append(Mismatch("count", mode, expected=expected, got=got))
    else:
        raise ValueError(f"unknown problem {problem!r}")
    return out


def corrupt_node(target: int | None = None) -> Corruptor:
    """Test hook that adds 1 to the first nonzero entry of one node's table.

    ``target=None`` picks the first node whose table has a nonzero entry.
    """
    state = {"done": False}

    def hook(x, t):
        if state["done"] or (target is not None and x != target):
            return None
        data = np.array(t.data, dtype=object).copy()
        flat = data.reshape(-1)
        nz = np.flatnonzero(flat != 0)
        if len(nz) == 0:
            return None
        flat[nz[0]] += 1
        state["done"] = True
        return dataclasses.replace(t, data=data)

    return hook
