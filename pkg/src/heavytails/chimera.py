"""Chimera graphs and their edge subgraphs.

Qubit ``q`` of the L x L Chimera graph lives in unit cell ``(row, col)`` on
side ``side`` (0 = horizontal, 1 = vertical) at index ``k`` in 0..3, with

    q = 8 * (row * L + col) + 4 * side + k

Horizontal qubits couple to the same-index horizontal qubit of the cells to
the left and right, vertical qubits to the cells above and below. Inside a
cell the two sides form a complete bipartite K_{4,4}.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

HORIZONTAL = 0
VERTICAL = 1


class Cell(NamedTuple):
    row: int
    col: int
    side: int
    index: int


def qubit_index(L: int, row: int, col: int, side: int, k: int) -> int:
    return 8 * (row * L + col) + 4 * side + k


def chimera_edges(L: int) -> np.ndarray:
    """All couplers of the pristine Chimera graph, as sorted ``(u, v)`` rows with u < v."""
    edges = []
    for r in range(L):
        for c in range(L):
            for i in range(4):
                u = qubit_index(L, r, c, HORIZONTAL, i)
                for j in range(4):
                    edges.append((u, qubit_index(L, r, c, VERTICAL, j)))
            for k in range(4):
                if c + 1 < L:
                    edges.append((qubit_index(L, r, c, HORIZONTAL, k),
                                  qubit_index(L, r, c + 1, HORIZONTAL, k)))
                if r + 1 < L:
                    edges.append((qubit_index(L, r, c, VERTICAL, k),
                                  qubit_index(L, r + 1, c, VERTICAL, k)))
    arr = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
    return arr


@dataclass(frozen=True, eq=False)
class ChimeraGraph:
    """Chimera graph C_L with inoperable qubits (and their couplers) deleted."""

    L: int
    operable: np.ndarray
    edges: np.ndarray

    @property
    def n_qubits(self) -> int:
        return 8 * self.L * self.L

    @cached_property
    def operable_qubits(self) -> np.ndarray:
        return np.flatnonzero(self.operable)

    def cell_of(self, q: int) -> Cell:
        _check_qubit(self, q)
        cell, rest = divmod(int(q), 8)
        row, col = divmod(cell, self.L)
        side, k = divmod(rest, 4)
        return Cell(row, col, side, k)

    def degrees(self) -> np.ndarray:
        return _degrees(self.n_qubits, self.edges)

    @cached_property
    def intercell(self) -> np.ndarray:
        """Boolean mask over ``edges``: True where endpoints are in different cells."""
        return (self.edges[:, 0] // 8) != (self.edges[:, 1] // 8)

    @cached_property
    def edge_lookup(self) -> dict[tuple[int, int], int]:
        return {(int(u), int(v)): e for e, (u, v) in enumerate(self.edges)}

    def color(self) -> np.ndarray:
        """Proper 2-coloring of the qubits: side + row + col (mod 2)."""
        q = np.arange(self.n_qubits)
        cell, rest = np.divmod(q, 8)
        row, col = np.divmod(cell, self.L)
        return ((rest // 4) + row + col) % 2


@dataclass(frozen=True, eq=False)
class Subgraph:
    """A subset of the couplers of a ChimeraGraph, as a mask over ``parent.edges``."""

    parent: ChimeraGraph
    active: np.ndarray

    @property
    def L(self) -> int:
        return self.parent.L

    @property
    def n_qubits(self) -> int:
        return self.parent.n_qubits

    @property
    def operable(self) -> np.ndarray:
        return self.parent.operable

    @cached_property
    def edges(self) -> np.ndarray:
        return self.parent.edges[self.active]

    def degrees(self) -> np.ndarray:
        return _degrees(self.n_qubits, self.edges)

    def is_connected(self) -> bool:
        """Whether the qubits of degree >= 1 form a single component."""
        return _connected(self.n_qubits, self.edges)

    @classmethod
    def full(cls, g: ChimeraGraph) -> "Subgraph":
        return cls(g, np.ones(len(g.edges), dtype=bool))


def build_chimera(L: int, inoperable: Iterable[int] = ()) -> ChimeraGraph:
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    n = 8 * L * L
    operable = np.ones(n, dtype=bool)
    for q in inoperable:
        if not 0 <= int(q) < n:
            raise ValueError(f"inoperable qubit {q} outside [0, {n})")
        operable[int(q)] = False
    edges = chimera_edges(L)
    keep = operable[edges[:, 0]] & operable[edges[:, 1]]
    return ChimeraGraph(L, operable, edges[keep])


def degree(g: ChimeraGraph | Subgraph, q: int) -> int:
    _check_qubit(g, q)
    e = g.edges
    return int(np.count_nonzero(e[:, 0] == q) + np.count_nonzero(e[:, 1] == q))


def is_intercell(g: ChimeraGraph | Subgraph, edge: tuple[int, int]) -> bool:
    u, v = int(edge[0]), int(edge[1])
    if u == v:
        raise ValueError(f"not an edge: ({u}, {v})")
    parent = g.parent if isinstance(g, Subgraph) else g
    key = (min(u, v), max(u, v))
    e = parent.edge_lookup.get(key)
    if e is None or (isinstance(g, Subgraph) and not g.active[e]):
        raise ValueError(f"({u}, {v}) is not an edge of the graph")
    return u // 8 != v // 8


def _check_qubit(g, q: int) -> None:
    if not 0 <= int(q) < g.n_qubits:
        raise ValueError(f"qubit {q} outside [0, {g.n_qubits})")


def _degrees(n: int, edges: np.ndarray) -> np.ndarray:
    return np.bincount(edges.ravel(), minlength=n).astype(np.int64)


def _connected(n: int, edges: np.ndarray) -> bool:
    if len(edges) == 0:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges.tolist():
        adj[u].append(v)
        adj[v].append(u)
    start = int(edges[0, 0])
    seen = {start}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == len(np.unique(edges))


# Edge-list text format: "chimera L=<L>" header, optional "# key=value ..."
# provenance lines, then one "u v" pair per line.

def format_edgelist(g: ChimeraGraph | Subgraph, **provenance) -> str:
    lines = [f"chimera L={g.L}"]
    dead = np.flatnonzero(~g.operable)
    if len(dead):
        lines.append("# inoperable=" + ",".join(str(q) for q in dead))
    if provenance:
        lines.append("# " + " ".join(f"{k}={v}" for k, v in provenance.items()))
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> tuple[Subgraph, dict[str, str]]:
    """Inverse of :func:`format_edgelist`; returns the subgraph and provenance fields."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("chimera L="):
        raise ValueError("missing 'chimera L=<L>' header")
    L = int(lines[0].split("=", 1)[1])
    meta: dict[str, str] = {}
    pairs = []
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                key, _, val = tok.partition("=")
                meta[key] = val
            continue
        u, v = line.split()
        pairs.append((int(u), int(v)))
    dead = [int(q) for q in meta.pop("inoperable", "").split(",") if q]
    g = build_chimera(L, dead)
    active = np.zeros(len(g.edges), dtype=bool)
    for u, v in pairs:
        e = g.edge_lookup.get((min(u, v), max(u, v)))
        if e is None:
            raise ValueError(f"({u}, {v}) is not a coupler of chimera L={L}")
        active[e] = True
    return Subgraph(g, active), meta
