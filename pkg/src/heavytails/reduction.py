"""Random degree reduction of Chimera graphs by constrained edge removal.

Edges are deleted one at a time, uniformly among the currently removable
ones, until the maximum degree reaches the target. An edge uv (u the
higher-degree endpoint) is removable when

1. u has maximum degree,
2. no edge u'v' has d(u') >= d(u) and d(v') > d(v),
3. an inter-cell edge additionally needs d(u) = d(v) and no intra-cell edge
   with both endpoints at degree d(u),
4. d(u) >= d(v) >= 3,
5. deleting it keeps the graph connected.

A dead end (nothing removable, degree still too high) restarts from scratch.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .chimera import ChimeraGraph, Subgraph

log = logging.getLogger(__name__)

TARGET_DEGREES = (3, 4, 5, 6)


class ReductionFailed(RuntimeError):
    def __init__(self, attempts: int, target: int):
        super().__init__(f"could not reach max degree {target} after {attempts} attempts")
        self.attempts = attempts
        self.target = target


@dataclass(frozen=True)
class ReductionConfig:
    target_degree: int
    max_restarts: int = 100
    seed: int | None = None

    def __post_init__(self):
        if self.target_degree not in TARGET_DEGREES:
            raise ValueError(f"target degree must be one of {TARGET_DEGREES}, got {self.target_degree}")
        if self.max_restarts < 1:
            raise ValueError("max_restarts must be positive")


@dataclass(frozen=True, eq=False)
class Reduction:
    subgraph: Subgraph
    restarts: int
    removed: tuple[int, ...]


def _oriented(edges: np.ndarray, deg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints (u, v) with u the higher-degree end, ties broken by lower index."""
    a, b = edges[:, 0], edges[:, 1]
    da, db = deg[a], deg[b]
    a_first = (da > db) | ((da == db) & (a < b))
    return np.where(a_first, a, b), np.where(a_first, b, a)


def _rule_mask(edges: np.ndarray, intercell: np.ndarray, deg: np.ndarray) -> np.ndarray:
    """Rules 1-4 evaluated over ``edges`` (all currently present)."""
    if len(edges) == 0:
        return np.zeros(0, dtype=bool)
    u, v = _oriented(edges, deg)
    du, dv = deg[u], deg[v]
    dmax = deg.max()
    ok = du == dmax
    # Rule 2: among edges touching a max-degree vertex, v must have the
    # largest far-end degree. Only orientations with d(u') = dmax matter.
    da, db = deg[edges[:, 0]], deg[edges[:, 1]]
    far = np.concatenate([db[da == dmax], da[db == dmax]])
    ok &= dv >= far.max()
    intra_pairs = ~intercell & (da == db)
    blocked = np.zeros(dmax + 1, dtype=bool)
    blocked[da[intra_pairs]] = True
    ok &= ~intercell | ((du == dv) & ~blocked[du])
    ok &= dv >= 3
    return ok


class _Graph:
    """Mutable adjacency used during one reduction attempt."""

    def __init__(self, g: ChimeraGraph, active: np.ndarray):
        self.g = g
        self.active = active.copy()
        self.deg = np.bincount(g.edges[active].ravel(), minlength=g.n_qubits).astype(np.int64)
        self.adj: list[set[int]] = [set() for _ in range(g.n_qubits)]
        for u, v in g.edges[active].tolist():
            self.adj[u].add(v)
            self.adj[v].add(u)

    def candidates(self) -> np.ndarray:
        idx = np.flatnonzero(self.active)
        mask = _rule_mask(self.g.edges[idx], self.g.intercell[idx], self.deg)
        return idx[mask]

    def is_bridge(self, e: int) -> bool:
        u, v = (int(x) for x in self.g.edges[e])
        seen = {u}
        todo = deque([u])
        while todo:
            x = todo.popleft()
            for y in self.adj[x]:
                if x == u and y == v:
                    continue
                if y == v:
                    return False
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return True

    def remove(self, e: int) -> None:
        u, v = (int(x) for x in self.g.edges[e])
        self.active[e] = False
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.deg[u] -= 1
        self.deg[v] -= 1


def removable_edges(g: Subgraph, d: int) -> set[tuple[int, int]]:
    """Edges of ``g`` that satisfy all five removal rules.

    Returns the empty set once the maximum degree is already at most ``d``.
    """
    work = _Graph(g.parent, g.active)
    if len(work.deg) == 0 or work.deg.max() <= d:
        return set()
    out = set()
    for e in work.candidates():
        if not work.is_bridge(int(e)):
            u, v = g.parent.edges[e]
            out.add((int(u), int(v)))
    return out


def _attempt(start: Subgraph, d: int, rng: np.random.Generator) -> tuple[Subgraph | None, list[int]]:
    work = _Graph(start.parent, start.active)
    removed: list[int] = []
    while work.deg.max(initial=0) > d:
        cand = list(work.candidates())
        # Uniform choice among non-bridges via rejection: draw among the
        # rule 1-4 candidates, drop any bridge, redraw.
        chosen = None
        while cand:
            pick = int(rng.integers(len(cand)))
            e = int(cand[pick])
            if work.is_bridge(e):
                cand[pick] = cand[-1]
                cand.pop()
                continue
            chosen = e
            break
        if chosen is None:
            return None, removed
        work.remove(chosen)
        removed.append(chosen)
    return Subgraph(start.parent, work.active), removed


def reduce_to_degree(g: ChimeraGraph | Subgraph, cfg: ReductionConfig,
                     rng: np.random.Generator | None = None) -> Reduction:
    """Randomly thin ``g`` until its maximum degree is ``cfg.target_degree``.

    Each restart discards all removals and continues drawing from the same
    random stream. Raises :class:`ReductionFailed` when ``max_restarts``
    attempts all dead-end.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    start = g if isinstance(g, Subgraph) else Subgraph.full(g)
    for attempt in range(cfg.max_restarts):
        sub, removed = _attempt(start, cfg.target_degree, rng)
        if sub is not None:
            return Reduction(sub, attempt, tuple(removed))
        log.debug("degree reduction dead end after %d removals, restarting", len(removed))
    raise ReductionFailed(cfg.max_restarts, cfg.target_degree)


def degree_distribution(g: Subgraph | ChimeraGraph) -> dict[int, float]:
    """Fraction of operable qubits at each degree."""
    deg = g.degrees()[g.operable]
    if len(deg) == 0:
        return {0: 1.0}
    values, counts = np.unique(deg, return_counts=True)
    return {int(v): c / len(deg) for v, c in zip(values, counts)}
