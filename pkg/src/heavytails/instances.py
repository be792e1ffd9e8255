"""Random Ising instances on Chimera subgraphs.

Couplings are kept as exact integers. The physical (normalized) values are
``J * alpha / norm`` where ``norm`` is the ensemble's precision (k for U_k,
28 for S_28) and ``alpha`` the energy-scale prefactor.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping

import numpy as np

from .chimera import ChimeraGraph, Subgraph

SIDON28 = np.array([-28, -19, -13, -8, 8, 13, 19, 28], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class IsingInstance:
    """Integer Ising problem over ``n`` spins.

    ``edges`` holds local index pairs ``i < j`` in lexicographic order and
    ``J`` the matching integer couplings. ``qubits`` maps local indices to
    Chimera qubit ids when the instance came from a Chimera subgraph.
    """

    n: int
    edges: np.ndarray
    J: np.ndarray
    h: np.ndarray
    norm: int = 1
    alpha: float = 1.0
    L: int | None = None
    qubits: np.ndarray | None = None
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.edges.shape != (len(self.J), 2):
            raise ValueError("edges and J disagree in length")
        if len(self.h) != self.n:
            raise ValueError("h must have one entry per spin")
        if len(self.edges) and not (self.edges[:, 0] < self.edges[:, 1]).all():
            raise ValueError("edges must be stored as (i, j) with i < j")

    @property
    def scale(self) -> float:
        """Multiplier taking integer energies to normalized, alpha-scaled units."""
        return self.alpha / self.norm

    @property
    def J_scaled(self) -> np.ndarray:
        return self.J * self.scale

    @property
    def h_scaled(self) -> np.ndarray:
        return self.h * self.scale

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric adjacency ``(indptr, indices, edge_id)``; neighbors sorted."""
        m = len(self.edges)
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((cols, rows))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=self.n), out=indptr[1:])
        return indptr, cols[order].astype(np.int64), eid[order].astype(np.int64)

    @cached_property
    def csr_J(self) -> np.ndarray:
        return self.J[self.csr[2]]

    @cached_property
    def dense_J(self) -> np.ndarray:
        """Symmetric n x n coupling matrix (float64 holding the integer couplings)."""
        A = np.zeros((self.n, self.n))
        A[self.edges[:, 0], self.edges[:, 1]] = self.J
        A[self.edges[:, 1], self.edges[:, 0]] = self.J
        return A

    def degrees(self) -> np.ndarray:
        return np.diff(self.csr[0])


@dataclass(frozen=True)
class Gauge:
    """Spin-reversal transformation: one +/-1 sign per spin."""

    g: np.ndarray

    def __post_init__(self):
        if not np.isin(self.g, (-1, 1)).all():
            raise ValueError("gauge entries must be +1 or -1")

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Gauge":
        return cls(rng.choice(np.array([-1, 1], dtype=np.int8), size=n))

    @classmethod
    def identity(cls, n: int) -> "Gauge":
        return cls(np.ones(n, dtype=np.int8))

    def apply_state(self, s: np.ndarray) -> np.ndarray:
        return (s * self.g).astype(np.int8)


def from_subgraph(g: Subgraph | ChimeraGraph, J_of_edge: np.ndarray, norm: int,
                  meta: Mapping[str, object] | None = None) -> IsingInstance:
    """Place couplings (one per active Chimera edge) on the operable qubits."""
    qubits = np.flatnonzero(g.operable)
    local = np.full(g.n_qubits, -1, dtype=np.int64)
    local[qubits] = np.arange(len(qubits))
    edges = local[g.edges].reshape(-1, 2)
    return IsingInstance(
        n=len(qubits), edges=edges, J=np.asarray(J_of_edge, dtype=np.int64),
        h=np.zeros(len(qubits), dtype=np.int64), norm=norm, L=g.L,
        qubits=qubits, meta=dict(meta or {}),
    )


def sample_uk(g: Subgraph | ChimeraGraph, k: int, rng: np.random.Generator, **meta) -> IsingInstance:
    """U_k: every coupler uniform over {+-1, ..., +-k}, no fields."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    draw = rng.integers(0, 2 * k, size=len(g.edges))
    J = np.where(draw < k, draw - k, draw - k + 1)
    return from_subgraph(g, J, norm=k, meta={"ensemble": "U", "k": k, **meta})


def sample_sidon28(g: Subgraph | ChimeraGraph, rng: np.random.Generator, **meta) -> IsingInstance:
    """S_28: couplers uniform over {+-8, +-13, +-19, +-28}, normalized by 1/28."""
    J = SIDON28[rng.integers(0, len(SIDON28), size=len(g.edges))]
    return from_subgraph(g, J, norm=28, meta={"ensemble": "S28", **meta})


def apply_scale(inst: IsingInstance, alpha: float) -> IsingInstance:
    """Multiply the problem Hamiltonian by ``alpha`` (composes with any prior scale)."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    new_alpha = inst.alpha * alpha
    if not 0.0 < new_alpha <= 1.0:
        raise ValueError(f"combined scale {new_alpha} outside (0, 1]")
    return replace(inst, alpha=new_alpha, meta=dict(inst.meta))


def spin_reversal(inst: IsingInstance, gauge: Gauge) -> IsingInstance:
    """J'_ij = g_i g_j J_ij, h'_i = g_i h_i; E'(g*s) = E(s)."""
    g = np.asarray(gauge.g, dtype=np.int64)
    if len(g) != inst.n:
        raise ValueError(f"gauge has {len(g)} entries, instance has {inst.n} spins")
    J = inst.J * g[inst.edges[:, 0]] * g[inst.edges[:, 1]]
    return replace(inst, J=J, h=inst.h * g, meta=dict(inst.meta))


def from_couplings(n: int, couplings: Mapping[tuple[int, int], int],
                   h: Mapping[int, int] | None = None, norm: int = 1) -> IsingInstance:
    """Build a small instance from an ``{(i, j): J}`` dict (mainly for tests)."""
    for i, j in couplings:
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"coupler ({i}, {j}) invalid for {n} spins")
    if any(not 0 <= i < n for i in (h or {})):
        raise ValueError(f"field index outside [0, {n})")
    items = sorted(((min(i, j), max(i, j)), int(v)) for (i, j), v in couplings.items())
    edges = np.array([e for e, _ in items], dtype=np.int64).reshape(-1, 2)
    J = np.array([v for _, v in items], dtype=np.int64)
    hv = np.zeros(n, dtype=np.int64)
    for i, v in (h or {}).items():
        hv[i] = v
    return IsingInstance(n=n, edges=edges, J=J, h=hv, norm=norm)


# Instance text format:
#   ising n=<n> norm=<norm> alpha=<repr> [L=<L>] [key=value ...]
#   [qubits q0 q1 ...]
#   i j J        (one per coupler)
#   i h          (one per nonzero field)

_HEADER_KEYS = ("n", "norm", "alpha", "L")


def format_instance(inst: IsingInstance) -> str:
    head = [f"n={inst.n}", f"norm={inst.norm}", f"alpha={inst.alpha!r}"]
    if inst.L is not None:
        head.append(f"L={inst.L}")
    for key in sorted(inst.meta):
        val = inst.meta[key]
        if key in _HEADER_KEYS:
            raise ValueError(f"meta key {key!r} clashes with a header field")
        if val is None:
            continue
        text = str(val)
        if not text or any(c.isspace() or c == "=" for c in text):
            raise ValueError(f"meta value for {key!r} cannot be written: {text!r}")
        head.append(f"{key}={text}")
    lines = ["ising " + " ".join(head)]
    if inst.qubits is not None:
        lines.append("qubits " + " ".join(str(q) for q in inst.qubits.tolist()))
    lines.extend(f"{i} {j} {J}" for (i, j), J in zip(inst.edges.tolist(), inst.J.tolist()))
    lines.extend(f"{i} {v}" for i, v in enumerate(inst.h.tolist()) if v != 0)
    return "\n".join(lines) + "\n"


def _parse_value(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_instance(text: str) -> IsingInstance:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("ising "):
        raise ValueError("missing 'ising' header line")
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    n = int(fields.pop("n"))
    norm = int(fields.pop("norm"))
    alpha = float(fields.pop("alpha"))
    L = int(fields.pop("L")) if "L" in fields else None
    meta = {k: _parse_value(v) for k, v in fields.items()}
    qubits = None
    edges, J = [], []
    h = np.zeros(n, dtype=np.int64)
    for line in lines[1:]:
        tok = line.split()
        if not tok:
            continue
        if tok[0] == "qubits":
            qubits = np.array([int(t) for t in tok[1:]], dtype=np.int64)
        elif len(tok) == 3:
            edges.append((int(tok[0]), int(tok[1])))
            J.append(int(tok[2]))
        elif len(tok) == 2:
            h[int(tok[0])] = int(tok[1])
        else:
            raise ValueError(f"unparseable instance line: {line!r}")
    return IsingInstance(
        n=n, edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
        J=np.array(J, dtype=np.int64), h=h, norm=norm, alpha=alpha, L=L,
        qubits=qubits, meta=meta,
    )
