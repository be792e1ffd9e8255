"""Classical energetics: energies, effective fields, floppy qubits.

Integer variants (``*_int``) work on the unscaled couplings and are exact;
the plain variants return normalized values (``inst.scale`` applied).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import comb

import numpy as np

from .instances import IsingInstance


@dataclass(frozen=True)
class EnergyReport:
    energy: float
    per_qubit_heff: np.ndarray


def _check_state(inst: IsingInstance, state) -> np.ndarray:
    s = np.asarray(state)
    if s.shape[-1] != inst.n:
        raise ValueError(f"state has {s.shape[-1]} spins, instance has {inst.n}")
    return s.astype(np.int64)


def energy_int(inst: IsingInstance, state) -> int | np.ndarray:
    """Exact integer energy. ``state`` may be one state or a stack of states."""
    s = _check_state(inst, state)
    i, j = inst.edges[:, 0], inst.edges[:, 1]
    e = (s[..., i] * s[..., j] * inst.J).sum(axis=-1) + (s * inst.h).sum(axis=-1)
    return int(e) if np.ndim(e) == 0 else e


def energy(inst: IsingInstance, state) -> float | np.ndarray:
    return energy_int(inst, state) * inst.scale


def local_fields_int(inst: IsingInstance, state) -> np.ndarray:
    """h_i + sum over all neighbors j of J_ij s_j, for every spin (stacks allowed)."""
    s = _check_state(inst, state)
    # Float matmul is exact here: entries are small integers.
    fields = s.astype(np.float64) @ inst.dense_J
    return np.rint(fields).astype(np.int64) + inst.h


def effective_field_int(inst: IsingInstance, state, i: int) -> int:
    if not 0 <= i < inst.n:
        raise IndexError(f"spin {i} outside [0, {inst.n})")
    s = _check_state(inst, state)
    indptr, indices, eid = inst.csr
    nb = slice(indptr[i], indptr[i + 1])
    return int(inst.h[i] + (inst.J[eid[nb]] * s[indices[nb]]).sum())


def effective_field(inst: IsingInstance, state, i: int) -> float:
    return effective_field_int(inst, state, i) * inst.scale


def energy_report(inst: IsingInstance, state) -> EnergyReport:
    return EnergyReport(energy(inst, state), local_fields_int(inst, state) * inst.scale)


def flip_delta_int(inst: IsingInstance, state, i: int) -> int:
    """E(flip_i(s)) - E(s) = -2 s_i h_i^eff(s)."""
    s = _check_state(inst, state)
    return -2 * int(s[i]) * effective_field_int(inst, s, i)


def floppy_qubits(inst: IsingInstance, state) -> set[int]:
    """Spins with zero effective field; flipping any one leaves the energy unchanged."""
    heff = local_fields_int(inst, state)
    return set(np.flatnonzero(heff == 0).tolist())


def floppy_probability(d: int) -> float:
    """Chance a degree-d spin of a +-1 instance is floppy in a uniform random state."""
    return 0.0 if d % 2 else comb(d, d // 2) / 2**d


@dataclass(frozen=True)
class FloppyStats:
    degree: int
    floppy: int
    total: int
    n_states: int

    @property
    def fraction(self) -> float:
        return self.floppy / self.total if self.total else float("nan")


def floppy_fraction_random(inst: IsingInstance, n_samples: int, rng: np.random.Generator,
                           chunk: int = 4096) -> dict[int, FloppyStats]:
    """Monte Carlo floppiness over uniform random states, bucketed by spin degree."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    deg = inst.degrees()
    floppy = np.zeros(inst.n, dtype=np.int64)
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        states = rng.choice(np.array([-1, 1], dtype=np.int8), size=(m, inst.n))
        floppy += (local_fields_int(inst, states) == 0).sum(axis=0)
        done += m
    out = {}
    for d in np.unique(deg).tolist():
        sel = deg == d
        out[d] = FloppyStats(d, int(floppy[sel].sum()), int(sel.sum()) * n_samples, n_samples)
    return out


def floppy_fraction_states(inst: IsingInstance, states) -> float:
    """Mean fraction of floppy spins over the given states."""
    states = np.atleast_2d(states)
    if len(states) == 0 or inst.n == 0:
        return float("nan")
    return float((local_fields_int(inst, states) == 0).mean())


def cluster_bound(inst: IsingInstance, state) -> tuple[int, list[int]]:
    """Size and members of a stable set S among the floppy spins.

    Every subset of S can be flipped without changing the energy, so the
    state lies in an isoenergetic hypercube of dimension at least |S|.
    S is the larger of a min-degree greedy stable set and the larger
    color class of a 2-coloring (when the floppy subgraph is bipartite),
    which guarantees |S| >= (#floppy) / 2 on bipartite graphs.
    """
    floppy = sorted(floppy_qubits(inst, state))
    if not floppy:
        return 0, []
    fset = set(floppy)
    indptr, indices, _ = inst.csr
    adj = {q: [int(x) for x in indices[indptr[q]:indptr[q + 1]] if int(x) in fset] for q in floppy}

    chosen: set[int] = set()
    for q in sorted(floppy, key=lambda q: (len(adj[q]), q)):
        if not any(x in chosen for x in adj[q]):
            chosen.add(q)
    best = sorted(chosen)

    # Per component, keep the larger color class.
    color: dict[int, int] = {}
    classes: list[int] = []
    bipartite = True
    for root in floppy:
        if root in color:
            continue
        comp = [[], []]
        color[root] = 0
        todo = deque([root])
        while todo:
            x = todo.popleft()
            comp[color[x]].append(x)
            for y in adj[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    todo.append(y)
                elif color[y] == color[x]:
                    bipartite = False
        classes.extend(max(comp, key=len))
    if bipartite and len(classes) > len(best):
        best = sorted(classes)
    return len(best), best
