"""Exact ground energies and degeneracies.

Two exact methods are provided. ``exhaustive_ground`` walks all 2^n states
(Gray code, compiled kernel) and is meant for n <= 28. ``column_dp_ground``
exploits the Chimera layout: cutting between unit-cell columns severs only
the 4L horizontal couplers, so a transfer over the 2^(4L) spin assignments
of one column's horizontal qubits is exact. Within a column, the vertical
qubits form four independent chains once the horizontal spins are fixed,
and those chains are eliminated by a two-state min-plus recursion.

Degeneracy counters saturate at 2^63 - 1.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .instances import IsingInstance

log = logging.getLogger(__name__)

SAT = np.iinfo(np.int64).max
EXHAUSTIVE_MAX_N = 28
DP_MAX_WIDTH = 24


class WidthExceeded(ValueError):
    """The instance is too large for the requested exact method."""


@dataclass(frozen=True)
class GroundTruth:
    ground_energy: int
    degeneracy: int | None
    method: str
    state: np.ndarray | None = None

    @property
    def exact(self) -> bool:
        return self.method in ("exhaustive", "column_dp")


def exhaustive_ground(inst: IsingInstance) -> GroundTruth:
    if inst.n > EXHAUSTIVE_MAX_N:
        raise WidthExceeded(f"{inst.n} spins is too many to enumerate (max {EXHAUSTIVE_MAX_N}); use column_dp_ground")
    indptr, indices, _ = inst.csr
    e, count, code = _kernels.enumerate_ground(indptr, indices, np.ascontiguousarray(inst.csr_J),
                                               np.ascontiguousarray(inst.h, dtype=np.int64))
    state = np.where((int(code) >> np.arange(inst.n)) & 1, -1, 1).astype(np.int8)
    return GroundTruth(int(e), int(count), "exhaustive", state)


# ---------------------------------------------------------------- column DP

def _sat_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.minimum(a, SAT - b) + b


def _sat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
    safe = (a == 0) | (b <= SAT // np.maximum(a, 1))
    with np.errstate(over="ignore"):
        return np.where(safe, a * b, SAT)


def _tie_merge(e1, c1, e2, c2):
    """Min-plus merge of two (energy, count) alternatives."""
    e = np.minimum(e1, e2)
    c = np.where(e1 == e, c1, 0)
    c = _sat_add(c, np.where(e2 == e, c2, 0))
    return e, c


class _Layout:
    """Global Chimera view of an instance: fields, couplings, operability."""

    def __init__(self, inst: IsingInstance):
        if inst.L is None:
            raise ValueError("column DP needs a Chimera instance (L unknown)")
        L = self.L = int(inst.L)
        nq = 8 * L * L
        qubits = inst.qubits if inst.qubits is not None else np.arange(inst.n)
        if len(qubits) != inst.n or (len(qubits) and qubits.max() >= nq):
            raise ValueError("instance qubits do not fit the declared Chimera size")
        self.qubits = np.asarray(qubits, dtype=np.int64)
        self.present = np.zeros(nq, dtype=bool)
        self.present[self.qubits] = True
        self.h = np.zeros(nq, dtype=np.int64)
        self.h[self.qubits] = inst.h
        self.J: dict[tuple[int, int], int] = {}
        for (i, j), v in zip(inst.edges.tolist(), inst.J.tolist()):
            a, b = sorted((int(self.qubits[i]), int(self.qubits[j])))
            self.J[(a, b)] = int(v)
        self._check_edges()

    def _check_edges(self):
        L = self.L
        for a, b in self.J:
            ca, cb = divmod(a, 8)[0], divmod(b, 8)[0]
            sa, sb = (a % 8) // 4, (b % 8) // 4
            if ca == cb and sa != sb:
                continue
            ra, cola = divmod(ca, L)
            rb, colb = divmod(cb, L)
            if sa == sb and a % 4 == b % 4:
                if sa == 0 and ra == rb and abs(cola - colb) == 1:
                    continue
                if sa == 1 and cola == colb and abs(ra - rb) == 1:
                    continue
            raise ValueError(f"coupler ({a}, {b}) is not a Chimera edge")

    def coupling(self, a: int, b: int) -> int:
        return self.J.get((min(a, b), max(a, b)), 0)

    def hq(self, r: int, c: int, k: int) -> int:
        return 8 * (r * self.L + c) + k

    def vq(self, r: int, c: int, k: int) -> int:
        return 8 * (r * self.L + c) + 4 + k


def _spins_of_bit(x: np.ndarray, b: int) -> np.ndarray:
    return (1 - 2 * ((x >> b) & 1)).astype(np.int64)


def _vertical_fields(lay: _Layout, c: int, k: int, x: np.ndarray | None) -> list:
    """Field on each vertical qubit of chain (c, k) from its row's horizontal qubits."""
    out = []
    for r in range(lay.L):
        v = lay.vq(r, c, k)
        f = lay.h[v]
        for kk in range(4):
            Jv = lay.coupling(lay.hq(r, c, kk), v)
            if Jv:
                s = _spins_of_bit(x, 4 * r + kk) if isinstance(x, np.ndarray) else (1 - 2 * ((x >> (4 * r + kk)) & 1))
                f = f + Jv * s
        out.append(f)
    return out


def _chain_min(lay: _Layout, c: int, k: int, fields: list, shape) -> tuple[np.ndarray, np.ndarray]:
    """Minimum energy and multiplicity of one vertical chain, given its fields."""
    big = np.full(shape, np.inf)
    one = np.ones(shape, dtype=np.int64)
    ep = np.broadcast_to(np.asarray(fields[0], dtype=np.float64), shape).copy()
    em = -ep if lay.present[lay.vq(0, c, k)] else big.copy()
    cp, cm = one.copy(), one.copy()
    for r in range(1, lay.L):
        Jv = lay.coupling(lay.vq(r - 1, c, k), lay.vq(r, c, k))
        f = np.asarray(fields[r], dtype=np.float64)
        np_, ncp = _tie_merge(ep + Jv, cp, em - Jv, cm)
        nm_, ncm = _tie_merge(ep - Jv, cp, em + Jv, cm)
        ep, cp = np_ + f, ncp
        if lay.present[lay.vq(r, c, k)]:
            em, cm = nm_ - f, ncm
        else:
            em, cm = big.copy(), one.copy()
    return _tie_merge(ep, cp, em, cm)


def _column_cost(lay: _Layout, c: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(min energy, count) of column c's vertical qubits and horizontal fields, per boundary x."""
    W = 4 * lay.L
    E = np.zeros(len(x))
    C = np.ones(len(x), dtype=np.int64)
    for b in range(W):
        q = lay.hq(b // 4, c, b % 4)
        if not lay.present[q]:
            E[(x >> b) & 1 == 1] = np.inf
        elif lay.h[q]:
            E += lay.h[q] * _spins_of_bit(x, b)
    for k in range(4):
        e, cnt = _chain_min(lay, c, k, _vertical_fields(lay, c, k, x), len(x))
        E += e
        C = _sat_mul(C, cnt)
    return E, C


def _transfer(lay: _Layout, c: int, F: np.ndarray, C: np.ndarray):
    """Eliminate column c-1's boundary, producing a function of column c's boundary."""
    N = len(F)
    for b in range(4 * lay.L):
        Jb = lay.coupling(lay.hq(b // 4, c - 1, b % 4), lay.hq(b // 4, c, b % 4))
        F3 = F.reshape(N >> (b + 1), 2, 1 << b)
        C3 = C.reshape(N >> (b + 1), 2, 1 << b)
        a, am = F3[:, 0], F3[:, 1]
        ca, cam = C3[:, 0], C3[:, 1]
        up, cup = _tie_merge(a + Jb, ca, am - Jb, cam)
        dn, cdn = _tie_merge(a - Jb, ca, am + Jb, cam)
        F = np.stack([up, dn], axis=1).reshape(N)
        C = np.stack([cup, cdn], axis=1).reshape(N)
    return F, C


def _trace_chain(lay: _Layout, c: int, k: int, x: int) -> list[int]:
    fields = [float(f) for f in _vertical_fields(lay, c, k, x)]
    L = lay.L
    # Forward pass over scalar (plus, minus) energies, then backtrack.
    best = [[fields[0], -fields[0] if lay.present[lay.vq(0, c, k)] else math.inf]]
    for r in range(1, L):
        Jv = lay.coupling(lay.vq(r - 1, c, k), lay.vq(r, c, k))
        ep, em = best[-1]
        row = []
        for s in (1, -1):
            if s == -1 and not lay.present[lay.vq(r, c, k)]:
                row.append(math.inf)
                continue
            row.append(min(ep + Jv * s, em - Jv * s) + s * fields[r])
        best.append(row)
    spins = [0] * L
    spins[-1] = 1 if best[-1][0] <= best[-1][1] else -1
    for r in range(L - 1, 0, -1):
        Jv = lay.coupling(lay.vq(r - 1, c, k), lay.vq(r, c, k))
        ep, em = best[r - 1]
        s = spins[r]
        spins[r - 1] = 1 if ep + Jv * s <= em - Jv * s else -1
    return spins


def column_dp_ground(inst: IsingInstance, return_state: bool = True,
                     max_width: int = DP_MAX_WIDTH) -> GroundTruth:
    """Exact ground energy and degeneracy of a Chimera instance by column transfer."""
    lay = _Layout(inst)
    L, W = lay.L, 4 * lay.L
    if W > max_width:
        raise WidthExceeded(f"boundary width {W} exceeds budget {max_width}")
    x = np.arange(1 << W, dtype=np.int64)
    F, C = _column_cost(lay, 0, x)
    history = [F.copy()] if return_state else []
    for c in range(1, L):
        F, C = _transfer(lay, c, F, C)
        f, g = _column_cost(lay, c, x)
        F = F + f
        C = _sat_mul(C, g)
        if return_state:
            history.append(F.copy())
    E = F.min()
    count = int(C[F == E].astype(object).sum())
    count = min(count, int(SAT))
    state = _traceback(lay, history, inst) if return_state else None
    return GroundTruth(int(E), count, "column_dp", state)


def _traceback(lay: _Layout, history: list[np.ndarray], inst: IsingInstance) -> np.ndarray:
    L, W = lay.L, 4 * lay.L
    x_all = np.arange(1 << W, dtype=np.int64)
    bounds = [0] * L
    bounds[-1] = int(np.argmin(history[-1]))
    for c in range(L - 2, -1, -1):
        cost = history[c].copy()
        nxt = bounds[c + 1]
        for b in range(W):
            Jb = lay.coupling(lay.hq(b // 4, c, b % 4), lay.hq(b // 4, c + 1, b % 4))
            if Jb:
                cost += Jb * _spins_of_bit(x_all, b) * (1 - 2 * ((nxt >> b) & 1))
        bounds[c] = int(np.argmin(cost))
    glob = np.ones(8 * L * L, dtype=np.int8)
    for c in range(L):
        for b in range(W):
            glob[lay.hq(b // 4, c, b % 4)] = 1 - 2 * ((bounds[c] >> b) & 1)
        for k in range(4):
            for r, s in enumerate(_trace_chain(lay, c, k, bounds[c])):
                glob[lay.vq(r, c, k)] = s
    return glob[lay.qubits]


# ------------------------------------------------------------ other sources

def best_found_ground(inst: IsingInstance, samples: Mapping[str, Iterable[int]]) -> GroundTruth:
    """Lowest energy seen across solver sample sets (an upper bound on the ground energy)."""
    mins = {}
    for tag, energies in samples.items():
        arr = np.asarray(list(energies), dtype=np.int64)
        if len(arr):
            mins[tag] = int(arr.min())
    if not mins:
        raise ValueError("no samples to take a best-found energy from")
    best = min(mins.values())
    if len(set(mins.values())) > 1:
        log.warning("solvers disagree on lowest energy: %s", mins)
    return GroundTruth(best, None, "best_found")


def ground_truth(inst: IsingInstance) -> GroundTruth:
    """Exact ground truth by the cheapest applicable method."""
    if inst.L is not None and 4 * inst.L <= DP_MAX_WIDTH and (inst.n > 20 or inst.n == 0):
        return column_dp_ground(inst)
    if inst.n <= EXHAUSTIVE_MAX_N:
        return exhaustive_ground(inst)
    if inst.L is not None:
        return column_dp_ground(inst)
    raise WidthExceeded(f"no exact method for {inst.n} free-form spins")


CACHE_FIELDS = ("instance_id", "energy", "degeneracy", "method")


def write_ground_cache(path: str | Path, truths: Mapping[str, GroundTruth]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CACHE_FIELDS)
        for iid in sorted(truths):
            t = truths[iid]
            w.writerow([iid, t.ground_energy, "" if t.degeneracy is None else t.degeneracy, t.method])


def read_ground_cache(path: str | Path) -> dict[str, GroundTruth]:
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            deg = int(row["degeneracy"]) if row["degeneracy"] else None
            out[row["instance_id"]] = GroundTruth(int(row["energy"]), deg, row["method"])
    return out
