"""Spin-vector (planar rotor) mean-field model and its crossing time.

Each qubit becomes an angle theta_i in [0, pi] with classical spin
cos(theta_i). At annealing parameter s the energy is

    E(s, theta) = eps(s)/2 * (sum_ij J_ij c_i c_j + sum_i h_i c_i) - delta(s)/2 * sum_i sin(theta_i)

with c_i = cos(theta_i) and normalized couplings. The descent map replaces
each theta_i by the midpoint between itself and its single-rotor optimum
theta*_i, sweeping spins in index order until every rotor sits within
``tol`` of its optimum. Because the single-rotor energy is
-R/2 cos(theta - theta*), each half step can only lower the energy.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .instances import IsingInstance
from .ising import energy_int

DESCENT_TOL = 1e-8
DESCENT_MAXITER = 100_000
TIE_RTOL = 1e-9
MONOTONE_RTOL = 1e-12
DEFAULT_S_GRID = np.round(np.arange(0.10, 1.0 + 1e-9, 0.005), 3)
SCHEDULE_HEADER = ["s", "delta_ghz", "epsilon_ghz"]


class MonotonicityError(RuntimeError):
    """A descent step raised the spin-vector energy beyond round-off."""


@dataclass(frozen=True)
class AnnealSchedule:
    s: np.ndarray
    delta: np.ndarray
    epsilon: np.ndarray
    source: str = ""
    digest: str = ""

    def __post_init__(self):
        validate_schedule(self)

    def at(self, s: float) -> tuple[float, float]:
        """(delta(s), epsilon(s)) by piecewise-linear interpolation, in GHz."""
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"s must lie in [0, 1], got {s}")
        return float(np.interp(s, self.s, self.delta)), float(np.interp(s, self.s, self.epsilon))


def validate_schedule(sch: AnnealSchedule, late_ratio: float = 0.05) -> None:
    s, d, e = sch.s, sch.delta, sch.epsilon
    if not (len(s) == len(d) == len(e)) or len(s) < 2:
        raise ValueError("schedule columns must have equal length >= 2")
    if not (np.diff(s) > 0).all():
        raise ValueError("schedule s values must be strictly increasing")
    if s[0] != 0.0 or s[-1] != 1.0:
        raise ValueError("schedule must cover s = 0 to s = 1")
    if (d < 0).any() or (e < 0).any():
        raise ValueError("schedule energies must be non-negative")
    if not d[0] > 10 * e[0]:
        raise ValueError("transverse term must dominate at s = 0")
    if not e[-1] > 10 * d[-1]:
        raise ValueError("problem term must dominate at s = 1")
    d7, e7 = np.interp(0.7, s, d), np.interp(0.7, s, e)
    if not d7 < late_ratio * e7:
        raise ValueError(f"transverse term still on at s = 0.7 (ratio {d7 / e7:.3g})")


def parse_schedule(text: str, source: str = "") -> AnnealSchedule:
    reader = csv.reader(io.StringIO(text))
    header = [h.strip() for h in next(reader)]
    if header != SCHEDULE_HEADER:
        raise ValueError(f"schedule header must be {','.join(SCHEDULE_HEADER)}")
    rows = np.array([[float(x) for x in row] for row in reader if row], dtype=np.float64)
    digest = hashlib.sha256(text.encode()).hexdigest()
    return AnnealSchedule(rows[:, 0], rows[:, 1], rows[:, 2], source, digest)


def load_schedule(path: str | Path | None = None) -> AnnealSchedule:
    """Read a schedule CSV; ``None`` loads the bundled synthetic schedule."""
    if path is None:
        text = resources.files("heavytails").joinpath("data/synthetic_schedule.csv").read_text()
        return parse_schedule(text, "bundled:synthetic_schedule.csv")
    return parse_schedule(Path(path).read_text(), str(path))


# ------------------------------------------------------------------ energies

def _scaled(inst: IsingInstance):
    indptr, indices, _ = inst.csr
    return indptr, indices, np.ascontiguousarray(inst.csr_J * inst.scale), np.ascontiguousarray(inst.h_scaled)


def sv_energy(inst: IsingInstance, schedule: AnnealSchedule, s: float, theta) -> float | np.ndarray:
    """Spin-vector energy in GHz; ``theta`` may be one vector or a stack."""
    delta, eps = schedule.at(s)
    th = np.asarray(theta, dtype=np.float64)
    c = np.cos(th)
    i, j = inst.edges[:, 0], inst.edges[:, 1]
    ising = (c[..., i] * c[..., j] * inst.J_scaled).sum(axis=-1) + (c * inst.h_scaled).sum(axis=-1)
    out = 0.5 * eps * ising - 0.5 * delta * np.sin(th).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def rotor_field(inst: IsingInstance, theta, i: int) -> float:
    """h_i + sum over neighbors j of J_ij cos(theta_j), normalized units."""
    if not 0 <= i < inst.n:
        raise IndexError(f"spin {i} outside [0, {inst.n})")
    indptr, indices, J, h = _scaled(inst)
    nb = slice(indptr[i], indptr[i + 1])
    return float(h[i] + J[nb] @ np.cos(np.asarray(theta, dtype=np.float64)[indices[nb]]))


def theta_star(inst: IsingInstance, schedule: AnnealSchedule, s: float, theta, i: int) -> float:
    """Single-rotor optimum: arccot(-eps h_eff / delta) on the (0, pi) branch."""
    delta, eps = schedule.at(s)
    heff = rotor_field(inst, theta, i)
    if delta == 0.0:
        return 0.0 if heff < 0 else (math.pi if heff > 0 else math.pi / 2)
    return math.atan2(delta, -eps * heff)


def corner_angles(states) -> np.ndarray:
    """Classical spins to rotor angles: +1 -> 0, -1 -> pi."""
    return np.where(np.asarray(states) > 0, 0.0, math.pi)


def rounded_spins(theta) -> np.ndarray:
    return np.where(np.cos(np.asarray(theta)) >= 0, 1, -1).astype(np.int8)


@dataclass
class Descent:
    theta: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    worst_increase: np.ndarray
    energy: np.ndarray

    @property
    def converged(self) -> np.ndarray:
        return self.residual < DESCENT_TOL


def monotone_bound(inst: IsingInstance, schedule: AnnealSchedule, s: float) -> float:
    delta, eps = schedule.at(s)
    size = eps * (np.abs(inst.J_scaled).sum() + np.abs(inst.h_scaled).sum()) + delta * inst.n
    return MONOTONE_RTOL * max(size, 1.0)


def descend(inst: IsingInstance, schedule: AnnealSchedule, s: float, theta0,
            tol: float = DESCENT_TOL, maxiter: int = DESCENT_MAXITER, check: bool = True) -> Descent:
    """The descent map L_s applied to each row of ``theta0``.

    When a rotor sees neither transverse nor longitudinal field its energy
    is flat and the rotor is left where it is.
    """
    delta, eps = schedule.at(s)
    th = np.array(np.atleast_2d(theta0), dtype=np.float64, order="C")
    if th.shape[1] != inst.n:
        raise ValueError(f"angles have {th.shape[1]} entries, instance has {inst.n}")
    indptr, indices, J, h = _scaled(inst)
    iters, res, worst = _kernels.descend(indptr, indices, J, h, eps, delta, th, tol, maxiter)
    if check:
        bound = monotone_bound(inst, schedule, s)
        if (worst > bound).any():
            raise MonotonicityError(f"energy rose by {worst.max():.3g} > {bound:.3g} at s={s}")
    return Descent(th, iters, res, worst, np.atleast_1d(sv_energy(inst, schedule, s, th)))


# ------------------------------------------------------------------ crossing

@dataclass
class CandidatePool:
    states: np.ndarray
    energies: np.ndarray
    ground_energy: int

    @property
    def is_ground(self) -> np.ndarray:
        return self.energies == self.ground_energy

    def __len__(self) -> int:
        return len(self.energies)


def build_pool(inst: IsingInstance, ground_energy: int, states: Sequence[np.ndarray],
               k_excited: int = 200, ground_cap: int = 200) -> CandidatePool:
    """Distinct candidates: up to ``ground_cap`` ground states plus the ``k_excited`` lowest excited ones.

    With no fields a state and its global flip descend to mirror images of
    equal energy, so only one representative per pair is kept.
    """
    arr = np.atleast_2d(np.asarray(states, dtype=np.int8))
    if arr.size == 0:
        raise ValueError("empty candidate pool")
    if not inst.h.any():
        arr = arr * np.where(arr[:, :1] < 0, -1, 1).astype(np.int8)
    arr = np.unique(arr, axis=0)
    e = np.asarray(energy_int(inst, arr), dtype=np.int64)
    if (e < ground_energy).any():
        raise ValueError("a candidate lies below the supplied ground energy")
    order = np.lexsort(tuple(arr.T[::-1]) + (e,))
    arr, e = arr[order], e[order]
    ground = np.flatnonzero(e == ground_energy)[:ground_cap]
    excited = np.flatnonzero(e != ground_energy)[:k_excited]
    keep = np.concatenate([ground, excited])
    return CandidatePool(arr[keep], e[keep], int(ground_energy))


@dataclass
class CrossingReport:
    s_star: float | None
    ledger: list[tuple[float, list[int], float]] = field(default_factory=list)
    n_candidates: int = 0
    n_ground: int = 0

    def to_record(self) -> dict:
        return {"s_star": self.s_star, "candidates": self.n_candidates, "ground_candidates": self.n_ground,
                "scanned": len(self.ledger)}


def _winners(energies: np.ndarray) -> np.ndarray:
    m = energies.min()
    return np.flatnonzero(energies <= m + TIE_RTOL * max(abs(m), 1e-300))


def crossing_time(inst: IsingInstance, schedule: AnnealSchedule, pool: CandidatePool,
                  s_grid: Sequence[float] = DEFAULT_S_GRID) -> CrossingReport:
    """Largest grid s whose instantaneous spin-vector minimum comes from no ground candidate.

    The grid is scanned downward from its top and the scan stops at the first
    such s; ``s_star`` is ``None`` when ground candidates win everywhere.
    """
    if len(pool) == 0:
        raise ValueError("empty candidate pool")
    ground = pool.is_ground
    if not ground.any():
        raise ValueError("candidate pool holds no ground state")
    start = corner_angles(pool.states)
    report = CrossingReport(None, [], len(pool), int(ground.sum()))
    for s in sorted((float(x) for x in s_grid), reverse=True):
        d = descend(inst, schedule, s, start)
        win = _winners(d.energy)
        report.ledger.append((s, win.tolist(), float(d.energy.min())))
        if not ground[win].any():
            report.s_star = s
            break
    return report


def mf_spectrum(inst: IsingInstance, schedule: AnnealSchedule, pool: CandidatePool,
                s_grid: Sequence[float] = DEFAULT_S_GRID) -> tuple[np.ndarray, np.ndarray]:
    """Excitation of every candidate's descent above the best one, per s (rows) and candidate (columns)."""
    grid = np.asarray(sorted(float(x) for x in s_grid))
    start = corner_angles(pool.states)
    out = np.empty((len(grid), len(pool)))
    for r, s in enumerate(grid):
        e = descend(inst, schedule, s, start).energy
        out[r] = e - e.min()
    return grid, out
