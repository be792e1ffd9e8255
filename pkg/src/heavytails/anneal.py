"""Simulated annealing: linear-beta Metropolis sweeps over integer instances.

The inverse temperature is measured against normalized couplings
(max |J| = 1 before the energy-scale prefactor), so a move costing ``m``
integer units is accepted with probability ``exp(-beta * inst.scale * m)``.
Ground-state hits are scored by exact equality of integer energies.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .instances import Gauge, IsingInstance, spin_reversal
from .ising import energy_int
from .metrics import repetitions_R, repetitions_clamped

UPDATES_PER_NS = 6.65


@dataclass(frozen=True)
class SASchedule:
    beta0: float = 0.01
    beta_final: float = 5.0
    sweeps: int = 1024

    def __post_init__(self):
        if not 0.0 <= self.beta0 < self.beta_final:
            raise ValueError(f"need 0 <= beta0 < beta_final, got {self.beta0}, {self.beta_final}")
        if int(self.sweeps) != self.sweeps or self.sweeps < 1:
            raise ValueError(f"sweeps must be a positive integer, got {self.sweeps}")

    def betas(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.beta_final])
        return np.linspace(self.beta0, self.beta_final, self.sweeps)

    def with_sweeps(self, sweeps: int) -> "SASchedule":
        return SASchedule(self.beta0, self.beta_final, sweeps)


@dataclass(frozen=True)
class StopRule:
    """Draw atomic batches until ``target_hits`` ground states or ``max_samples`` samples."""

    batch_size: int = 100
    target_hits: int = 100
    max_samples: int = 10_000

    def __post_init__(self):
        if self.batch_size < 1 or self.max_samples < 1 or self.target_hits < 1:
            raise ValueError("stop rule sizes must be positive")


@dataclass(frozen=True)
class NoiseModel:
    """Independent N(0, sigma) error on every h and J entry, at full energy scale."""

    sigma: float = 0.0

    def __post_init__(self):
        if not self.sigma >= 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


@dataclass
class SAResult:
    states: np.ndarray
    energies: np.ndarray
    ground_energy: int | None
    sweeps: int
    n_spins: int
    extra: dict = field(default_factory=dict)
    wall_s: float = 0.0

    @property
    def n_samples(self) -> int:
        return len(self.energies)

    @property
    def n_ground_hits(self) -> int:
        if self.ground_energy is None:
            return 0
        return int(np.count_nonzero(self.energies == self.ground_energy))

    @property
    def p_hat(self) -> float:
        return self.n_ground_hits / self.n_samples if self.n_samples else 0.0

    @property
    def R(self) -> float:
        return repetitions_R(self.p_hat)

    @property
    def wallclock_model_ns(self) -> float:
        """Modeled time of one anneal at the reference update rate."""
        return self.sweeps * self.n_spins / UPDATES_PER_NS

    @property
    def time_to_solution_ns(self) -> float:
        return repetitions_clamped(self.p_hat) * self.wallclock_model_ns

    def to_record(self) -> dict:
        return {
            "sweeps": self.sweeps,
            "samples": self.n_samples,
            "ground_energy": self.ground_energy,
            "ground_hits": self.n_ground_hits,
            "p_hat": self.p_hat,
            "model_ns": self.wallclock_model_ns,
            "min_energy": int(self.energies.min()) if self.n_samples else None,
            **self.extra,
        }


def sample_seeds(rng: np.random.Generator, count: int) -> np.ndarray:
    """One independent 64-bit stream seed per sample."""
    return rng.integers(0, 2**64, size=count, dtype=np.uint64)


def acceptance_table(inst: IsingInstance, betas: np.ndarray) -> np.ndarray:
    """``table[t, m] = exp(-beta_t * scale * m)`` for every reachable uphill cost ``m``."""
    absJ = np.abs(inst.J).astype(np.float64)
    row = np.bincount(inst.edges.ravel(), weights=np.repeat(absJ, 2), minlength=inst.n)
    width = 2 * int((row + np.abs(inst.h)).max(initial=0)) + 1
    m = np.arange(width, dtype=np.float64)
    return np.exp(-np.outer(np.asarray(betas) * inst.scale, m))


def anneal(inst: IsingInstance, schedule: SASchedule, seeds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Run one anneal per seed; return (int8 states, exact integer energies)."""
    indptr, indices, _ = inst.csr
    table = acceptance_table(inst, schedule.betas())
    return _kernels.anneal_int(indptr, indices, np.ascontiguousarray(inst.csr_J),
                               np.ascontiguousarray(inst.h, dtype=np.int64), table,
                               np.ascontiguousarray(seeds, dtype=np.uint64))


def sa_sample(inst: IsingInstance, schedule: SASchedule, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """One anneal from a uniform random state; energy in normalized units."""
    states, energies = anneal(inst, schedule, sample_seeds(rng, 1))
    return states[0], float(energies[0]) * inst.scale


def sample_fixed_beta(inst: IsingInstance, beta: float, sweeps: int, n_samples: int,
                      rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Metropolis chains held at one inverse temperature (detailed-balance checks)."""
    indptr, indices, _ = inst.csr
    table = acceptance_table(inst, np.full(sweeps, float(beta)))
    return _kernels.anneal_int(indptr, indices, np.ascontiguousarray(inst.csr_J),
                               np.ascontiguousarray(inst.h, dtype=np.int64), table,
                               sample_seeds(rng, n_samples))


def _batched(run, ground_energy: int | None, stop: StopRule, rng: np.random.Generator):
    states, energies = [], []
    hits = drawn = 0
    while drawn < stop.max_samples and hits < stop.target_hits:
        s, e = run(sample_seeds(rng, stop.batch_size))
        states.append(s)
        energies.append(e)
        drawn += len(e)
        if ground_energy is not None:
            hits += int(np.count_nonzero(e == ground_energy))
    return np.concatenate(states), np.concatenate(energies)


def sa_batch(inst: IsingInstance, schedule: SASchedule, ground_energy: int | None,
             stop: StopRule = StopRule(), rng: np.random.Generator | None = None) -> SAResult:
    """Sample in atomic batches until the stop rule fires."""
    rng = rng if rng is not None else np.random.default_rng()
    t0 = time.perf_counter()
    states, energies = _batched(lambda seeds: anneal(inst, schedule, seeds), ground_energy, stop, rng)
    res = SAResult(states, energies, ground_energy, schedule.sweeps, inst.n)
    res.wall_s = time.perf_counter() - t0
    return res


DEFAULT_SWEEPS = tuple(2**k for k in range(3, 13))


def optimize_sweeps(inst: IsingInstance, ground_energy: int, candidates=DEFAULT_SWEEPS,
                    schedule: SASchedule = SASchedule(), stop: StopRule = StopRule(),
                    rng: np.random.Generator | None = None) -> tuple[int | None, SAResult, dict[int, SAResult]]:
    """Pick the sweep count minimizing modeled total time sweeps * R(p).

    R is clamped to one repetition so saturated candidates compare by
    anneal length. Returns ``(None, ...)`` when every candidate has p = 0;
    the returned result is then that of the longest candidate.
    """
    candidates = sorted(set(int(c) for c in candidates))
    if not candidates:
        raise ValueError("no candidate sweep counts")
    rng = rng if rng is not None else np.random.default_rng()
    results = {c: sa_batch(inst, schedule.with_sweeps(c), ground_energy, stop, rng) for c in candidates}
    best, best_cost = None, np.inf
    for c in candidates:
        cost = c * repetitions_clamped(results[c].p_hat)
        if cost < best_cost:
            best, best_cost = c, cost
    return best, results[best if best is not None else candidates[-1]], results


def perturb(inst: IsingInstance, sigma: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Scaled couplings plus full-scale Gaussian error; returns float (J, h) in CSR order."""
    J = inst.J_scaled + rng.normal(0.0, sigma, size=len(inst.J)) if sigma else inst.J_scaled
    h = inst.h_scaled + rng.normal(0.0, sigma, size=inst.n) if sigma else inst.h_scaled
    return np.ascontiguousarray(J[inst.csr[2]], dtype=np.float64), np.ascontiguousarray(h, dtype=np.float64)


def noisy_sa(inst: IsingInstance, noise: NoiseModel, schedule: SASchedule, ground_energy: int,
             gauges: int = 10, reps: int = 10, stop: StopRule = StopRule(target_hits=10**9, max_samples=1000),
             rng: np.random.Generator | None = None) -> list[SAResult]:
    """Error-sensitivity experiments: ``gauges`` spin reversals times ``reps`` noise draws.

    Each experiment solves a freshly perturbed copy of the gauged instance
    and scores the returned states on the unperturbed integer Hamiltonian.
    With ``sigma = 0`` every experiment is an ordinary batch on the gauged
    instance.
    """
    rng = rng if rng is not None else np.random.default_rng()
    out = []
    for g in range(gauges):
        gauge = Gauge.random(inst.n, rng)
        ginst = spin_reversal(inst, gauge)
        for r in range(reps):
            if noise.sigma == 0.0:
                res = sa_batch(ginst, schedule, ground_energy, stop, rng)
            else:
                J, h = perturb(ginst, noise.sigma, rng)
                res = _noisy_batch(ginst, J, h, schedule, ground_energy, stop, rng)
            res.states = gauge.apply_state(res.states)
            res.extra.update(gauge=g, rep=r, sigma=noise.sigma, alpha=inst.alpha)
            out.append(res)
    return out


def _noisy_batch(ginst: IsingInstance, J: np.ndarray, h: np.ndarray, schedule: SASchedule,
                 ground_energy: int, stop: StopRule, rng: np.random.Generator) -> SAResult:
    indptr, indices, _ = ginst.csr
    betas = schedule.betas()

    def run(seeds):
        states, _ = _kernels.anneal_float(indptr, indices, J, h, betas, seeds)
        return states, energy_int(ginst, states)

    states, energies = _batched(run, ground_energy, stop, rng)
    return SAResult(states, np.asarray(energies, dtype=np.int64), ground_energy, schedule.sweeps, ginst.n)
