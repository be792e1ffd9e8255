"""Fast cross-module invariant suite.

``run_all`` prints one line per invariant (id, status, measured value,
bound) and returns True when all pass. Every check uses fixed seeds and
pre-registered tolerances, with no retries.
"""
from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from . import _kernels
from .anneal import SASchedule, anneal, sample_fixed_beta, sample_seeds
from .chimera import build_chimera
from .exact import column_dp_ground, exhaustive_ground
from .instances import Gauge, apply_scale, from_couplings, sample_uk, spin_reversal
from .ising import energy_int, floppy_fraction_random, floppy_probability
from .meanfield import (build_pool, corner_angles, crossing_time, descend, load_schedule, sv_energy,
                        theta_star)
from .metrics import repetitions_R
from .reduction import ReductionConfig, reduce_to_degree


@dataclass(frozen=True)
class Check:
    id: str
    ok: bool
    measured: float
    bound: str


def all_states(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1, -1), repeat=n)), dtype=np.int8)


def _r_formula(rng) -> Check:
    grid = np.linspace(0.001, 0.999, 1000)
    R = np.array([repetitions_R(p) for p in grid])
    ok = repetitions_R(0.99) == 1.0 and bool((np.diff(R) < 0).all()) and math.isinf(repetitions_R(0.0))
    return Check("metrics.R_formula", ok, repetitions_R(0.5), "R(0.99)=1, strictly decreasing, R(0)=inf")


def _floppy_law(rng) -> Check:
    g = reduce_to_degree(build_chimera(3), ReductionConfig(4), rng).subgraph
    inst = sample_uk(g, 1, rng)
    stats = floppy_fraction_random(inst, 20_000, rng)
    worst = 0.0
    for d, st in stats.items():
        p = floppy_probability(d)
        se = math.sqrt(max(p * (1 - p), 1e-12) / st.total)
        worst = max(worst, abs(st.fraction - p) / se if p else st.floppy)
    return Check("ising.floppy_law", worst <= 4.0, worst, "<= 4 standard errors")


def _dp_vs_exhaustive(rng) -> Check:
    mismatches = 0
    for t in range(8):
        dead = rng.choice(32, size=10, replace=False).tolist()
        inst = sample_uk(build_chimera(2, dead), (1, 4)[t % 2], rng)
        a, b = exhaustive_ground(inst), column_dp_ground(inst)
        mismatches += (a.ground_energy, a.degeneracy) != (b.ground_energy, b.degeneracy)
    return Check("exact.dp_equals_exhaustive", mismatches == 0, mismatches, "== 0")


def _gauge_spectrum(rng) -> Check:
    inst = sample_uk(build_chimera(1, [0, 7]), 3, rng)
    states = all_states(inst.n)
    gauge = Gauge.random(inst.n, rng)
    e1 = np.sort(energy_int(inst, states))
    e2 = np.sort(energy_int(spin_reversal(inst, gauge), states))
    diff = int(np.abs(e1 - e2).max())
    return Check("instances.gauge_spectrum", diff == 0, diff, "== 0")


def _sa_bookkeeping(rng) -> Check:
    inst = sample_uk(build_chimera(2), 2, rng)
    states, energies = anneal(inst, SASchedule(sweeps=32), sample_seeds(rng, 50))
    diff = int(np.abs(energies - energy_int(inst, states)).max())
    return Check("sa.incremental_energy", diff == 0, diff, "== 0")


def _sa_boltzmann(rng) -> Check:
    inst = from_couplings(4, {(0, 1): -1, (1, 2): 1, (2, 3): -1, (0, 3): -1}, {0: 1})
    beta = 0.7
    states, _ = sample_fixed_beta(inst, beta, 200, 20_000, rng)
    ref = all_states(4)
    w = np.exp(-beta * energy_int(inst, ref))
    w /= w.sum()
    codes = ((states < 0) * (1 << np.arange(3, -1, -1))).sum(axis=1)
    emp = np.bincount(codes, minlength=16) / len(states)
    tv = 0.5 * np.abs(emp - w).sum()
    return Check("sa.boltzmann_tv", tv <= 0.02, tv, "<= 0.02")


def _backends(rng) -> Check:
    from ._kernels import _pure

    inst = sample_uk(build_chimera(1), 1, rng)
    indptr, indices, _ = inst.csr
    args = (indptr, indices, np.ascontiguousarray(inst.csr_J), inst.h.astype(np.int64),
            np.exp(-np.outer(np.linspace(0.01, 5, 16), np.arange(13))), sample_seeds(rng, 20))
    s1, e1 = _kernels.anneal_int(*args)
    s2, e2 = _pure.anneal_int(*args)
    same = bool((s1 == s2).all() and (e1 == e2).all())
    return Check("kernels.backend_match", same, float(not same), f"identical ({_kernels.BACKEND})")


def _mf_monotone(rng) -> Check:
    sch = load_schedule()
    inst = sample_uk(build_chimera(2), 1, rng)
    worst = 0.0
    for s in (0.2, 0.3, 0.45, 0.7):
        th = rng.uniform(0, np.pi, size=(25, inst.n))
        worst = max(worst, float(descend(inst, sch, s, th).worst_increase.max()))
    return Check("meanfield.descent_monotone", worst <= 1e-12 * 100, worst, "<= round-off")


def _mf_theta_star(rng) -> Check:
    sch = load_schedule()
    inst = sample_uk(build_chimera(2), 2, rng)
    bad = 0
    for _ in range(100):
        s = rng.uniform(0.0, 0.95)
        th = rng.uniform(0, np.pi, size=inst.n)
        i = int(rng.integers(inst.n))
        t = theta_star(inst, sch, s, th, i)
        base = th.copy()
        base[i] = t
        e_star = sv_energy(inst, sch, s, base)
        xs = rng.uniform(0, np.pi, size=(100, inst.n))
        xs[:] = th
        xs[:, i] = rng.uniform(0, np.pi, size=100)
        bad += not (0 < t < np.pi) or bool((sv_energy(inst, sch, s, xs) < e_star - 1e-12).any())
    return Check("meanfield.theta_star_optimal", bad == 0, bad, "== 0")


def _mf_endpoint(rng) -> Check:
    sch = load_schedule()
    inst = sample_uk(build_chimera(2), 1, rng)
    states = all_states(10)
    states = np.hstack([states, np.ones((len(states), inst.n - 10), dtype=np.int8)])
    eps1 = sch.at(1.0)[1]
    sv = sv_energy(inst, sch, 1.0, corner_angles(states))
    diff = float(np.abs(sv - 0.5 * eps1 * energy_int(inst, states) * inst.scale).max())
    return Check("meanfield.endpoint_classical", diff <= 1e-9, diff, "<= 1e-9")


def _mf_ferromagnet(rng) -> Check:
    sch = load_schedule()
    n = 12
    inst = from_couplings(n, {(i, (i + 1) % n): -1 for i in range(n)})
    pool = build_pool(inst, -n, [np.ones(n), np.r_[np.ones(6), -np.ones(6)], np.r_[np.ones(3), -np.ones(9)]])
    rep = crossing_time(inst, sch, pool)
    return Check("meanfield.ferromagnet_none", rep.s_star is None, -1 if rep.s_star is None else rep.s_star,
                 "s* = none")


def _alpha_scale(rng) -> Check:
    inst = sample_uk(build_chimera(1), 1, rng)
    half = apply_scale(apply_scale(inst, 0.5), 0.4)
    return Check("instances.alpha_composes", math.isclose(half.scale, 0.2), half.scale, "== 0.2")


CHECKS: list[Callable] = [_r_formula, _floppy_law, _dp_vs_exhaustive, _gauge_spectrum, _sa_bookkeeping,
                          _sa_boltzmann, _backends, _mf_monotone, _mf_theta_star, _mf_endpoint,
                          _mf_ferromagnet, _alpha_scale]


def run_all(seed: int = 0, out: TextIO | None = None) -> bool:
    out = out if out is not None else sys.stdout
    ok = True
    for i, fn in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        try:
            c = fn(rng)
        except Exception as exc:  # a crash is a failed invariant, not an abort
            c = Check(fn.__name__.lstrip("_"), False, float("nan"), f"raised {type(exc).__name__}: {exc}")
        ok &= c.ok
        print(f"{c.id}\t{'PASS' if c.ok else 'FAIL'}\t{c.measured:.6g}\t{c.bound}", file=out)
    return ok
