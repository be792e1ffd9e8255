"""Compare the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--L 3] [--samples 50] [--repeat 3]

Each kernel is timed on the same inputs through both backends; the table
reports the best of ``--repeat`` runs and the resulting speedup.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from heavytails import _kernels
from heavytails._kernels import _pure
from heavytails.anneal import SASchedule, acceptance_table, sample_seeds
from heavytails.chimera import build_chimera
from heavytails.instances import sample_uk
from heavytails.meanfield import load_schedule


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(L: int, samples: int, rng: np.random.Generator) -> dict:
    inst = sample_uk(build_chimera(L), 1, rng)
    indptr, indices, _ = inst.csr
    J = np.ascontiguousarray(inst.csr_J)
    h = np.zeros(inst.n, dtype=np.int64)
    betas = SASchedule(sweeps=256).betas()
    table = acceptance_table(inst, betas)
    seeds = sample_seeds(rng, samples)
    Jf, hf = J.astype(np.float64), h.astype(np.float64)

    small = sample_uk(build_chimera(2, list(range(12))), 1, rng)
    sp, si, _ = small.csr
    sJ = np.ascontiguousarray(small.csr_J)
    sh = np.zeros(small.n, dtype=np.int64)

    delta, eps = load_schedule().at(0.5)
    theta0 = rng.uniform(0, np.pi, size=(samples, inst.n))

    return {
        "anneal_int": lambda k: k.anneal_int(indptr, indices, J, h, table, seeds),
        "anneal_float": lambda k: k.anneal_float(indptr, indices, Jf, hf, betas, seeds),
        "enumerate_ground": lambda k: k.enumerate_ground(sp, si, sJ, sh),
        "descend": lambda k: k.descend(indptr, indices, Jf, hf, eps, delta, theta0.copy(), 1e-8, 100_000),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=3)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernels.BACKEND != "cython":
        raise SystemExit("compiled extension not available; build with pip install -e . --no-build-isolation")
    from heavytails._kernels import _ext

    print(f"{'kernel':<18}{'cython s':>12}{'pure s':>12}{'speedup':>10}")
    for name, run in cases(args.L, args.samples, np.random.default_rng(args.seed)).items():
        tc = best_time(lambda: run(_ext), args.repeat)
        tp = best_time(lambda: run(_pure), args.repeat)
        print(f"{name:<18}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
