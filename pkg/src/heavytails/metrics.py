"""Time-to-solution metrics and heavy-tail statistics.

Unsolved instances (p = 0) carry R = inf. Every order statistic ranks inf
above all finite values, and no aggregate ever turns a censored value into a
finite number: a statistic that touches inf is inf.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields
from typing import Callable, Iterable, Sequence

import numpy as np

TARGET = 0.99
NO_CROSSING_S = 0.10
CENSORED = "censored"


def repetitions_R(p: float) -> float:
    """Anneals needed for 99% cumulative success: log(1 - 0.99) / log(1 - p)."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return math.inf
    if p == 1.0:
        return 0.0
    if p == TARGET:
        return 1.0
    return math.log(1.0 - TARGET) / math.log1p(-p)


def repetitions_clamped(p: float) -> float:
    """R as a physical repetition count (at least one anneal)."""
    return max(repetitions_R(p), 1.0)


def nearest_rank(values: Sequence[float], q: float) -> float:
    """Nearest-rank q-th percentile (0 < q <= 100); inf sorts last."""
    if not len(values):
        raise ValueError("no values")
    if not 0.0 < q <= 100.0:
        raise ValueError(f"percentile must lie in (0, 100], got {q}")
    ordered = sorted(values)
    rank = max(math.ceil(q / 100.0 * len(ordered)), 1)
    return ordered[rank - 1]


@dataclass(frozen=True)
class HardnessRow:
    instance_id: str
    p_hat: float
    R: float
    time_ns: float
    solver: str = "sa"
    alpha: float = 1.0
    sigma: float = 0.0
    sweeps: int = 0


@dataclass
class HardnessTable:
    rows: list[HardnessRow]

    def sorted_by(self, key: str = "R") -> list[HardnessRow]:
        return sorted(self.rows, key=lambda r: (getattr(r, key), r.instance_id))

    def column(self, key: str) -> list:
        return [getattr(r, key) for r in self.rows]

    def to_csv(self) -> str:
        names = [f.name for f in fields(HardnessRow)]
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(names)
        for r in self.sorted_by("instance_id"):
            w.writerow([fmt(v) for v in asdict(r).values()])
        return out.getvalue()


def fmt(v) -> str:
    """Stable text rendering for tables; inf renders as the censoring marker."""
    if isinstance(v, float):
        if math.isinf(v):
            return CENSORED
        if math.isnan(v):
            return ""
        return repr(v)
    return str(v)


def percentile_curves(table: HardnessTable | Sequence[float], percentiles: Iterable[float]) -> list[tuple[float, float]]:
    values = table.column("R") if isinstance(table, HardnessTable) else list(table)
    if not values:
        raise ValueError("empty table")
    return [(float(q), nearest_rank(values, q)) for q in percentiles]


def bootstrap_ci(values: Sequence, statistic: Callable[[list], float], level: float = 0.95,
                 resamples: int = 1000, rng: np.random.Generator | int | None = 0) -> tuple[float, float]:
    """Percentile bootstrap over the entries of ``values`` (one entry per instance).

    A resample whose statistic is censored contributes inf, which the
    rank-based endpoints handle like any other value.
    """
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    if not len(values):
        raise ValueError("no values to resample")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    vals = list(values)
    n = len(vals)
    stats = []
    for _ in range(resamples):
        idx = rng.integers(0, n, size=n)
        stats.append(statistic([vals[i] for i in idx]))
    tail = (1.0 - level) / 2.0 * 100.0
    low = nearest_rank(stats, max(tail, 1e-9))
    high = nearest_rank(stats, 100.0 - tail)
    return low, high


@dataclass(frozen=True)
class Spread:
    instance_id: str
    R_median: float
    R_25: float
    R_75: float
    spread: float
    quantiles: tuple[float, ...]
    censored: int
    flagged: bool


def quantile_spread(experiments: dict[str, Sequence[float]], expected: int | None = 100,
                    percentiles: Sequence[float] = tuple(range(1, 101))) -> list[Spread]:
    """Per-instance error sensitivity from repeated experiments.

    R values are clamped to one repetition before forming ratios, so
    ``spread = R_75 / R_25`` and the normalized quantiles ``R_q / R_median``
    are always defined for finite entries. Instances with an incomplete
    grid are dropped; a censored median flags the instance.
    """
    out = []
    for iid in sorted(experiments):
        raw = list(experiments[iid])
        if expected is not None and len(raw) != expected:
            continue
        R = [max(r, 1.0) for r in raw]
        med = nearest_rank(R, 50)
        q25, q75 = nearest_rank(R, 25), nearest_rank(R, 75)
        censored = sum(math.isinf(r) for r in R)
        spread = math.inf if math.isinf(q75) else q75 / q25
        flagged = math.isinf(med)
        if flagged:
            normed = tuple(math.nan for _ in percentiles)
        else:
            normed = tuple(nearest_rank(R, q) / med for q in percentiles)
        out.append(Spread(iid, med, q25, q75, spread, normed, censored, flagged))
    return out


def ecdf(values: Iterable[float | None]) -> list[tuple[float, float]]:
    """Right-continuous ECDF as (x, F(x)) steps; ``None`` (no crossing) maps to s = 0.10."""
    xs = sorted(NO_CROSSING_S if v is None else float(v) for v in values)
    n = len(xs)
    out: list[tuple[float, float]] = []
    for i, x in enumerate(xs, start=1):
        if out and out[-1][0] == x:
            out[-1] = (x, i / n)
        else:
            out.append((x, i / n))
    return out


def ecdf_at(values: Sequence[float | None], x: float) -> float:
    xs = [NO_CROSSING_S if v is None else v for v in values]
    return sum(v <= x for v in xs) / len(xs) if xs else math.nan


def two_proportion_z(hits_a: int, n_a: int, hits_b: int, n_b: int) -> tuple[float, float]:
    """One-sided pooled z-test of p_a > p_b; returns (z, p-value)."""
    pa, pb = hits_a / n_a, hits_b / n_b
    pool = (hits_a + hits_b) / (n_a + n_b)
    se = math.sqrt(pool * (1 - pool) * (1 / n_a + 1 / n_b))
    if se == 0:
        return (0.0, 1.0) if pa == pb else (math.copysign(math.inf, pa - pb), 0.0 if pa > pb else 1.0)
    z = (pa - pb) / se
    return z, 0.5 * math.erfc(z / math.sqrt(2))
