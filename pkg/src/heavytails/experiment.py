"""Seeded, resumable batch runs over instance ensembles.

A run is described by an INI file. Every random stream is derived from the
master seed, the instance index and a role string, so any single cell can
be recomputed in isolation and the whole run is independent of ordering or
parallelism. Outputs are flat files under one run directory:

    spec.ini             canonical copy of the run description
    instances/<id>.txt   instance files (text format of ``instances``)
    ground_truth.csv     exact (or best-found) ground energies
    records.jsonl        one SA record per (instance, alpha, sigma) cell
    crossings.jsonl      one mean-field record per instance
    tables/*.csv         analysis tables
    run.log              timings and warnings (the only non-reproducible file)
"""
from __future__ import annotations

import configparser
import hashlib
import io
import json
import logging
import math
import re
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from . import metrics
from .anneal import (DEFAULT_SWEEPS, NoiseModel, SASchedule, StopRule, noisy_sa,
                     optimize_sweeps, sa_batch)
from .chimera import build_chimera
from .exact import GroundTruth, WidthExceeded, best_found_ground, column_dp_ground, ground_truth, \
    read_ground_cache, write_ground_cache
from .instances import IsingInstance, apply_scale, format_instance, parse_instance, sample_sidon28, sample_uk
from .ising import floppy_fraction_random, floppy_probability
from .meanfield import build_pool, crossing_time, load_schedule
from .reduction import ReductionConfig, ReductionFailed, reduce_to_degree

log = logging.getLogger(__name__)

SCHEMA = 1
EXIT_OK, EXIT_PARTIAL, EXIT_BAD_SPEC = 0, 1, 2


class SpecError(ValueError):
    """The run description is invalid."""


@dataclass(frozen=True)
class Ensemble:
    family: str          # "U" or "S28"
    k: int | None
    d: int

    @classmethod
    def parse(cls, text: str) -> "Ensemble":
        m = re.fullmatch(r"\s*(U(\d+)|S28)\^([3-6])\s*", text)
        if not m:
            raise SpecError(f"bad ensemble {text!r}; expected U<k>^<d> or S28^<d>")
        if m.group(2):
            if int(m.group(2)) < 1:
                raise SpecError(f"bad ensemble {text!r}; k must be positive")
            return cls("U", int(m.group(2)), int(m.group(3)))
        return cls("S28", None, int(m.group(3)))

    @property
    def tag(self) -> str:
        return f"U{self.k}d{self.d}" if self.family == "U" else f"S28d{self.d}"

    def __str__(self) -> str:
        return f"U{self.k}^{self.d}" if self.family == "U" else f"S28^{self.d}"


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


@dataclass(frozen=True)
class EnsembleSpec:
    master_seed: int
    L: int
    n_instances: int
    ensembles: tuple[Ensemble, ...]
    inoperable: tuple[int, ...] = ()
    max_restarts: int = 100
    alphas: tuple[float, ...] = (1.0,)
    sigmas: tuple[float, ...] = (0.0,)
    sweeps: int | None = 256
    sweep_candidates: tuple[int, ...] = DEFAULT_SWEEPS
    beta0: float = 0.01
    beta_final: float = 5.0
    batch_size: int = 100
    target_hits: int = 100
    max_samples: int = 10_000
    gauges: int = 10
    reps: int = 10
    noisy_samples: int = 1000
    meanfield: bool = False
    schedule: str = ""
    k_excited: int = 200
    ground_cap: int = 200
    pool_sweeps: int = 256
    pool_samples: int = 1000
    s_min: float = 0.10
    s_max: float = 1.0
    s_step: float = 0.005
    name: str = "run"

    # -- derived objects
    @property
    def sa_schedule(self) -> SASchedule:
        return SASchedule(self.beta0, self.beta_final, self.sweeps or 1)

    @property
    def stop_rule(self) -> StopRule:
        return StopRule(self.batch_size, self.target_hits, self.max_samples)

    @property
    def s_grid(self) -> np.ndarray:
        n = int(round((self.s_max - self.s_min) / self.s_step))
        return np.round(self.s_min + self.s_step * np.arange(n + 1), 6)

    def to_ini(self) -> str:
        """Canonical text; equal specs give equal bytes."""
        d = asdict(self)
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp["run"] = {"schema": str(SCHEMA), "name": self.name, "master_seed": str(self.master_seed)}
        cp["ensemble"] = {
            "L": str(self.L), "n_instances": str(self.n_instances),
            "ensembles": ", ".join(str(e) for e in self.ensembles),
            "inoperable": ", ".join(map(str, self.inoperable)), "max_restarts": str(self.max_restarts),
        }
        cp["sa"] = {
            "alphas": ", ".join(map(repr, self.alphas)), "sigmas": ", ".join(map(repr, self.sigmas)),
            "sweeps": "optimize" if self.sweeps is None else str(self.sweeps),
            "sweep_candidates": ", ".join(map(str, self.sweep_candidates)),
            **{k: repr(d[k]) if isinstance(d[k], float) else str(d[k]) for k in
               ("beta0", "beta_final", "batch_size", "target_hits", "max_samples", "gauges", "reps", "noisy_samples")},
        }
        cp["meanfield"] = {
            "enabled": str(self.meanfield).lower(), "schedule": self.schedule,
            **{k: repr(d[k]) if isinstance(d[k], float) else str(d[k]) for k in
               ("k_excited", "ground_cap", "pool_sweeps", "pool_samples", "s_min", "s_max", "s_step")},
        }
        out = io.StringIO()
        cp.write(out)
        return out.getvalue()

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.to_ini().encode()).hexdigest()[:16]


def parse_spec(text: str) -> EnsembleSpec:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SpecError(str(exc)) from exc
    if not cp.has_section("run") or not cp.has_section("ensemble"):
        raise SpecError("spec needs [run] and [ensemble] sections")
    schema = cp.get("run", "schema", fallback=None)
    if schema is None or schema.strip() != str(SCHEMA):
        raise SpecError(f"unsupported schema {schema!r}; expected {SCHEMA}")
    kw: dict = {}
    try:
        kw["name"] = cp.get("run", "name", fallback="run")
        kw["master_seed"] = cp.getint("run", "master_seed")
        e = cp["ensemble"]
        kw["L"] = int(e["L"])
        kw["n_instances"] = int(e.get("n_instances", "1000"))
        kw["ensembles"] = tuple(Ensemble.parse(x) for x in e["ensembles"].split(","))
        kw["inoperable"] = _ints(e.get("inoperable", ""))
        kw["max_restarts"] = int(e.get("max_restarts", "100"))
        if cp.has_section("sa"):
            s = cp["sa"]
            kw["alphas"] = _floats(s.get("alphas", "1.0"))
            kw["sigmas"] = _floats(s.get("sigmas", "0.0"))
            sw = s.get("sweeps", "256").strip()
            kw["sweeps"] = None if sw == "optimize" else int(sw)
            if "sweep_candidates" in s:
                kw["sweep_candidates"] = _ints(s["sweep_candidates"])
            for key in ("beta0", "beta_final"):
                if key in s:
                    kw[key] = float(s[key])
            for key in ("batch_size", "target_hits", "max_samples", "gauges", "reps", "noisy_samples"):
                if key in s:
                    kw[key] = int(s[key])
        if cp.has_section("meanfield"):
            m = cp["meanfield"]
            kw["meanfield"] = m.getboolean("enabled", fallback=True)
            kw["schedule"] = m.get("schedule", "").strip()
            for key in ("k_excited", "ground_cap", "pool_sweeps", "pool_samples"):
                if key in m:
                    kw[key] = int(m[key])
            for key in ("s_min", "s_max", "s_step"):
                if key in m:
                    kw[key] = float(m[key])
    except (KeyError, ValueError) as exc:
        raise SpecError(f"invalid spec: {exc}") from exc
    spec = EnsembleSpec(**kw)
    _validate(spec)
    return spec


def _validate(spec: EnsembleSpec) -> None:
    if spec.L < 1 or spec.n_instances < 1 or not spec.ensembles:
        raise SpecError("need L >= 1, n_instances >= 1 and at least one ensemble")
    if any(q < 0 or q >= 8 * spec.L * spec.L for q in spec.inoperable):
        raise SpecError("inoperable qubit outside the graph")
    if any(not 0 < a <= 1 for a in spec.alphas) or any(s < 0 for s in spec.sigmas):
        raise SpecError("alphas must lie in (0, 1] and sigmas be >= 0")
    if spec.sweeps is not None and spec.sweeps < 1:
        raise SpecError("sweeps must be positive")
    if not 0 <= spec.beta0 < spec.beta_final:
        raise SpecError("need 0 <= beta0 < beta_final")
    if min(spec.batch_size, spec.target_hits, spec.max_samples, spec.gauges, spec.reps, spec.noisy_samples) < 1:
        raise SpecError("sample counts must be positive")
    if not 0 <= spec.s_min < spec.s_max <= 1 or spec.s_step <= 0:
        raise SpecError("bad s grid")


def load_spec(path: str | Path) -> EnsembleSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}") from exc
    return parse_spec(text)


# ------------------------------------------------------------------- seeding

def seed_sequence(master: int, index: int, role: str) -> np.random.SeedSequence:
    return np.random.SeedSequence(master, spawn_key=(index, zlib.crc32(role.encode())))


def derive_rng(master: int, index: int, role: str) -> np.random.Generator:
    """Generator that depends only on (master seed, instance index, role)."""
    return np.random.default_rng(seed_sequence(master, index, role))


def _seed_info(master: int, index: int, role: str) -> dict:
    return {"master": master, "index": index, "role": role}


# ------------------------------------------------------------------- layout

@dataclass
class RunDir:
    root: Path

    def __post_init__(self):
        self.root = Path(self.root)

    @property
    def instances(self) -> Path:
        return self.root / "instances"

    @property
    def tables(self) -> Path:
        return self.root / "tables"

    @property
    def ground(self) -> Path:
        return self.root / "ground_truth.csv"

    @property
    def records(self) -> Path:
        return self.root / "records.jsonl"

    @property
    def crossings(self) -> Path:
        return self.root / "crossings.jsonl"

    def instance_path(self, iid: str) -> Path:
        return self.instances / f"{iid}.txt"

    def prepare(self, spec: EnsembleSpec) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.instances.mkdir(exist_ok=True)
        (self.root / "spec.ini").write_text(spec.to_ini())
        logger = logging.getLogger("heavytails")
        for h in list(logger.handlers):
            if getattr(h, "_run_log", False):
                logger.removeHandler(h)
                h.close()
        handler = logging.FileHandler(self.root / "run.log")
        handler._run_log = True
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)


def default_run_dir(spec: EnsembleSpec) -> Path:
    return Path("runs") / f"{spec.name}-{spec.config_hash}"


def instance_ids(spec: EnsembleSpec) -> Iterator[tuple[int, Ensemble, str]]:
    """(global index, ensemble, id) in canonical order."""
    for e_idx, ens in enumerate(spec.ensembles):
        for i in range(spec.n_instances):
            yield e_idx * spec.n_instances + i, ens, f"{ens.tag}-{i:04d}"


def _map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# ----------------------------------------------------------------- generate

def make_instance(spec: EnsembleSpec, index: int, ens: Ensemble, iid: str) -> IsingInstance:
    """Fresh random subgraph and couplings for one instance; raises ReductionFailed."""
    g = build_chimera(spec.L, spec.inoperable)
    graph_rng = derive_rng(spec.master_seed, index, f"graph:{ens.tag}")
    sub = reduce_to_degree(g, ReductionConfig(ens.d, spec.max_restarts), graph_rng).subgraph
    rng = derive_rng(spec.master_seed, index, f"couplings:{ens.tag}")
    meta = {"id": iid, "d": ens.d}
    if ens.family == "U":
        return sample_uk(sub, ens.k, rng, **meta)
    return sample_sidon28(sub, rng, **meta)


def _generate_cell(args) -> tuple[str, str | None, GroundTruth | None, str | None]:
    spec, index, ens, iid = args
    try:
        inst = make_instance(spec, index, ens, iid)
    except ReductionFailed as exc:
        return iid, None, None, str(exc)
    try:
        gt = ground_truth(inst)
    except WidthExceeded:
        gt = None
    return iid, format_instance(inst), gt, None


def cmd_generate(spec: EnsembleSpec, out: Path, jobs: int = 1) -> int:
    run = RunDir(out)
    run.prepare(spec)
    cells = [(spec, idx, ens, iid) for idx, ens, iid in instance_ids(spec)]
    truths: dict[str, GroundTruth] = {}
    skipped = 0
    for iid, text, gt, err in _map(_generate_cell, cells, jobs):
        if err is not None:
            log.warning("skipping %s: %s", iid, err)
            skipped += 1
            continue
        run.instance_path(iid).write_text(text)
        if gt is not None:
            truths[iid] = gt
    write_ground_cache(run.ground, truths)
    log.info("generated %d instances (%d skipped)", len(cells) - skipped, skipped)
    return EXIT_PARTIAL if skipped else EXIT_OK


def load_instances(run: RunDir, spec: EnsembleSpec) -> list[tuple[int, Ensemble, str, IsingInstance]]:
    out = []
    for idx, ens, iid in instance_ids(spec):
        p = run.instance_path(iid)
        if p.exists():
            out.append((idx, ens, iid, parse_instance(p.read_text())))
    return out


# -------------------------------------------------------------------- solve

def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


def _append_jsonl(path: Path, rows: Iterable[dict]) -> None:
    with open(path, "a") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
            fh.flush()


def cell_key(spec: EnsembleSpec, iid: str, alpha: float, sigma: float) -> str:
    h = hashlib.sha256(f"{spec.config_hash}|{iid}|{alpha!r}|{sigma!r}".encode())
    return h.hexdigest()[:16]


def _solve_cell(args) -> dict:
    spec, idx, ens, iid, inst, alpha, sigma, gt = args
    role = f"sa:{ens.tag}:alpha={alpha!r}:sigma={sigma!r}"
    rng = derive_rng(spec.master_seed, idx, role)
    scaled = apply_scale(inst, alpha)
    rec = {"key": cell_key(spec, iid, alpha, sigma), "instance": iid, "ensemble": str(ens), "alpha": alpha,
           "sigma": sigma, "seed": _seed_info(spec.master_seed, idx, role), "config": spec.config_hash}
    if gt is None:
        probe = sa_batch(scaled, spec.sa_schedule.with_sweeps(max(spec.sweep_candidates)), None,
                         StopRule(spec.batch_size, 1, spec.batch_size), rng)
        gt = best_found_ground(inst, {"sa": probe.energies})
    rec["ground_energy"] = gt.ground_energy
    rec["ground_method"] = gt.method
    if sigma > 0:
        stop = StopRule(spec.batch_size, 10**9, spec.noisy_samples)
        results = noisy_sa(scaled, NoiseModel(sigma), spec.sa_schedule, gt.ground_energy,
                           spec.gauges, spec.reps, stop, rng)
        rec["kind"] = "noisy"
        rec["sweeps"] = spec.sa_schedule.sweeps
        rec["model_ns"] = results[0].wallclock_model_ns
        rec["experiments"] = [{"gauge": r.extra["gauge"], "rep": r.extra["rep"], "samples": r.n_samples,
                               "hits": r.n_ground_hits} for r in results]
        hits = sum(x["hits"] for x in rec["experiments"])
        samples = sum(x["samples"] for x in rec["experiments"])
        rec["samples"], rec["ground_hits"], rec["p_hat"] = samples, hits, hits / samples
        return rec
    if spec.sweeps is None:
        best, res, scan = optimize_sweeps(scaled, gt.ground_energy, spec.sweep_candidates,
                                          spec.sa_schedule, spec.stop_rule, rng)
        rec["kind"] = "sa_opt"
        rec["sweep_scan"] = {str(c): r.p_hat for c, r in scan.items()}
        rec["solved"] = best is not None
    else:
        res = sa_batch(scaled, spec.sa_schedule, gt.ground_energy, spec.stop_rule, rng)
        rec["kind"] = "sa"
    rec.update(sweeps=res.sweeps, samples=res.n_samples, ground_hits=res.n_ground_hits, p_hat=res.p_hat,
               model_ns=res.wallclock_model_ns, min_energy=int(res.energies.min()))
    if rec["min_energy"] < gt.ground_energy:
        log.warning("%s: SA found energy %d below ground reference %d", iid, rec["min_energy"], gt.ground_energy)
    return rec


def cmd_solve(spec: EnsembleSpec, out: Path, jobs: int = 1) -> int:
    run = RunDir(out)
    if not run.instances.exists():
        log.error("no instances under %s; run generate first", out)
        return EXIT_PARTIAL
    run.prepare(spec)
    truths = read_ground_cache(run.ground) if run.ground.exists() else {}
    done = {r["key"] for r in _read_jsonl(run.records)}
    cells = []
    missing = 0
    for idx, ens, iid, inst in load_instances(run, spec):
        gt = truths.get(iid)
        missing += gt is None
        for alpha in spec.alphas:
            for sigma in spec.sigmas:
                if cell_key(spec, iid, alpha, sigma) not in done:
                    cells.append((spec, idx, ens, iid, inst, alpha, sigma, gt))
    log.info("solving %d cells (%d already recorded)", len(cells), len(done))
    # Write in canonical order as results arrive (map preserves order).
    for start in range(0, len(cells), max(jobs, 1) * 8):
        chunk = cells[start:start + max(jobs, 1) * 8]
        _append_jsonl(run.records, _map(_solve_cell, chunk, jobs))
    if missing:
        log.warning("%d instances used best-found ground energies", missing)
    return EXIT_PARTIAL if missing else EXIT_OK


# ---------------------------------------------------------------- meanfield

def _meanfield_cell(args) -> dict:
    spec, idx, ens, iid, inst, gt = args
    role = f"pool:{ens.tag}"
    rng = derive_rng(spec.master_seed, idx, role)
    schedule = load_schedule(spec.schedule or None)
    exact = column_dp_ground(inst) if inst.L is not None and 4 * inst.L <= 24 else None
    sample = sa_batch(inst, spec.sa_schedule.with_sweeps(spec.pool_sweeps), None,
                      StopRule(spec.batch_size, 10**9, spec.pool_samples), rng)
    if exact is not None:
        ground_e = exact.ground_energy
    elif gt is not None:
        ground_e = gt.ground_energy
    else:
        ground_e = best_found_ground(inst, {"pool": sample.energies}).ground_energy
    states = sample.states if exact is None else np.vstack([exact.state[None], sample.states])
    rec = {"instance": iid, "ensemble": str(ens), "seed": _seed_info(spec.master_seed, idx, role),
           "schedule": schedule.source, "schedule_sha256": schedule.digest, "config": spec.config_hash,
           "grid": [spec.s_min, spec.s_max, spec.s_step], "ground_energy": ground_e}
    pool = build_pool(inst, ground_e, states, spec.k_excited, spec.ground_cap)
    if not pool.is_ground.any():
        rec.update(s_star=None, flagged="no ground state in candidate pool", candidates=len(pool))
        return rec
    rep = crossing_time(inst, schedule, pool, spec.s_grid)
    rec.update(rep.to_record())
    return rec


def cmd_meanfield(spec: EnsembleSpec, out: Path, jobs: int = 1) -> int:
    run = RunDir(out)
    run.prepare(spec)
    truths = read_ground_cache(run.ground) if run.ground.exists() else {}
    done = {r["instance"] for r in _read_jsonl(run.crossings)}
    cells = [(spec, idx, ens, iid, inst, truths.get(iid)) for idx, ens, iid, inst in load_instances(run, spec)
             if iid not in done]
    for start in range(0, len(cells), max(jobs, 1) * 4):
        _append_jsonl(run.crossings, _map(_meanfield_cell, cells[start:start + max(jobs, 1) * 4], jobs))
    flagged = [r["instance"] for r in _read_jsonl(run.crossings) if r.get("flagged")]
    if flagged:
        log.warning("mean-field flagged instances: %s", flagged)
    return EXIT_PARTIAL if flagged else EXIT_OK


# ------------------------------------------------------------------ analyze

PERCENTILES = (5, 10, 25, 50, 75, 90, 95, 99, 100)


def _write_csv(path: Path, header: list[str], rows: Iterable[Iterable]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(metrics.fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _group_name(ens: str, kind: str, alpha: float, sigma: float) -> str:
    return f"{ens.replace('^', 'd')}_{kind}_a{alpha:g}_s{sigma:g}"


def cmd_analyze(spec: EnsembleSpec, out: Path, resamples: int = 1000) -> int:
    run = RunDir(out)
    run.tables.mkdir(parents=True, exist_ok=True)
    records = sorted(_read_jsonl(run.records), key=lambda r: (r["ensemble"], r["alpha"], r["sigma"], r["instance"]))
    groups: dict[tuple, list[dict]] = {}
    for r in records:
        groups.setdefault((r["ensemble"], r["kind"], r["alpha"], r["sigma"]), []).append(r)
    summary = []
    for (ens, kind, alpha, sigma), rows in sorted(groups.items()):
        name = _group_name(ens, kind, alpha, sigma)
        table = metrics.HardnessTable([
            metrics.HardnessRow(r["instance"], r["p_hat"], metrics.repetitions_R(r["p_hat"]),
                                metrics.repetitions_clamped(r["p_hat"]) * r["model_ns"], kind, alpha, sigma,
                                r["sweeps"]) for r in rows])
        (run.tables / f"hardness_{name}.csv").write_text(table.to_csv())
        _write_csv(run.tables / f"percentiles_{name}.csv", ["percentile", "R"],
                   metrics.percentile_curves(table, PERCENTILES))
        Rs = table.column("R")
        lo, hi = metrics.bootstrap_ci(Rs, lambda v: metrics.nearest_rank(v, 75), resamples=resamples,
                                      rng=zlib.crc32(name.encode()))
        summary.append([ens, kind, alpha, sigma, len(rows), metrics.nearest_rank(Rs, 50),
                        metrics.nearest_rank(Rs, 75), lo, hi, sum(math.isinf(x) for x in Rs)])
        if kind == "noisy":
            exps = {r["instance"]: [metrics.repetitions_R(e["hits"] / e["samples"]) for e in r["experiments"]]
                    for r in rows}
            spreads = metrics.quantile_spread(exps, expected=spec.gauges * spec.reps)
            order = {r.instance_id: i for i, r in enumerate(table.sorted_by("R"))}
            _write_csv(run.tables / f"spread_{name}.csv",
                       ["instance_id", "hardness_rank", "R_median", "R_25", "R_75", "spread", "censored", "flagged"],
                       [[s.instance_id, order[s.instance_id], s.R_median, s.R_25, s.R_75, s.spread, s.censored,
                         s.flagged] for s in sorted(spreads, key=lambda s: order[s.instance_id])])
    _write_csv(run.tables / "summary.csv",
               ["ensemble", "solver", "alpha", "sigma", "instances", "R_median", "R_75", "R_75_ci_low",
                "R_75_ci_high", "censored"], summary)
    crossings = sorted(_read_jsonl(run.crossings), key=lambda r: r["instance"])
    by_ens: dict[str, list] = {}
    for r in crossings:
        by_ens.setdefault(r["ensemble"], []).append(r)
    _write_csv(run.tables / "crossings.csv", ["instance_id", "ensemble", "s_star", "candidates"],
               [[r["instance"], r["ensemble"], "none" if r["s_star"] is None else r["s_star"], r.get("candidates", 0)]
                for r in crossings])
    for ens, rows in sorted(by_ens.items()):
        _write_csv(run.tables / f"ecdf_{ens.replace('^', 'd')}.csv", ["s", "F"],
                   metrics.ecdf([r["s_star"] for r in rows]))
    return EXIT_OK


# ------------------------------------------------------------ floppy stats

def cmd_floppy_stats(spec: EnsembleSpec, out: Path, n_states: int = 10_000, per_ensemble: int = 10) -> int:
    run = RunDir(out)
    run.tables.mkdir(parents=True, exist_ok=True)
    rows = []
    for ens in spec.ensembles:
        totals: dict[int, list[int]] = {}
        for i in range(min(per_ensemble, spec.n_instances)):
            idx = spec.ensembles.index(ens) * spec.n_instances + i
            try:
                inst = make_instance(spec, idx, ens, f"{ens.tag}-{i:04d}")
            except ReductionFailed:
                continue
            stats = floppy_fraction_random(inst, n_states, derive_rng(spec.master_seed, idx, f"floppy:{ens.tag}"))
            for d, st in stats.items():
                acc = totals.setdefault(d, [0, 0])
                acc[0] += st.floppy
                acc[1] += st.total
        for d in sorted(totals):
            f, t = totals[d]
            rows.append([str(ens), d, f, t, f / t, floppy_probability(d) if ens.family == "U" and ens.k == 1 else ""])
    _write_csv(run.tables / "floppy.csv", ["ensemble", "degree", "floppy", "trials", "fraction", "law"], rows)
    for r in rows:
        print(",".join(metrics.fmt(v) for v in r))
    return EXIT_OK
