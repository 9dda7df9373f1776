"""Experiment harness: data, batching, paired runs, metrics and CSV output.

Synthetic and CSV inputs take the same path.  Tasks are ordered by release
time and cut into batches, worker groups are reused circularly across
batches, and each batch is solved by the requested method and by its
non-private counterpart.  Metrics are always computed on true distances.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import hashlib
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .baselines import BaselineKind, run_variant
from .core import Instance, MatchState, Task, ValueFunctions, Worker
from .privacy import BudgetPool

DISTRIBUTIONS = ("uniform", "normal", "csv")
SPREAD_MODES = ("variance", "sigma")
PLANE = 100.0


class ConfigError(ValueError):
    pass


class DataError(ValueError):
    pass


class RunError(RuntimeError):
    def __init__(self, run_id: str, cause: BaseException):
        super().__init__(f"run {run_id}: {cause}")
        self.run_id = run_id
        self.cause = cause


@dataclass(frozen=True)
class ExperimentConfig:
    algo: str = "puce"
    worker_task_ratio: float = 2.0
    task_value: float = 4.5
    worker_range: float = 1.4
    eps_range: tuple[float, float] = (0.5, 1.75)
    budget_group_size: int = 7
    batch_size: int = 500
    n_tasks: int = 500
    distribution: str = "normal"
    seed: int = 0
    alpha: float = 1.0
    beta: float = 1.0
    sigma_or_var: float = 150.0
    spread_mode: str = "variance"
    worker_group_size: Optional[int] = None
    input_tasks: Optional[str] = None
    input_workers: Optional[str] = None
    record_time: bool = True

    def __post_init__(self):
        try:
            BaselineKind(self.algo)
        except ValueError:
            raise ConfigError(f"unknown algo {self.algo!r}") from None
        lo, hi = self.eps_range
        checks = [
            (self.worker_task_ratio > 0, "worker_task_ratio must be positive"),
            (self.task_value > 0, "task_value must be positive"),
            (self.worker_range > 0, "worker_range must be positive"),
            (0 < lo <= hi, "eps_range needs 0 < lo <= hi"),
            (self.budget_group_size >= 1, "budget_group_size must be >= 1"),
            (self.batch_size >= 1, "batch_size must be >= 1"),
            (self.n_tasks >= 1, "n_tasks must be >= 1"),
            (self.distribution in DISTRIBUTIONS, f"distribution must be one of {DISTRIBUTIONS}"),
            (self.alpha > 0 and self.beta > 0, "alpha and beta must be positive"),
            (self.sigma_or_var > 0, "sigma_or_var must be positive"),
            (self.spread_mode in SPREAD_MODES, f"spread_mode must be one of {SPREAD_MODES}"),
            (self.worker_group_size is None or self.worker_group_size >= 1,
             "worker_group_size must be >= 1"),
            (0 <= self.seed < 2**64, "seed must be a 64-bit unsigned integer"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        if self.distribution == "csv" and not (self.input_tasks and self.input_workers):
            raise ConfigError("csv distribution needs input_tasks and input_workers")

    @property
    def vf(self) -> ValueFunctions:
        return ValueFunctions(self.alpha, self.beta)

    @property
    def group_size(self) -> int:
        if self.worker_group_size is not None:
            return self.worker_group_size
        return math.ceil(self.worker_task_ratio * self.batch_size)

    @property
    def run_id(self) -> str:
        ident = {k: v for k, v in dataclasses.asdict(self).items() if k != "record_time"}
        return hashlib.sha1(repr(sorted(ident.items())).encode()).hexdigest()[:12]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def parse_value(key: str, raw: str):
    """Convert a text value to the type of config field ``key``."""
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    raw = raw.strip()
    try:
        if key == "eps_range":
            lo, hi = raw.split(",")
            return float(lo), float(hi)
        if key in ("budget_group_size", "batch_size", "n_tasks", "seed"):
            return int(raw)
        if key == "worker_group_size":
            return None if raw.lower() in ("", "none") else int(raw)
        if key == "record_time":
            if raw.lower() not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1")
        if key in ("algo", "distribution", "spread_mode", "input_tasks", "input_workers"):
            return raw
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def load_config_file(path) -> dict:
    """Read a flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, raw = line.split("=", 1)
        out[key.strip()] = parse_value(key.strip(), raw)
    return out


# -- data ----------------------------------------------------------------------

def _points_uniform(rng: np.random.Generator, k: int) -> np.ndarray:
    return rng.uniform(0.0, PLANE, size=(k, 2))


def _points_normal(rng: np.random.Generator, k: int, cfg: ExperimentConfig) -> np.ndarray:
    sd = math.sqrt(cfg.sigma_or_var) if cfg.spread_mode == "variance" else cfg.sigma_or_var
    return rng.normal(0.0, sd, size=(k, 2))


def _entities(cfg: ExperimentConfig, task_pts, worker_pts):
    tasks = [Task(k, (float(x), float(y)), cfg.task_value, float(k))
             for k, (x, y) in enumerate(task_pts)]
    workers = [Worker(k, (float(x), float(y)), cfg.worker_range)
               for k, (x, y) in enumerate(worker_pts)]
    return tasks, workers


def _n_workers(cfg: ExperimentConfig) -> int:
    return math.ceil(cfg.worker_task_ratio * cfg.n_tasks)


def generate_uniform(cfg: ExperimentConfig, rng: np.random.Generator) -> Instance:
    return Instance(*_entities(cfg, _points_uniform(rng, cfg.n_tasks),
                               _points_uniform(rng, _n_workers(cfg))))


def generate_normal(cfg: ExperimentConfig, rng: np.random.Generator) -> Instance:
    return Instance(*_entities(cfg, _points_normal(rng, cfg.n_tasks, cfg),
                               _points_normal(rng, _n_workers(cfg), cfg)))


def _read_csv(path, required: Sequence[str], optional: Sequence[str] = ()):
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if header[:len(required)] != list(required) or any(
                h not in optional for h in header[len(required):]):
            raise DataError(f"{path}:1: expected header {','.join(required)}")
        rows = []
        for line_no, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line_no}: expected {len(header)} columns, got {len(row)}")
            rec = {}
            for col, raw in zip(header, row):
                if col not in required:
                    continue
                try:
                    rec[col] = int(raw) if col == "id" else float(raw)
                except ValueError:
                    raise DataError(f"{path}:{line_no}: column {col}: bad value {raw!r}") from None
                if col != "id" and not math.isfinite(rec[col]):
                    raise DataError(f"{path}:{line_no}: column {col}: value must be finite")
            rows.append((line_no, rec))
        return rows


def read_tasks(path) -> list[Task]:
    out = []
    for line_no, r in _read_csv(path, ("id", "release_time", "x", "y", "value")):
        try:
            out.append(Task(r["id"], (r["x"], r["y"]), r["value"], r["release_time"]))
        except ValueError as exc:
            raise DataError(f"{path}:{line_no}: column value: {exc}") from None
    return out


def read_workers(path) -> list[Worker]:
    out = []
    for line_no, r in _read_csv(path, ("id", "x", "y", "radius"), ("capacity",)):
        try:
            out.append(Worker(r["id"], (r["x"], r["y"]), r["radius"]))
        except ValueError as exc:
            raise DataError(f"{path}:{line_no}: column radius: {exc}") from None
    return out


def make_batches(tasks: Sequence[Task], workers: Sequence[Worker], batch_size: int,
                 group_size: int) -> list[Instance]:
    """Chunk tasks by release time; assign worker groups to batches circularly."""
    if len({t.id for t in tasks}) != len(tasks):
        raise DataError("duplicate task ids")
    ordered = sorted(tasks, key=lambda t: (t.release_time, t.id))
    groups = [list(workers[k:k + group_size]) for k in range(0, len(workers), group_size)]
    if not groups:
        groups = [[]]
    return [Instance(ordered[k:k + batch_size], groups[b % len(groups)])
            for b, k in enumerate(range(0, len(ordered), batch_size))]


def ingest_csv(task_path, worker_path, batch_size: int = 1000,
               group_size: Optional[int] = None, ratio: float = 2.0) -> list[Instance]:
    tasks = read_tasks(task_path)
    workers = read_workers(worker_path)
    if group_size is None:
        group_size = math.ceil(ratio * batch_size)
    return make_batches(tasks, workers, batch_size, group_size)


def load_batches(cfg: ExperimentConfig) -> list[Instance]:
    if cfg.distribution == "csv":
        return ingest_csv(cfg.input_tasks, cfg.input_workers, cfg.batch_size,
                          cfg.group_size)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    gen = generate_uniform if cfg.distribution == "uniform" else generate_normal
    inst = gen(cfg, rng)
    return make_batches(inst.tasks, inst.workers, cfg.batch_size, cfg.group_size)


# -- metrics -------------------------------------------------------------------

@dataclass(frozen=True)
class Outcome:
    """A solved batch: the match and each worker's total committed budget."""

    match: MatchState
    spent_by_worker: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Totals:
    utility: float = 0.0
    distance: float = 0.0
    matched: int = 0

    def __add__(self, other: "Totals") -> "Totals":
        return Totals(self.utility + other.utility, self.distance + other.distance,
                      self.matched + other.matched)


def summarize(instance: Instance, vf: ValueFunctions, outcome: Outcome) -> Totals:
    u = d = 0.0
    pairs = outcome.match.pairs()
    for i, j in pairs:
        dist = instance.dist(i, j)
        d += dist
        u += (instance.tasks[i].value - vf.distance_cost(dist)
              - vf.privacy_cost(outcome.spent_by_worker.get(j, 0.0)))
    return Totals(u, d, len(pairs))


@dataclass(frozen=True)
class MetricsRow:
    u_avg: float
    u_rd: float
    d_avg: float
    d_rd: float
    matched: int


def metrics_from_totals(private: Totals, nonprivate: Totals) -> MetricsRow:
    if private.matched == 0 or nonprivate.matched == 0:
        raise ValueError("no matched pairs; averages undefined")
    u_p, u_np = private.utility / private.matched, nonprivate.utility / nonprivate.matched
    d_p, d_np = private.distance / private.matched, nonprivate.distance / nonprivate.matched
    if u_np == 0 or d_np == 0:
        raise ValueError("non-private average is zero; relative deviation undefined")
    return MetricsRow(u_p, (u_np - u_p) / u_np, d_p, (d_p - d_np) / d_np, private.matched)


def compute_metrics(private: Outcome, nonprivate: Outcome, instance: Instance,
                    vf: ValueFunctions) -> MetricsRow:
    return metrics_from_totals(summarize(instance, vf, private),
                               summarize(instance, vf, nonprivate))


# -- runs ----------------------------------------------------------------------

def solve(kind, instance: Instance, cfg: ExperimentConfig) -> Outcome:
    pool = BudgetPool(seed=cfg.seed, z=cfg.budget_group_size, eps_range=cfg.eps_range,
                      private=BaselineKind(kind).private)
    match, _ = run_variant(kind, instance, cfg.vf, pool)
    spent = {}
    if pool.private:
        index = {w.id: j for j, w in enumerate(instance.workers)}
        spent = {index[w]: pool.ledger.worker_total(w) for w in pool.ledger.workers()}
    return Outcome(match, spent)


@dataclass(frozen=True)
class ResultRow:
    config: ExperimentConfig
    metrics: MetricsRow
    elapsed_ms: Optional[float]


def run_config(cfg: ExperimentConfig) -> ResultRow:
    try:
        batches = load_batches(cfg)
        kind = BaselineKind(cfg.algo)
        tp = tn = Totals()
        elapsed = 0.0
        for inst in batches:
            start = time.perf_counter()
            out = solve(kind, inst, cfg)
            elapsed += time.perf_counter() - start
            tp = tp + summarize(inst, cfg.vf, out)
            if kind.counterpart is kind:
                tn = tn + summarize(inst, cfg.vf, out)
            else:
                tn = tn + summarize(inst, cfg.vf, solve(kind.counterpart, inst, cfg))
        metrics = metrics_from_totals(tp, tn)
    except (ConfigError, DataError):
        raise
    except Exception as exc:
        raise RunError(cfg.run_id, exc) from exc
    return ResultRow(cfg, metrics, elapsed * 1000.0 if cfg.record_time else None)


def run_sweep(grid: Iterable[ExperimentConfig], workers: int = 1) -> list[ResultRow]:
    """Run every config; rows come back in grid order."""
    grid = list(grid)
    if workers <= 1 or len(grid) <= 1:
        return [run_config(c) for c in grid]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(run_config, grid))


def sweep_grid(base: ExperimentConfig, param: str, values: Sequence) -> list[ExperimentConfig]:
    if param not in _FIELDS:
        raise ConfigError(f"unknown sweep parameter {param!r}")
    return [base.replace(**{param: v}) for v in values]


OUTPUT_HEADER = ("run_id", "algo", "ratio", "task_value", "worker_range", "eps_lo", "eps_hi",
                 "z", "seed", "matched", "u_avg", "u_rd", "d_avg", "d_rd", "elapsed_ms")


def _fmt(x) -> str:
    return f"{x:.6g}"


def format_rows(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(OUTPUT_HEADER)
    for r in rows:
        c, m = r.config, r.metrics
        w.writerow([c.run_id, c.algo, _fmt(c.worker_task_ratio), _fmt(c.task_value),
                    _fmt(c.worker_range), _fmt(c.eps_range[0]), _fmt(c.eps_range[1]),
                    c.budget_group_size, c.seed, m.matched, _fmt(m.u_avg), _fmt(m.u_rd),
                    _fmt(m.d_avg), _fmt(m.d_rd),
                    "" if r.elapsed_ms is None else _fmt(r.elapsed_ms)])
    return buf.getvalue()
