"""Batch experiment harness: suites, CSV records, and report tables.

A suite is a set of instances (generated or loaded from text files) crossed
with a set of algorithm configurations and a list of seeds. Every cell runs
as an isolated, deterministic, single-threaded search; records are flushed
to CSV incrementally and rewritten in canonical cell order at the end, so
repeated runs of the same suite produce identical files apart from measured
wall times.

CSV schema: instance,algorithm,seed,outcome,plan_len,expansions,reexp_rate,time_s
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .domains import GENERATORS, InstanceSpec, generate
from .dsl import parse_problem, validate
from .model import Problem
from .sampling import SamplerKind
from .search import MctsConfig, SearchConfig, run_mcts, run_search

CSV_HEADER = ("instance", "algorithm", "seed", "outcome", "plan_len",
              "expansions", "reexp_rate", "time_s")

#: rendered for a coverage cell with no solved runs
EMPTY_CELL = "0 (—)"


@dataclass(frozen=True)
class RunRecord:
    instance: str
    algorithm: str
    seed: int
    outcome: str
    plan_len: Optional[int]
    expansions: int
    reexp_rate: float
    time_s: float

    @property
    def domain(self) -> str:
        return self.instance.split("/", 1)[0]

    def csv_row(self) -> List[str]:
        return [
            self.instance,
            self.algorithm,
            str(self.seed),
            self.outcome,
            "" if self.plan_len is None else str(self.plan_len),
            str(self.expansions),
            f"{self.reexp_rate:.4f}",
            f"{self.time_s:.3f}",
        ]


@dataclass
class AlgoSpec:
    """One algorithm configuration; algo is "sg", "sa" or "mcts"."""
    algo_id: str
    algo: str = "sg"
    rectifier: str = "log"
    sampler: str = "uniform"
    beta: float = 1.0
    eps: float = 1e-6
    candidates: int = 10
    grid_digits: int = 3
    reject_budget: int = 100
    heuristic: str = "gc"
    dup_detect: bool = True
    alpha: float = 0.3
    k: float = 1.0
    c: float = math.sqrt(2.0)
    rollout_depth: int = 50


@dataclass
class InstanceSource:
    """A generated instance or a problem file on disk."""
    instance_id: str
    spec: Optional[InstanceSpec] = None
    path: Optional[str] = None

    def load(self) -> Problem:
        if self.spec is not None:
            return generate(self.spec)
        assert self.path is not None
        with open(self.path, "r", encoding="utf-8") as fh:
            text = fh.read()
        problem, diags = parse_problem(text)
        if problem is None:
            raise ValueError(
                f"{self.path}: " + "; ".join(str(d) for d in diags))
        errors = [d for d in validate(problem) if d.severity == "error"]
        if errors:
            raise ValueError(
                f"{self.path}: " + "; ".join(str(d) for d in errors))
        return problem


@dataclass
class SuiteConfig:
    instances: List[InstanceSource]
    algorithms: List[AlgoSpec]
    seeds: List[int] = field(default_factory=lambda: [0])
    time_limit: float = 600.0
    expansion_limit: Optional[int] = None
    workers: int = 1
    memory_note: Optional[str] = None
    source_text: Optional[str] = None

    def canonical_text(self) -> str:
        if self.source_text is not None:
            return self.source_text
        lines = [f"seeds = {' '.join(str(s) for s in self.seeds)}",
                 f"time_limit = {self.time_limit!r}",
                 f"expansion_limit = {self.expansion_limit!r}",
                 f"workers = {self.workers}"]
        lines += [f"instance = {src.instance_id}" for src in self.instances]
        lines += [f"algo = {spec!r}" for spec in self.algorithms]
        return "\n".join(lines) + "\n"


_ALGO_FIELDS = {
    "algo": str, "rectifier": str, "sampler": str, "heuristic": str,
    "beta": float, "eps": float, "candidates": int, "grid_digits": int,
    "reject_budget": int, "alpha": float, "k": float, "c": float,
    "rollout_depth": int,
}


def _parse_algo_line(value: str, lineno: int) -> AlgoSpec:
    parts = value.split()
    if not parts:
        raise ValueError(f"line {lineno}: algo line needs an identifier")
    spec = AlgoSpec(algo_id=parts[0])
    for part in parts[1:]:
        key, sep, raw = part.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value, got {part!r}")
        if key == "dup_detect":
            spec.dup_detect = raw == "on"
            continue
        conv = _ALGO_FIELDS.get(key)
        if conv is None:
            raise ValueError(f"line {lineno}: unknown algo key {key!r}")
        setattr(spec, key, conv(raw))
    if spec.algo not in ("sg", "sa", "mcts"):
        raise ValueError(f"line {lineno}: unknown algo {spec.algo!r}")
    return spec


def _parse_instance_line(value: str, lineno: int) -> InstanceSource:
    parts = value.split()
    if not parts:
        raise ValueError(f"line {lineno}: instance line needs a domain or file")
    head = parts[0]
    if head == "file":
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected `file <path>`")
        stem = os.path.splitext(os.path.basename(parts[1]))[0]
        return InstanceSource(instance_id=f"file/{stem}", path=parts[1])
    if head not in GENERATORS:
        raise ValueError(f"line {lineno}: unknown domain {head!r}")
    params: Dict[str, int] = {}
    seed = 0
    for part in parts[1:]:
        key, sep, raw = part.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value, got {part!r}")
        if key == "seed":
            seed = int(raw)
        else:
            params[key] = int(raw)
    spec = InstanceSpec(domain=head, params=params, seed=seed)
    return InstanceSource(instance_id=spec.instance_id(), spec=spec)


def load_suite(text: str) -> SuiteConfig:
    """Parse a line-oriented `key = value` suite description.

    `instance` and `algo` keys accumulate; `seeds` is a space-separated list;
    `#` starts a comment. See README for the full key set.
    """
    instances: List[InstanceSource] = []
    algorithms: List[AlgoSpec] = []
    seeds = [0]
    time_limit = 600.0
    expansion_limit: Optional[int] = None
    workers = 1
    memory_note: Optional[str] = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key = value")
        key = key.strip()
        value = value.strip()
        if key == "instance":
            instances.append(_parse_instance_line(value, lineno))
        elif key == "algo":
            algorithms.append(_parse_algo_line(value, lineno))
        elif key == "seeds":
            seeds = [int(tok) for tok in value.split()]
            if not seeds:
                raise ValueError(f"line {lineno}: seeds list is empty")
        elif key == "time_limit":
            time_limit = float(value)
        elif key == "expansion_limit":
            expansion_limit = None if value == "none" else int(value)
        elif key == "workers":
            workers = int(value)
        elif key == "memory_note":
            memory_note = value
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    if not instances:
        raise ValueError("suite config declares no instances")
    if not algorithms:
        raise ValueError("suite config declares no algorithms")
    ids = [spec.algo_id for spec in algorithms]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate algorithm identifiers")
    return SuiteConfig(instances=instances, algorithms=algorithms,
                       seeds=seeds, time_limit=time_limit,
                       expansion_limit=expansion_limit, workers=workers,
                       memory_note=memory_note, source_text=text)


def sampler_kind(spec: AlgoSpec) -> SamplerKind:
    return SamplerKind(kind=spec.sampler, beta=spec.beta, eps=spec.eps,
                       candidates=spec.candidates, grid_digits=spec.grid_digits,
                       reject_budget=spec.reject_budget)


def build_search_config(spec: AlgoSpec, seed: int, time_limit: float,
                        expansion_limit: Optional[int]) -> SearchConfig:
    return SearchConfig(
        mode=spec.algo, rectifier=spec.rectifier, sampler=sampler_kind(spec),
        heuristic=spec.heuristic, seed=seed, time_limit=time_limit,
        expansion_limit=expansion_limit, duplicate_detection=spec.dup_detect,
    )


def build_mcts_config(spec: AlgoSpec, seed: int, time_limit: float,
                      trial_limit: Optional[int]) -> MctsConfig:
    return MctsConfig(
        alpha=spec.alpha, k=spec.k, c=spec.c,
        rollout_depth=spec.rollout_depth, sampler=sampler_kind(spec),
        heuristic=spec.heuristic, seed=seed, time_limit=time_limit,
        trial_limit=trial_limit,
    )


def run_one(problem: Problem, spec: AlgoSpec, seed: int, instance_id: str,
            time_limit: float, expansion_limit: Optional[int]) -> RunRecord:
    """Execute one (instance, algorithm, seed) cell."""
    if spec.algo == "mcts":
        result = run_mcts(problem, build_mcts_config(
            spec, seed, time_limit, expansion_limit))
    else:
        result = run_search(problem, build_search_config(
            spec, seed, time_limit, expansion_limit))
    return RunRecord(
        instance=instance_id,
        algorithm=spec.algo_id,
        seed=seed,
        outcome=result.outcome,
        plan_len=len(result.plan) if result.plan is not None else None,
        expansions=result.expansions,
        reexp_rate=result.reexpansion_rate,
        time_s=result.time_s,
    )


def _error_record(instance_id: str, algo_id: str, seed: int) -> RunRecord:
    return RunRecord(instance_id, algo_id, seed, "error", None, 0, 0.0, 0.0)


def _cell_worker(args) -> Tuple[int, RunRecord]:
    index, problem, spec, seed, instance_id, time_limit, expansion_limit = args
    if problem is None:
        return index, _error_record(instance_id, spec.algo_id, seed)
    try:
        return index, run_one(problem, spec, seed, instance_id,
                              time_limit, expansion_limit)
    except Exception:
        return index, _error_record(instance_id, spec.algo_id, seed)


def run_suite(cfg: SuiteConfig, out_dir: Optional[str] = None,
              progress: Optional[Callable[[RunRecord], None]] = None
              ) -> List[RunRecord]:
    """Run every (instance, algorithm, seed) cell; return canonical-order records.

    With out_dir set, records stream into <out_dir>/runs.csv as they finish
    (an interrupted suite loses at most the in-flight cell); on completion the
    file is rewritten in canonical cell order and meta.txt is written next to
    it. Instances that fail to load occupy their cells with outcome "error".
    """
    if not cfg.instances or not cfg.algorithms:
        raise ValueError("suite needs at least one instance and one algorithm")
    problems: List[Tuple[str, Optional[Problem]]] = []
    for source in cfg.instances:
        try:
            problems.append((source.instance_id, source.load()))
        except Exception:
            problems.append((source.instance_id, None))

    cells = []
    index = 0
    for instance_id, problem in problems:
        for spec in cfg.algorithms:
            for seed in cfg.seeds:
                cells.append((index, problem, spec, seed, instance_id,
                              cfg.time_limit, cfg.expansion_limit))
                index += 1

    stream = None
    writer = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        stream = open(os.path.join(out_dir, "runs.csv"), "w",
                      encoding="utf-8", newline="")
        writer = csv.writer(stream)
        writer.writerow(CSV_HEADER)
        stream.flush()

    results: List[Optional[RunRecord]] = [None] * len(cells)

    def record_done(idx: int, record: RunRecord):
        results[idx] = record
        if writer is not None:
            writer.writerow(record.csv_row())
            stream.flush()
        if progress is not None:
            progress(record)

    try:
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                for idx, record in pool.map(_cell_worker, cells):
                    record_done(idx, record)
        else:
            for cell in cells:
                idx, record = _cell_worker(cell)
                record_done(idx, record)
    finally:
        if stream is not None:
            stream.close()

    records = [r for r in results if r is not None]
    if out_dir is not None:
        write_records(records, os.path.join(out_dir, "runs.csv"))
        _write_meta(cfg, records, os.path.join(out_dir, "meta.txt"))
    return records


def _write_meta(cfg: SuiteConfig, records: Sequence[RunRecord], path: str):
    digest = hashlib.sha256(cfg.canonical_text().encode("utf-8")).hexdigest()
    lines = [
        f"config_sha256={digest}",
        f"instances={len(cfg.instances)}",
        f"algorithms={' '.join(spec.algo_id for spec in cfg.algorithms)}",
        f"seeds={' '.join(str(s) for s in cfg.seeds)}",
        f"time_limit={cfg.time_limit}",
        f"expansion_limit={cfg.expansion_limit}",
        f"workers={cfg.workers}",
        f"memory_note={cfg.memory_note or ''}",
        f"records={len(records)}",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# CSV round trip

def write_records(records: Sequence[RunRecord], path: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record.csv_row())


def read_records(path: str) -> List[RunRecord]:
    records: List[RunRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(RunRecord(
                instance=row["instance"],
                algorithm=row["algorithm"],
                seed=int(row["seed"]),
                outcome=row["outcome"],
                plan_len=int(row["plan_len"]) if row["plan_len"] else None,
                expansions=int(row["expansions"]),
                reexp_rate=float(row["reexp_rate"]),
                time_s=float(row["time_s"]),
            ))
    return records


# ---------------------------------------------------------------------------
# aggregation

_GROUP_KEYS: Dict[str, Callable[[RunRecord], str]] = {
    "domain": lambda r: r.domain,
    "instance": lambda r: r.instance,
    "algorithm": lambda r: r.algorithm,
    "seed": lambda r: str(r.seed),
}


def coverage_cell(records: Sequence[RunRecord]) -> str:
    """`solved count (mean re-expansion rate over solved runs)`."""
    solved = [r for r in records if r.outcome == "solved"]
    if not solved:
        return EMPTY_CELL
    mean_rate = sum(r.reexp_rate for r in solved) / len(solved)
    return f"{len(solved)} ({mean_rate:.2f})"


def coverage_table(records: Sequence[RunRecord], row_key: str = "domain",
                   col_key: str = "algorithm"
                   ) -> Tuple[List[str], List[str], Dict[Tuple[str, str], str]]:
    """Group records and render each group with coverage_cell."""
    if not records:
        raise ValueError("no records to aggregate")
    row_of = _GROUP_KEYS[row_key]
    col_of = _GROUP_KEYS[col_key]
    groups: Dict[Tuple[str, str], List[RunRecord]] = {}
    for record in records:
        groups.setdefault((row_of(record), col_of(record)), []).append(record)
    rows = sorted({key[0] for key in groups})
    cols = sorted({key[1] for key in groups})
    cells = {
        (row, col): coverage_cell(groups.get((row, col), []))
        for row in rows for col in cols
    }
    return rows, cols, cells


def coverage_csv(records: Sequence[RunRecord], row_key: str = "domain",
                 col_key: str = "algorithm") -> str:
    rows, cols, cells = coverage_table(records, row_key, col_key)
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow([row_key] + cols)
    for row in rows:
        writer.writerow([row] + [cells[(row, col)] for col in cols])
    return out.getvalue()


def survival_data(records: Sequence[RunRecord]
                  ) -> Dict[str, List[Tuple[float, int]]]:
    """Per algorithm: (wall time, cumulative solved) step points."""
    series: Dict[str, List[Tuple[float, int]]] = {}
    for algo in sorted({r.algorithm for r in records}):
        times = sorted(r.time_s for r in records
                       if r.algorithm == algo and r.outcome == "solved")
        points: List[Tuple[float, int]] = []
        for count, t in enumerate(times, start=1):
            if points and points[-1][0] == t:
                points[-1] = (t, count)
            else:
                points.append((t, count))
        series[algo] = points
    return series


def survival_csv(records: Sequence[RunRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["algorithm", "time_s", "solved"])
    for algo, points in survival_data(records).items():
        for t, count in points:
            writer.writerow([algo, f"{t:.3f}", str(count)])
    return out.getvalue()


_METRICS: Dict[str, Callable[[RunRecord], float]] = {
    "plan_len": lambda r: float(r.plan_len if r.plan_len is not None else -1),
    "expansions": lambda r: float(r.expansions),
    "time_s": lambda r: r.time_s,
}


def pairwise_compare(records_a: Sequence[RunRecord],
                     records_b: Sequence[RunRecord], metric: str = "plan_len"
                     ) -> List[Tuple[str, int, float, float]]:
    """Rows (instance, seed, metric_a, metric_b) for cells both sides solved."""
    metric_of = _METRICS[metric]
    solved_a = {(r.instance, r.seed): r for r in records_a
                if r.outcome == "solved"}
    rows: List[Tuple[str, int, float, float]] = []
    for record in records_b:
        if record.outcome != "solved":
            continue
        other = solved_a.get((record.instance, record.seed))
        if other is None:
            continue
        rows.append((record.instance, record.seed,
                     metric_of(other), metric_of(record)))
    rows.sort()
    return rows


def compare_csv(records: Sequence[RunRecord], algo_a: str, algo_b: str,
                metric: str = "plan_len") -> str:
    rows = pairwise_compare(
        [r for r in records if r.algorithm == algo_a],
        [r for r in records if r.algorithm == algo_b], metric)
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["instance", "seed", algo_a, algo_b])
    for instance, seed, value_a, value_b in rows:
        writer.writerow([instance, str(seed), repr(value_a), repr(value_b)])
    return out.getvalue()


def best_of(records: Sequence[RunRecord], algo_ids: Sequence[str],
            new_id: Optional[str] = None) -> List[RunRecord]:
    """Merge several algorithms, keeping the best run per (instance, seed).

    Solved runs win over unsolved; among solved runs the shortest plan wins,
    with wall time then algorithm-list order breaking ties.
    """
    if not algo_ids:
        raise ValueError("best_of needs at least one algorithm id")
    merged_id = new_id or "best:" + ",".join(algo_ids)
    order = {algo: i for i, algo in enumerate(algo_ids)}
    pool: Dict[Tuple[str, int], RunRecord] = {}

    def rank(record: RunRecord):
        solved = record.outcome == "solved"
        plan = record.plan_len if record.plan_len is not None else math.inf
        return (0 if solved else 1, plan, record.time_s,
                order[record.algorithm])

    for record in records:
        if record.algorithm not in order:
            continue
        key = (record.instance, record.seed)
        if key not in pool or rank(record) < rank(pool[key]):
            pool[key] = record
    return [replace(pool[key], algorithm=merged_id)
            for key in sorted(pool.keys())]
