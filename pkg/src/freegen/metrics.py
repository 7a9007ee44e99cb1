"""Experiment runner, diversity metrics, and report emission.

`run_experiment` races one algorithm (rejection or CGS) against one
benchmark under a budget, over several trials, and collects:

* the count of unique valid values (deduplicated by canonical
  serialization),
* the cumulative-unique time series,
* a histogram of value sizes,
* the mean and spread of pairwise Levenshtein distances between witness
  choice sequences, as a diversity proxy.

Budgets come in two flavors. A wall-clock budget mirrors a timed run: the
time series is sampled on a 100 ms grid of elapsed milliseconds. An episode
budget makes the whole report a deterministic function of the spec and
seed; there the series is indexed by episode ordinal (for rejection, one
episode is one draw, recorded every 100 draws). Reports never embed wall
times, so episode-budget reports are byte-stable.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from random import Random
from typing import Dict, List, Optional, Sequence, Tuple

from .benchmarks import BENCHMARKS, canonical_serialize, size_of
from .search import SearchConfig, cgs_collect, rejection_collect

__all__ = [
    "levenshtein",
    "diversity_estimate",
    "ExperimentSpec",
    "TrialReport",
    "Report",
    "run_experiment",
    "report_to_dict",
    "report_from_dict",
    "report_json",
    "emit_report",
    "load_report",
]

COUNTS_HEADER = ["elapsed_ms", "unique_count"]
SIZES_HEADER = ["size", "count"]
TIME_GRID_MS = 100


def levenshtein(a: str, b: str) -> int:
    """Minimum single-symbol insertions, deletions, and substitutions a -> b."""
    if a == b:
        return 0
    prev = list(range(len(a) + 1))
    cur = [0] * (len(a) + 1)
    for j, cb in enumerate(b, 1):
        cur[0] = j
        for i, ca in enumerate(a, 1):
            if ca == cb:
                cur[i] = prev[i - 1]
            else:
                cur[i] = min(prev[i], prev[i - 1], cur[i - 1]) + 1
        prev, cur = cur, prev
    return prev[len(a)]


def _mean_std(xs: Sequence[float]) -> Tuple[float, float]:
    # Sample standard deviation; zero when only one observation.
    n = len(xs)
    mean = sum(xs) / n
    if n == 1:
        return mean, 0.0
    var = sum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var)


def diversity_estimate(
    witnesses, pairs: int = 3000, seed=0
) -> Tuple[float, float]:
    """Mean and spread of pairwise edit distances across witness sequences.

    With at most `pairs` unordered pairs available the exact all-pairs
    statistics are computed; otherwise `pairs` distinct-element pairs are
    sampled uniformly with replacement. Needs at least two witnesses.
    """
    items = sorted(witnesses)
    n = len(items)
    if n < 2:
        raise ValueError("diversity needs at least two witnesses")
    total_pairs = n * (n - 1) // 2
    if total_pairs <= pairs:
        dists = [
            float(levenshtein(items[i], items[j]))
            for i in range(n)
            for j in range(i + 1, n)
        ]
    else:
        rng = Random(seed)
        dists = []
        for _ in range(pairs):
            i = rng.randrange(n)
            j = rng.randrange(n - 1)
            if j >= i:
                j += 1
            dists.append(float(levenshtein(items[i], items[j])))
    return _mean_std(dists)


# ---------------------------------------------------------------------------
# Experiments


@dataclass(frozen=True)
class ExperimentSpec:
    """One benchmark/algorithm run. Unset sample_rate/depth use the benchmark defaults."""

    benchmark: str
    algorithm: str
    budget_seconds: Optional[float] = None
    budget_episodes: Optional[int] = None
    sample_rate: Optional[int] = None
    depth: Optional[int] = None
    seed: int = 0
    trials: int = 1

    def resolved(self) -> "ExperimentSpec":
        if self.benchmark not in BENCHMARKS:
            raise ValueError(f"unknown benchmark {self.benchmark!r}")
        if self.algorithm not in ("rejection", "cgs"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.budget_seconds is None and self.budget_episodes is None:
            raise ValueError("spec needs budget_seconds or budget_episodes")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        bench = BENCHMARKS[self.benchmark]
        return ExperimentSpec(
            benchmark=self.benchmark,
            algorithm=self.algorithm,
            budget_seconds=self.budget_seconds,
            budget_episodes=self.budget_episodes,
            sample_rate=self.sample_rate or bench.default_sample_rate,
            depth=self.depth if self.depth is not None else bench.default_depth,
            seed=self.seed,
            trials=self.trials,
        )


@dataclass
class TrialReport:
    unique_valid_count: int
    count_over_time: List[Tuple[int, int]]
    size_histogram: Dict[int, int]
    diversity_mean: Optional[float]
    diversity_std: Optional[float]


@dataclass
class Report:
    """Results of one experiment: first-trial detail plus cross-trial aggregates."""

    benchmark: str
    algorithm: str
    budget_mode: str
    budget: float
    sample_rate: int
    depth: int
    seed: int
    trials: List[TrialReport] = field(default_factory=list)
    discarded_trials: int = 0
    # First-trial detail (what a single timed run looks like).
    unique_valid_count: int = 0
    count_over_time: List[Tuple[int, int]] = field(default_factory=list)
    size_histogram: Dict[int, int] = field(default_factory=dict)
    diversity_mean: Optional[float] = None
    diversity_std: Optional[float] = None
    # Aggregates across trials.
    unique_valid_mean: float = 0.0
    unique_valid_std: float = 0.0
    diversity_mean_avg: Optional[float] = None
    diversity_mean_std: Optional[float] = None


class _SeriesRecorder:
    """Builds the monotone cumulative-unique series for one trial."""

    def __init__(self, wall_mode: bool):
        self.wall_mode = wall_mode
        self.points: List[Tuple[int, int]] = []
        self._episode = 0

    def observe(self, elapsed_seconds: float, unique_count: int) -> None:
        if self.wall_mode:
            tick = int(elapsed_seconds * 1000) // TIME_GRID_MS * TIME_GRID_MS
        else:
            tick = self._episode
            self._episode += 1
        if self.points and self.points[-1][0] == tick:
            self.points[-1] = (tick, unique_count)
        elif not self.points or tick > self.points[-1][0]:
            self.points.append((tick, unique_count))

    def finish(self, unique_count: int) -> List[Tuple[int, int]]:
        if not self.points:
            self.points.append((0, unique_count))
        elif self.points[-1][1] != unique_count:
            step = TIME_GRID_MS if self.wall_mode else 1
            self.points.append((self.points[-1][0] + step, unique_count))
        return self.points


def _run_trial(spec: ExperimentSpec, trial: int) -> TrialReport:
    bench = BENCHMARKS[spec.benchmark]
    root = bench.build(spec.depth)
    trial_seed = f"{spec.seed}/trial{trial}"
    wall_mode = spec.budget_episodes is None
    recorder = _SeriesRecorder(wall_mode)
    if spec.algorithm == "cgs":
        cfg = SearchConfig(sample_rate=spec.sample_rate, seed=trial_seed)
        outcome = cgs_collect(
            root,
            cfg,
            bench.is_valid,
            budget_seconds=spec.budget_seconds,
            max_episodes=spec.budget_episodes,
            on_progress=recorder.observe,
        )
    else:
        outcome = rejection_collect(
            root,
            trial_seed,
            bench.is_valid,
            budget_seconds=spec.budget_seconds,
            max_draws=None if spec.budget_episodes is None else spec.budget_episodes,
            on_progress=recorder.observe,
        )
    canon = {canonical_serialize(v, spec.depth): w for v, w in outcome.values.items()}
    unique = len(canon)
    series = recorder.finish(unique)
    histogram: Dict[int, int] = {}
    for v in outcome.values:
        s = size_of(v)
        histogram[s] = histogram.get(s, 0) + 1
    if unique >= 2:
        dmean, dstd = diversity_estimate(
            canon.values(), seed=f"{trial_seed}/diversity"
        )
    else:
        dmean = dstd = None
    return TrialReport(unique, series, histogram, dmean, dstd)


def run_experiment(spec: ExperimentSpec) -> Report:
    """Run all trials of `spec` with derived per-trial seeds and aggregate.

    Trials that raise are discarded with a counter rather than failing the
    whole experiment, as long as at least one trial survives.
    """
    spec = spec.resolved()
    trials: List[TrialReport] = []
    discarded = 0
    for t in range(spec.trials):
        try:
            trials.append(_run_trial(spec, t))
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception:
            discarded += 1
    if not trials:
        raise RuntimeError(f"all {spec.trials} trials failed for {spec}")
    counts = [float(tr.unique_valid_count) for tr in trials]
    umean, ustd = _mean_std(counts)
    dmeans = [tr.diversity_mean for tr in trials if tr.diversity_mean is not None]
    if dmeans:
        dm_avg, dm_std = _mean_std(dmeans)
    else:
        dm_avg = dm_std = None
    first = trials[0]
    wall_mode = spec.budget_episodes is None
    return Report(
        benchmark=spec.benchmark,
        algorithm=spec.algorithm,
        budget_mode="seconds" if wall_mode else "episodes",
        budget=spec.budget_seconds if wall_mode else spec.budget_episodes,
        sample_rate=spec.sample_rate,
        depth=spec.depth,
        seed=spec.seed,
        trials=trials,
        discarded_trials=discarded,
        unique_valid_count=first.unique_valid_count,
        count_over_time=list(first.count_over_time),
        size_histogram=dict(first.size_histogram),
        diversity_mean=first.diversity_mean,
        diversity_std=first.diversity_std,
        unique_valid_mean=umean,
        unique_valid_std=ustd,
        diversity_mean_avg=dm_avg,
        diversity_mean_std=dm_std,
    )


# ---------------------------------------------------------------------------
# Emission


def _trial_to_dict(tr: TrialReport) -> dict:
    return {
        "unique_valid_count": tr.unique_valid_count,
        "count_over_time": [list(p) for p in tr.count_over_time],
        "size_histogram": {str(k): v for k, v in sorted(tr.size_histogram.items())},
        "diversity_mean": tr.diversity_mean,
        "diversity_std": tr.diversity_std,
    }


def _trial_from_dict(doc: dict) -> TrialReport:
    return TrialReport(
        unique_valid_count=doc["unique_valid_count"],
        count_over_time=[tuple(p) for p in doc["count_over_time"]],
        size_histogram={int(k): v for k, v in doc["size_histogram"].items()},
        diversity_mean=doc["diversity_mean"],
        diversity_std=doc["diversity_std"],
    )


def report_to_dict(report: Report) -> dict:
    doc = _trial_to_dict(
        TrialReport(
            report.unique_valid_count,
            report.count_over_time,
            report.size_histogram,
            report.diversity_mean,
            report.diversity_std,
        )
    )
    doc.update(
        {
            "benchmark": report.benchmark,
            "algorithm": report.algorithm,
            "budget_mode": report.budget_mode,
            "budget": report.budget,
            "sample_rate": report.sample_rate,
            "depth": report.depth,
            "seed": report.seed,
            "discarded_trials": report.discarded_trials,
            "trials": [_trial_to_dict(tr) for tr in report.trials],
            "aggregate": {
                "unique_valid_mean": report.unique_valid_mean,
                "unique_valid_std": report.unique_valid_std,
                "diversity_mean_avg": report.diversity_mean_avg,
                "diversity_mean_std": report.diversity_mean_std,
            },
        }
    )
    return doc


def report_from_dict(doc: dict) -> Report:
    first = _trial_from_dict(doc)
    agg = doc["aggregate"]
    return Report(
        benchmark=doc["benchmark"],
        algorithm=doc["algorithm"],
        budget_mode=doc["budget_mode"],
        budget=doc["budget"],
        sample_rate=doc["sample_rate"],
        depth=doc["depth"],
        seed=doc["seed"],
        trials=[_trial_from_dict(tr) for tr in doc["trials"]],
        discarded_trials=doc["discarded_trials"],
        unique_valid_count=first.unique_valid_count,
        count_over_time=first.count_over_time,
        size_histogram=first.size_histogram,
        diversity_mean=first.diversity_mean,
        diversity_std=first.diversity_std,
        unique_valid_mean=agg["unique_valid_mean"],
        unique_valid_std=agg["unique_valid_std"],
        diversity_mean_avg=agg["diversity_mean_avg"],
        diversity_mean_std=agg["diversity_mean_std"],
    )


def report_json(report: Report) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def emit_report(report: Report, format: str, path: str) -> None:
    """Write a report to disk.

    JSON writes one document at `path`. CSV treats `path` as a stem and
    writes `<stem>_counts.csv` (first-trial series, header
    elapsed_ms,unique_count), `<stem>_sizes.csv` (first-trial histogram,
    header size,count), and `<stem>_summary.csv` (one wide row of spec and
    aggregate fields). Output is byte-stable for a fixed report.
    """
    try:
        if format == "json":
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(report_json(report))
        elif format == "csv":
            stem = path[:-4] if path.endswith(".csv") else path
            with open(f"{stem}_counts.csv", "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(COUNTS_HEADER)
                writer.writerows(report.count_over_time)
            with open(f"{stem}_sizes.csv", "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(SIZES_HEADER)
                writer.writerows(sorted(report.size_histogram.items()))
            with open(f"{stem}_summary.csv", "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                fields = [
                    ("benchmark", report.benchmark),
                    ("algorithm", report.algorithm),
                    ("budget_mode", report.budget_mode),
                    ("budget", report.budget),
                    ("sample_rate", report.sample_rate),
                    ("depth", report.depth),
                    ("seed", report.seed),
                    ("trials", len(report.trials)),
                    ("discarded_trials", report.discarded_trials),
                    ("unique_valid_mean", report.unique_valid_mean),
                    ("unique_valid_std", report.unique_valid_std),
                    ("diversity_mean_avg", report.diversity_mean_avg),
                    ("diversity_mean_std", report.diversity_mean_std),
                ]
                writer.writerow([name for name, _ in fields])
                writer.writerow([value for _, value in fields])
        else:
            raise ValueError(f"unknown report format {format!r}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path!r}: {exc}") from exc


def load_report(path: str) -> Report:
    with open(path, "r", encoding="utf-8") as fh:
        return report_from_dict(json.load(fh))
