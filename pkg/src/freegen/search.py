"""Searching for values that satisfy a validity predicate.

Two strategies over the same simplified free generator:

* `rejection_collect` samples naively and discards invalid values; the
  classic baseline.
* `cgs_episode` / `cgs_collect` implement choice gradient sampling (CGS):
  walk the choice tree one fixed choice at a time, and at each step take the
  derivative with respect to every alphabet symbol, sample each candidate
  derivative to measure how many of its values satisfy the predicate (the
  symbol's fitness), then descend randomly weighted by fitness. Every valid
  value drawn while measuring fitness is kept, so the measurement samples
  are not wasted.

Both return a `SearchOutcome`: the set of valid values found, each with a
witness choice sequence that parses back to it under the root generator,
plus run counters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from random import Random
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .core import (
    ChoiceSeq,
    FreeGen,
    Value,
    Void,
    alphabet_of,
    is_simplified,
)
from .derivative import derivative_with_dist, gradient, nullable_set
from .interp import (
    ExternalDist,
    _draw,
    parse,
    sample_with_external_dist_traced,
)

__all__ = [
    "ValidityPredicate",
    "SearchConfig",
    "SearchStats",
    "SearchOutcome",
    "weighted_choice",
    "score_gradient",
    "cgs_episode",
    "cgs_collect",
    "rejection_collect",
    "cgs_episode_with_dist",
]

ValidityPredicate = Callable[[Value], bool]


@dataclass
class SearchConfig:
    """Knobs for a CGS run.

    sample_rate is the number of draws used to score each derivative. The
    alphabet defaults to the root generator's own labels; symbols outside it
    only ever produce Void derivatives and waste samples. restart_limit
    bounds episodes that cannot make progress (None means unbounded).
    """

    sample_rate: int
    alphabet: Optional[frozenset] = None
    seed: Any = 0
    restart_limit: Optional[int] = None

    def __post_init__(self):
        if self.sample_rate < 1:
            raise ValueError("sample_rate must be at least 1")


@dataclass
class SearchStats:
    episodes: int = 0
    restarts: int = 0
    samples_drawn: int = 0
    predicate_calls: int = 0
    predicate_hits: int = 0
    wall_time_ms: int = 0

    def add(self, other: "SearchStats") -> None:
        self.episodes += other.episodes
        self.restarts += other.restarts
        self.samples_drawn += other.samples_drawn
        self.predicate_calls += other.predicate_calls
        self.predicate_hits += other.predicate_hits


@dataclass
class SearchOutcome:
    """Valid values found, keyed by value with one witness sequence each."""

    values: Dict[Value, ChoiceSeq] = field(default_factory=dict)
    stats: SearchStats = field(default_factory=SearchStats)

    def to_json(self, canonical: Callable[[Value], str] = repr) -> dict:
        entries = sorted(
            ({"value": canonical(v), "witness": w} for v, w in self.values.items()),
            key=lambda e: e["value"],
        )
        return {
            "values": entries,
            "stats": {
                "episodes": self.stats.episodes,
                "restarts": self.stats.restarts,
                "samples_drawn": self.stats.samples_drawn,
                "predicate_calls": self.stats.predicate_calls,
                "predicate_hits": self.stats.predicate_hits,
                "wall_time_ms": self.stats.wall_time_ms,
            },
        }


def weighted_choice(rng: Random, weighted: Sequence[Tuple[int, Any]]) -> Any:
    """Pick an item with probability proportional to its non-negative weight."""
    total = 0
    for w, _ in weighted:
        if w < 0:
            raise ValueError("weights must be non-negative")
        total += w
    if total == 0:
        raise ValueError("all weights are zero")
    k = rng.randrange(total)
    for w, item in weighted:
        if k < w:
            return item
        k -= w
    raise AssertionError("unreachable")


def _require_root(root: FreeGen, op: str) -> None:
    if isinstance(root, Void):
        raise ValueError(f"{op} needs a non-Void root generator")
    if not is_simplified(root):
        raise ValueError(f"{op} needs a root generator in simplified form")


def score_gradient(
    entries: Sequence[Tuple[str, FreeGen]],
    sample_rate: int,
    predicate: ValidityPredicate,
    rng: Random,
    stats: Optional[SearchStats] = None,
) -> Tuple[List[int], List[Tuple[str, Value, ChoiceSeq]]]:
    """Sample each derivative `sample_rate` times and count valid draws.

    Returns the fitness per entry (0 for Void derivatives, which are not
    sampled) and every valid draw as (symbol, value, choice suffix within
    the derivative).
    """
    fitness: List[int] = []
    harvested: List[Tuple[str, Value, ChoiceSeq]] = []
    for symbol, deriv in entries:
        if isinstance(deriv, Void):
            fitness.append(0)
            continue
        hits = 0
        for _ in range(sample_rate):
            sink: list = []
            value = _draw(deriv, rng, sink)
            if predicate(value):
                hits += 1
                harvested.append((symbol, value, "".join(sink)))
        fitness.append(hits)
        if stats is not None:
            stats.samples_drawn += sample_rate
            stats.predicate_calls += sample_rate
            stats.predicate_hits += hits
    return fitness, harvested


def cgs_episode(
    root: FreeGen,
    cfg: SearchConfig,
    predicate: ValidityPredicate,
    rng: Optional[Random] = None,
) -> SearchOutcome:
    """One walk of the choice tree, harvesting valid values along the way.

    Starting from the root, repeat: if the current generator is nullable,
    keep its value (when valid) and stop; otherwise take the gradient over
    the alphabet, score each derivative by sampling, harvest the valid
    samples, and descend by fitness-weighted choice. When every fitness is
    zero the non-Void derivatives all get weight one so the walk can still
    make progress; if every derivative is Void the walk restarts from the
    root. Hitting restart_limit ends the episode with whatever was found.

    Each kept value carries a witness: the fixed choice prefix, extended for
    harvested samples with the sampled suffix, which parses back to the
    value under the root generator.
    """
    _require_root(root, "cgs_episode")
    if rng is None:
        rng = Random(cfg.seed)
    alphabet = cfg.alphabet if cfg.alphabet is not None else alphabet_of(root)
    stats = SearchStats(episodes=1)
    found: Dict[Value, ChoiceSeq] = {}
    g = root
    prefix: List[str] = []
    started = time.monotonic()
    while True:
        nullable = nullable_set(g)
        if nullable:
            word = "".join(prefix)
            for value in nullable:
                stats.predicate_calls += 1
                if predicate(value):
                    stats.predicate_hits += 1
                    found.setdefault(value, word)
            break
        if isinstance(g, Void):
            stats.restarts += 1
            if cfg.restart_limit is not None and stats.restarts > cfg.restart_limit:
                break
            g = root
            prefix = []
            continue
        entries = gradient(g, alphabet)
        fitness, harvested = score_gradient(
            entries, cfg.sample_rate, predicate, rng, stats
        )
        if harvested:
            word = "".join(prefix)
            for symbol, value, suffix in harvested:
                found.setdefault(value, word + symbol + suffix)
        if max(fitness) == 0:
            # Fall back to a uniform walk, but never step into a Void branch.
            fitness = [0 if isinstance(d, Void) else 1 for _, d in entries]
            if max(fitness) == 0:
                stats.restarts += 1
                if cfg.restart_limit is not None and stats.restarts > cfg.restart_limit:
                    break
                g = root
                prefix = []
                continue
        index = weighted_choice(rng, list(zip(fitness, range(len(entries)))))
        symbol, g = entries[index]
        prefix.append(symbol)
    stats.wall_time_ms = int((time.monotonic() - started) * 1000)
    return SearchOutcome(found, stats)


def cgs_collect(
    root: FreeGen,
    cfg: SearchConfig,
    predicate: ValidityPredicate,
    budget_seconds: Optional[float] = None,
    max_episodes: Optional[int] = None,
    on_progress: Optional[Callable[[float, int], None]] = None,
) -> SearchOutcome:
    """Run episodes until the budget runs out, unioning their outcomes.

    Give a wall-clock budget, an episode-count budget for deterministic
    runs, or both. Each episode gets its own RNG stream derived from
    cfg.seed, so an episode-count run is a pure function of its inputs.
    `on_progress(elapsed_seconds, unique_count)` is called after each
    episode when provided.
    """
    if budget_seconds is None and max_episodes is None:
        raise ValueError("need a wall-clock budget, an episode budget, or both")
    _require_root(root, "cgs_collect")
    merged: Dict[Value, ChoiceSeq] = {}
    totals = SearchStats()
    started = time.monotonic()
    episode = 0
    while True:
        if max_episodes is not None and episode >= max_episodes:
            break
        elapsed = time.monotonic() - started
        if budget_seconds is not None and elapsed >= budget_seconds:
            break
        ep_rng = Random(f"{cfg.seed}:{episode}")
        outcome = cgs_episode(root, cfg, predicate, ep_rng)
        for value, witness in outcome.values.items():
            merged.setdefault(value, witness)
        totals.add(outcome.stats)
        episode += 1
        if on_progress is not None:
            on_progress(time.monotonic() - started, len(merged))
    totals.wall_time_ms = int((time.monotonic() - started) * 1000)
    return SearchOutcome(merged, totals)


def rejection_collect(
    root: FreeGen,
    seed: Any,
    predicate: ValidityPredicate,
    budget_seconds: Optional[float] = None,
    max_draws: Optional[int] = None,
    on_progress: Optional[Callable[[float, int], None]] = None,
) -> SearchOutcome:
    """The baseline: sample, parse, and keep only values the predicate accepts.

    Each draw samples a choice sequence and parses it back into its value,
    so the witness of every kept value is simply the drawn sequence. One
    draw counts as one episode in the stats.
    """
    if budget_seconds is None and max_draws is None:
        raise ValueError("need a wall-clock budget, a draw budget, or both")
    _require_root(root, "rejection_collect")
    rng = Random(seed)
    found: Dict[Value, ChoiceSeq] = {}
    stats = SearchStats()
    started = time.monotonic()
    draws = 0
    while True:
        if max_draws is not None and draws >= max_draws:
            break
        elapsed = time.monotonic() - started
        if budget_seconds is not None and elapsed >= budget_seconds:
            break
        sink: list = []
        _draw(root, rng, sink)
        s = "".join(sink)
        got = parse(root, s)
        if got is None or got[1]:
            raise AssertionError("sampled sequence failed to parse; generator broken")
        value = got[0]
        draws += 1
        stats.samples_drawn += 1
        stats.predicate_calls += 1
        if predicate(value):
            stats.predicate_hits += 1
            found.setdefault(value, s)
        if on_progress is not None and draws % 100 == 0:
            on_progress(time.monotonic() - started, len(found))
    stats.episodes = draws
    stats.wall_time_ms = int((time.monotonic() - started) * 1000)
    return SearchOutcome(found, stats)


def cgs_episode_with_dist(
    root: FreeGen,
    dist: ExternalDist,
    cfg: SearchConfig,
    predicate: ValidityPredicate,
    rng: Optional[Random] = None,
) -> SearchOutcome:
    """CGS over a generator paired with an external choice distribution.

    The walk state is (distribution, generator): descending by a symbol
    fixes it in the generator and appends it to the distribution's history,
    and fitness sampling draws through the external distribution instead of
    the uniform sampler. Draws whose emission falls outside the derivative's
    language count as invalid.
    """
    _require_root(root, "cgs_episode_with_dist")
    if rng is None:
        rng = Random(cfg.seed)
    alphabet = cfg.alphabet if cfg.alphabet is not None else alphabet_of(root)
    symbols = sorted(alphabet)
    stats = SearchStats(episodes=1)
    found: Dict[Value, ChoiceSeq] = {}
    state = (dist, root)
    prefix: List[str] = []
    started = time.monotonic()
    while True:
        current_dist, g = state
        nullable = nullable_set(g)
        if nullable:
            word = "".join(prefix)
            for value in nullable:
                stats.predicate_calls += 1
                if predicate(value):
                    stats.predicate_hits += 1
                    found.setdefault(value, word)
            break
        if isinstance(g, Void):
            stats.restarts += 1
            if cfg.restart_limit is not None and stats.restarts > cfg.restart_limit:
                break
            state = (dist, root)
            prefix = []
            continue
        entries = [
            (symbol, derivative_with_dist(current_dist, g, symbol))
            for symbol in symbols
        ]
        fitness: List[int] = []
        harvested: List[Tuple[str, Value, ChoiceSeq]] = []
        for symbol, (dist_c, g_c) in entries:
            if isinstance(g_c, Void):
                fitness.append(0)
                continue
            hits = 0
            for _ in range(cfg.sample_rate):
                value, emitted = sample_with_external_dist_traced(dist_c, g_c, rng)
                stats.samples_drawn += 1
                if value is None:
                    continue
                stats.predicate_calls += 1
                if predicate(value):
                    hits += 1
                    stats.predicate_hits += 1
                    harvested.append((symbol, value, emitted))
            fitness.append(hits)
        if harvested:
            word = "".join(prefix)
            for symbol, value, emitted in harvested:
                found.setdefault(value, word + symbol + emitted)
        if max(fitness) == 0:
            fitness = [
                0 if isinstance(g_c, Void) else 1 for _, (_, g_c) in entries
            ]
            if max(fitness) == 0:
                stats.restarts += 1
                if cfg.restart_limit is not None and stats.restarts > cfg.restart_limit:
                    break
                state = (dist, root)
                prefix = []
                continue
        index = weighted_choice(rng, list(zip(fitness, range(len(entries)))))
        symbol, state = entries[index]
        prefix.append(symbol)
    stats.wall_time_ms = int((time.monotonic() - started) * 1000)
    return SearchOutcome(found, stats)
