"""Interpretations of a free generator: sampler, parser, and exact distributions.

A simplified free generator can be run four ways:

* `value_sampler(g)` draws random values (uniform branch choice at Select),
* `parse(g, s)` deterministically consumes a choice sequence into a value,
* `choice_sampler(g)` draws random choice sequences from the generator's
  language,
* `exact_choice_pmf(g)` / `exact_value_pmf(g)` compute the full distributions
  as finite maps to exact rationals, which serve as desk-scale oracles for
  the sampling interpretations.

The central fact tying these together: pushing the exact choice distribution
through the parser reproduces the exact value distribution. `pushforward`
is provided so tests can check that factoring directly.

`ExternalDist` swaps the built-in uniform choices for a caller-supplied,
history-conditioned choice process while keeping the parser side unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Any, Callable, Dict, Optional, Tuple

from .core import (
    DEFAULT_LANGUAGE_BOUND,
    ChoiceSeq,
    FreeGen,
    LanguageSizeError,
    Map,
    Pair,
    Pure,
    Select,
    Value,
    Void,
    VoidGeneratorError,
    is_simplified,
)

__all__ = [
    "ParseResult",
    "ExternalDist",
    "parse",
    "value_sampler",
    "choice_sampler",
    "traced_sampler",
    "exact_choice_pmf",
    "exact_value_pmf",
    "pushforward",
    "pmf_to_json",
    "external_dist_sampler",
    "sample_with_external_dist",
    "sample_with_external_dist_traced",
]

# A parse either fails (None) or succeeds with the value and the unconsumed
# suffix of the input.
ParseResult = Optional[Tuple[Value, ChoiceSeq]]


def _require_usable(g: FreeGen, op: str) -> None:
    if isinstance(g, Void):
        raise VoidGeneratorError(f"{op} is undefined for Void")
    if not is_simplified(g):
        raise ValueError(f"{op} requires a generator in simplified form")


# ---------------------------------------------------------------------------
# Parsing


def _parse_at(g, s: str, i: int):
    # Index-based so no intermediate strings are built; returns (value, next
    # index) or None. Select is a tail call, so it loops rather than
    # recursing; the other shapes need the stack frame.
    while True:
        t = type(g)
        if t is Select:
            if i >= len(s):
                return None
            g = g._lookup.get(s[i])
            if g is None:
                return None
            i += 1
            continue
        if t is Map:
            got = _parse_at(g.inner, s, i)
            if got is None:
                return None
            return g.fn(got[0]), got[1]
        if t is Pure:
            return g.value, i
        if t is Pair:
            first = _parse_at(g.left, s, i)
            if first is None:
                return None
            second = _parse_at(g.right, s, first[1])
            if second is None:
                return None
            return (first[0], second[0]), second[1]
        return None  # Void


def parse(g: FreeGen, s: ChoiceSeq) -> ParseResult:
    """Run `g` as a parser of the choice sequence `s`.

    Pure consumes nothing, Select consumes exactly one label and fails on
    empty input or an unknown label, Pair sequences left then right. Failure
    is the value None, never an exception.
    """
    got = _parse_at(g, s, 0)
    if got is None:
        return None
    value, end = got
    return value, s[end:]


# ---------------------------------------------------------------------------
# Sampling


def _draw(g, rng: Random, sink: list):
    while True:
        t = type(g)
        if t is Select:
            branches = g.branches
            label, g = branches[rng.randrange(len(branches))]
            sink.append(label)
            continue
        if t is Map:
            return g.fn(_draw(g.inner, rng, sink))
        if t is Pure:
            return g.value
        if t is Pair:
            a = _draw(g.left, rng, sink)
            b = _draw(g.right, rng, sink)
            return a, b
        raise VoidGeneratorError("cannot sample from Void")


def value_sampler(g: FreeGen) -> Callable[[Random], Value]:
    """A draw function for random values of `g`; deterministic given the rng state."""
    _require_usable(g, "value_sampler")

    def draw(rng: Random) -> Value:
        return _draw(g, rng, [])

    return draw


def choice_sampler(g: FreeGen) -> Callable[[Random], ChoiceSeq]:
    """A draw function for random choice sequences; every draw lies in lang(g)."""
    _require_usable(g, "choice_sampler")

    def draw(rng: Random) -> ChoiceSeq:
        sink: list = []
        _draw(g, rng, sink)
        return "".join(sink)

    return draw


def traced_sampler(g: FreeGen) -> Callable[[Random], Tuple[Value, ChoiceSeq]]:
    """Draw a value together with the choice sequence that produced it.

    The pair is consistent by construction: parsing the sequence with `g`
    yields the value with nothing left over.
    """
    _require_usable(g, "traced_sampler")

    def draw(rng: Random) -> Tuple[Value, ChoiceSeq]:
        sink: list = []
        value = _draw(g, rng, sink)
        return value, "".join(sink)

    return draw


# ---------------------------------------------------------------------------
# Exact distributions
#
# Internally both PMFs are computed with integer weights over a common
# denominator (probabilities here are always ratios of products of branch
# counts), then converted to Fractions once at the end. This keeps the heavy
# recursions in fast integer arithmetic and makes the results exact.


def _scaled_select(parts, bound, prefix_keys):
    # parts: list of (label, weights: dict, total: int). Returns merged
    # weights over the common denominator len(parts) * lcm(totals). When
    # prefix_keys is true the keys are choice sequences and get the branch
    # label prepended.
    k = len(parts)
    common = math.lcm(*(total for _, _, total in parts))
    acc: dict = {}
    for label, weights, total in parts:
        scale = common // total
        if len(acc) + len(weights) > bound:
            raise LanguageSizeError(f"distribution exceeds {bound} outcomes")
        if prefix_keys:
            for key, w in weights.items():
                acc[label + key] = w * scale
        else:
            for key, w in weights.items():
                prev = acc.get(key)
                acc[key] = w * scale if prev is None else prev + w * scale
    return acc, k * common


def _choice_weights(g, bound):
    memo: dict[int, tuple] = {}

    def go(node):
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Pure):
            out = ({"": 1}, 1)
        elif isinstance(node, Map):
            out = go(node.inner)
        elif isinstance(node, Pair):
            (lw, lt) = go(node.left)
            (rw, rt) = go(node.right)
            if len(lw) * len(rw) > bound:
                raise LanguageSizeError(f"distribution exceeds {bound} outcomes")
            acc = {}
            for s, a in lw.items():
                for t, b in rw.items():
                    key = s + t
                    if key in acc:
                        raise LanguageSizeError(
                            "ambiguous choice sequences; generator is not simplified"
                        )
                    acc[key] = a * b
            out = (acc, lt * rt)
        elif isinstance(node, Select):
            parts = []
            for label, sub in node.branches:
                w, t = go(sub)
                parts.append((label, w, t))
            out = _scaled_select(parts, bound, prefix_keys=True)
        else:
            raise VoidGeneratorError("cannot take the distribution of Void")
        memo[id(node)] = out
        return out

    return go(g)


def _value_weights(g, bound):
    memo: dict[int, tuple] = {}

    def go(node):
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Pure):
            out = ({node.value: 1}, 1)
        elif isinstance(node, Map):
            inner, total = go(node.inner)
            fn = node.fn
            acc: dict = {}
            for v, w in inner.items():
                key = fn(v)
                prev = acc.get(key)
                acc[key] = w if prev is None else prev + w
            out = (acc, total)
        elif isinstance(node, Pair):
            (lw, lt) = go(node.left)
            (rw, rt) = go(node.right)
            if len(lw) * len(rw) > bound:
                raise LanguageSizeError(f"distribution exceeds {bound} outcomes")
            acc = {}
            for a, wa in lw.items():
                for b, wb in rw.items():
                    key = (a, b)
                    prev = acc.get(key)
                    acc[key] = wa * wb if prev is None else prev + wa * wb
            out = (acc, lt * rt)
        elif isinstance(node, Select):
            parts = []
            for _, sub in node.branches:
                w, t = go(sub)
                parts.append(("", w, t))
            out = _scaled_select(parts, bound, prefix_keys=False)
        else:
            raise VoidGeneratorError("cannot take the distribution of Void")
        memo[id(node)] = out
        return out

    return go(g)


def _to_fractions(weights: dict, total: int) -> dict:
    cache: dict[int, Fraction] = {}
    out = {}
    for key, w in weights.items():
        frac = cache.get(w)
        if frac is None:
            frac = Fraction(w, total)
            cache[w] = frac
        out[key] = frac
    return out


def exact_choice_pmf(
    g: FreeGen, max_outcomes: int = DEFAULT_LANGUAGE_BOUND
) -> Dict[ChoiceSeq, Fraction]:
    """The exact distribution over choice sequences, as a map to rationals.

    The support equals lang(g) and the probabilities sum to exactly 1.
    Raises LanguageSizeError beyond `max_outcomes` outcomes.
    """
    _require_usable(g, "exact_choice_pmf")
    weights, total = _choice_weights(g, max_outcomes)
    return _to_fractions(weights, total)


def exact_value_pmf(
    g: FreeGen, max_outcomes: int = DEFAULT_LANGUAGE_BOUND
) -> Dict[Value, Fraction]:
    """The exact distribution over produced values, as a map to rationals.

    Computed by direct recursion on the tree; equal to the pushforward of
    `exact_choice_pmf(g)` through `parse(g, .)`.
    """
    _require_usable(g, "exact_value_pmf")
    weights, total = _value_weights(g, max_outcomes)
    return _to_fractions(weights, total)


def pushforward(pmf: Dict[Any, Fraction], fn: Callable[[Any], Any]) -> Dict[Any, Fraction]:
    """Transport a PMF through a function, merging colliding outcomes."""
    out: dict = {}
    for key, p in pmf.items():
        new_key = fn(key)
        prev = out.get(new_key)
        out[new_key] = p if prev is None else prev + p
    return out


def pmf_to_json(pmf: Dict[Any, Fraction]) -> list:
    """Serialize a PMF as a sorted list of {outcome, num, den} records.

    Choice sequences serialize as themselves; other outcomes by repr.
    """
    records = []
    for outcome, p in pmf.items():
        text = outcome if isinstance(outcome, str) else repr(outcome)
        records.append({"outcome": text, "num": p.numerator, "den": p.denominator})
    records.sort(key=lambda r: r["outcome"])
    return records


# ---------------------------------------------------------------------------
# External distributions


@dataclass(frozen=True)
class ExternalDist:
    """A history-conditioned choice process to run a generator under.

    `next_choice(history, rng)` returns the next choice label, or None to
    stop emitting. It must be total over all histories. The history only
    conditions the choice process; the parser side of the generator sees
    just the labels emitted after the generator's current state.
    """

    history: ChoiceSeq
    next_choice: Callable[[ChoiceSeq, Random], Optional[str]]


def sample_with_external_dist_traced(
    dist: ExternalDist, g: FreeGen, rng: Random
) -> Tuple[Optional[Value], ChoiceSeq]:
    """Like `sample_with_external_dist` but also returns the emitted labels."""
    history = dist.history
    emitted: list = []
    while True:
        c = dist.next_choice(history, rng)
        if c is None:
            break
        emitted.append(c)
        history += c
    s = "".join(emitted)
    got = parse(g, s)
    if got is None or got[1]:
        return None, s
    return got[0], s


def sample_with_external_dist(dist: ExternalDist, g: FreeGen, rng: Random) -> Optional[Value]:
    """Draw one value by running `dist` until it stops and parsing the emission.

    Returns None when the emitted sequence is not exactly a member of the
    generator's language.
    """
    value, _ = sample_with_external_dist_traced(dist, g, rng)
    return value


def external_dist_sampler(
    dist: ExternalDist, g: FreeGen
) -> Callable[[Random], Optional[Value]]:
    """A draw function over (value or None) for `g` under `dist`."""
    _require_usable(g, "external_dist_sampler")

    def draw(rng: Random) -> Optional[Value]:
        return sample_with_external_dist(dist, g, rng)

    return draw
