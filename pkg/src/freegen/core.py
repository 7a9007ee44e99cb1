"""Free generators: choice trees that can be run as random generators or parsers.

A free generator is an explicit tree of choice points. The same tree supports
several interpretations (see `freegen.interp`):

* a random generator of values, picking uniformly at each `Select` node,
* a deterministic parser that consumes a string of choice labels,
* a random generator of choice sequences,
* a formal language: the set of all choice sequences the tree can make.

This module defines the tree itself plus the smart constructors that keep
trees in *simplified form*:

* `Pair` never has a `Pure` or `Void` child (they collapse into `Map`/`Void`),
* `Map` never wraps a `Pure` or `Void` (the function is applied or discarded),
* every `Select` is non-empty, has pairwise-distinct single-character labels,
  and no `Void` branch.

Simplified form is what makes the rest of the library work: a simplified
generator contains `Void` only if it *is* `Void`, and it can produce the
empty choice sequence only if it *is* a `Pure`. Everything downstream
(sampling, parsing, derivatives, search) assumes inputs built with the
constructors below.

Trees are immutable and freely shareable; all functions here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, FrozenSet, Iterable, Tuple, Union

__all__ = [
    "Choice",
    "ChoiceSeq",
    "Value",
    "FreeGen",
    "Language",
    "Void",
    "Pure",
    "Pair",
    "Map",
    "Select",
    "SelectError",
    "LanguageSizeError",
    "VoidGeneratorError",
    "DEFAULT_LANGUAGE_BOUND",
    "void",
    "pure",
    "pair",
    "fmap",
    "ap",
    "select",
    "lift",
    "lang",
    "is_simplified",
    "alphabet_of",
    "contains_void",
    "render",
]

# A choice is one printable character; a choice sequence is a plain string
# of them (the empty string is the empty sequence).
Choice = str
ChoiceSeq = str

# The value domain is deliberately open: anything hashable with structural
# equality works as a generator output (ints, bools, tuples, and the frozen
# dataclasses in `freegen.benchmarks`).
Value = Any

Language = FrozenSet[ChoiceSeq]

DEFAULT_LANGUAGE_BOUND = 10**6


class SelectError(ValueError):
    """Raised when a choice node cannot be built (no branches, or duplicate labels)."""


class LanguageSizeError(RuntimeError):
    """Raised when a language or exact distribution exceeds its cardinality bound."""


class VoidGeneratorError(ValueError):
    """Raised when an operation that needs a productive generator receives Void."""


# ---------------------------------------------------------------------------
# The tree


@dataclass(frozen=True, slots=True)
class Void:
    """The generator of nothing; an always-failing parser."""


@dataclass(frozen=True, slots=True)
class Pure:
    """A single value, produced without making any choice."""

    value: Value


@dataclass(frozen=True, slots=True)
class Pair:
    """Run `left` then `right`, producing the tuple of both results."""

    left: "FreeGen"
    right: "FreeGen"


@dataclass(frozen=True, slots=True)
class Map:
    """Apply an opaque total function to whatever `inner` produces.

    Functions compare by identity, so generator equality is structural up to
    shared function objects.
    """

    fn: Callable[[Value], Value]
    inner: "FreeGen"


@dataclass(frozen=True, slots=True)
class Select:
    """A labelled choice point: one branch per distinct single-character label."""

    branches: Tuple[Tuple[Choice, "FreeGen"], ...]
    # Label lookup built once at construction; excluded from equality.
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_lookup", dict(self.branches))


FreeGen = Union[Void, Pure, Pair, Map, Select]


# ---------------------------------------------------------------------------
# Smart constructors


def void() -> FreeGen:
    return Void()


def pure(value: Value) -> FreeGen:
    return Pure(value)


def pair(x: FreeGen, y: FreeGen) -> FreeGen:
    """Sequence two generators into a tuple, collapsing Void and Pure.

    Void absorbs before Pure promotes, so `pair(Void(), pure(a))` is Void
    and `pair(pure(a), pure(b))` is `pure((a, b))`.
    """
    if isinstance(x, Void) or isinstance(y, Void):
        return Void()
    if isinstance(x, Pure):
        a = x.value
        return fmap(lambda b: (a, b), y)
    if isinstance(y, Pure):
        b = y.value
        return fmap(lambda a: (a, b), x)
    return Pair(x, y)


def fmap(fn: Callable[[Value], Value], x: FreeGen) -> FreeGen:
    """Post-apply `fn`, collapsing Void (discarded) and Pure (applied now)."""
    if isinstance(x, Void):
        return Void()
    if isinstance(x, Pure):
        return Pure(fn(x.value))
    return Map(fn, x)


def ap(f: FreeGen, x: FreeGen) -> FreeGen:
    """Applicative application: pair up `f` and `x`, then apply."""
    return fmap(lambda fx: fx[0](fx[1]), pair(f, x))


def select(branches: Iterable[Tuple[Choice, FreeGen]]) -> FreeGen:
    """Build a choice node, dropping Void branches.

    Raises SelectError if no branch survives or if surviving labels repeat.
    Labels must be single characters.
    """
    kept = []
    for label, sub in branches:
        if not isinstance(label, str) or len(label) != 1:
            raise SelectError(f"choice label must be a single character, got {label!r}")
        if not isinstance(sub, Void):
            kept.append((label, sub))
    if not kept:
        raise SelectError("select needs at least one non-Void branch")
    labels = [label for label, _ in kept]
    if len(set(labels)) != len(labels):
        raise SelectError(f"duplicate choice labels: {labels!r}")
    return Select(tuple(kept))


def lift(fn: Callable[..., Value], *gens: FreeGen) -> FreeGen:
    """Apply an n-ary function across generators, applicative style.

    Arguments are sequenced with right-nested pairs and unpacked by a single
    Map, so `lift(f, g1, g2, g3)` has the shape
    `Map(.., Pair(g1, Pair(g2, g3)))` when nothing collapses.
    """
    if not gens:
        raise TypeError("lift needs at least one generator argument")
    if len(gens) == 1:
        return fmap(fn, gens[0])
    nested = gens[-1]
    for g in reversed(gens[:-1]):
        nested = pair(g, nested)
    n = len(gens)

    def unpack(value):
        args = []
        for _ in range(n - 1):
            head, value = value
            args.append(head)
        args.append(value)
        return fn(*args)

    return fmap(unpack, nested)


# ---------------------------------------------------------------------------
# Structure queries


def lang(g: FreeGen, max_sequences: int = DEFAULT_LANGUAGE_BOUND) -> Language:
    """The set of choice sequences `g` can make (equivalently, can parse).

    Defined by recursion on the tree: Void has the empty language, Pure only
    the empty sequence, Map is transparent, Pair concatenates pointwise, and
    Select prefixes each branch language with the branch label. Languages
    grow exponentially with depth, so the size is capped; exceeding
    `max_sequences` raises LanguageSizeError.
    """
    memo: dict[int, frozenset] = {}

    def go(node) -> frozenset:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Void):
            out: frozenset = frozenset()
        elif isinstance(node, Pure):
            out = frozenset(("",))
        elif isinstance(node, Map):
            out = go(node.inner)
        elif isinstance(node, Pair):
            left, right = go(node.left), go(node.right)
            if len(left) * len(right) > max_sequences:
                raise LanguageSizeError(
                    f"language exceeds {max_sequences} sequences at a pair node"
                )
            out = frozenset(s + t for s in left for t in right)
        else:
            acc: set = set()
            for label, sub in node.branches:
                tails = go(sub)
                if len(acc) + len(tails) > max_sequences:
                    raise LanguageSizeError(
                        f"language exceeds {max_sequences} sequences at a select node"
                    )
                acc.update(label + s for s in tails)
            out = frozenset(acc)
        memo[id(node)] = out
        return out

    return go(g)


def is_simplified(g: FreeGen) -> bool:
    """Decide whether `g` satisfies every simplified-form invariant.

    True exactly for trees that could have been built by the smart
    constructors above.
    """
    memo: dict[int, bool] = {}

    def go(node) -> bool:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, (Void, Pure)):
            out = True
        elif isinstance(node, Pair):
            out = (
                not isinstance(node.left, (Pure, Void))
                and not isinstance(node.right, (Pure, Void))
                and go(node.left)
                and go(node.right)
            )
        elif isinstance(node, Map):
            out = not isinstance(node.inner, (Pure, Void)) and go(node.inner)
        else:
            labels = [label for label, _ in node.branches]
            out = (
                len(labels) >= 1
                and len(set(labels)) == len(labels)
                and all(not isinstance(sub, Void) for _, sub in node.branches)
                and all(go(sub) for _, sub in node.branches)
            )
        memo[id(node)] = out
        return out

    return go(g)


def alphabet_of(g: FreeGen) -> FrozenSet[Choice]:
    """All choice labels appearing in any Select node of `g`."""
    memo: dict[int, frozenset] = {}

    def go(node) -> frozenset:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, (Void, Pure)):
            out: frozenset = frozenset()
        elif isinstance(node, Map):
            out = go(node.inner)
        elif isinstance(node, Pair):
            out = go(node.left) | go(node.right)
        else:
            out = frozenset(label for label, _ in node.branches)
            for _, sub in node.branches:
                out |= go(sub)
        memo[id(node)] = out
        return out

    return go(g)


def contains_void(g: FreeGen) -> bool:
    """Whether any node of `g` is Void (for a simplified tree, iff g is Void)."""
    memo: dict[int, bool] = {}

    def go(node) -> bool:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Void):
            out = True
        elif isinstance(node, Pure):
            out = False
        elif isinstance(node, Map):
            out = go(node.inner)
        elif isinstance(node, Pair):
            out = go(node.left) or go(node.right)
        else:
            out = any(go(sub) for _, sub in node.branches)
        memo[id(node)] = out
        return out

    return go(g)


def render(g: FreeGen) -> str:
    """Debug rendering, s-expression style. Not a stable wire format."""
    if isinstance(g, Void):
        return "(void)"
    if isinstance(g, Pure):
        return f"(pure {g.value!r})"
    if isinstance(g, Map):
        return f"(map <fn> {render(g.inner)})"
    if isinstance(g, Pair):
        return f"(pair {render(g.left)} {render(g.right)})"
    parts = " ".join(f"({label} {render(sub)})" for label, sub in g.branches)
    return f"(select {parts})"
