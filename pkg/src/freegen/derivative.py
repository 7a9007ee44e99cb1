"""Brzozowski-style derivatives of free generators.

The derivative of a generator with respect to a choice label is the
generator that remains after that choice has been made: its language is
exactly the set of tails of sequences that started with the label, and its
parser behaves like the original parser after consuming the label. Because
the derivative is built from smart constructors and pieces of the original
tree, it is simplified whenever the input is.

Nullability is the dual question: which value can be produced with no
further choices. For simplified generators only `Pure` is nullable, and it
reveals the value itself rather than a bare yes/no.
"""

from __future__ import annotations

from typing import FrozenSet, Iterable, List, Tuple

from .core import (
    Choice,
    FreeGen,
    Map,
    Pair,
    Pure,
    Select,
    Value,
    Void,
    fmap,
    pair,
)
from .interp import ExternalDist

__all__ = [
    "derivative",
    "nullable_set",
    "gradient",
    "derivative_with_dist",
]


def derivative(c: Choice, g: FreeGen) -> FreeGen:
    """The generator remaining after fixing the choice `c`.

    Pure and Void have no choices to fix, so their derivative is Void. The
    derivative passes through Map, applies to the left of a Pair, and picks
    the matching branch of a Select (Void when no branch is labelled `c`).
    """
    if isinstance(g, (Void, Pure)):
        return Void()
    if isinstance(g, Map):
        return fmap(g.fn, derivative(c, g.inner))
    if isinstance(g, Pair):
        return pair(derivative(c, g.left), g.right)
    sub = g._lookup.get(c)
    return Void() if sub is None else sub


def nullable_set(g: FreeGen) -> FrozenSet[Value]:
    """The value reachable with no further choices: {v} for Pure v, else empty."""
    if isinstance(g, Pure):
        return frozenset((g.value,))
    return frozenset()


def gradient(g: FreeGen, alphabet: Iterable[Choice]) -> List[Tuple[Choice, FreeGen]]:
    """One derivative per alphabet symbol, sorted by symbol for reproducibility."""
    return [(c, derivative(c, g)) for c in sorted(alphabet)]


def derivative_with_dist(
    dist: ExternalDist, g: FreeGen, c: Choice
) -> Tuple[ExternalDist, FreeGen]:
    """Derivative of a generator paired with an external distribution.

    The choice is fixed in the generator and recorded in the distribution's
    history, so later conditioning sees it. Nullability of the pair is that
    of the underlying generator.
    """
    return ExternalDist(dist.history + c, dist.next_choice), derivative(c, g)
