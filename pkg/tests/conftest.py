"""Shared helpers: random generator composition and small value pools."""

from __future__ import annotations

from random import Random

import pytest
from hypothesis import strategies as st

from freegen.core import Map, Pair, Pure, Select, SelectError, Void, ap, fmap, pair, pure, select, void


def tag(v):
    return ("t", v)


def swap_pairs(v):
    return (v[1], v[0]) if isinstance(v, tuple) and len(v) == 2 else v


def const_zero(_):
    return 0


FN_POOL = (tag, swap_pairs, const_zero)
VALUE_POOL = (0, 1, 7, True, False, "x", None)
LABEL_POOL = "abcdefgh"


def compose_random_gen(rng: Random, depth: int):
    """A random tree of smart-constructor calls (Void and Pure included)."""
    roll = rng.random()
    if depth <= 0 or roll < 0.30:
        if rng.random() < 0.15:
            return void()
        return pure(rng.choice(VALUE_POOL))
    if roll < 0.50:
        return pair(
            compose_random_gen(rng, depth - 1), compose_random_gen(rng, depth - 1)
        )
    if roll < 0.65:
        return fmap(rng.choice(FN_POOL), compose_random_gen(rng, depth - 1))
    if roll < 0.72:
        fn_gen = pure(rng.choice(FN_POOL))
        return ap(fn_gen, compose_random_gen(rng, depth - 1))
    labels = rng.sample(LABEL_POOL, rng.randint(1, 3))
    branches = [(c, compose_random_gen(rng, depth - 1)) for c in labels]
    try:
        return select(branches)
    except SelectError:
        # Every branch was Void; fall back to a trivial leaf.
        return pure(rng.choice(VALUE_POOL))


def eps_in_lang(g) -> bool:
    """Membership of the empty sequence, straight off the language recursion."""
    if isinstance(g, Void):
        return False
    if isinstance(g, Pure):
        return True
    if isinstance(g, Map):
        return eps_in_lang(g.inner)
    if isinstance(g, Pair):
        return eps_in_lang(g.left) and eps_in_lang(g.right)
    return False


def raw_contains_void(g) -> bool:
    """Void-node scan over the raw tree, independent of freegen.core helpers."""
    if isinstance(g, Void):
        return True
    if isinstance(g, Pure):
        return False
    if isinstance(g, Map):
        return raw_contains_void(g.inner)
    if isinstance(g, Pair):
        return raw_contains_void(g.left) or raw_contains_void(g.right)
    return any(raw_contains_void(sub) for _, sub in g.branches)


@st.composite
def free_gens(draw, max_depth=4):
    """Hypothesis strategy over smart-constructor trees, via a drawn seed."""
    seed = draw(st.integers(0, 2**48))
    depth = draw(st.integers(0, max_depth))
    return compose_random_gen(Random(seed), depth)


@pytest.fixture
def rng():
    return Random(0xF5EE)
