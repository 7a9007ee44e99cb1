"""Benchmark value domains, their free generators, and validity predicates.

Four families, each a naive structural generator plus the predicate that
makes valid values rare:

* bst: binary trees with values 0-9, valid when a strict search tree
* sorted: digit lists (as tuples), valid when non-decreasing
* avl: binary trees carrying a stored height 0-9 per node, valid when the
  tree is an ordered, height-correct, balanced search tree
* stlc: lambda-calculus terms with de Bruijn indices, valid when well-typed

Values produced by the generators serialize canonically to a choice
sequence in the generating tree's own language, so serialization doubles as
the deduplication key and parses back to the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, Optional, Tuple, Union

from .core import FreeGen, fmap, lift, pair, pure, select

__all__ = [
    "Leaf",
    "Node",
    "AvlNode",
    "Lit",
    "Var",
    "Plus",
    "Lam",
    "App",
    "TInt",
    "TArrow",
    "BinTree",
    "AvlTree",
    "Expr",
    "Ty",
    "fgen_digit",
    "fgen_bool_tree",
    "fgen_bst",
    "fgen_sorted",
    "fgen_avl",
    "fgen_type",
    "fgen_stlc",
    "is_bst",
    "is_sorted",
    "is_avl",
    "typecheck",
    "is_well_typed",
    "canonical_serialize",
    "size_of",
    "Benchmark",
    "BENCHMARKS",
]


def _wrap(child_repr: str) -> str:
    return f"({child_repr})" if " " in child_repr else child_repr


@dataclass(frozen=True, slots=True)
class Leaf:
    def __hash__(self):
        return hash((Leaf,))

    def __repr__(self):
        return "Leaf"


@dataclass(frozen=True, slots=True)
class Node:
    value: Any
    left: "BinTree"
    right: "BinTree"
    # Hash cached on first use; these trees end up as dict keys in exact
    # distributions and dedup sets, where recomputing recursively is costly.
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __hash__(self):
        h = self._h
        if h == 0:
            h = hash((Node, self.value, self.left, self.right)) or 1
            object.__setattr__(self, "_h", h)
        return h

    def __repr__(self):
        return f"Node {self.value!r} {_wrap(repr(self.left))} {_wrap(repr(self.right))}"


@dataclass(frozen=True, slots=True)
class AvlNode:
    value: int
    height: int
    left: "AvlTree"
    right: "AvlTree"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __hash__(self):
        h = self._h
        if h == 0:
            h = hash((AvlNode, self.value, self.height, self.left, self.right)) or 1
            object.__setattr__(self, "_h", h)
        return h

    def __repr__(self):
        return (
            f"AvlNode {self.value!r} {self.height!r} "
            f"{_wrap(repr(self.left))} {_wrap(repr(self.right))}"
        )


BinTree = Union[Leaf, Node]
AvlTree = Union[Leaf, AvlNode]


@dataclass(frozen=True, slots=True)
class Lit:
    value: int

    def __hash__(self):
        # Mix in the class so Lit(k) and Var(k) spread into distinct buckets.
        return hash((Lit, self.value))

    def __repr__(self):
        return f"Lit {self.value!r}"


@dataclass(frozen=True, slots=True)
class Var:
    index: int

    def __hash__(self):
        return hash((Var, self.index))

    def __repr__(self):
        return f"Var {self.index!r}"


@dataclass(frozen=True, slots=True)
class Plus:
    left: "Expr"
    right: "Expr"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __hash__(self):
        h = self._h
        if h == 0:
            h = hash((Plus, self.left, self.right)) or 1
            object.__setattr__(self, "_h", h)
        return h

    def __repr__(self):
        return f"Plus {_wrap(repr(self.left))} {_wrap(repr(self.right))}"


@dataclass(frozen=True, slots=True)
class Lam:
    param_type: "Ty"
    body: "Expr"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __hash__(self):
        h = self._h
        if h == 0:
            h = hash((Lam, self.param_type, self.body)) or 1
            object.__setattr__(self, "_h", h)
        return h

    def __repr__(self):
        return f"Lam {_wrap(repr(self.param_type))} {_wrap(repr(self.body))}"


@dataclass(frozen=True, slots=True)
class App:
    fn: "Expr"
    arg: "Expr"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __hash__(self):
        h = self._h
        if h == 0:
            h = hash((App, self.fn, self.arg)) or 1
            object.__setattr__(self, "_h", h)
        return h

    def __repr__(self):
        return f"App {_wrap(repr(self.fn))} {_wrap(repr(self.arg))}"


Expr = Union[Lit, Var, Plus, Lam, App]


@dataclass(frozen=True, slots=True)
class TInt:
    def __hash__(self):
        return hash((TInt,))

    def __repr__(self):
        return "TInt"


@dataclass(frozen=True, slots=True)
class TArrow:
    param: "Ty"
    result: "Ty"
    _h: int = field(default=0, init=False, repr=False, compare=False)

    def __hash__(self):
        h = self._h
        if h == 0:
            h = hash((TArrow, self.param, self.result)) or 1
            object.__setattr__(self, "_h", h)
        return h

    def __repr__(self):
        return f"TArrow {_wrap(repr(self.param))} {_wrap(repr(self.result))}"


Ty = Union[TInt, TArrow]


# ---------------------------------------------------------------------------
# Generators

DIGITS = "0123456789"

# Type depth used for every lambda parameter annotation.
TYPE_DEPTH = 2


@lru_cache(maxsize=None)
def fgen_digit() -> FreeGen:
    """Digits 0-9, each labelled by its own character."""
    return select((d, pure(int(d))) for d in DIGITS)


@lru_cache(maxsize=None)
def fgen_bool_tree(depth: int) -> FreeGen:
    """Binary trees of booleans: leaf ('l') or node ('n' then 't'/'f' payload).

    The documentation family. Unlike the benchmark trees, the depth floor is
    a one-branch leaf select, so a leaf costs an 'l' at every level and the
    choice sequence for a value reads the same at any depth.
    """
    if depth == 0:
        return select([("l", pure(Leaf()))])
    child = fgen_bool_tree(depth - 1)
    payload = select([("t", pure(True)), ("f", pure(False))])
    return select([("l", pure(Leaf())), ("n", lift(Node, payload, child, child))])


@lru_cache(maxsize=None)
def fgen_bst(depth: int) -> FreeGen:
    """Binary trees with digit values; the naive generator behind bst."""
    if depth == 0:
        return pure(Leaf())
    child = fgen_bst(depth - 1)
    return select([("l", pure(Leaf())), ("n", lift(Node, fgen_digit(), child, child))])


def _cons(head, tail):
    return (head,) + tail


@lru_cache(maxsize=None)
def fgen_sorted(length: int) -> FreeGen:
    """Digit lists (tuples) up to the given length: empty ('e') or cons ('c')."""
    if length == 0:
        return pure(())
    tail = fgen_sorted(length - 1)
    return select([("e", pure(())), ("c", lift(_cons, fgen_digit(), tail))])


@lru_cache(maxsize=None)
def fgen_avl(depth: int) -> FreeGen:
    """Like fgen_bst but every node also guesses a stored height digit."""
    if depth == 0:
        return pure(Leaf())
    child = fgen_avl(depth - 1)
    return select(
        [
            ("l", pure(Leaf())),
            ("n", lift(AvlNode, fgen_digit(), fgen_digit(), child, child)),
        ]
    )


@lru_cache(maxsize=None)
def fgen_type(depth: int) -> FreeGen:
    """Types: int ('i') or arrow ('f') over shallower types; depth 0 is int only."""
    if depth == 0:
        return pure(TInt())
    sub = fgen_type(depth - 1)
    return select([("i", pure(TInt())), ("f", lift(TArrow, sub, sub))])


def _plus_of(args):
    return Plus(args[0], args[1])


def _app_of(args):
    return App(args[0], args[1])


@lru_cache(maxsize=None)
def fgen_stlc(depth: int) -> FreeGen:
    """Arbitrary lambda terms; well-typedness is what the predicate checks.

    Depth 0 offers literals ('i') and variables ('v'); deeper levels add
    plus ('p'), lambda ('l'), and application ('a').
    """
    lit = fmap(Lit, fgen_digit())
    var = fmap(Var, fgen_digit())
    if depth == 0:
        return select([("i", lit), ("v", var)])
    child = fgen_stlc(depth - 1)
    args = pair(child, child)
    return select(
        [
            ("i", lit),
            ("p", fmap(_plus_of, args)),
            ("l", lift(Lam, fgen_type(TYPE_DEPTH), child)),
            ("a", fmap(_app_of, args)),
            ("v", var),
        ]
    )


# ---------------------------------------------------------------------------
# Validity predicates


def _ordered(t, low, high) -> bool:
    if isinstance(t, Leaf):
        return True
    v = t.value
    if low is not None and v <= low:
        return False
    if high is not None and v >= high:
        return False
    return _ordered(t.left, low, v) and _ordered(t.right, v, high)


def is_bst(t: BinTree) -> bool:
    """Strict search-tree order: left values below, right values above, globally."""
    return _ordered(t, None, None)


def is_sorted(xs: Tuple[int, ...]) -> bool:
    """Non-decreasing; duplicates allowed."""
    return all(a <= b for a, b in zip(xs, xs[1:]))


def _checked_height(t) -> Optional[int]:
    # Computed height with Leaf at 0, or None if a stored height is wrong or
    # a node is unbalanced.
    if isinstance(t, Leaf):
        return 0
    hl = _checked_height(t.left)
    if hl is None:
        return None
    hr = _checked_height(t.right)
    if hr is None:
        return None
    if abs(hl - hr) > 1:
        return None
    h = 1 + max(hl, hr)
    return h if t.height == h else None


def is_avl(t: AvlTree) -> bool:
    """Ordered, every stored height correct, every node balanced."""
    return _ordered(t, None, None) and _checked_height(t) is not None


def typecheck(e: Expr, ctx: Tuple[Ty, ...] = ()) -> Optional[Ty]:
    """Type of `e` under a de Bruijn context (innermost binder first), or None."""
    if isinstance(e, Lit):
        return TInt()
    if isinstance(e, Var):
        return ctx[e.index] if e.index < len(ctx) else None
    if isinstance(e, Plus):
        lt = typecheck(e.left, ctx)
        rt = typecheck(e.right, ctx)
        if lt == TInt() and rt == TInt():
            return TInt()
        return None
    if isinstance(e, Lam):
        body = typecheck(e.body, (e.param_type,) + ctx)
        return TArrow(e.param_type, body) if body is not None else None
    ft = typecheck(e.fn, ctx)
    if not isinstance(ft, TArrow):
        return None
    at = typecheck(e.arg, ctx)
    return ft.result if at == ft.param else None


def is_well_typed(e: Expr) -> bool:
    return typecheck(e) is not None


# ---------------------------------------------------------------------------
# Canonical serialization and size


def _digit(n) -> str:
    if isinstance(n, bool) or not isinstance(n, int) or not 0 <= n <= 9:
        raise ValueError(f"expected a digit 0-9, got {n!r}")
    return str(n)


def _serialize_type(t: Ty, depth: int) -> str:
    if depth == 0:
        if isinstance(t, TInt):
            return ""
        raise ValueError(f"type too deep to serialize: {t!r}")
    if isinstance(t, TInt):
        return "i"
    if isinstance(t, TArrow):
        return (
            "f"
            + _serialize_type(t.param, depth - 1)
            + _serialize_type(t.result, depth - 1)
        )
    raise ValueError(f"not a type: {t!r}")


def _serialize_tree(t, budget: int) -> str:
    # At the generator's depth floor a leaf is forced and costs no choice.
    if isinstance(t, Leaf):
        return "l" if budget > 0 else ""
    if budget <= 0:
        raise ValueError(f"tree deeper than the generator allows: {t!r}")
    if isinstance(t, Node):
        return (
            "n"
            + _digit(t.value)
            + _serialize_tree(t.left, budget - 1)
            + _serialize_tree(t.right, budget - 1)
        )
    return (
        "n"
        + _digit(t.value)
        + _digit(t.height)
        + _serialize_tree(t.left, budget - 1)
        + _serialize_tree(t.right, budget - 1)
    )


def _serialize_expr(e) -> str:
    if isinstance(e, Lit):
        return "i" + _digit(e.value)
    if isinstance(e, Var):
        return "v" + _digit(e.index)
    if isinstance(e, Plus):
        return "p" + _serialize_expr(e.left) + _serialize_expr(e.right)
    if isinstance(e, Lam):
        return "l" + _serialize_type(e.param_type, TYPE_DEPTH) + _serialize_expr(e.body)
    if isinstance(e, App):
        return "a" + _serialize_expr(e.fn) + _serialize_expr(e.arg)
    raise ValueError(f"not a benchmark value: {e!r}")


def canonical_serialize(v: Any, depth: Optional[int] = None) -> str:
    """The choice sequence the benchmark generator would take to produce `v`.

    `depth` is the depth bound of the generating tree (its stated maximum
    depth for trees, maximum length for lists); it defaults to the
    benchmark's standard bound. It matters because a leaf sitting exactly at
    the bound is forced and costs no choice. Injective per domain; raises
    ValueError for values outside the benchmark domains.
    """
    if isinstance(v, (Leaf, Node, AvlNode)):
        if depth is None:
            depth = BENCHMARKS["avl" if isinstance(v, AvlNode) else "bst"].default_depth
        return _serialize_tree(v, depth)
    if isinstance(v, tuple):
        budget = BENCHMARKS["sorted"].default_depth if depth is None else depth
        if len(v) > budget:
            raise ValueError(f"list longer than the generator allows: {v!r}")
        body = "".join("c" + _digit(d) for d in v)
        return body + ("e" if len(v) < budget else "")
    if isinstance(v, (Lit, Var, Plus, Lam, App)):
        return _serialize_expr(v)
    raise ValueError(f"not a benchmark value: {v!r}")


def size_of(v: Any) -> int:
    """Constructor count: leaves and nil are 1, every node adds its children."""
    if isinstance(v, Leaf):
        return 1
    if isinstance(v, Node):
        return 1 + size_of(v.left) + size_of(v.right)
    if isinstance(v, AvlNode):
        return 1 + size_of(v.left) + size_of(v.right)
    if isinstance(v, tuple):
        return 1 + len(v)
    if isinstance(v, (Lit, Var)):
        return 1
    if isinstance(v, Plus):
        return 1 + size_of(v.left) + size_of(v.right)
    if isinstance(v, Lam):
        return 1 + size_of(v.body)
    if isinstance(v, App):
        return 1 + size_of(v.fn) + size_of(v.arg)
    raise ValueError(f"not a benchmark value: {v!r}")


# ---------------------------------------------------------------------------
# Registry


@dataclass(frozen=True)
class Benchmark:
    name: str
    build: Callable[[int], FreeGen]
    is_valid: Callable[[Any], bool]
    default_sample_rate: int
    default_depth: int


BENCHMARKS: Dict[str, Benchmark] = {
    "bst": Benchmark("bst", fgen_bst, is_bst, 50, 5),
    "sorted": Benchmark("sorted", fgen_sorted, is_sorted, 50, 20),
    "avl": Benchmark("avl", fgen_avl, is_avl, 500, 5),
    "stlc": Benchmark("stlc", fgen_stlc, is_well_typed, 400, 5),
}
