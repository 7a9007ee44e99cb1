"""Benchmark generators, validity predicates, serialization, and sizes."""

from random import Random

import pytest

from freegen.core import Pure, Select, is_simplified, lang
from freegen.interp import exact_value_pmf, parse, traced_sampler
from freegen.search import rejection_collect
from freegen.benchmarks import (
    BENCHMARKS,
    App,
    AvlNode,
    Lam,
    Leaf,
    Lit,
    Node,
    Plus,
    TArrow,
    TInt,
    Var,
    canonical_serialize,
    fgen_avl,
    fgen_bst,
    fgen_sorted,
    fgen_stlc,
    fgen_type,
    is_avl,
    is_bst,
    is_sorted,
    is_well_typed,
    size_of,
    typecheck,
)

L = Leaf()


def inorder(t):
    if isinstance(t, Leaf):
        return []
    return inorder(t.left) + [t.value] + inorder(t.right)


def strictly_increasing(xs):
    return all(a < b for a, b in zip(xs, xs[1:]))


class TestGeneratorStructure:
    def test_bst_depth_zero_is_pure_leaf(self):
        assert fgen_bst(0) == Pure(L)

    def test_bst_labels(self):
        g = fgen_bst(3)
        assert isinstance(g, Select)
        assert [label for label, _ in g.branches] == ["l", "n"]

    def test_bst_depth_one_language_size(self):
        assert len(lang(fgen_bst(1))) == 11

    def test_sorted_labels(self):
        g = fgen_sorted(4)
        assert [label for label, _ in g.branches] == ["e", "c"]

    def test_stlc_depth_zero_has_two_branches(self):
        g = fgen_stlc(0)
        assert [label for label, _ in g.branches] == ["i", "v"]

    def test_stlc_labels_at_depth(self):
        g = fgen_stlc(3)
        assert [label for label, _ in g.branches] == ["i", "p", "l", "a", "v"]

    def test_type_generator_depths(self):
        assert fgen_type(0) == Pure(TInt())
        assert [label for label, _ in fgen_type(2).branches] == ["i", "f"]

    @pytest.mark.parametrize("name", sorted(BENCHMARKS))
    def test_simplified_and_productive_at_every_depth(self, name):
        bench = BENCHMARKS[name]
        for depth in range(6):
            g = bench.build(depth)
            assert is_simplified(g)
            assert not isinstance(g, Pure) or depth == 0

    def test_nested_node_sequence_parses(self):
        got = parse(fgen_bst(5), "n5ln6ll")
        assert got == (Node(5, L, Node(6, L, L)), "")


class TestCheckers:
    def test_leaf_is_valid_everywhere(self):
        assert is_bst(L) and is_avl(L)

    def test_bst_ordering(self):
        assert is_bst(Node(5, Node(3, L, L), Node(7, L, L)))
        assert not is_bst(Node(5, Node(6, L, L), L))

    def test_bst_global_bounds_not_just_local(self):
        # 6 in the left subtree of 5 must fail even though 6 > 4 locally.
        t = Node(5, Node(4, L, Node(6, L, L)), L)
        assert not is_bst(t)

    def test_sorted(self):
        assert is_sorted(())
        assert is_sorted((0, 1, 1, 5))
        assert not is_sorted((2, 1))

    def test_avl_height_convention(self):
        assert is_avl(AvlNode(5, 1, L, L))
        assert not is_avl(AvlNode(5, 2, L, L))

    def test_avl_requires_balance(self):
        chain = AvlNode(5, 3, AvlNode(3, 2, AvlNode(1, 1, L, L), L), L)
        assert not is_avl(chain)

    def test_avl_requires_ordering(self):
        t = AvlNode(3, 2, AvlNode(5, 1, L, L), L)
        assert not is_avl(t)

    def test_typecheck_examples(self):
        assert typecheck(Lit(3)) == TInt()
        assert typecheck(Var(0)) is None
        assert typecheck(Lam(TInt(), Plus(Var(0), Lit(1)))) == TArrow(TInt(), TInt())

    def test_app_rule(self):
        identity = Lam(TInt(), Var(0))
        assert typecheck(App(identity, Lit(4))) == TInt()
        assert typecheck(App(identity, identity)) is None
        assert typecheck(App(Lit(1), Lit(2))) is None

    def test_shadowing_uses_innermost_binder(self):
        inner = Lam(TArrow(TInt(), TInt()), App(Var(0), Lit(1)))
        assert typecheck(Lam(TInt(), inner)) == TArrow(
            TInt(), TArrow(TArrow(TInt(), TInt()), TInt())
        )


class TestCheckerEnumeration:
    """Each predicate agrees with an independent formulation over the whole
    enumerated support at small depth."""

    def test_bst_bounds_check_equals_inorder_scan(self):
        support = exact_value_pmf(fgen_bst(2))
        assert support
        for t in support:
            assert is_bst(t) == strictly_increasing(inorder(t))

    def test_sorted_equals_sort_comparison(self):
        support = exact_value_pmf(fgen_sorted(3))
        for xs in support:
            assert is_sorted(xs) == (tuple(sorted(xs)) == xs)

    def test_avl_equals_bruteforce_reformulation(self):
        def plain_height(t):
            if isinstance(t, Leaf):
                return 0
            return 1 + max(plain_height(t.left), plain_height(t.right))

        def stored_heights_correct(t):
            if isinstance(t, Leaf):
                return True
            return (
                t.height == plain_height(t)
                and stored_heights_correct(t.left)
                and stored_heights_correct(t.right)
            )

        def balanced(t):
            if isinstance(t, Leaf):
                return True
            return (
                abs(plain_height(t.left) - plain_height(t.right)) <= 1
                and balanced(t.left)
                and balanced(t.right)
            )

        support = exact_value_pmf(fgen_avl(2), 2_000_000)
        for t in support:
            expected = (
                strictly_increasing(inorder(t))
                and stored_heights_correct(t)
                and balanced(t)
            )
            assert is_avl(t) == expected


class TestSerialization:
    def test_nested_node_tree(self):
        assert canonical_serialize(Node(5, L, Node(6, L, L))) == "n5ln6ll"

    def test_basic_values(self):
        assert canonical_serialize(L) == "l"
        assert canonical_serialize(()) == "e"
        assert canonical_serialize((5, 7)) == "c5c7e"
        assert canonical_serialize(Lit(3)) == "i3"
        assert canonical_serialize(Lam(TInt(), Var(0))) == "liv0"

    def test_full_depth_values_drop_floor_leaves(self):
        t = Node(1, Node(2, L, L), L)
        assert canonical_serialize(t, 2) == "n1n2l"
        assert canonical_serialize((1, 2), 2) == "c1c2"

    def test_out_of_domain_rejected(self):
        with pytest.raises(ValueError):
            canonical_serialize("not a benchmark value")
        with pytest.raises(ValueError):
            canonical_serialize(Node(12, L, L))
        with pytest.raises(ValueError):
            canonical_serialize(Node(1, Node(2, L, L), L), 1)

    def test_too_deep_type_rejected(self):
        deep = TArrow(TArrow(TArrow(TInt(), TInt()), TInt()), TInt())
        with pytest.raises(ValueError):
            canonical_serialize(Lam(deep, Lit(0)))

    @pytest.mark.parametrize("name,depth", [("bst", 3), ("sorted", 4), ("avl", 2), ("stlc", 3)])
    def test_roundtrip_on_sampled_values(self, name, depth):
        bench = BENCHMARKS[name]
        g = bench.build(depth)
        draw = traced_sampler(g)
        rng = Random(1234)
        for _ in range(400):
            value, s = draw(rng)
            encoded = canonical_serialize(value, depth)
            assert encoded == s
            assert parse(g, encoded) == (value, "")

    def test_injective_on_enumerated_support(self):
        support = exact_value_pmf(fgen_bst(2))
        encoded = {canonical_serialize(t, 2) for t in support}
        assert len(encoded) == len(support)


class TestSize:
    def test_tree_sizes(self):
        assert size_of(L) == 1
        assert size_of(Node(5, L, L)) == 3
        assert size_of(AvlNode(5, 1, L, L)) == 3

    def test_list_sizes(self):
        assert size_of(()) == 1
        assert size_of((1, 2)) == 3

    def test_expr_sizes(self):
        assert size_of(Lit(3)) == 1
        assert size_of(Lam(TInt(), Lit(1))) == 2
        assert size_of(Plus(Var(0), Lit(1))) == 3

    def test_rejects_unknown(self):
        with pytest.raises(ValueError):
            size_of(object())


class TestValidMassPositivity:
    @pytest.mark.parametrize("name", ["bst", "sorted", "stlc"])
    def test_rejection_finds_a_valid_value_quickly(self, name):
        bench = BENCHMARKS[name]
        out = rejection_collect(
            bench.build(bench.default_depth), 5, bench.is_valid, max_draws=10_000
        )
        assert len(out.values) >= 1
