"""Isomorphism engine: refinement, search, automorphism groups."""

import random

import pytest

import oracles
from cig.digraphs import Digraph, cayley
from cig.groups import FiniteGroup, catalog_specs, parse_group_spec
from cig.iso import (
    VertexColoring,
    are_isomorphic,
    automorphism_group_of,
    find_isomorphism,
    refine,
)
from cig.limits import CapExceeded


def directed_path(n):
    return Digraph.from_arcs(n, [(i, i + 1) for i in range(n - 1)])


def directed_cycle(n):
    return Digraph.from_arcs(n, [(i, (i + 1) % n) for i in range(n)])


class TestRefine:
    def test_complete_graph_stays_uniform(self):
        coloring = refine(Digraph.complete(5))
        assert coloring.color_count() == 1

    def test_four_cycle_stays_uniform(self):
        c4 = cayley(FiniteGroup.cyclic(4), {1, 3})
        assert refine(c4).color_count() == 1

    def test_directed_path_fully_splits(self):
        assert refine(directed_path(3)).color_count() == 3

    def test_initial_colors_never_merge(self):
        d = Digraph.complete(4)
        coloring = refine(d, VertexColoring([0, 0, 1, 1]))
        assert coloring.colors[0] == coloring.colors[1]
        assert coloring.colors[2] == coloring.colors[3]
        assert coloring.colors[0] != coloring.colors[2]

    def test_loops_split_colors(self):
        d = Digraph.from_arcs(2, [(0, 0)])
        assert refine(d).color_count() == 2

    def test_color_multiset_is_isomorphism_invariant(self):
        rng = random.Random(31)
        for _ in range(50):
            n = rng.randrange(1, 7)
            d = oracles.random_digraph(rng, n)
            relabeling = list(range(n))
            rng.shuffle(relabeling)
            other = d.relabel(relabeling)
            assert refine(d).multiset() == refine(other).multiset()

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            refine(Digraph.empty(3), [0, 0])


class TestFindIsomorphism:
    def test_triangle_and_its_reverse(self):
        c3 = directed_cycle(3)
        mapping = find_isomorphism(c3, c3.transpose())
        assert mapping is not None

    def test_path_vs_empty(self):
        assert find_isomorphism(directed_path(3), Digraph.empty(3)) is None

    def test_rotated_cayley_sets(self):
        z4 = FiniteGroup.cyclic(4)
        assert find_isomorphism(cayley(z4, {1}), cayley(z4, {3})) is not None

    def test_connected_vs_disconnected(self):
        z4 = FiniteGroup.cyclic(4)
        assert find_isomorphism(cayley(z4, {1}), cayley(z4, {2})) is None

    def test_self_isomorphism(self):
        d = cayley(FiniteGroup.quaternion(), {2, 4})
        assert are_isomorphic(d, d)

    def test_different_orders(self):
        assert not are_isomorphic(Digraph.empty(3), Digraph.empty(4))

    def test_returned_mapping_preserves_arcs(self):
        rng = random.Random(37)
        for _ in range(60):
            n = rng.randrange(1, 7)
            a = oracles.random_digraph(rng, n)
            relabeling = list(range(n))
            rng.shuffle(relabeling)
            b = a.relabel(relabeling)
            mapping = find_isomorphism(a, b)
            assert mapping is not None
            assert all(
                a.has_arc(u, v) == b.has_arc(mapping(u), mapping(v))
                for u in range(n)
                for v in range(n)
            )

    def test_agreement_with_brute_force_sample(self):
        rng = random.Random(41)
        for _ in range(120):
            n = rng.randrange(1, 5)
            a = oracles.random_digraph(rng, n)
            b = oracles.random_digraph(rng, n)
            assert (find_isomorphism(a, b) is not None) == (
                oracles.brute_isomorphism(a, b) is not None
            )

    def test_order_cap(self):
        with pytest.raises(CapExceeded):
            find_isomorphism(Digraph.empty(41), Digraph.empty(41))

    def test_determinism(self):
        a = cayley(FiniteGroup.cyclic(6), {1, 2})
        b = cayley(FiniteGroup.cyclic(6), {4, 5})
        first = find_isomorphism(a, b)
        second = find_isomorphism(a, b)
        assert first == second


class TestAutomorphismGroup:
    def test_empty_graph_gives_symmetric_group(self):
        assert automorphism_group_of(Digraph.empty(4)).order == 24

    def test_directed_triangle_rotations(self):
        group = automorphism_group_of(directed_cycle(3))
        assert group.order == 3

    def test_wreath_shaped_cayley_graph(self):
        d = cayley(FiniteGroup.cyclic(6), {1, 3, 4})
        assert automorphism_group_of(d).order == 24

    def test_every_element_preserves_arcs(self):
        rng = random.Random(43)
        for _ in range(40):
            d = oracles.random_digraph(rng, rng.randrange(1, 6))
            group = automorphism_group_of(d)
            for raw in group.raw_elements:
                assert all(
                    d.has_arc(u, v) == d.has_arc(raw[u], raw[v])
                    for u in range(d.order)
                    for v in range(d.order)
                )

    def test_count_matches_brute_force(self):
        rng = random.Random(47)
        for _ in range(40):
            d = oracles.random_digraph(rng, rng.randrange(1, 6))
            assert automorphism_group_of(d).order == oracles.brute_automorphism_count(d)

    def test_left_regular_representation_is_contained(self):
        rng = random.Random(53)
        specs = [s for s, o in catalog_specs(8)]
        for _ in range(30):
            g = parse_group_spec(rng.choice(specs))
            s = frozenset(x for x in range(g.order) if rng.random() < 0.45)
            aut = automorphism_group_of(cayley(g, s))
            raws = set(aut.raw_elements)
            for row in g.table:
                assert tuple(row) in raws
