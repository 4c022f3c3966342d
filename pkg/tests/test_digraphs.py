"""Digraphs, Cayley construction, wreath products, twin decompositions."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cig.digraphs import (
    Digraph,
    cayley,
    decompose_over_complete,
    decompose_over_empty,
    inverse_closed,
    wreath_product,
)
from cig.groups import FiniteGroup
from cig.iso import are_isomorphic
from cig.limits import CapExceeded


def directed_cycle(n):
    return Digraph.from_arcs(n, [(i, (i + 1) % n) for i in range(n)])


@st.composite
def digraphs(draw, max_order=6):
    n = draw(st.integers(min_value=1, max_value=max_order))
    masks = [draw(st.integers(min_value=0, max_value=(1 << n) - 1)) for _ in range(n)]
    return Digraph(n, masks)


class TestCayley:
    def test_z3_generator(self):
        d = cayley(FiniteGroup.cyclic(3), {1})
        assert sorted(d.arcs()) == [(0, 1), (1, 2), (2, 0)]

    def test_empty_connection_set(self):
        assert cayley(FiniteGroup.cyclic(5), set()) == Digraph.empty(5)

    def test_identity_in_set_gives_loops(self):
        d = cayley(FiniteGroup.cyclic(3), {0})
        assert all(d.has_loop(u) for u in range(3))
        assert d.arc_count == 3

    def test_inverse_closed_set_gives_undirected(self):
        d = cayley(FiniteGroup.cyclic(4), {1, 3})
        assert d.is_undirected
        assert are_isomorphic(d, directed_cycle(4).__class__.from_arcs(
            4, [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2), (3, 0), (0, 3)]
        ))

    def test_inverse_closed_predicate_matches_symmetry(self):
        g = FiniteGroup.quaternion()
        rng = random.Random(3)
        for _ in range(40):
            s = frozenset(x for x in range(8) if rng.random() < 0.4)
            assert inverse_closed(g, s) == cayley(g, s).is_undirected

    def test_left_translations_are_automorphisms(self):
        g = FiniteGroup.symmetric(3)
        d = cayley(g, {1, 4})
        for row in g.table:
            assert all(
                d.has_arc(u, v) == d.has_arc(row[u], row[v])
                for u in range(6)
                for v in range(6)
            )


class TestComplement:
    def test_complete_to_empty(self):
        assert Digraph.complete(4).complement() == Digraph.empty(4)
        assert Digraph.empty(3).complement() == Digraph.complete(3)

    @given(digraphs())
    @settings(max_examples=80, deadline=None)
    def test_involution(self, d):
        assert d.complement().complement() == d

    def test_directed_triangle_reverses(self):
        c3 = directed_cycle(3)
        assert c3.complement() == c3.transpose()

    def test_loops_are_preserved(self):
        d = Digraph.from_arcs(2, [(0, 0), (0, 1)])
        comp = d.complement()
        assert comp.has_loop(0) and not comp.has_loop(1)
        assert comp.has_arc(1, 0) and not comp.has_arc(0, 1)


class TestWreathProduct:
    def test_k2_over_empty2_is_four_cycle(self):
        w = wreath_product(Digraph.complete(2), Digraph.empty(2))
        four_cycle = Digraph.from_arcs(
            4, [(0, 2), (2, 0), (0, 3), (3, 0), (1, 2), (2, 1), (1, 3), (3, 1)]
        )
        assert w == four_cycle
        assert are_isomorphic(w, cayley(FiniteGroup.cyclic(4), {1, 3}))

    def test_inner_singleton_is_identity(self):
        d = directed_cycle(5)
        assert wreath_product(d, Digraph.complete(1)) == d

    def test_arc_count_formula_loopless(self):
        rng = random.Random(11)
        for _ in range(25):
            a = oracles.random_digraph(rng, 3, loops=False)
            b = oracles.random_digraph(rng, 4, loops=False)
            w = wreath_product(a, b)
            assert w.arc_count == a.order * b.arc_count + a.arc_count * b.order**2

    def test_outer_loop_fills_fiber(self):
        loop_vertex = Digraph.from_arcs(1, [(0, 0)])
        w = wreath_product(loop_vertex, Digraph.empty(3))
        assert w.arc_count == 9  # complete with loops on the single fiber

    def test_complement_distributes_on_loopless(self):
        rng = random.Random(13)
        for _ in range(25):
            a = oracles.random_digraph(rng, 3, loops=False)
            b = oracles.random_digraph(rng, 3, loops=False)
            left = wreath_product(a, b).complement()
            right = wreath_product(a.complement(), b.complement())
            assert left == right

    def test_associativity_up_to_isomorphism(self):
        rng = random.Random(17)
        for _ in range(10):
            a = oracles.random_digraph(rng, 2)
            b = oracles.random_digraph(rng, 2)
            c = oracles.random_digraph(rng, 2)
            assert are_isomorphic(
                wreath_product(wreath_product(a, b), c),
                wreath_product(a, wreath_product(b, c)),
            )

    def test_vertex_cap(self):
        with pytest.raises(CapExceeded):
            wreath_product(Digraph.empty(64), Digraph.empty(64))


class TestCompleteEmpty:
    def test_complete_one_equals_empty_one(self):
        assert Digraph.complete(1) == Digraph.empty(1)

    def test_complete_three_has_six_arcs(self):
        assert Digraph.complete(3).arc_count == 6

    def test_no_loops(self):
        assert all(not Digraph.complete(5).has_loop(u) for u in range(5))


class TestDecomposition:
    def test_complete_graph(self):
        dec = decompose_over_complete(Digraph.complete(4))
        assert dec is not None
        assert dec.inner_size == 4
        assert dec.quotient.order == 1
        assert dec.inner_kind == "complete"

    def test_directed_triangle_has_no_twins(self):
        c3 = directed_cycle(3)
        assert decompose_over_complete(c3) is None
        assert decompose_over_empty(c3) is None

    def test_k2(self):
        dec = decompose_over_complete(Digraph.complete(2))
        assert dec is not None and dec.inner_size == 2
        assert dec.quotient == Digraph.complete(1)

    def test_four_cycle_splits_over_empty(self):
        c4 = cayley(FiniteGroup.cyclic(4), {1, 3})
        assert decompose_over_complete(c4) is None
        dec = decompose_over_empty(c4)
        assert dec is not None
        assert dec.inner_size == 2
        assert dec.quotient == Digraph.complete(2)

    def test_fully_looped_clique_splits_both_ways(self):
        d = Digraph.from_arcs(2, [(0, 0), (1, 1), (0, 1), (1, 0)])
        assert decompose_over_complete(d) is not None
        assert decompose_over_empty(d) is not None

    @given(digraphs())
    @settings(max_examples=150, deadline=None)
    def test_reassembly_is_exact(self, d):
        for dec in (decompose_over_complete(d), decompose_over_empty(d)):
            if dec is None:
                continue
            inner = (
                Digraph.complete(dec.inner_size)
                if dec.inner_kind == "complete"
                else Digraph.empty(dec.inner_size)
            )
            rebuilt = wreath_product(dec.quotient, inner)
            images = [0] * d.order
            for i, cls in enumerate(dec.block_partition.classes):
                for pos, x in enumerate(cls):
                    images[x] = i * dec.inner_size + pos
            assert d.relabel(images) == rebuilt

    def test_agrees_with_partition_oracle_small(self):
        for n in (1, 2, 3, 4):
            for d in oracles.all_digraphs(n, loops=True) if n <= 3 else ():
                for kind, op in (
                    ("complete", decompose_over_complete),
                    ("empty", decompose_over_empty),
                ):
                    feasible = oracles.feasible_inner_sizes(d, kind)
                    dec = op(d)
                    if dec is None:
                        assert feasible == set()
                    else:
                        assert dec.inner_size == max(feasible)
                        assert feasible == {
                            r for r in range(2, dec.inner_size + 1)
                            if dec.inner_size % r == 0
                        }

    def test_existence_and_size_are_isomorphism_invariant(self):
        rng = random.Random(29)
        for _ in range(80):
            n = rng.randrange(2, 7)
            d = oracles.random_digraph(rng, n)
            relabeling = list(range(n))
            rng.shuffle(relabeling)
            other = d.relabel(relabeling)
            for op in (decompose_over_complete, decompose_over_empty):
                mine, theirs = op(d), op(other)
                assert (mine is None) == (theirs is None)
                if mine is not None:
                    assert mine.inner_size == theirs.inner_size


class TestSerialization:
    def test_json_round_trip(self):
        d = cayley(FiniteGroup.cyclic(6), {1, 3, 4})
        assert Digraph.from_json(d.to_json()) == d

    def test_json_shape(self):
        d = Digraph.from_arcs(3, [(0, 1), (2, 2)])
        assert d.to_json() == {"order": 3, "arcs": [[0, 1], [2, 2]]}

    def test_dot_output(self):
        dot = Digraph.from_arcs(2, [(0, 1)]).to_dot()
        assert "digraph" in dot and "0 -> 1;" in dot

    def test_missing_fields_rejected(self):
        with pytest.raises(ValueError):
            Digraph.from_json({"order": 2})
