"""Digraph isomorphism and automorphism search.

Backtracking over color-compatible vertex images after iterated degree
refinement.  Deterministic: sources are placed smallest color class first,
candidate targets ascend, so identical inputs always produce identical
bijections.  No canonical forms; pairwise search only.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

from cig import _kernels
from cig.digraphs import Digraph
from cig.limits import SEARCH_VERTEX_CAP, CapExceeded
from cig.perms import Perm, PermGroup


class VertexColoring:
    """A stable vertex coloring; colors are indices 0..k-1."""

    __slots__ = ("order", "colors")

    def __init__(self, colors: Iterable[int]):
        self.colors = tuple(colors)
        self.order = len(self.colors)

    def color_count(self) -> int:
        return len(set(self.colors))

    def multiset(self) -> Counter:
        return Counter(self.colors)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VertexColoring) and self.colors == other.colors

    def __hash__(self) -> int:
        return hash(self.colors)

    def __repr__(self) -> str:
        return f"VertexColoring({self.colors})"


def _normalize(colors: Sequence[int]) -> list[int]:
    ranking = {c: i for i, c in enumerate(sorted(set(colors)))}
    return [ranking[c] for c in colors]


def _refine_colors(d: Digraph, colors: Sequence[int]) -> list[int]:
    n = d.order
    colors = _normalize(colors)
    while True:
        k = max(colors, default=-1) + 1
        signatures = []
        for v in range(n):
            out_by = [0] * k
            row = d.out_masks[v]
            while row:
                w = (row & -row).bit_length() - 1
                out_by[colors[w]] += 1
                row &= row - 1
            in_by = [0] * k
            col = d.in_masks[v]
            while col:
                w = (col & -col).bit_length() - 1
                in_by[colors[w]] += 1
                col &= col - 1
            signatures.append(
                (colors[v], d.has_loop(v), tuple(out_by), tuple(in_by))
            )
        ranking = {s: i for i, s in enumerate(sorted(set(signatures)))}
        new_colors = [ranking[s] for s in signatures]
        if max(new_colors, default=-1) + 1 == k:
            return new_colors
        colors = new_colors


def refine(d: Digraph, initial: VertexColoring | Sequence[int] | None = None) -> VertexColoring:
    """Iterate (color, loop flag, out-degree-per-color, in-degree-per-color)
    signatures until stable.  Distinct initial colors are never merged."""
    if initial is None:
        colors: Sequence[int] = [0] * d.order
    elif isinstance(initial, VertexColoring):
        colors = initial.colors
    else:
        colors = list(initial)
    if len(colors) != d.order:
        raise ValueError("coloring length does not match order")
    return VertexColoring(_refine_colors(d, colors))


def _search_order(colors: Sequence[int]) -> list[int]:
    """Sources sorted by (color class size, color, index): small classes first."""
    sizes = Counter(colors)
    return sorted(range(len(colors)), key=lambda v: (sizes[colors[v]], colors[v], v))


def _candidates(order: Sequence[int], colors_a: Sequence[int], colors_b: Sequence[int]) -> list[list[int]]:
    by_color: dict[int, list[int]] = {}
    for v, c in enumerate(colors_b):
        by_color.setdefault(c, []).append(v)
    return [by_color.get(colors_a[u], []) for u in order]


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceeded(f"digraph order {n} exceeds search cap {cap}")


def find_isomorphism(
    a: Digraph, b: Digraph, cap: int = SEARCH_VERTEX_CAP
) -> Perm | None:
    """An arc-preserving bijection a -> b, or None after exhaustive search.

    The two graphs are refined jointly (over their disjoint union) so color
    identities are comparable across sides.
    """
    _check_cap(max(a.order, b.order), cap)
    if a.order != b.order:
        return None
    n = a.order
    if n == 0:
        return Perm(())
    if a.arc_count != b.arc_count or a.loop_count != b.loop_count:
        return None
    joint = _refine_colors(a.disjoint_union(b), [0] * (2 * n))
    colors_a, colors_b = joint[:n], joint[n:]
    if Counter(colors_a) != Counter(colors_b):
        return None
    order = _search_order(colors_a)
    cand = _candidates(order, colors_a, colors_b)
    hits = _kernels.iso_backtrack(
        n, list(a.out_masks), list(b.out_masks), order, cand, False
    )
    if not hits:
        return None
    mapping = Perm(hits[0])
    _assert_preserves_arcs(a, b, mapping.images)
    return mapping


def are_isomorphic(a: Digraph, b: Digraph, cap: int = SEARCH_VERTEX_CAP) -> bool:
    return find_isomorphism(a, b, cap=cap) is not None


def automorphism_group_of(d: Digraph, cap: int = SEARCH_VERTEX_CAP) -> PermGroup:
    """The full automorphism group, enumerated by the same backtracking.

    Every leaf of the search is a fully consistency-checked bijection, so
    the returned element set is exactly Aut(d).
    """
    _check_cap(d.order, cap)
    n = d.order
    if n == 0:
        return PermGroup.from_elements(0, [()])
    colors = _refine_colors(d, [0] * n)
    order = _search_order(colors)
    cand = _candidates(order, colors, colors)
    found = _kernels.iso_backtrack(
        n, list(d.out_masks), list(d.out_masks), order, cand, True
    )
    return PermGroup.from_elements(n, found)


def _assert_preserves_arcs(a: Digraph, b: Digraph, images: Sequence[int]) -> None:
    for u in range(a.order):
        for v in range(a.order):
            if a.has_arc(u, v) != b.has_arc(images[u], images[v]):
                raise AssertionError("search returned a non-isomorphism")  # unreachable
