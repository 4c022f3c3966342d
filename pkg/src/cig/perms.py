"""Permutations, permutation groups, block systems, and wreath products.

Points are integers ``0..degree-1``.  Groups are given by generators and
store their full element closure (computed lazily, capped); blockness and
partition stabilizers are tested against the full closure, not just the
generators.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from cig import _kernels
from cig.limits import BLOCK_DEGREE_CAP, CLOSURE_CAP, CapExceeded


class Perm:
    """A permutation of {0..degree-1}; ``(p * q)(x) == p(q(x))``."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images!r}")
        self.images = images

    @classmethod
    def identity(cls, degree: int) -> Perm:
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[int]) -> Perm:
        images = list(range(degree))
        for cycle in cycles:
            cycle = tuple(cycle)
            for i, x in enumerate(cycle):
                images[x] = cycle[(i + 1) % len(cycle)]
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Perm) -> Perm:
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Perm(self.images[x] for x in other.images)

    def inverse(self) -> Perm:
        inv = [0] * self.degree
        for x, y in enumerate(self.images):
            inv[y] = x
        return Perm(inv)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def image_of_set(self, points: Iterable[int]) -> frozenset[int]:
        return frozenset(self.images[x] for x in points)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: Perm) -> bool:
        return self.images < other.images

    def __repr__(self) -> str:
        return f"Perm({self.cycle_string()})"

    def cycle_string(self) -> str:
        seen = set()
        parts = []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cycle = [start]
            x = self.images[start]
            while x != start:
                seen.add(x)
                cycle.append(x)
                x = self.images[x]
            parts.append("(" + " ".join(map(str, cycle)) + ")")
        return "".join(parts) if parts else "()"


class PointPartition:
    """A partition of {0..degree-1}; classes canonically sorted by minimum."""

    __slots__ = ("degree", "classes", "_class_index")

    def __init__(self, degree: int, classes: Iterable[Iterable[int]]):
        normalized = sorted(tuple(sorted(c)) for c in classes)
        covered: list[int] = []
        for c in normalized:
            if not c:
                raise ValueError("empty class")
            covered.extend(c)
        if sorted(covered) != list(range(degree)):
            raise ValueError("classes do not partition the point set")
        self.degree = degree
        self.classes = tuple(normalized)
        index = [0] * degree
        for i, c in enumerate(self.classes):
            for x in c:
                index[x] = i
        self._class_index = tuple(index)

    @classmethod
    def singletons(cls, degree: int) -> PointPartition:
        return cls(degree, ([x] for x in range(degree)))

    @classmethod
    def single_class(cls, degree: int) -> PointPartition:
        return cls(degree, [range(degree)])

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> PointPartition:
        groups: dict[int, list[int]] = {}
        for x, lab in enumerate(labels):
            groups.setdefault(lab, []).append(x)
        return cls(len(labels), groups.values())

    def class_of(self, x: int) -> tuple[int, ...]:
        return self.classes[self._class_index[x]]

    def class_index(self, x: int) -> int:
        return self._class_index[x]

    def class_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def refines(self, other: PointPartition) -> bool:
        """True iff every class of self lies inside a class of other."""
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return all(set(c) <= set(other.class_of(c[0])) for c in self.classes)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PointPartition)
            and self.degree == other.degree
            and self.classes == other.classes
        )

    def __hash__(self) -> int:
        return hash((self.degree, self.classes))

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __repr__(self) -> str:
        inner = " | ".join(" ".join(map(str, c)) for c in self.classes)
        return f"PointPartition[{inner}]"


class PermGroup:
    """Permutation group given by generators, with a capped full closure.

    Elements are kept internally as raw image tuples; ``elements`` wraps
    them in Perm objects on first use.
    """

    def __init__(
        self,
        generators: Iterable[Perm] = (),
        degree: int | None = None,
        cap: int = CLOSURE_CAP,
    ):
        gens = tuple(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree required for an empty generating set")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise ValueError("generator degree mismatch")
        self.degree = degree
        self.cap = cap
        self._gen_raw: tuple[tuple[int, ...], ...] = tuple(g.images for g in gens)
        self._generators: tuple[Perm, ...] | None = gens
        self._raw: tuple[tuple[int, ...], ...] | None = None
        self._raw_set: frozenset[tuple[int, ...]] | None = None
        self._elements: tuple[Perm, ...] | None = None

    @classmethod
    def from_elements(
        cls, degree: int, raw_elements: Iterable[tuple[int, ...]]
    ) -> PermGroup:
        """Wrap an already-closed element set (sorted and deduplicated here).

        The caller asserts closedness; nothing is recomputed.
        """
        group = cls((), degree=degree)
        raw = tuple(sorted(set(raw_elements)))
        group._gen_raw = raw
        group._generators = None
        group._raw = raw
        return group

    @property
    def generators(self) -> tuple[Perm, ...]:
        if self._generators is None:
            self._generators = tuple(Perm(r) for r in self._gen_raw)
        return self._generators

    @property
    def raw_elements(self) -> tuple[tuple[int, ...], ...]:
        if self._raw is None:
            self._raw = tuple(
                _kernels.perm_closure(self.degree, self._gen_raw, self.cap)
            )
        return self._raw

    @property
    def elements(self) -> tuple[Perm, ...]:
        if self._elements is None:
            self._elements = tuple(Perm(r) for r in self.raw_elements)
        return self._elements

    @property
    def order(self) -> int:
        return len(self.raw_elements)

    def __contains__(self, p: Perm) -> bool:
        if p.degree != self.degree:
            return False
        if self._raw_set is None:
            self._raw_set = frozenset(self.raw_elements)
        return p.images in self._raw_set

    def same_group(self, other: PermGroup) -> bool:
        return self.degree == other.degree and self.raw_elements == other.raw_elements

    def orbits(self) -> PointPartition:
        """Orbit partition of the point set (generators suffice)."""
        seen = [False] * self.degree
        classes = []
        for start in range(self.degree):
            if seen[start]:
                continue
            orbit = [start]
            seen[start] = True
            queue = [start]
            while queue:
                x = queue.pop()
                for g in self._gen_raw:
                    y = g[x]
                    if not seen[y]:
                        seen[y] = True
                        orbit.append(y)
                        queue.append(y)
            classes.append(orbit)
        return PointPartition(self.degree, classes)

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def is_regular(self) -> bool:
        return self.is_transitive() and self.order == self.degree

    def is_block(self, points: Iterable[int]) -> bool:
        """True iff every element maps the set onto itself or clear of it."""
        block = frozenset(points)
        if not block:
            raise ValueError("a block must be nonempty")
        if not all(0 <= x < self.degree for x in block):
            raise ValueError("points out of range")
        size = len(block)
        for raw in self.raw_elements:
            hits = sum(1 for x in block if raw[x] in block)
            if 0 < hits < size:
                return False
        return True

    def block_systems(self, size: int) -> list[PointPartition]:
        """All invariant partitions with classes of the given size.

        Only size-``size`` candidate sets containing point 0 are tested:
        every class of an invariant partition of a transitive group is
        conjugate to the class through 0.
        """
        n = self.degree
        if not self.is_transitive():
            raise ValueError("block systems are defined for transitive groups")
        if size <= 0 or n % size:
            raise ValueError(f"class size {size} does not divide degree {n}")
        if n > BLOCK_DEGREE_CAP:
            raise CapExceeded(f"degree {n} exceeds block-search cap {BLOCK_DEGREE_CAP}")
        systems = []
        for rest in combinations(range(1, n), size - 1):
            block = frozenset((0, *rest))
            if not self.is_block(block):
                continue
            classes = {
                tuple(sorted(raw[x] for x in block)) for raw in self.raw_elements
            }
            systems.append(PointPartition(n, classes))
        return systems

    def is_primitive(self) -> bool:
        """True iff only trivial invariant partitions exist."""
        if not self.is_transitive():
            raise ValueError("primitivity is defined for transitive groups")
        n = self.degree
        for size in range(2, n):
            if n % size == 0 and self.block_systems(size):
                return False
        return True

    def invariant_partitions(self) -> list[PointPartition]:
        """Every invariant partition, trivial ones included."""
        return [
            partition
            for size in range(1, self.degree + 1)
            if self.degree % size == 0
            for partition in self.block_systems(size)
        ]

    def partition_stabilizer(self, partition: PointPartition) -> PermGroup:
        """Subgroup fixing every class of the partition set-wise."""
        if partition.degree != self.degree:
            raise ValueError("degree mismatch")
        class_sets = [set(c) for c in partition.classes]
        kept = [
            raw
            for raw in self.raw_elements
            if all({raw[x] for x in c} == c for c in class_sets)
        ]
        return PermGroup.from_elements(self.degree, kept)

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"


def trivial_group(degree: int) -> PermGroup:
    return PermGroup((), degree=degree)


def cyclic_group(n: int) -> PermGroup:
    """The n-cycle group on n points."""
    if n == 1:
        return trivial_group(1)
    return PermGroup([Perm.from_cycles(n, range(n))])


def symmetric_group(n: int, cap: int = CLOSURE_CAP) -> PermGroup:
    if n <= 1:
        return trivial_group(max(n, 1))
    gens = [Perm.from_cycles(n, (0, 1))]
    if n > 2:
        gens.append(Perm.from_cycles(n, range(n)))
    return PermGroup(gens, cap=cap)


def wreath_product(g: PermGroup, h: PermGroup, cap: int = CLOSURE_CAP) -> PermGroup:
    """Wreath product acting on pairs, with (x, y) indexed as x*|Y| + y.

    Generated by g moving the first coordinate and an independent copy of
    h's generators on each fiber; the closure has order |g| * |h|^deg(g).
    """
    nx, ny = g.degree, h.degree
    degree = nx * ny
    gens = []
    for gamma_raw in g._gen_raw:
        gens.append(
            Perm(gamma_raw[x] * ny + y for x in range(nx) for y in range(ny))
        )
    for x in range(nx):
        for eta_raw in h._gen_raw:
            images = list(range(degree))
            for y in range(ny):
                images[x * ny + y] = x * ny + eta_raw[y]
            gens.append(Perm(images))
    return PermGroup(gens, degree=degree, cap=cap)


def fiber_partition(nx: int, ny: int) -> PointPartition:
    """The partition of pair space into fibers {x} x Y."""
    return PointPartition(nx * ny, ([x * ny + y for y in range(ny)] for x in range(nx)))
