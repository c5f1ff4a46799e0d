"""String modules over a word: canonical submodules and their lattice.

A module is the labeled word itself; a canonical submodule is a position
support closed under outgoing arrows.  Supports decompose into maximal
intervals (the summands), dimension vectors count vertex labels, and the
support lattice matches the matching lattice of the word's snake graph
tile for tile.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property

from .lattice import CoverLattice, Poset
from .matchings import (
    PerfectMatching,
    enclosed_tiles,
    matching_lattice,
    enumerate_matchings,
    minimal_matching,
    symmetric_difference,
)
from .snake import OverlapWindow, SnakeGraph, build_snake, restrict
from .words import DIRECT, INVERSE, ArrowWord


@dataclass(frozen=True)
class StringModule:
    """A string module presented by a labeled word (defaults filled in)."""

    word: ArrowWord

    def __post_init__(self):
        object.__setattr__(self, "word", self.word.with_default_labels())

    @property
    def size(self) -> int:
        return self.word.positions

    def vertex_label(self, p: int) -> int:
        return self.word.label(p)

    def arrows_out(self, p: int) -> tuple[int, ...]:
        """Positions reached by arrows leaving position p."""
        out = []
        if p > 1 and self.word.letter(p - 1) == INVERSE:
            out.append(p - 1)
        if p < self.size and self.word.letter(p) == DIRECT:
            out.append(p + 1)
        return tuple(out)

    def arrows_in(self, p: int) -> tuple[int, ...]:
        out = []
        if p > 1 and self.word.letter(p - 1) == DIRECT:
            out.append(p - 1)
        if p < self.size and self.word.letter(p) == INVERSE:
            out.append(p + 1)
        return tuple(out)

    def is_socle(self, p: int) -> bool:
        return not self.arrows_out(p)

    def is_top(self, p: int) -> bool:
        return not self.arrows_in(p)

    @cached_property
    def graph(self) -> SnakeGraph:
        return build_snake(self.word)

    def successor_closed(self, support: frozenset[int]) -> bool:
        return all(q in support for p in support for q in self.arrows_out(p))

    def dimension_vector(self, support: frozenset[int]) -> Counter:
        return Counter(self.vertex_label(p) for p in support)

    def submodule(self, support) -> "CanonicalSubmodule":
        return CanonicalSubmodule(self, frozenset(support))

    def all_submodules(self) -> tuple["CanonicalSubmodule", ...]:
        """Every successor-closed support, smallest first."""
        empty: frozenset[int] = frozenset()
        seen = {empty}
        frontier = [empty]
        while frontier:
            nxt = []
            for s in frontier:
                for p in range(1, self.size + 1):
                    if p in s or not set(self.arrows_out(p)) <= s:
                        continue
                    bigger = s | {p}
                    if bigger not in seen:
                        seen.add(bigger)
                        nxt.append(bigger)
            frontier = nxt
        supports = sorted(seen, key=lambda s: (len(s), sorted(s)))
        return tuple(CanonicalSubmodule(self, s) for s in supports)


@dataclass(frozen=True)
class CanonicalSubmodule:
    host: StringModule
    support: frozenset[int]

    def __post_init__(self):
        if not all(1 <= p <= self.host.size for p in self.support):
            raise ValueError("support position out of range")
        if not self.host.successor_closed(self.support):
            raise ValueError("support is not closed under outgoing arrows")

    @property
    def intervals(self) -> tuple[OverlapWindow, ...]:
        out: list[OverlapWindow] = []
        for p in sorted(self.support):
            if out and out[-1].end == p - 1:
                out[-1] = OverlapWindow(out[-1].start, p)
            else:
                out.append(OverlapWindow(p, p))
        return tuple(out)

    def dimension_vector(self) -> Counter:
        return self.host.dimension_vector(self.support)

    def sort_key(self) -> tuple:
        return (len(self.support), tuple(sorted(self.support)))

    def to_json(self) -> list[int]:
        return sorted(self.support)


def matching_to_submodule(g: SnakeGraph, p: PerfectMatching) -> CanonicalSubmodule:
    """The canonical submodule enclosed by P minus P_min."""
    from .snake import canonical_word

    module = StringModule(canonical_word(g))
    return CanonicalSubmodule(module, enclosed_tiles(g, p).tiles)


def submodule_to_matching(n: CanonicalSubmodule) -> PerfectMatching:
    """P_min outside the support, the local boundary complement on it."""
    g = n.host.graph
    pmin = minimal_matching(g)
    edges = set(pmin.edges)
    for win in n.intervals:
        sub = restrict(g, win)
        local_min = pmin.edges & sub.edges
        # P_min restricted to a summand interval is a boundary matching of it;
        # swap it for the other alternating class of the interval's boundary.
        edges -= local_min
        edges |= sub.boundary_edges - local_min
    return PerfectMatching(g, frozenset(edges))


def submodule_lattice(m: StringModule) -> CoverLattice:
    """All canonical submodules under inclusion; covers add one position."""
    subs = m.all_submodules()
    by_support = {n.support: n for n in subs}
    covers = []
    for n in subs:
        for p in range(1, m.size + 1):
            if p in n.support or not set(m.arrows_out(p)) <= n.support:
                continue
            covers.append((n, by_support[n.support | {p}], p))
    return CoverLattice(subs, covers)


def count_submodules(m: StringModule, e: Counter) -> int:
    """Submodules with dimension vector e, cross-checked against matchings."""
    e = Counter(e)
    direct = sum(1 for n in m.all_submodules() if n.dimension_vector() == e)
    g = m.graph
    pmin = minimal_matching(g)
    via_matchings = 0
    for p in enumerate_matchings(g):
        tiles = enclosed_tiles(g, p).tiles
        h = Counter(g.weights[k - 1] for k in tiles)
        if h == e:
            via_matchings += 1
    if direct != via_matchings:
        raise AssertionError(
            f"submodule census {direct} disagrees with matching census {via_matchings}"
        )
    return direct


def join_irreducible_poset_from_string(m: StringModule) -> Poset:
    """Join irreducibles straight from the word: closed intervals with simple top.

    An interval [i, j] is successor closed iff nothing points out of it at
    the ends, and its top is simple iff exactly one of its positions has no
    incoming arrow from inside the interval.
    """
    supports = []
    for i in range(1, m.size + 1):
        if not (i == 1 or m.word.letter(i - 1) == DIRECT):
            continue
        for j in range(i, m.size + 1):
            if not (j == m.size or m.word.letter(j) == INVERSE):
                continue
            tops = [
                p
                for p in range(i, j + 1)
                if not any(i <= q <= j for q in m.arrows_in(p))
            ]
            if len(tops) == 1:
                supports.append(frozenset(range(i, j + 1)))
    pairs = {(a, b) for a in supports for b in supports if a != b and a < b}
    return Poset(tuple(sorted(supports, key=sorted)), frozenset(pairs))
