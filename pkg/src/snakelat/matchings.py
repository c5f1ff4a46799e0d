"""Perfect matchings of snake graphs and their rotation lattice.

The two boundary-only matchings of a snake graph are the alternating edge
classes of its boundary cycle.  The minimal one doubles up exactly on the
sink positions of the graph's canonical word (plus the single-tile
convention {N,S}); the maximal one is its boundary complement.  Rotating
an enclosed tile walks the distributive lattice between them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .lattice import CoverLattice
from .snake import Edge, OverlapWindow, SnakeGraph, canonical_word
from .words import DIRECT, INVERSE


@dataclass(frozen=True)
class PerfectMatching:
    graph: SnakeGraph
    edges: frozenset[Edge]

    def __post_init__(self):
        seen: set = set()
        for e in self.edges:
            if e not in self.graph.edges:
                raise ValueError(f"edge {e} not in the host graph")
            for v in e:
                if v in seen:
                    raise ValueError(f"vertex {v} covered twice")
                seen.add(v)
        if seen != set(self.graph.vertices):
            raise ValueError("matching does not cover every vertex")

    def sort_key(self) -> tuple:
        return tuple(sorted(self.edges))

    def tile_edges_matched(self, k: int) -> frozenset[Edge]:
        return frozenset(e for e in self.graph.tile_edges(k).values() if e in self.edges)

    def local_names(self, k: int) -> frozenset[str]:
        return frozenset(
            name for name, e in self.graph.tile_edges(k).items() if e in self.edges
        )

    def to_json(self) -> list[list[int]]:
        return [[x1, y1, x2, y2] for ((x1, y1), (x2, y2)) in sorted(self.edges)]


@dataclass(frozen=True)
class EnclosedDecomposition:
    """Maximal contiguous intervals of the tiles enclosed by P minus P_min."""

    components: tuple[OverlapWindow, ...]

    @property
    def tiles(self) -> frozenset[int]:
        return frozenset(
            k for win in self.components for k in range(win.start, win.end + 1)
        )


def is_perfect_matching(g: SnakeGraph, edges: frozenset[Edge]) -> bool:
    seen: set = set()
    for e in edges:
        if e not in g.edges:
            return False
        for v in e:
            if v in seen:
                return False
            seen.add(v)
    return seen == set(g.vertices)


@lru_cache(maxsize=4096)
def enumerate_matchings(g: SnakeGraph) -> tuple[PerfectMatching, ...]:
    """All perfect matchings, in canonical (sorted edge list) order."""
    vertices = sorted(g.vertices)
    incident: dict = {v: [] for v in vertices}
    for e in sorted(g.edges):
        for v in e:
            incident[v].append(e)
    out: list[frozenset[Edge]] = []
    chosen: list[Edge] = []
    covered: set = set()

    def extend():
        free = next((v for v in vertices if v not in covered), None)
        if free is None:
            out.append(frozenset(chosen))
            return
        for e in incident[free]:
            u = e[0] if e[1] == free else e[1]
            if u in covered:
                continue
            covered.update(e)
            chosen.append(e)
            extend()
            chosen.pop()
            covered.difference_update(e)

    extend()
    matchings = [PerfectMatching(g, edges) for edges in out]
    return tuple(sorted(matchings, key=PerfectMatching.sort_key))


def _boundary_cycle_classes(g: SnakeGraph) -> tuple[frozenset[Edge], frozenset[Edge]]:
    """The two alternating edge classes of the boundary cycle."""
    incident: dict = {}
    for e in g.boundary_edges:
        for v in e:
            incident.setdefault(v, []).append(e)
    start = min(incident)
    first = min(incident[start])
    color = {first: 0}
    prev_v, cur_e = start, first
    cur_v = cur_e[0] if cur_e[1] == prev_v else cur_e[1]
    while cur_v != start:
        nxt = next(e for e in incident[cur_v] if e != cur_e)
        color[nxt] = 1 - color[cur_e]
        cur_e = nxt
        cur_v = cur_e[0] if cur_e[1] == cur_v else cur_e[1]
    class0 = frozenset(e for e, c in color.items() if c == 0)
    class1 = frozenset(e for e, c in color.items() if c == 1)
    return class0, class1


def sink_positions(g: SnakeGraph) -> frozenset[int]:
    """Positions of the canonical word with no outgoing arrow (simple socles)."""
    w = canonical_word(g)
    m = w.positions
    out = set()
    for p in range(1, m + 1):
        left_ok = p == 1 or w.letter(p - 1) == DIRECT
        right_ok = p == m or w.letter(p) == INVERSE
        if left_ok and right_ok:
            out.add(p)
    return frozenset(out)


def source_positions(g: SnakeGraph) -> frozenset[int]:
    """Positions with no incoming arrow (simple tops)."""
    w = canonical_word(g)
    m = w.positions
    out = set()
    for p in range(1, m + 1):
        left_ok = p == 1 or w.letter(p - 1) == INVERSE
        right_ok = p == m or w.letter(p) == DIRECT
        if left_ok and right_ok:
            out.add(p)
    return frozenset(out)


def _doubled_tiles(g: SnakeGraph, edges: frozenset[Edge]) -> frozenset[int]:
    return frozenset(
        k
        for k in range(1, g.tile_count + 1)
        if sum(e in edges for e in g.tile_edges(k).values()) == 2
    )


@lru_cache(maxsize=4096)
def minimal_matching(g: SnakeGraph) -> PerfectMatching:
    """The boundary-only matching doubled exactly on the sink tiles.

    Single tile: {N, S} by convention.
    """
    if g.tile_count == 1:
        te = g.tile_edges(1)
        return PerfectMatching(g, frozenset({te["N"], te["S"]}))
    a, b = _boundary_cycle_classes(g)
    sinks = sink_positions(g)
    for cls in (a, b):
        if _doubled_tiles(g, cls) == sinks:
            return PerfectMatching(g, cls)
    raise AssertionError("no boundary class matches the sink tiles")


def maximal_matching(g: SnakeGraph) -> PerfectMatching:
    """The boundary complement of the minimal matching."""
    return PerfectMatching(g, g.boundary_edges - minimal_matching(g).edges)


def symmetric_difference(p: PerfectMatching, q: PerfectMatching) -> frozenset[Edge]:
    if p.graph != q.graph:
        raise ValueError("matchings live on different graphs")
    return (p.edges | q.edges) - (p.edges & q.edges)


def enclosed_tiles(g: SnakeGraph, p: PerfectMatching) -> EnclosedDecomposition:
    """Tiles strictly inside the closed curves of P minus P_min, as intervals.

    A tile is inside iff a downward ray from its centre crosses the curve an
    odd number of times (only horizontal difference edges can cross it).
    """
    diff = symmetric_difference(p, minimal_matching(g))
    horizontals = [e for e in diff if e[0][1] == e[1][1]]
    inside = []
    for k in range(1, g.tile_count + 1):
        x, y = g.tile_positions[k - 1]
        crossings = sum(1 for ((x1, y1), _) in horizontals if x1 == x and y1 <= y)
        if crossings % 2 == 1:
            inside.append(k)
    components: list[OverlapWindow] = []
    for k in inside:
        if components and components[-1].end == k - 1:
            components[-1] = OverlapWindow(components[-1].start, k)
        else:
            components.append(OverlapWindow(k, k))
    return EnclosedDecomposition(tuple(components))


def rotate_tile(p: PerfectMatching, tile: int) -> PerfectMatching:
    """Swap {N,S} for {E,W} (or back) on one tile; errors if not rotatable."""
    te = p.graph.tile_edges(tile)
    names = p.local_names(tile)
    if names == frozenset({"N", "S"}):
        new = (p.edges - {te["N"], te["S"]}) | {te["E"], te["W"]}
    elif names == frozenset({"E", "W"}):
        new = (p.edges - {te["E"], te["W"]}) | {te["N"], te["S"]}
    else:
        raise ValueError(f"tile {tile} is not rotatable in this matching")
    return PerfectMatching(p.graph, new)


def matching_lattice(g: SnakeGraph) -> CoverLattice:
    """All matchings ordered from P_min; covers rotate one newly enclosed tile."""
    all_matchings = enumerate_matchings(g)
    enclosed = {p: enclosed_tiles(g, p).tiles for p in all_matchings}
    covers = []
    for p in all_matchings:
        base = enclosed[p]
        for k in range(1, g.tile_count + 1):
            names = p.local_names(k)
            if names not in (frozenset({"N", "S"}), frozenset({"E", "W"})):
                continue
            q = rotate_tile(p, k)
            if enclosed[q] == base | {k} and k not in base:
                covers.append((p, q, k))
    return CoverLattice(all_matchings, covers)
