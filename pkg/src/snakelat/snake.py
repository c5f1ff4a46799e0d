"""Snake graphs: tiles glued rightward or upward in the integer grid.

A snake graph with m tiles is stored as its m-1 gluing directions plus a
face weight per tile.  Tile 1 sits at ``origin`` (default (0,0)) and tile
k+1 sits one step right of or above tile k; this fixed chart makes edge
identity decidable, which the matching and resolution machinery relies on.

The word <-> graph dictionary: a word with letters a1..an produces n+1
tiles.  The first direction is RIGHT for a direct first letter and UP for
an inverse one; inside a maximal run consecutive directions alternate
(zigzag) and at a run boundary the direction repeats (straight piece).
The arrow functions invert this construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .words import DIRECT, INVERSE, ArrowWord, flip

RIGHT = "R"
UP = "U"

_DFLIP = {RIGHT: UP, UP: RIGHT}

# Local edge names of a tile at (x, y).
EDGE_NAMES = ("N", "E", "S", "W")

Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]


def flip_direction(d: str) -> str:
    return _DFLIP[d]


def _edge(a: Vertex, b: Vertex) -> Edge:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class OverlapWindow:
    """A contiguous 1-based tile interval [start, end] of a host graph."""

    start: int
    end: int

    def __post_init__(self):
        if not 1 <= self.start <= self.end:
            raise ValueError(f"bad window [{self.start},{self.end}]")

    def __len__(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class SnakeGraph:
    directions: tuple[str, ...]
    weights: tuple[int, ...]
    origin: tuple[int, int] = (0, 0)

    def __post_init__(self):
        for d in self.directions:
            if d not in (RIGHT, UP):
                raise ValueError(f"invalid direction {d!r}")
        if len(self.weights) != len(self.directions) + 1:
            raise ValueError("weight count must equal tile count")

    @property
    def tile_count(self) -> int:
        return len(self.directions) + 1

    @cached_property
    def tile_positions(self) -> tuple[Vertex, ...]:
        x, y = self.origin
        out = [(x, y)]
        for d in self.directions:
            x, y = (x + 1, y) if d == RIGHT else (x, y + 1)
            out.append((x, y))
        return tuple(out)

    def tile_edges(self, k: int) -> dict[str, Edge]:
        """The four edges of tile k (1-based), keyed by local name."""
        x, y = self.tile_positions[k - 1]
        return {
            "S": _edge((x, y), (x + 1, y)),
            "E": _edge((x + 1, y), (x + 1, y + 1)),
            "N": _edge((x, y + 1), (x + 1, y + 1)),
            "W": _edge((x, y), (x, y + 1)),
        }

    def edge_name(self, k: int, e: Edge) -> str:
        for name, cand in self.tile_edges(k).items():
            if cand == e:
                return name
        raise KeyError(f"edge {e} does not belong to tile {k}")

    @cached_property
    def edges(self) -> frozenset[Edge]:
        out: set[Edge] = set()
        for k in range(1, self.tile_count + 1):
            out.update(self.tile_edges(k).values())
        return frozenset(out)

    @cached_property
    def vertices(self) -> frozenset[Vertex]:
        return frozenset(v for e in self.edges for v in e)

    def gluing_edge(self, k: int) -> Edge:
        """The edge shared by tiles k and k+1."""
        if not 1 <= k <= self.tile_count - 1:
            raise IndexError(f"no gluing at {k}")
        name = "E" if self.directions[k - 1] == RIGHT else "N"
        return self.tile_edges(k)[name]

    @cached_property
    def interior_edges(self) -> frozenset[Edge]:
        return frozenset(self.gluing_edge(k) for k in range(1, self.tile_count))

    @cached_property
    def boundary_edges(self) -> frozenset[Edge]:
        return self.edges - self.interior_edges

    def edge_tiles(self, e: Edge) -> tuple[int, ...]:
        return tuple(
            k
            for k in range(1, self.tile_count + 1)
            if e in self.tile_edges(k).values()
        )

    def triple_kind(self, j: int) -> str:
        """Classification of the triple (T_{j-1}, T_j, T_{j+1}), 2 <= j <= m-1."""
        if not 2 <= j <= self.tile_count - 1:
            raise IndexError(f"no triple centred at {j}")
        return "zigzag" if self.directions[j - 2] != self.directions[j - 1] else "straight"

    def to_json(self) -> dict:
        return {"directions": list(self.directions), "weights": list(self.weights)}

    def to_dot(self) -> str:
        lines = ["graph snake {", "  node [shape=point];"]
        for k in range(1, self.tile_count + 1):
            x, y = self.tile_positions[k - 1]
            lines.append(f'  subgraph cluster_{k} {{ label="{self.weights[k-1]}";')
            for name, ((x1, y1), (x2, y2)) in sorted(self.tile_edges(k).items()):
                lines.append(f'    "v{x1}_{y1}" -- "v{x2}_{y2}";')
            lines.append("  }")
        lines.append("}")
        return "\n".join(lines)


def build_snake(w: ArrowWord) -> SnakeGraph:
    """The snake graph of a word: one tile per position, weights from labels."""
    letters = w.letters
    dirs: list[str] = []
    for i, a in enumerate(letters):
        if i == 0:
            dirs.append(RIGHT if a == DIRECT else UP)
        elif a == letters[i - 1]:
            dirs.append(flip_direction(dirs[-1]))  # same run: zigzag
        else:
            dirs.append(dirs[-1])  # run boundary: straight
    weights = tuple(w.label(p) for p in range(1, w.positions + 1))
    return SnakeGraph(tuple(dirs), weights)


def arrow_function(g: SnakeGraph, sign: str) -> tuple[str, ...]:
    """Arrow values on consecutive tile pairs; sign "+" starts direct, "-" inverse.

    The value repeats across a zigzag triple and flips across a straight one.
    A single-tile graph has the empty arrow function.
    """
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    m = g.tile_count
    if m == 1:
        return ()
    values = [DIRECT if sign == "+" else INVERSE]
    for j in range(2, m):
        prev = values[-1]
        values.append(prev if g.triple_kind(j) == "zigzag" else flip(prev))
    return tuple(values)


def recover_word(g: SnakeGraph, sign: str) -> ArrowWord:
    """The word read off a snake graph; labels are the face weights."""
    return ArrowWord(arrow_function(g, sign), g.weights)


def canonical_sign(g: SnakeGraph) -> str:
    """The sign whose reading inverts build_snake: "+" iff the first gluing is RIGHT."""
    if g.tile_count == 1:
        return "+"
    return "+" if g.directions[0] == RIGHT else "-"


def canonical_word(g: SnakeGraph) -> ArrowWord:
    return recover_word(g, canonical_sign(g))


def restrict(g: SnakeGraph, win: OverlapWindow) -> SnakeGraph:
    """Sub-snake-graph on tiles start..end, keeping host coordinates.

    The returned graph's origin is the host position of tile ``start``, so
    its edges are literally a subset of the host's edges.
    """
    if win.end > g.tile_count:
        raise ValueError(f"window [{win.start},{win.end}] exceeds {g.tile_count} tiles")
    dirs = g.directions[win.start - 1 : win.end - 1]
    weights = g.weights[win.start - 1 : win.end]
    return SnakeGraph(dirs, weights, origin=g.tile_positions[win.start - 1])
