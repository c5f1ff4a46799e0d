"""Crossings and graftings of strings, their resolutions, and the matching
bijection between a pair of graphs and its resolution graphs.

Conventions the rest of the module leans on:

* Pieces of a decomposition carry their vertices; the empty piece has no
  vertices at all.  Concatenating labeled pieces always inserts a
  connector letter between their end positions, and stripping a maximal
  run of k letters from the end of a piece removes k+1 positions.  A
  piece stripped to nothing is the distinguished empty summand, whose
  "graph" has exactly one (empty) matching; this keeps the product
  counting identity exact.
* Every tile of a resolution graph is a copy of a position of one of the
  two input words.  The spliced images are required to preserve the
  multiset of enclosed positions (the dimension vector of the induced
  extension); pairs admitting no such splice map to the complementary
  images.  Splices assemble a head from one matching and a tail from the
  other, give the tail priority on conflicts, and complete forced
  vertices.
* Edge transport between graphs maps tile windows to tile windows.  The
  relabeling of edge names is forced by the direction sequences for
  windows of two or more tiles; single-tile windows leave a reflection
  choice that is calibrated once per instance against bijectivity.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product

from .matchings import (
    PerfectMatching,
    enclosed_tiles,
    enumerate_matchings,
    is_perfect_matching,
)
from .modules import matching_to_submodule
from .snake import Edge, SnakeGraph, build_snake
from .words import DIRECT, INVERSE, ArrowWord, concat, flip

# Local-name relabelings used when transporting matchings between graphs.
NAME_MAPS: dict[str, dict[str, str]] = {
    "id": {"N": "N", "E": "E", "S": "S", "W": "W"},
    "transpose": {"N": "E", "E": "N", "S": "W", "W": "S"},
    "rot180": {"N": "S", "S": "N", "E": "W", "W": "E"},
    "antitranspose": {"N": "W", "W": "N", "E": "S", "S": "E"},
    "flip_h": {"N": "S", "S": "N", "E": "E", "W": "W"},
    "flip_v": {"N": "N", "S": "S", "E": "W", "W": "E"},
}
_FORWARD_ORDER = ("id", "transpose", "flip_h", "flip_v", "rot180", "antitranspose")
_REVERSED_ORDER = ("antitranspose", "rot180", "transpose", "id", "flip_h", "flip_v")


class CalculusError(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    """Two labeled words overlapping in a shared segment.

    The overlap occupies positions [s, t] of w1 and [s2, t2] of w2 (w2 is
    stored in the orientation in which it matched; ``w2_inverted`` records
    whether that is the reverse of the word handed to find_crossings).
    Where the flanking letters exist they must be: direct before and
    inverse after the overlap in w1, inverse before and direct after in
    w2.  At each end at least one of the two words must provide its
    letter.
    """

    w1: ArrowWord
    w2: ArrowWord
    s: int
    t: int
    s2: int
    t2: int
    w2_inverted: bool = False

    def __post_init__(self):
        n1, n2 = self.w1.positions, self.w2.positions
        if not (1 <= self.s <= self.t <= n1 and 1 <= self.s2 <= self.t2 <= n2):
            raise CalculusError("overlap window out of range")
        if self.t - self.s != self.t2 - self.s2:
            raise CalculusError("overlap windows differ in length")
        m1 = self.w1.slice(self.s, self.t)
        m2 = self.w2.slice(self.s2, self.t2)
        if m1.letters != m2.letters or (
            self.w1.is_labeled and self.w2.is_labeled and m1.labels != m2.labels
        ):
            raise CalculusError("overlap segments disagree")
        if self.s >= 2 and self.w1.letter(self.s - 1) != DIRECT:
            raise CalculusError("letter before the overlap in w1 must be direct")
        if self.t <= n1 - 1 and self.w1.letter(self.t) != INVERSE:
            raise CalculusError("letter after the overlap in w1 must be inverse")
        if self.s2 >= 2 and self.w2.letter(self.s2 - 1) != INVERSE:
            raise CalculusError("letter before the overlap in w2 must be inverse")
        if self.t2 <= n2 - 1 and self.w2.letter(self.t2) != DIRECT:
            raise CalculusError("letter after the overlap in w2 must be direct")
        if self.s == 1 and self.s2 == 1:
            raise CalculusError("overlap may not start both words")
        if self.t == n1 and self.t2 == n2:
            raise CalculusError("overlap may not end both words")

    @property
    def overlap(self) -> ArrowWord:
        return self.w1.slice(self.s, self.t)

    @property
    def u1(self) -> ArrowWord | None:
        return self.w1.slice(1, self.s - 1) if self.s >= 2 else None

    @property
    def v1(self) -> ArrowWord | None:
        n1 = self.w1.positions
        return self.w1.slice(self.t + 1, n1) if self.t < n1 else None

    @property
    def u2(self) -> ArrowWord | None:
        return self.w2.slice(1, self.s2 - 1) if self.s2 >= 2 else None

    @property
    def v2(self) -> ArrowWord | None:
        n2 = self.w2.positions
        return self.w2.slice(self.t2 + 1, n2) if self.t2 < n2 else None


@dataclass(frozen=True)
class Grafting:
    """w2 grafted onto w1 = u1 a v1 at the letter a (``a_pos`` indexes the
    letter; None grafts at the end of w1, with the connector e free)."""

    w1: ArrowWord
    w2: ArrowWord
    a_pos: int | None
    e: str

    def __post_init__(self):
        if self.e not in (DIRECT, INVERSE):
            raise CalculusError(f"invalid connector {self.e!r}")
        if self.a_pos is not None:
            if not 1 <= self.a_pos <= len(self.w1.letters):
                raise CalculusError("marked letter out of range")
            if self.e != flip(self.w1.letter(self.a_pos)):
                raise CalculusError("connector must be the complement of the marked letter")

    @property
    def a(self) -> str | None:
        return None if self.a_pos is None else self.w1.letter(self.a_pos)

    @property
    def u1(self) -> ArrowWord:
        end = self.w1.positions if self.a_pos is None else self.a_pos
        return self.w1.slice(1, end)

    @property
    def v1(self) -> ArrowWord | None:
        if self.a_pos is None:
            return None
        return self.w1.slice(self.a_pos + 1, self.w1.positions)


@dataclass(frozen=True)
class Resolution:
    """The four resolution strings; w4/w5/w6 may be the empty summand (None)."""

    w3: ArrowWord
    w4: ArrowWord | None
    w5: ArrowWord | None
    w6: ArrowWord | None


def strip_prefix(w: ArrowWord | None, letter: str) -> ArrowWord | None:
    """Drop the maximal prefix run of ``letter`` plus one more position."""
    if w is None:
        return None
    k = 0
    while k < len(w.letters) and w.letters[k] == letter:
        k += 1
    if k + 1 >= w.positions:
        return None
    return w.slice(k + 2, w.positions)


def strip_suffix(w: ArrowWord | None, letter: str) -> ArrowWord | None:
    """Drop the maximal suffix run of ``letter`` plus one more position."""
    if w is None:
        return None
    k = 0
    while k < len(w.letters) and w.letters[-1 - k] == letter:
        k += 1
    if k + 1 >= w.positions:
        return None
    return w.slice(1, w.positions - k - 1)


def _join(left: ArrowWord | None, letter: str, right: ArrowWord | None) -> ArrowWord:
    if left is None and right is None:
        raise CalculusError("cannot join two empty pieces")
    if left is None:
        return right
    if right is None:
        return left
    return concat(left, letter, right)


def find_crossings(w1: ArrowWord, w2: ArrowWord) -> tuple[Crossing, ...]:
    """All crossings of w1 with w2, scanning w2 in both orientations."""
    out: list[Crossing] = []
    seen: set = set()
    for inverted, cand in ((False, w2), (True, w2.inverse())):
        n1, n2 = w1.positions, cand.positions
        for s in range(1, n1 + 1):
            for t in range(s, n1 + 1):
                for s2 in range(1, n2 + 1):
                    t2 = s2 + (t - s)
                    if t2 > n2:
                        continue
                    try:
                        x = Crossing(w1, cand, s, t, s2, t2, inverted)
                    except CalculusError:
                        continue
                    key = (cand.letters, cand.labels, s, t, s2, t2)
                    if key not in seen:
                        seen.add(key)
                        out.append(x)
    return tuple(out)


def resolve_crossing(x: Crossing) -> Resolution:
    u1, v1, u2, v2, m = x.u1, x.v1, x.u2, x.v2, x.overlap
    w3 = _join(_join(u1, DIRECT, m), DIRECT, v2)
    w4 = _join(_join(u2, INVERSE, m), INVERSE, v1)
    if u1 is not None and u2 is not None:
        w5 = concat(u1, INVERSE, u2.inverse())
    elif u1 is None and u2 is not None:
        w5 = strip_suffix(u2, DIRECT)
    elif u2 is None and u1 is not None:
        w5 = strip_suffix(u1, INVERSE)
    else:
        w5 = None
    if v1 is not None and v2 is not None:
        w6 = concat(v1.inverse(), INVERSE, v2)
    elif v1 is None and v2 is not None:
        w6 = strip_prefix(v2, INVERSE)
    elif v2 is None and v1 is not None:
        w6 = strip_prefix(v1, DIRECT)
    else:
        w6 = None
    return Resolution(w3, w4, w5, w6)


def resolve_grafting(g: Grafting) -> Resolution:
    u1, v1, a, e = g.u1, g.v1, g.a, g.e
    w3 = concat(u1, e, g.w2)
    w4 = strip_prefix(v1, flip(e))
    w5 = strip_suffix(u1, flip(e))
    if a is not None:
        w6 = concat(v1.inverse(), a, g.w2)
    else:
        w6 = strip_prefix(g.w2, flip(e))
    return Resolution(w3, w4, w5, w6)


# ---------------------------------------------------------------------------
# edge transport


def _window_dirs(g: SnakeGraph, lo: int, hi: int) -> tuple[str, ...]:
    return g.directions[lo - 1 : hi - 1]


def _flip_dirs(dirs) -> tuple[str, ...]:
    from .snake import flip_direction

    return tuple(flip_direction(d) for d in dirs)


@dataclass
class Transport:
    """An edge map from a tile window of one graph into another."""

    src: SnakeGraph
    s_lo: int
    s_hi: int
    dst: SnakeGraph
    d_lo: int
    d_hi: int
    reverse: bool
    candidates: tuple[str, ...]
    choice: int = 0

    @staticmethod
    def build(src, s_lo, s_hi, dst, d_lo, d_hi, reverse=False,
              src_junction: str | None = None, dst_junction: str | None = None) -> "Transport":
        if s_hi - s_lo != d_hi - d_lo:
            raise CalculusError("transport windows differ in length")
        if s_hi > s_lo:
            sdirs = _window_dirs(src, s_lo, s_hi)
            ddirs = _window_dirs(dst, d_lo, d_hi)
            if reverse:
                sdirs = tuple(reversed(sdirs))
            if sdirs == ddirs:
                names = ("rot180",) if reverse else ("id",)
            elif _flip_dirs(sdirs) == ddirs:
                names = ("antitranspose",) if reverse else ("transpose",)
            else:
                raise CalculusError("windows are not alignable")
        else:
            # Single-tile windows: the geometry does not pin the reflection.
            # Junction-respecting maps come first; calibration settles the rest.
            order = list(_REVERSED_ORDER if reverse else _FORWARD_ORDER)
            if src_junction is not None and dst_junction is not None:
                order.sort(key=lambda n: NAME_MAPS[n][src_junction] != dst_junction)
            names = tuple(order)
        return Transport(src, s_lo, s_hi, dst, d_lo, d_hi, reverse, names)

    @property
    def ambiguous(self) -> bool:
        return len(self.candidates) > 1

    def edge_map(self) -> dict[Edge, Edge]:
        name_map = NAME_MAPS[self.candidates[self.choice]]
        out: dict[Edge, Edge] = {}
        for off in range(self.s_hi - self.s_lo + 1):
            sk = self.s_lo + off
            dk = self.d_hi - off if self.reverse else self.d_lo + off
            for name, e in self.src.tile_edges(sk).items():
                target = self.dst.tile_edges(dk)[name_map[name]]
                if e in out and out[e] != target:
                    raise CalculusError("inconsistent edge transport")
                out[e] = target
        return out

    def apply(self, edges) -> frozenset[Edge]:
        emap = self.edge_map()
        window = set()
        for k in range(self.s_lo, self.s_hi + 1):
            window.update(self.src.tile_edges(k).values())
        return frozenset(emap[e] for e in edges if e in window)


def _window_edges(g: SnakeGraph, lo: int, hi: int) -> frozenset[Edge]:
    out: set[Edge] = set()
    for k in range(lo, hi + 1):
        out.update(g.tile_edges(k).values())
    return frozenset(out)


def _restrict_raw(p_edges, g: SnakeGraph, lo: int, hi: int) -> frozenset[Edge]:
    return frozenset(p_edges) & _window_edges(g, lo, hi)


def _assemble(parts: list[frozenset], junctions: set[Edge]) -> frozenset[Edge]:
    """Union of parts; a junction edge survives only if both sides carry it."""
    out: set[Edge] = set()
    union: set[Edge] = set().union(*parts) if parts else set()
    for e in union:
        if e in junctions:
            if sum(e in part for part in parts) == 2:
                out.add(e)
        else:
            out.add(e)
    return frozenset(out)


def _assemble_forced(g: SnakeGraph, head, tail) -> frozenset[Edge] | None:
    """Tail edges win conflicts with head edges; forced vertices are then
    completed.  Returns None when no perfect matching results."""
    cover: dict = {}
    edges: set[Edge] = set()
    for e in tail:
        edges.add(e)
        cover[e[0]] = cover.get(e[0], 0) + 1
        cover[e[1]] = cover.get(e[1], 0) + 1
    if any(v > 1 for v in cover.values()):
        return None
    for e in head:
        if e in edges:
            continue
        if cover.get(e[0]) or cover.get(e[1]):
            continue
        edges.add(e)
        cover[e[0]] = 1
        cover[e[1]] = 1
    incident: dict = {}
    for e in g.edges:
        for v in e:
            incident.setdefault(v, []).append(e)
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if cover.get(v):
                continue
            cands = [e for e in incident[v] if not cover.get(e[0] if e[1] == v else e[1])]
            if not cands:
                return None
            if len(cands) == 1:
                e = cands[0]
                edges.add(e)
                cover[e[0]] = cover.get(e[0], 0) + 1
                cover[e[1]] = cover.get(e[1], 0) + 1
                changed = True
    result = frozenset(edges)
    return result if is_perfect_matching(g, result) else None


@dataclass
class PhiImage:
    kind: str  # "34" or "56"
    first: PerfectMatching | None
    second: PerfectMatching | None
    route: dict
    error: str | None = None


def _graph_of(w: ArrowWord | None) -> SnakeGraph | None:
    return None if w is None else build_snake(w)


def matchings_of(g: SnakeGraph | None):
    """Matchings of a possibly-empty graph; the empty graph has one, None."""
    if g is None:
        return (None,)
    return enumerate_matchings(g)


def match_count(g: SnakeGraph | None) -> int:
    return 1 if g is None else len(enumerate_matchings(g))


class PhiMachine:
    """The matching bijection for one crossing or grafting instance.

    A pair (P1, P2) is spliced at the least threshold producing valid
    matchings that preserve the multiset of enclosed positions; pairs with
    no such splice map to the complementary images.  Orientation choices
    left open by single-tile transports are calibrated once per instance:
    the first configuration under which the whole map is a bijection is
    frozen and used throughout.
    """

    def __init__(self, instance):
        if isinstance(instance, Crossing):
            self.kind = "crossing"
            self.crossing = instance
            self.grafting = None
        elif isinstance(instance, Grafting):
            self.kind = "grafting"
            self.grafting = instance
            self.crossing = None
        else:
            raise TypeError("expected a Crossing or Grafting")
        self.resolution = (
            resolve_crossing(instance) if self.kind == "crossing" else resolve_grafting(instance)
        )
        self.g1 = build_snake(instance.w1)
        self.g2 = build_snake(instance.w2)
        self.g3 = _graph_of(self.resolution.w3)
        self.g4 = _graph_of(self.resolution.w4)
        self.g5 = _graph_of(self.resolution.w5)
        self.g6 = _graph_of(self.resolution.w6)
        self._transports: list[Transport] = []
        self._identities = self._build_identities()
        if self.kind == "crossing":
            self._build_crossing_transports()
        else:
            self._build_grafting_transports()
        self._calibrated = False

    # -- tile identities -----------------------------------------------------

    def _build_identities(self) -> dict:
        """Map each graph's tiles to the word position they copy."""
        ids: dict = {}
        ids["g1"] = {k: ("a", k) for k in range(1, self.g1.tile_count + 1)}
        if self.kind == "crossing":
            x = self.crossing
            d1, d2 = self.g1.tile_count, self.g2.tile_count
            ids["g2"] = {
                k: ("a", x.s + k - x.s2) if x.s2 <= k <= x.t2 else ("b", k)
                for k in range(1, d2 + 1)
            }
            ids["g3"] = {
                k: ("a", k) if k <= x.t else ("b", x.t2 + (k - x.t))
                for k in range(1, self.g3.tile_count + 1)
            }
            g4_ids = {}
            for k in range(1, self.g4.tile_count + 1):
                if k < x.s2:
                    g4_ids[k] = ("b", k)
                elif k <= x.t2:
                    g4_ids[k] = ("a", x.s + k - x.s2)
                else:
                    g4_ids[k] = ("a", x.t + (k - x.t2))
            ids["g4"] = g4_ids
            if self.g5 is not None:
                n5 = self.g5.tile_count
                if x.s >= 2 and x.s2 >= 2:
                    ids["g5"] = {
                        k: ("a", k) if k <= x.s - 1 else ("b", x.s - 1 + x.s2 - k)
                        for k in range(1, n5 + 1)
                    }
                elif x.s2 >= 2:  # u1 empty: prefix of w2
                    ids["g5"] = {k: ("b", k) for k in range(1, n5 + 1)}
                else:  # u2 empty: prefix of w1
                    ids["g5"] = {k: ("a", k) for k in range(1, n5 + 1)}
            if self.g6 is not None:
                n6 = self.g6.tile_count
                if x.t < d1 and x.t2 < d2:
                    len1 = d1 - x.t
                    ids["g6"] = {
                        k: ("a", d1 + 1 - k) if k <= len1 else ("b", x.t2 + (k - len1))
                        for k in range(1, n6 + 1)
                    }
                elif x.t2 < d2:  # v1 empty: stripped suffix of w2
                    dropped = (d2 - x.t2) - n6
                    ids["g6"] = {k: ("b", x.t2 + dropped + k) for k in range(1, n6 + 1)}
                else:  # v2 empty: stripped suffix of w1
                    dropped = (d1 - x.t) - n6
                    ids["g6"] = {k: ("a", x.t + dropped + k) for k in range(1, n6 + 1)}
        else:
            gr = self.grafting
            d1, d2 = self.g1.tile_count, self.g2.tile_count
            p = gr.u1.positions
            ids["g2"] = {k: ("b", k) for k in range(1, d2 + 1)}
            ids["g3"] = {
                k: ("a", k) if k <= p else ("b", k - p)
                for k in range(1, self.g3.tile_count + 1)
            }
            if self.g4 is not None:
                n4 = self.g4.tile_count
                dropped = (d1 - p) - n4
                ids["g4"] = {k: ("a", p + dropped + k) for k in range(1, n4 + 1)}
            if self.g5 is not None:
                ids["g5"] = {k: ("a", k) for k in range(1, self.g5.tile_count + 1)}
            if self.g6 is not None:
                n6 = self.g6.tile_count
                if gr.a is not None:
                    len1 = d1 - p
                    ids["g6"] = {
                        k: ("a", d1 + 1 - k) if k <= len1 else ("b", k - len1)
                        for k in range(1, n6 + 1)
                    }
                else:
                    dropped = d2 - n6
                    ids["g6"] = {k: ("b", dropped + k) for k in range(1, n6 + 1)}
        return ids

    def _idims(self, which: str, g: SnakeGraph, p: PerfectMatching) -> Counter:
        tiles = enclosed_tiles(g, p).tiles
        return Counter(self._identities[which][k] for k in tiles)

    # -- construction of the fixed transports ---------------------------------

    def _track(self, t: Transport) -> Transport:
        self._transports.append(t)
        return t

    def _build_crossing_transports(self):
        x = self.crossing
        d1, d2 = self.g1.tile_count, self.g2.tile_count
        s, t, s2, t2 = x.s, x.t, x.s2, x.t2
        d3 = self.g3.tile_count
        d4 = self.g4.tile_count
        # splice thresholds; t+1 exists when both words continue past the overlap
        self._top = t + 1 if (t < d1 and t2 < d2) else t
        self._tail_to_g3 = {}
        self._tail_to_g4 = {}
        for i in range(s, self._top + 1):
            i2 = i - s + s2
            self._tail_to_g3[i] = self._track(
                Transport.build(self.g2, i2, d2, self.g3, i, d3)
            )
            self._tail_to_g4[i] = self._track(
                Transport.build(self.g1, i, d1, self.g4, i2, d4)
            )
        self._g5_parts, self._g5_junction = self._complement_parts("u", self.g5)
        self._g6_parts, self._g6_junction = self._complement_parts("v", self.g6)

    def _complement_parts(self, side: str, dst: SnakeGraph | None):
        """Transports feeding the u- or v-side complementary graph."""
        x = self.crossing
        d1, d2 = self.g1.tile_count, self.g2.tile_count
        if dst is None:
            return [], None
        if side == "u":
            have1, have2 = x.s >= 2, x.s2 >= 2
            if have1 and have2:
                len1 = x.s - 1
                part1 = ("raw1", 1, x.s - 1)
                junc_src = self.g2.edge_name(x.s2 - 1, self.g2.gluing_edge(x.s2 - 1))
                junc_edge = dst.gluing_edge(len1)
                junc_dst = dst.edge_name(len1 + 1, junc_edge)
                part2 = self._track(
                    Transport.build(
                        self.g2, 1, x.s2 - 1, dst, len1 + 1, dst.tile_count,
                        reverse=True, src_junction=junc_src, dst_junction=junc_dst,
                    )
                )
                return [part1, part2], junc_edge
            if have2:  # u1 empty: dst is a prefix of w2, same coordinates
                return [("raw2", 1, dst.tile_count)], None
            return [("raw1", 1, dst.tile_count)], None
        have1, have2 = x.t < d1, x.t2 < d2
        if have1 and have2:
            len1 = d1 - x.t
            junc_src1 = self.g1.edge_name(x.t + 1, self.g1.gluing_edge(x.t))
            junc_edge = dst.gluing_edge(len1)
            junc_dst1 = dst.edge_name(len1, junc_edge)
            part1 = self._track(
                Transport.build(
                    self.g1, x.t + 1, d1, dst, 1, len1,
                    reverse=True, src_junction=junc_src1, dst_junction=junc_dst1,
                )
            )
            part2 = self._track(
                Transport.build(self.g2, x.t2 + 1, d2, dst, len1 + 1, dst.tile_count)
            )
            return [part1, part2], junc_edge
        if have2:  # v1 empty: dst is a stripped suffix of w2
            start = d2 - dst.tile_count + 1
            junc_src = self.g2.edge_name(start, self.g2.gluing_edge(start - 1))
            part = self._track(
                Transport.build(self.g2, start, d2, dst, 1, dst.tile_count,
                                src_junction=junc_src)
            )
            return [part], None
        start = d1 - dst.tile_count + 1
        junc_src = self.g1.edge_name(start, self.g1.gluing_edge(start - 1))
        part = self._track(
            Transport.build(self.g1, start, d1, dst, 1, dst.tile_count,
                            src_junction=junc_src)
        )
        return [part], None

    def _build_grafting_transports(self):
        gr = self.grafting
        d1, d2 = self.g1.tile_count, self.g2.tile_count
        p = gr.u1.positions
        self._g3_junction = self.g3.gluing_edge(p)
        self._g3_prefix = p
        self._g3_w2 = self._track(
            Transport.build(self.g2, 1, d2, self.g3, p + 1, self.g3.tile_count)
        )
        self._g4_part = None
        if self.g4 is not None:
            start = d1 - self.g4.tile_count + 1
            junc_src = self.g1.edge_name(start, self.g1.gluing_edge(start - 1))
            self._g4_part = self._track(
                Transport.build(self.g1, start, d1, self.g4, 1, self.g4.tile_count,
                                src_junction=junc_src)
            )
        self._g6_parts = []
        self._g6_junction = None
        if self.g6 is not None:
            if gr.a is not None:
                len1 = d1 - p
                junc_src1 = self.g1.edge_name(p + 1, self.g1.gluing_edge(p))
                junc_edge = self.g6.gluing_edge(len1)
                junc_dst1 = self.g6.edge_name(len1, junc_edge)
                part1 = self._track(
                    Transport.build(self.g1, p + 1, d1, self.g6, 1, len1,
                                    reverse=True, src_junction=junc_src1,
                                    dst_junction=junc_dst1)
                )
                part2 = self._track(
                    Transport.build(self.g2, 1, d2, self.g6, len1 + 1,
                                    self.g6.tile_count)
                )
                self._g6_parts = [part1, part2]
                self._g6_junction = junc_edge
            else:
                start = d2 - self.g6.tile_count + 1
                junc_src = self.g2.edge_name(start, self.g2.gluing_edge(start - 1))
                part = self._track(
                    Transport.build(self.g2, start, d2, self.g6, 1,
                                    self.g6.tile_count, src_junction=junc_src)
                )
                self._g6_parts = [part]

    # -- calibration -----------------------------------------------------------

    def calibrate(self):
        """Freeze the first orientation configuration under which the map is
        total and injective over all pairs; no-op when nothing is ambiguous."""
        if self._calibrated:
            return
        slots = [t for t in self._transports if t.ambiguous]
        if not slots:
            self._calibrated = True
            return
        pairs = [
            (p1, p2)
            for p1 in enumerate_matchings(self.g1)
            for p2 in enumerate_matchings(self.g2)
        ]
        best = None
        for combo in product(*[range(len(t.candidates)) for t in slots]):
            for slot, c in zip(slots, combo):
                slot.choice = c
            failures = 0
            images = set()
            for p1, p2 in pairs:
                img = self._phi_once(p1, p2)
                if img.error is not None:
                    failures += 1
                    continue
                key = (
                    img.kind,
                    img.first.edges if img.first else None,
                    img.second.edges if img.second else None,
                )
                if key in images:
                    failures += 1
                images.add(key)
            if failures == 0:
                self._calibrated = True
                return
            if best is None or failures < best[0]:
                best = (failures, combo)
        if best is not None:  # keep the least-bad; verification reports the rest
            for slot, c in zip(slots, best[1]):
                slot.choice = c
        self._calibrated = True

    # -- the map ----------------------------------------------------------------

    def phi(self, p1: PerfectMatching, p2: PerfectMatching) -> PhiImage:
        self.calibrate()
        return self._phi_once(p1, p2)

    def _phi_once(self, p1, p2) -> PhiImage:
        if self.kind == "crossing":
            return self._phi_crossing(p1, p2)
        return self._phi_grafting(p1, p2)

    def _named_edges(self, g: SnakeGraph, k: int, names) -> set[Edge]:
        te = g.tile_edges(k)
        return {te[n] for n in names}

    # crossing ------------------------------------------------------------------

    def _splice_parts(self, p1, p2, kind: str, j: int):
        x = self.crossing
        j2 = j - x.s + x.s2
        if kind == "star":
            a = _restrict_raw(p1.edges, self.g1, 1, j - 1) if j >= 2 else frozenset()
            if j >= 2:
                a = a - self._named_edges(self.g1, j - 1, ("N", "E"))
            b = self._tail_to_g3[j].apply(p2.edges)
            c = (
                _restrict_raw(p2.edges, self.g2, 1, j2 - 1)
                if j2 >= 2
                else frozenset()
            )
            d = self._tail_to_g4[j].apply(p1.edges)
            return (a, b), (c, d)
        a = _restrict_raw(p1.edges, self.g1, 1, j) - self._named_edges(
            self.g1, j, ("N", "E")
        )
        b_src = _restrict_raw(p2.edges, self.g2, j2, self.g2.tile_count)
        b_src = b_src - self._named_edges(self.g2, j2, ("S", "W"))
        b = self._tail_to_g3[j].apply(b_src)
        c = _restrict_raw(p2.edges, self.g2, 1, j2) - self._named_edges(
            self.g2, j2, ("N", "E")
        )
        d_src = _restrict_raw(p1.edges, self.g1, j, self.g1.tile_count)
        d_src = d_src - self._named_edges(self.g1, j, ("S", "W"))
        d = self._tail_to_g4[j].apply(d_src)
        return (a, b), (c, d)

    def _phi_crossing(self, p1, p2) -> PhiImage:
        x = self.crossing
        target = self._idims("g1", self.g1, p1) + self._idims("g2", self.g2, p2)
        for j in range(x.s, self._top + 1):
            for kind in ("star", "starstar"):
                (a, b), (c, d) = self._splice_parts(p1, p2, kind, j)
                f = _assemble_forced(self.g3, a, b)
                s_ = _assemble_forced(self.g4, c, d)
                if f is None or s_ is None:
                    continue
                pm3 = PerfectMatching(self.g3, f)
                pm4 = PerfectMatching(self.g4, s_)
                if (
                    self._idims("g3", self.g3, pm3) + self._idims("g4", self.g4, pm4)
                    != target
                ):
                    continue
                return PhiImage("34", pm3, pm4, {"route": kind, "threshold": j})
        return self._image_56(p1, p2, {"route": "complement"})

    def _image_56(self, p1, p2, info) -> PhiImage:
        first = self._side_56(p1, p2, self.g5, self._g5_parts, self._g5_junction, "u")
        if isinstance(first, str):
            return PhiImage("56", None, None, info, error=first)
        second = self._side_56(p1, p2, self.g6, self._g6_parts, self._g6_junction, "v")
        if isinstance(second, str):
            return PhiImage("56", None, None, info, error=second)
        return PhiImage("56", first, second, info)

    def _side_56(self, p1, p2, dst, parts, junction, side):
        if dst is None:
            return None
        edge_sets = []
        for part in parts:
            if isinstance(part, tuple):
                which, lo, hi = part
                src_p = p1 if which == "raw1" else p2
                edge_sets.append(_restrict_raw(src_p.edges, src_p.graph, lo, hi))
            else:
                src_p = p2 if part.src is self.g2 else p1
                window = _restrict_raw(src_p.edges, part.src, part.s_lo, part.s_hi)
                edge_sets.append(part.apply(window))
        junctions = {junction} if junction is not None else set()
        edges = _assemble(edge_sets, junctions)
        if not is_perfect_matching(dst, edges):
            return f"invalid {side}-side complement image"
        return PerfectMatching(dst, edges)

    # grafting -------------------------------------------------------------------

    def _grafting_34(self, p1, p2):
        gr = self.grafting
        p = gr.u1.positions
        part1 = _restrict_raw(p1.edges, self.g1, 1, p)
        part2 = self._g3_w2.apply(p2.edges)
        first = _assemble([part1, part2], {self._g3_junction})
        if not is_perfect_matching(self.g3, first):
            return None
        if self.g4 is None:
            second = None
        else:
            src = _restrict_raw(
                p1.edges, self.g1,
                self.g1.tile_count - self.g4.tile_count + 1, self.g1.tile_count,
            )
            second = self._g4_part.apply(src)
            if not is_perfect_matching(self.g4, second):
                return None
        pm3 = PerfectMatching(self.g3, first)
        pm4 = PerfectMatching(self.g4, second) if second is not None else None
        target = self._idims("g1", self.g1, p1) + self._idims("g2", self.g2, p2)
        got = self._idims("g3", self.g3, pm3)
        if pm4 is not None:
            got = got + self._idims("g4", self.g4, pm4)
        if got != target:
            return None
        return pm3, pm4

    def _grafting_56(self, p1, p2):
        if self.g5 is None:
            pm5 = None
        else:
            edges = _restrict_raw(p1.edges, self.g1, 1, self.g5.tile_count)
            if not is_perfect_matching(self.g5, edges):
                return None
            pm5 = PerfectMatching(self.g5, edges)
        if self.g6 is None:
            pm6 = None
        else:
            edge_sets = []
            for part in self._g6_parts:
                src_p = p2 if part.src is self.g2 else p1
                window = _restrict_raw(src_p.edges, part.src, part.s_lo, part.s_hi)
                edge_sets.append(part.apply(window))
            junctions = {self._g6_junction} if self._g6_junction is not None else set()
            edges = _assemble(edge_sets, junctions)
            if not is_perfect_matching(self.g6, edges):
                return None
            pm6 = PerfectMatching(self.g6, edges)
        return pm5, pm6

    def _phi_grafting(self, p1, p2) -> PhiImage:
        img34 = self._grafting_34(p1, p2)
        if img34 is not None:
            return PhiImage("34", img34[0], img34[1], {"route": "splice"})
        img56 = self._grafting_56(p1, p2)
        if img56 is not None:
            return PhiImage("56", img56[0], img56[1], {"route": "complement"})
        return PhiImage("56", None, None, {"route": "none"}, error="no valid image")

    # verification -----------------------------------------------------------------

    def counts(self) -> dict:
        return {
            "g1": match_count(self.g1),
            "g2": match_count(self.g2),
            "g3": match_count(self.g3),
            "g4": match_count(self.g4),
            "g5": match_count(self.g5),
            "g6": match_count(self.g6),
        }

    def verify(self) -> dict:
        """Exhaustive totality/injectivity/counting check over all pairs."""
        self.calibrate()
        c = self.counts()
        lhs = c["g1"] * c["g2"]
        rhs = c["g3"] * c["g4"] + c["g5"] * c["g6"]
        report: dict = {
            "kind": self.kind,
            "words": {
                "w1": self._word(1).render(),
                "w2": self._word(2).render(),
                "w3": _render_opt(self.resolution.w3),
                "w4": _render_opt(self.resolution.w4),
                "w5": _render_opt(self.resolution.w5),
                "w6": _render_opt(self.resolution.w6),
            },
            "counts": c,
            "count_identity": {"lhs": lhs, "rhs": rhs, "ok": lhs == rhs},
            "failures": [],
            "routes": {"34": 0, "56": 0},
        }
        images: dict = {}
        ext_checked = 0
        for p1 in enumerate_matchings(self.g1):
            for p2 in enumerate_matchings(self.g2):
                img = self._phi_once(p1, p2)
                if img.error is not None:
                    report["failures"].append(
                        {"check": "phi-totality", "pair": _pair_id(p1, p2),
                         "detail": img.error}
                    )
                    continue
                report["routes"][img.kind] += 1
                key = (
                    img.kind,
                    img.first.edges if img.first else None,
                    img.second.edges if img.second else None,
                )
                if key in images:
                    report["failures"].append(
                        {"check": "phi-injectivity", "pair": _pair_id(p1, p2),
                         "collides_with": images[key]}
                    )
                else:
                    images[key] = _pair_id(p1, p2)
                if img.kind == "34":
                    err = extension_dimension_check(self, p1, p2, img)
                    ext_checked += 1
                    if err is not None:
                        report["failures"].append(
                            {"check": "extension-dimension",
                             "pair": _pair_id(p1, p2), "detail": err}
                        )
        if not report["count_identity"]["ok"]:
            report["failures"].append(
                {"check": "matching-count-identity", "detail": f"{lhs} != {rhs}"}
            )
        report["extension_checks"] = ext_checked
        report["ok"] = not report["failures"]
        return report

    def _word(self, which: int) -> ArrowWord:
        inst = self.crossing if self.kind == "crossing" else self.grafting
        return inst.w1 if which == 1 else inst.w2


def _render_opt(w: ArrowWord | None) -> str:
    return "(empty)" if w is None else w.render()


def _pair_id(p1, p2) -> list:
    return [p1.to_json(), p2.to_json()]


def phi(instance, p1: PerfectMatching, p2: PerfectMatching) -> PhiImage:
    """One-shot wrapper building a PhiMachine for a crossing or grafting."""
    return PhiMachine(instance).phi(p1, p2)


def extension_dimension_check(machine: PhiMachine, p1, p2, img: PhiImage | None = None):
    """For a pair routed to the spliced images: dimension vectors must add up.

    Returns None on success, else a description of the mismatch.
    """
    if img is None:
        img = machine.phi(p1, p2)
    if img.kind != "34" or img.error is not None:
        return "pair is not routed to the spliced images"
    lhs = Counter()
    lhs.update(matching_to_submodule(machine.g1, p1).dimension_vector())
    lhs.update(matching_to_submodule(machine.g2, p2).dimension_vector())
    rhs = Counter()
    if img.first is not None:
        rhs.update(matching_to_submodule(machine.g3, img.first).dimension_vector())
    if img.second is not None:
        rhs.update(matching_to_submodule(machine.g4, img.second).dimension_vector())
    if lhs != rhs:
        return f"{dict(lhs)} != {dict(rhs)}"
    return None
