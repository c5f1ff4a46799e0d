"""Finite labeled lattices given by cover relations, and finite posets.

Lattices are stored by their covers only; order, meets and joins are
derived by closure.  Cover labels are small integers (tile positions in
the applications here) and the labels on the covers leaving any node are
pairwise distinct, which makes labeled isomorphism a forced matching.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations


class LatticeError(ValueError):
    pass


def _sort_key(x):
    if isinstance(x, frozenset):
        return (0, len(x), tuple(sorted(_sort_key(v) for v in x)))
    if hasattr(x, "sort_key"):
        return (1, x.sort_key())
    if isinstance(x, bool):
        return (2, int(x))
    if isinstance(x, (int, float)):
        return (2, x)
    if isinstance(x, str):
        return (3, x)
    if isinstance(x, tuple):
        return (4, tuple(_sort_key(v) for v in x))
    return (5, repr(x))


class CoverLattice:
    """A finite graded lattice: hashable nodes plus labeled cover relations."""

    def __init__(self, nodes, covers):
        self.nodes = tuple(nodes)
        self.covers = tuple(covers)
        self._index = {x: i for i, x in enumerate(self.nodes)}
        if len(self._index) != len(self.nodes):
            raise LatticeError("duplicate nodes")
        self._up: dict = {x: [] for x in self.nodes}
        self._down: dict = {x: [] for x in self.nodes}
        for lo, hi, lab in self.covers:
            if lo not in self._index or hi not in self._index:
                raise LatticeError("cover endpoint not a node")
            self._up[lo].append((hi, lab))
            self._down[hi].append((lo, lab))
        bottoms = [x for x in self.nodes if not self._down[x]]
        tops = [x for x in self.nodes if not self._up[x]]
        if len(bottoms) != 1 or len(tops) != 1:
            raise LatticeError("lattice must have a unique bottom and top")
        self.bottom = bottoms[0]
        self.top = tops[0]
        self.rank = self._compute_ranks()

    def _compute_ranks(self) -> dict:
        rank = {self.bottom: 0}
        frontier = [self.bottom]
        while frontier:
            nxt = []
            for x in frontier:
                for y, _ in self._up[x]:
                    r = rank[x] + 1
                    if y in rank:
                        if rank[y] != r:
                            raise LatticeError("cover relations are not graded")
                    else:
                        rank[y] = r
                        nxt.append(y)
            frontier = nxt
        if len(rank) != len(self.nodes):
            raise LatticeError("cover digraph is not connected from the bottom")
        return rank

    def __len__(self) -> int:
        return len(self.nodes)

    def upper_covers(self, x):
        return tuple(self._up[x])

    def lower_covers(self, x):
        return tuple(self._down[x])

    @cached_property
    def down_sets(self) -> dict:
        down = {}
        for x in sorted(self.nodes, key=lambda n: self.rank[n]):
            s = {x}
            for y, _ in self._down[x]:
                s |= down[y]
            down[x] = frozenset(s)
        return down

    @cached_property
    def up_sets(self) -> dict:
        up = {}
        for x in sorted(self.nodes, key=lambda n: -self.rank[n]):
            s = {x}
            for y, _ in self._up[x]:
                s |= up[y]
            up[x] = frozenset(s)
        return up

    def leq(self, x, y) -> bool:
        return x in self.down_sets[y]

    def meet(self, x, y):
        cache = self.__dict__.setdefault("_meet_cache", {})
        key = (x, y)
        if key not in cache:
            common = self.down_sets[x] & self.down_sets[y]
            best = max(common, key=lambda z: self.rank[z])
            if not common <= self.down_sets[best]:
                raise LatticeError(f"no meet for {x!r}, {y!r}")
            cache[key] = cache[(y, x)] = best
        return cache[key]

    def join(self, x, y):
        cache = self.__dict__.setdefault("_join_cache", {})
        key = (x, y)
        if key not in cache:
            common = self.up_sets[x] & self.up_sets[y]
            best = min(common, key=lambda z: self.rank[z])
            if not common <= self.up_sets[best]:
                raise LatticeError(f"no join for {x!r}, {y!r}")
            cache[key] = cache[(y, x)] = best
        return cache[key]

    def is_lattice(self) -> bool:
        try:
            for x, y in combinations(self.nodes, 2):
                self.meet(x, y)
                self.join(x, y)
        except LatticeError:
            return False
        return True

    def maximal_chains(self):
        """All bottom-to-top label sequences, in label-lexicographic order."""
        out: list[tuple[int, ...]] = []

        def walk(x, acc):
            ups = sorted(self._up[x], key=lambda t: t[1])
            if not ups:
                out.append(tuple(acc))
                return
            for y, lab in ups:
                acc.append(lab)
                walk(y, acc)
                acc.pop()

        walk(self.bottom, [])
        return out

    def relabel_nodes(self, f) -> "CoverLattice":
        return CoverLattice(
            [f(x) for x in self.nodes],
            [(f(a), f(b), lab) for a, b, lab in self.covers],
        )

    def to_json(self) -> dict:
        order = sorted(self.nodes, key=lambda n: (self.rank[n], _sort_key(n)))
        idx = {x: i for i, x in enumerate(order)}
        covers = sorted((idx[a], idx[b], lab) for a, b, lab in self.covers)
        return {
            "nodes": [_node_json(x) for x in order],
            "covers": [list(c) for c in covers],
        }

    def to_dot(self) -> str:
        order = sorted(self.nodes, key=lambda n: (self.rank[n], _sort_key(n)))
        idx = {x: i for i, x in enumerate(order)}
        lines = ["graph hasse {", "  rankdir=BT;"]
        for x in order:
            lines.append(f'  n{idx[x]} [label="{_node_text(x)}"];')
        for a, b, lab in sorted((idx[a], idx[b], lab) for a, b, lab in self.covers):
            lines.append(f'  n{a} -- n{b} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines)


def _node_json(x):
    if isinstance(x, frozenset):
        return sorted(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, tuple):
        return list(x)
    return x


def _node_text(x):
    if isinstance(x, frozenset):
        return "{" + ",".join(str(v) for v in sorted(x)) + "}"
    return str(x)


@dataclass(frozen=True)
class Poset:
    """A finite poset: elements plus the strict order relation (transitive)."""

    elements: tuple
    less: frozenset  # pairs (a, b) with a < b

    def __post_init__(self):
        elems = set(self.elements)
        for a, b in self.less:
            if a not in elems or b not in elems or a == b:
                raise ValueError("bad relation pair")
        for a, b in self.less:
            for c, d in self.less:
                if b == c and (a, d) not in self.less:
                    raise ValueError("relation is not transitive")

    def __len__(self) -> int:
        return len(self.elements)

    def lt(self, a, b) -> bool:
        return (a, b) in self.less

    def cover_pairs(self) -> tuple:
        """Hasse edges: pairs (a, b) with a < b and nothing in between."""
        out = []
        for a, b in self.less:
            if not any((a, c) in self.less and (c, b) in self.less for c in self.elements):
                out.append((a, b))
        return tuple(sorted(out, key=lambda p: (_sort_key(p[0]), _sort_key(p[1]))))

    @staticmethod
    def from_pairs(elements, pairs) -> "Poset":
        elements = tuple(elements)
        less = set(pairs)
        changed = True
        while changed:
            changed = False
            for a, b in list(less):
                for c, d in list(less):
                    if b == c and (a, d) not in less:
                        less.add((a, d))
                        changed = True
        return Poset(elements, frozenset(less))


def is_distributive(lat: CoverLattice) -> bool:
    """Both distributive laws over all triples."""
    nodes = lat.nodes
    for x in nodes:
        for y in nodes:
            for z in nodes:
                if lat.join(x, lat.meet(y, z)) != lat.meet(lat.join(x, y), lat.join(x, z)):
                    return False
                if lat.meet(x, lat.join(y, z)) != lat.join(lat.meet(x, y), lat.meet(x, z)):
                    return False
    return True


def join_irreducibles(lat: CoverLattice) -> Poset:
    """Elements with exactly one lower cover, under the induced order."""
    ji = [x for x in lat.nodes if len(lat.lower_covers(x)) == 1]
    pairs = frozenset((a, b) for a in ji for b in ji if a != b and lat.leq(a, b))
    return Poset(tuple(sorted(ji, key=_sort_key)), pairs)


def order_ideals(p: Poset) -> CoverLattice:
    """The lattice of down-closed subsets; covers add one minimal missing element."""
    elements = p.elements
    below = {x: frozenset(a for a in elements if p.lt(a, x)) for x in elements}
    empty: frozenset = frozenset()
    seen = {empty}
    frontier = [empty]
    covers = []
    while frontier:
        nxt = []
        for ideal in frontier:
            for x in elements:
                if x in ideal or not below[x] <= ideal:
                    continue
                bigger = ideal | {x}
                covers.append((ideal, bigger, x))
                if bigger not in seen:
                    seen.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    return CoverLattice(sorted(seen, key=_sort_key), sorted(set(covers), key=lambda c: (_sort_key(c[0]), _sort_key(c[2]))))


def labeled_isomorphic(a: CoverLattice, b: CoverLattice):
    """A node bijection preserving covers and labels, or None.

    The labels on the covers leaving a node are distinct in all lattices
    built here, so the bijection is forced once the bottoms are matched.
    """
    if len(a) != len(b) or len(a.covers) != len(b.covers):
        return None
    mapping = {a.bottom: b.bottom}
    frontier = [a.bottom]
    while frontier:
        x = frontier.pop()
        y = mapping[x]
        ups_a = {lab: t for t, lab in a.upper_covers(x)}
        ups_b = {lab: t for t, lab in b.upper_covers(y)}
        if len(ups_a) != len(a.upper_covers(x)) or len(ups_b) != len(b.upper_covers(y)):
            raise LatticeError("labels out of a node must be distinct")
        if set(ups_a) != set(ups_b):
            return None
        for lab, ta in ups_a.items():
            tb = ups_b[lab]
            if ta in mapping:
                if mapping[ta] != tb:
                    return None
            else:
                mapping[ta] = tb
                frontier.append(ta)
    if len(mapping) != len(a) or len(set(mapping.values())) != len(b):
        return None
    image = {(mapping[lo], mapping[hi], lab) for lo, hi, lab in a.covers}
    if image != set(b.covers):
        return None
    return mapping
