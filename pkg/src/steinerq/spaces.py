"""Finite linear spaces: validation, lines, induced substructures.

A linear space is a finite point set with a set-like ternary collinearity
relation in which two points lie on at most one line.  Lines are the maximal
collinearity cliques with at least 3 points; a pair of unrelated points is a
"trivial line" and is never materialized.

Points are opaque labels (strings or ints).  Internally they are normalized
to indices 0..n-1 and every subset is a machine word, which is what all the
subset-enumeration kernels in the sibling modules operate on; n is capped at
64 so a subset always fits one word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DeskScaleExceeded, SteinerqError

MAX_POINTS = 64


class TripleNotSetLike(SteinerqError):
    """A triple repeats a point or mentions a point outside the universe."""


class TwoLinesThroughPair(SteinerqError):
    """Two distinct maximal cliques share two points."""


def _label_key(label):
    return (label.__class__.__name__, label)


@dataclass(frozen=True)
class Line:
    """A non-trivial line: a maximal clique of at least 3 points."""

    members: tuple
    nullity: int

    @staticmethod
    def of(members: Iterable) -> "Line":
        mem = tuple(sorted(members, key=_label_key))
        return Line(mem, len(mem) - 2)


@dataclass(frozen=True)
class LinearSpace:
    """An immutable validated linear space.

    ``labels`` is the sorted point tuple, ``triples`` the canonicalized
    collinearity relation.  ``line_masks`` caches every non-trivial line as a
    bitmask over label indices; all predimension arithmetic runs on these.
    """

    labels: tuple
    triples: frozenset
    line_masks: tuple = field(compare=False, repr=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self._index[label]

    def mask_of(self, points: Iterable) -> int:
        m = 0
        for p in points:
            m |= 1 << self._index[p]
        return m

    def points_of(self, mask: int) -> tuple:
        return tuple(self.labels[i] for i in range(self.n) if mask >> i & 1)

    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def collinear(self, a, b, c) -> bool:
        key = tuple(sorted((a, b, c), key=_label_key))
        return key in self.triples

    def line_through(self, a, b):
        """The non-trivial line through two distinct points, or None."""
        m = self.mask_of((a, b))
        for lm in self.line_masks:
            if lm & m == m:
                return Line.of(self.points_of(lm))
        return None


def _close_into_lines(n: int, triples: Sequence[tuple]) -> list[int]:
    """Group triples into maximal cliques via the shares-2-points closure.

    In a linear space each line is the closure of any one of its triples
    under "shares two points", so no general clique machinery is needed.
    Raises TwoLinesThroughPair when a closure is not a full clique.
    """
    parent = list(range(len(triples)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    pair_seen: dict[tuple, int] = {}
    for t_idx, t in enumerate(triples):
        for pair in combinations(t, 2):
            if pair in pair_seen:
                union(pair_seen[pair], t_idx)
            else:
                pair_seen[pair] = t_idx

    clusters: dict[int, int] = {}
    for t_idx, t in enumerate(triples):
        root = find(t_idx)
        m = clusters.get(root, 0)
        for i in t:
            m |= 1 << i
        clusters[root] = m

    triple_set = set(triples)
    masks = []
    for m in clusters.values():
        pts = [i for i in range(n) if m >> i & 1]
        for sub in combinations(pts, 3):
            if sub not in triple_set:
                raise TwoLinesThroughPair(
                    f"points {sub[0]} and {sub[1]} lie on two distinct lines"
                )
        masks.append(m)
    return sorted(masks)


def new_linear_space(points: Iterable, triples: Iterable) -> LinearSpace:
    """Validate raw points/triples and build a LinearSpace.

    Raises TripleNotSetLike for malformed triples and TwoLinesThroughPair
    when the two-points-one-line axiom fails.
    """
    labels = tuple(sorted(set(points), key=_label_key))
    if len(labels) > MAX_POINTS:
        raise DeskScaleExceeded(f"{len(labels)} points exceed the cap of {MAX_POINTS}")
    index = {p: i for i, p in enumerate(labels)}

    canon = set()
    for t in triples:
        t = tuple(t)
        if len(t) != 3 or len(set(t)) != 3:
            raise TripleNotSetLike(f"triple {t!r} does not name 3 distinct points")
        for p in t:
            if p not in index:
                raise TripleNotSetLike(f"triple {t!r} uses unknown point {p!r}")
        canon.add(tuple(sorted(t, key=_label_key)))

    idx_triples = sorted(tuple(sorted(index[p] for p in t)) for t in canon)
    masks = _close_into_lines(len(labels), idx_triples)
    return LinearSpace(labels, frozenset(canon), tuple(masks))


def lines_of(space: LinearSpace) -> list[Line]:
    """All non-trivial lines, each once, sorted by member lists."""
    return sorted(
        (Line.of(space.points_of(m)) for m in space.line_masks),
        key=lambda l: tuple(_label_key(p) for p in l.members),
    )


def lines_based_in(space: LinearSpace, subset: Iterable) -> list[Line]:
    """Lines of the space meeting ``subset`` in at least 2 points."""
    sm = space.mask_of(subset)
    return sorted(
        (
            Line.of(space.points_of(m))
            for m in space.line_masks
            if (m & sm).bit_count() >= 2
        ),
        key=lambda l: tuple(_label_key(p) for p in l.members),
    )


def induced(space: LinearSpace, subset: Iterable) -> LinearSpace:
    """Substructure on ``subset`` with every triple of the space inside it.

    A clique maximal in the substructure need not be maximal in the parent.
    """
    keep = set(subset)
    for p in keep:
        space.index(p)  # raises KeyError on foreign points
    trips = [t for t in space.triples if all(p in keep for p in t)]
    return new_linear_space(keep, trips)


def induced_mask(space: LinearSpace, mask: int) -> LinearSpace:
    return induced(space, space.points_of(mask))


def is_steiner_k(space: LinearSpace, k: int) -> bool:
    """Every pair of points on a line and every line of size exactly k."""
    if any(m.bit_count() != k for m in space.line_masks):
        return False
    covered = set()
    for m in space.line_masks:
        pts = [i for i in range(space.n) if m >> i & 1]
        covered.update(combinations(pts, 2))
    return len(covered) == space.n * (space.n - 1) // 2


def build_eta() -> LinearSpace:
    """The 12-point structure with nine 3-lines and one 4-line.

    Points a,b,c,d1..d9; d9 is the unique point on exactly one line.
    """
    d = [f"d{i}" for i in range(1, 10)]
    triples = [("a", "b", "c")]
    triples += [("a", d[2 * i], d[2 * i + 1]) for i in range(4)]
    triples += [("b", d[2 * i + 1], d[2 * i + 2]) for i in range(3)]
    triples.append(("b", d[7], d[0]))
    triples += [t for t in combinations(("c", d[7], d[8], d[3]), 3)]
    return new_linear_space(["a", "b", "c"] + d, triples)


def fano() -> LinearSpace:
    """The 7-point Steiner triple system."""
    blocks = ["012", "034", "056", "135", "146", "236", "245"]
    return new_linear_space(range(7), [tuple(int(c) for c in b) for b in blocks])


def sts9() -> LinearSpace:
    """STS(9): the affine plane of order 3 on points 0..8 (row-major grid)."""
    pt = lambda r, c: 3 * r + c
    lines = []
    for r in range(3):
        lines.append(tuple(pt(r, c) for c in range(3)))
        lines.append(tuple(pt(c, r) for c in range(3)))
    for s in range(3):
        lines.append(tuple(pt(r, (r + s) % 3) for r in range(3)))
        lines.append(tuple(pt(r, (s - r) % 3) for r in range(3)))
    return new_linear_space(range(9), lines)


def sts13() -> LinearSpace:
    """STS(13) from the difference sets {0,1,4} and {0,2,7} mod 13."""
    lines = []
    for base in ((0, 1, 4), (0, 2, 7)):
        for i in range(13):
            lines.append(tuple((b + i) % 13 for b in base))
    return new_linear_space(range(13), lines)


def fresh_labels(space: LinearSpace, k: int) -> list:
    """k new point labels: next integers when the space is int-labeled,
    otherwise unused p<N> strings; deterministic either way."""
    if all(isinstance(p, int) for p in space.labels):
        start = max(space.labels, default=-1) + 1
        return [start + i for i in range(k)]
    taken = set(space.labels)
    out: list = []
    nxt = 0
    while len(out) < k:
        cand = f"p{nxt}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        nxt += 1
    return out


def single_line(q: int, labels: Sequence | None = None) -> LinearSpace:
    """A standalone q-point line (all 3-subsets collinear)."""
    pts = tuple(labels) if labels is not None else tuple(range(q))
    if len(pts) != q:
        raise ValueError("label count must equal q")
    return new_linear_space(pts, combinations(pts, 3))
