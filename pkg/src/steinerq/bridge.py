"""Coordinatization bridge between Steiner systems and quasigroups.

One direction copies a fixed 2-generated witness algebra onto every line of
a Steiner q-system, giving a quasigroup whose 2-variable identities hold
globally because each identity is evaluated inside a single line.  The other
direction reads the lines of a quasigroup off as its 2-generated
subalgebras.  For q = 3 the multiplication is forced (third point of the
line), giving the choice-free bi-interpretation.

The expanded structures carry a ternary relation H recording the per-line
multiplication graph; full-line completion plus enumeration of the finitely
many H-expansions realizes the finite part of the expansion construction,
and the derived bound function forces value 1 on the full-line-over-2-points
type and copies the plain bound through the reduct everywhere else.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, permutations, product

from . import canon
from .classify import ExtensionPair, MuFunction, mu_eval
from .errors import DeskScaleExceeded, SteinerqError
from .classify import NotGood, NotPrimitive, is_good
from .quasigroups import FiniteMagma, check_2q_variety_witness, two_generated
from .spaces import (
    LinearSpace,
    _label_key,
    fresh_labels,
    is_steiner_k,
    lines_of,
    new_linear_space,
)


class NotSteiner(SteinerqError):
    """Coordinatization needs a Steiner q-system."""


class NotSteiner3(SteinerqError):
    """The choice-free multiplication needs line length 3."""


class BadWitness(SteinerqError):
    """The supplied algebra fails the 2-generated witness checks."""


class UnevenBlocks(SteinerqError):
    """Some 2-generated subalgebra has deviant size or structure."""


class LineTooLong(SteinerqError):
    """A line already exceeds the target length."""


class UnevenLines(SteinerqError):
    """Expansion needs every line at the full target length."""


@dataclass(frozen=True)
class CoordinatizedAlgebra:
    """A magma over the points of a Steiner system plus the per-line
    bijections that produced it."""

    magma: FiniteMagma
    points: tuple  # index -> label
    provenance: tuple  # ((line members), (witness element per member)) pairs

    def op(self, a, b):
        idx = {p: i for i, p in enumerate(self.points)}
        return self.points[self.magma.op(idx[a], idx[b])]


def coordinatize(
    space: LinearSpace,
    f2: FiniteMagma,
    policy: str = "canonical",
    rng: random.Random | None = None,
) -> CoordinatizedAlgebra:
    """Copy the witness algebra onto every line of a Steiner q-system.

    policy "canonical" maps each sorted line onto 0..q-1 in order; "seeded"
    draws a uniform bijection per line from rng.
    """
    q = f2.order
    if not is_steiner_k(space, q):
        raise NotSteiner(f"structure is not a Steiner {q}-system")
    if not check_2q_variety_witness(f2, q):
        raise BadWitness("algebra fails the 2-generated witness checks")
    if policy not in ("canonical", "seeded"):
        raise ValueError(f"unknown policy {policy!r}")
    if policy == "seeded" and rng is None:
        raise ValueError("seeded policy needs an rng")

    labels = space.labels
    idx = {p: i for i, p in enumerate(labels)}
    n = len(labels)
    table = [[0] * n for _ in range(n)]
    for i in range(n):
        table[i][i] = i
    provenance = []
    for line in lines_of(space):
        members = line.members
        if policy == "canonical":
            assign = tuple(range(q))
        else:
            assign = tuple(rng.sample(range(q), q))
        elt_to_pos = {e: pos for pos, e in enumerate(assign)}
        provenance.append((members, assign))
        for a, b in permutations(range(q), 2):
            prod_elt = f2.op(assign[a], assign[b])
            z = members[elt_to_pos[prod_elt]]
            table[idx[members[a]]][idx[members[b]]] = idx[z]
    magma = FiniteMagma(n, tuple(tuple(r) for r in table))
    return CoordinatizedAlgebra(magma, labels, tuple(provenance))


def gamma_extract(q_algebra: FiniteMagma, labels=None) -> LinearSpace:
    """Linear space whose lines are the 2-generated subalgebras.

    Raises UnevenBlocks when closures differ in size or fail the witness
    checks.  labels optionally names the points (defaults to 0..n-1).
    """
    n = q_algebra.order
    labels = tuple(labels) if labels is not None else tuple(range(n))
    if len(labels) != n:
        raise ValueError("label count must match the order")
    closures = {}
    sizes = set()
    for x, y in combinations(range(n), 2):
        c = two_generated(q_algebra, x, y)
        closures[frozenset((x, y))] = c
        sizes.add(len(c))
    if n >= 2 and len(sizes) != 1:
        raise UnevenBlocks(f"2-generated subalgebras have sizes {sorted(sizes)}")
    q = sizes.pop() if sizes else 0
    checked = set()
    for c in closures.values():
        if c in checked:
            continue
        checked.add(c)
        members = sorted(c)
        pos = {v: i for i, v in enumerate(members)}
        sub = FiniteMagma(
            len(members),
            tuple(
                tuple(pos[q_algebra.op(a, b)] for b in members) for a in members
            ),
        )
        if not check_2q_variety_witness(sub, q):
            raise UnevenBlocks("a 2-generated subalgebra fails the witness checks")
    triples = set()
    for c in checked:
        for t in combinations(sorted(c), 3):
            triples.add(tuple(labels[i] for i in t))
    try:
        return new_linear_space(labels, triples)
    except SteinerqError as e:
        raise UnevenBlocks(f"subalgebras do not form a linear space: {e}") from e


def derive_steiner_mult(space: LinearSpace) -> FiniteMagma:
    """x*y = the third point of the line through x, y (and x*x = x); the
    choice-free multiplication of a Steiner triple system.  Element i is the
    i-th point in sorted label order."""
    if not is_steiner_k(space, 3):
        raise NotSteiner3("structure is not a Steiner 3-system")
    n = space.n
    table = [[0] * n for _ in range(n)]
    for i in range(n):
        table[i][i] = i
    for lm in space.line_masks:
        a, b, c = [i for i in range(n) if lm >> i & 1]
        for x, y, z in ((a, b, c), (a, c, b), (b, c, a)):
            table[x][y] = z
            table[y][x] = z
    return FiniteMagma(n, tuple(tuple(r) for r in table))


def complete_lines(space: LinearSpace, q: int) -> LinearSpace:
    """Extend every non-trivial line by fresh points to length exactly q;
    fresh points lie on no other line and delta is preserved."""
    lines = lines_of(space)
    for line in lines:
        if len(line.members) > q:
            raise LineTooLong(f"line {line.members} longer than {q}")
    need = sum(q - len(line.members) for line in lines)
    fresh = fresh_labels(space, need)
    triples = set(space.triples)
    points = list(space.labels)
    at = 0
    for line in lines:
        extra = fresh[at : at + q - len(line.members)]
        at += len(extra)
        points.extend(extra)
        full = list(line.members) + list(extra)
        for t in combinations(full, 3):
            triples.add(t)
    return new_linear_space(points, triples)


# ---------------------------------------------------------------------------
# expanded structures


@dataclass(frozen=True)
class TauPrimeStructure:
    """A linear space plus the graph H of a per-line multiplication.

    H holds ordered triples (x, y, x*y) exactly for collinear pairs and the
    idempotent pairs x = x; on each line it is the graph of an idempotent
    quasigroup.
    """

    space: LinearSpace
    h_triples: frozenset

    def op(self, x, y):
        for (a, b, c) in self.h_triples:
            if a == x and b == y:
                return c
        return None


def validate_tau_prime(s: TauPrimeStructure) -> int:
    """Check the H invariants; returns the common line length."""
    space = s.space
    prod = {}
    for (x, y, z) in s.h_triples:
        for p in (x, y, z):
            space.index(p)
        if (x, y) in prod:
            raise ValueError(f"H is not functional at ({x},{y})")
        prod[(x, y)] = z
    for p in space.labels:
        if prod.get((p, p)) != p:
            raise ValueError(f"H must be idempotent at {p}")
    sizes = {lm.bit_count() for lm in space.line_masks}
    if len(sizes) > 1:
        raise ValueError(f"lines must share one length, got {sorted(sizes)}")
    q = sizes.pop() if sizes else 0
    defined = {(x, y) for (x, y) in prod if x != y}
    expected = set()
    for lm in space.line_masks:
        pts = space.points_of(lm)
        for a, b in permutations(pts, 2):
            expected.add((a, b))
        # the line operation must be an idempotent quasigroup on the line
        members = list(pts)
        for a in members:
            row = [prod.get((a, b)) for b in members]
            col = [prod.get((b, a)) for b in members]
            if None in row or None in col:
                raise ValueError("H must be total on each line")
            if set(row) != set(members) or set(col) != set(members):
                raise ValueError("H is not a quasigroup on a line")
    if defined != expected:
        raise ValueError("H must be defined exactly on collinear pairs")
    return q


def tau_prime_of(space: LinearSpace, alg: CoordinatizedAlgebra) -> TauPrimeStructure:
    """View a coordinatized Steiner system as an expanded structure."""
    h = set()
    for p in space.labels:
        h.add((p, p, p))
    for lm in space.line_masks:
        pts = space.points_of(lm)
        for a, b in permutations(pts, 2):
            h.add((a, b, alg.op(a, b)))
    return TauPrimeStructure(space, frozenset(h))


def _line_variants(members: tuple, f2: FiniteMagma) -> list[frozenset]:
    """Distinct multiplication graphs obtainable on one line; there are
    (q-2)! of them since witness automorphisms act sharply 2-transitively."""
    q = f2.order
    seen = {}
    for assign in permutations(range(q)):
        elt_to_pos = {e: i for i, e in enumerate(assign)}
        h = set()
        for a in range(q):
            h.add((members[a], members[a], members[a]))
            for b in range(q):
                if a != b:
                    z = members[elt_to_pos[f2.op(assign[a], assign[b])]]
                    h.add((members[a], members[b], z))
        key = tuple(sorted(h))
        seen.setdefault(key, frozenset(h))
    return [seen[k] for k in sorted(seen)]


def _tau_code(s: TauPrimeStructure) -> bytes:
    space = s.space
    n, colors, r = canon.space_relabel_invariants(space)
    h = [tuple(space.index(p) for p in t) for t in sorted(s.h_triples)]
    return canon.canonical_code(n, colors, r, h)


def enumerate_expansions(
    ctilde: LinearSpace, f2: FiniteMagma, max_lines: int = 8
) -> list[TauPrimeStructure]:
    """All ways to impose a copy of the witness algebra on each full line,
    deduplicated up to isomorphism of the expanded structure."""
    q = f2.order
    lines = lines_of(ctilde)
    if any(len(l.members) != q for l in lines):
        raise UnevenLines(f"every line must have exactly {q} points")
    if len(lines) > max_lines:
        raise DeskScaleExceeded(
            f"expansion enumeration capped at {max_lines} lines; "
            "use random_expansion for larger inputs"
        )
    idem = {(p, p, p) for p in ctilde.labels}
    variant_lists = [_line_variants(l.members, f2) for l in lines]
    total = 1
    for v in variant_lists:
        total *= len(v)
    if total > 200_000:
        raise DeskScaleExceeded(f"{total} raw expansions exceed the search cap")
    out: dict[bytes, TauPrimeStructure] = {}
    for combo in product(*variant_lists):
        h = set(idem)
        for part in combo:
            h |= part
        s = TauPrimeStructure(ctilde, frozenset(h))
        out.setdefault(_tau_code(s), s)
    return [out[k] for k in sorted(out)]


def random_expansion(
    ctilde: LinearSpace, f2: FiniteMagma, rng: random.Random
) -> TauPrimeStructure:
    """One expansion with an independently random copy per line."""
    q = f2.order
    lines = lines_of(ctilde)
    if any(len(l.members) != q for l in lines):
        raise UnevenLines(f"every line must have exactly {q} points")
    h = {(p, p, p) for p in ctilde.labels}
    for line in lines:
        assign = tuple(rng.sample(range(q), q))
        elt_to_pos = {e: i for i, e in enumerate(assign)}
        for a, b in permutations(range(q), 2):
            z = line.members[elt_to_pos[f2.op(assign[a], assign[b])]]
            h.add((line.members[a], line.members[b], z))
    return TauPrimeStructure(ctilde, frozenset(h))


def tau_pair(s: TauPrimeStructure, base) -> ExtensionPair:
    """An expanded extension pair over the given base subset."""
    return ExtensionPair(s.space, frozenset(base), s.h_triples)


def _is_full_line_over_two(pair: ExtensionPair, q: int) -> bool:
    amb = pair.ambient
    return (
        len(pair.base) == 2
        and amb.n == q
        and len(amb.line_masks) == 1
        and amb.line_masks[0] == amb.full_mask()
    )


def derive_mu_prime(mu: MuFunction, pair_prime: ExtensionPair) -> int:
    """1 on the full-line-over-2-points type; otherwise the plain bound of
    the reduct.  The value depends only on the reduct."""
    red = pair_prime.reduct()
    if _is_full_line_over_two(red, mu.q):
        return 1
    try:
        if not is_good(red.base, red.ambient):
            raise NotGood("reduct base is not minimal")
    except NotPrimitive as e:
        raise NotGood(str(e)) from e
    return mu_eval(mu, red)


def reduct_R_from_H(s: TauPrimeStructure) -> LinearSpace:
    """Recover collinearity from H: R(u,v,w) iff w lies in the closure of
    {u,v} under the partial multiplication, w distinct from u, v."""
    prod = {(x, y): z for (x, y, z) in s.h_triples}
    labels = s.space.labels
    triples = set()
    for u, v in combinations(labels, 2):
        if (u, v) not in prod:
            continue
        closed = {u, v}
        changed = True
        while changed:
            changed = False
            for a in list(closed):
                for b in list(closed):
                    z = prod.get((a, b))
                    if z is not None and z not in closed:
                        closed.add(z)
                        changed = True
        if len(closed) >= 3:
            for t in combinations(sorted(closed, key=_label_key), 3):
                triples.add(t)
    return new_linear_space(labels, triples)


def invariance_orbit_check(
    space: LinearSpace, a, b, alg: CoordinatizedAlgebra
) -> bool:
    """True iff every automorphism of the plain structure fixing a and b
    also fixes the coordinatized product a*b.  Finite-structure evidence
    only; it speaks about this structure, not any larger model."""
    if a == b:
        raise ValueError("points must be distinct")
    if space.line_through(a, b) is None:
        raise ValueError("points must be collinear")
    w = alg.op(a, b)
    n, colors, r = canon.space_relabel_invariants(space)
    ia, ib, iw = space.index(a), space.index(b), space.index(w)
    mover = canon.find_automorphism(
        n, colors, r, fixed={ia: ia, ib: ib}, must_move=iw
    )
    return mover is None
