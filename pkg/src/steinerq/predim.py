"""Predimension calculus on finite linear spaces.

delta(A) = |A| - sum of line nullities.  For a subset S of a space, the lines
of the induced substructure are exactly the traces of ambient lines with at
least 3 points in S, so delta of any subset is computed directly from the
ambient line masks:

    delta(S) = |S| - sum over lines of max(|line & S| - 2, 0).

dim(N, A) minimizes delta over supersets of A inside N; B is strong in N when
that minimum equals delta(B), i.e. no superset drops below the base value.

K0 membership (every subset has delta >= 0) is decided exactly by a matching
argument: give each line |line|-2 "nullity units", each unit needing its own
point of the line.  A system of distinct representatives for all units exists
iff no subset family is deficient, and the minimum of delta over all subsets
equals min(0, matched - total units).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .spaces import LinearSpace, _label_key

MAX_TABLE_N = 16


@dataclass(frozen=True)
class PredimensionReport:
    """Result of a delta/dim computation.

    value: the (minimal) predimension.
    witness: the point subset achieving it (lexicographically least).
    breakdown: per-line nullity contributions within the witness.
    """

    value: int
    witness: tuple
    breakdown: tuple


def delta_mask(space: LinearSpace, mask: int) -> int:
    v = mask.bit_count()
    for lm in space.line_masks:
        t = (lm & mask).bit_count()
        if t >= 3:
            v -= t - 2
    return v


def delta(space: LinearSpace) -> int:
    """|A| minus the summed nullities of A's non-trivial lines."""
    return delta_mask(space, space.full_mask())


def delta_rel(space: LinearSpace, base) -> int:
    """delta(A) - delta(A restricted to the base subset)."""
    return delta(space) - delta_mask(space, space.mask_of(base))


def _breakdown(space: LinearSpace, mask: int) -> tuple:
    out = []
    for lm in space.line_masks:
        t = lm & mask
        if t.bit_count() >= 3:
            pts = tuple(sorted(space.points_of(t), key=_label_key))
            out.append((pts, len(pts) - 2))
    return tuple(sorted(out))


def predimension_report(space: LinearSpace) -> PredimensionReport:
    full = space.full_mask()
    return PredimensionReport(delta_mask(space, full), space.labels, _breakdown(space, full))


class _SubsetCalc:
    """Full delta table plus superset-minimum table for one space (n <= 16)."""

    def __init__(self, space: LinearSpace):
        n = space.n
        size = 1 << n
        table = [0] * size
        for m in range(size):
            table[m] = m.bit_count()
        for lm in space.line_masks:
            sub = lm
            # only masks meeting the line in >= 3 points get a contribution;
            # walk all masks once per line instead
            for m in range(size):
                t = (lm & m).bit_count()
                if t >= 3:
                    table[m] -= t - 2
        supmin = list(table)
        for i in range(n):
            bit = 1 << i
            for m in range(size):
                if not m & bit:
                    v = supmin[m | bit]
                    if v < supmin[m]:
                        supmin[m] = v
        self.delta = table
        self.supmin = supmin


@lru_cache(maxsize=64)
def _calc(space: LinearSpace) -> _SubsetCalc:
    return _SubsetCalc(space)


def _table_ok(space: LinearSpace) -> bool:
    return space.n <= MAX_TABLE_N


def _active_lines(space: LinearSpace, universe: int) -> list[int]:
    return [lm for lm in space.line_masks if (lm & universe).bit_count() >= 3]


def _min_delta_bb(space: LinearSpace, forced: int, banned: int, stop_below=None):
    """Exact min of delta over S with forced <= S <= ~banned, branch and bound.

    When stop_below is given, returns as soon as any value < stop_below is
    found (the caller only needs existence).
    """
    universe = space.full_mask() & ~banned
    lines = _active_lines(space, universe)

    def value(mask: int) -> int:
        v = mask.bit_count()
        for lm in lines:
            t = (lm & mask).bit_count()
            if t >= 3:
                v -= t - 2
        return v

    free = universe & ~forced
    # greedy descent seeds the incumbent: repeatedly add the point whose
    # marginal is most negative
    best_mask = forced
    best = value(forced)
    cur, cur_v = forced, best
    while True:
        step = None
        rest = free & ~cur
        while rest:
            b = rest & -rest
            rest ^= b
            v = value(cur | b)
            if v < cur_v and (step is None or v < step[1]):
                step = (b, v)
        if step is None:
            break
        cur |= step[0]
        cur_v = step[1]
        if cur_v < best:
            best, best_mask = cur_v, cur
    v_full = value(universe)
    if v_full < best:
        best, best_mask = v_full, universe

    def caps(scope: int) -> dict:
        out = {}
        for lm in lines:
            if (lm & scope).bit_count() >= 3:
                rest = lm & scope
                while rest:
                    b = rest & -rest
                    rest ^= b
                    out[b] = out.get(b, 0) + 1
        return out

    def dfs(included: int, undecided: int):
        nonlocal best, best_mask
        if stop_below is not None and best < stop_below:
            return
        v = value(included)
        if v < best:
            best, best_mask = v, included
        if not undecided:
            return
        cap = caps(included | undecided)
        bound = v
        pick, pick_cap = None, -1
        rest = undecided
        while rest:
            b = rest & -rest
            rest ^= b
            c = cap.get(b, 0)
            if c > 1:
                bound += 1 - c
            if c > pick_cap:
                pick, pick_cap = b, c
        if bound >= best:
            return
        dfs(included | pick, undecided & ~pick)
        dfs(included, undecided & ~pick)

    dfs(forced, free)
    return best, best_mask


def min_delta_over(space: LinearSpace, forced: int = 0, banned: int = 0) -> int:
    """Exact min of delta(S) over forced <= S <= complement of banned."""
    if _table_ok(space):
        calc = _calc(space)
        if banned == 0:
            return calc.supmin[forced]
        free = space.full_mask() & ~forced & ~banned
        best = calc.delta[forced]
        sub = free
        while sub:
            v = calc.delta[forced | sub]
            if v < best:
                best = v
            sub = (sub - 1) & free
        return best
    return _min_delta_bb(space, forced, banned)[0]


def dim(space: LinearSpace, subset) -> PredimensionReport:
    """min of delta over supersets of the subset, with the least witness."""
    forced = space.mask_of(subset)
    v = min_delta_over(space, forced)
    witness = forced
    banned = 0
    for i in range(space.n):
        bit = 1 << i
        if witness & bit or banned & bit:
            continue
        if delta_mask(space, witness) == v:
            banned |= ((1 << space.n) - 1) & ~witness  # stop: witness complete
            break
        if min_delta_over(space, witness | bit, banned) == v:
            witness |= bit
        else:
            banned |= bit
    pts = tuple(sorted(space.points_of(witness), key=_label_key))
    return PredimensionReport(v, pts, _breakdown(space, witness))


def dim_value(space: LinearSpace, subset) -> int:
    return min_delta_over(space, space.mask_of(subset))


def is_strong_mask(space: LinearSpace, mask: int) -> bool:
    base_val = delta_mask(space, mask)
    if _table_ok(space):
        return _calc(space).supmin[mask] >= base_val
    v, _ = _min_delta_bb(space, mask, 0, stop_below=base_val)
    return v >= base_val


def is_strong(space: LinearSpace, subset) -> bool:
    """True iff no superset of the subset has smaller delta."""
    return is_strong_mask(space, space.mask_of(subset))


def _unit_matching(space: LinearSpace) -> tuple[int, int, list]:
    """Max matching of per-line nullity units into their own line points.

    Returns (matched, total units, match list: point index -> unit id or -1).
    """
    units = []  # one entry per unit: the line mask it may use
    for lm in space.line_masks:
        for _ in range(lm.bit_count() - 2):
            units.append(lm)
    owner = [-1] * space.n  # point -> unit
    matched = 0

    def try_assign(u: int, lm: int, visited: list) -> bool:
        for i in range(space.n):
            if lm >> i & 1 and not visited[i]:
                visited[i] = True
                if owner[i] == -1 or try_assign(owner[i], units[owner[i]], visited):
                    owner[i] = u
                    return True
        return False

    for u, lm in enumerate(units):
        if try_assign(u, lm, [False] * space.n):
            matched += 1
    return matched, len(units), owner


def min_delta(space: LinearSpace) -> int:
    """Exact min of delta over all subsets (0 when the space is in K0)."""
    matched, total, _ = _unit_matching(space)
    return min(0, matched - total)


def in_K0(space: LinearSpace) -> bool:
    """Every subset has delta >= 0."""
    matched, total, _ = _unit_matching(space)
    return matched == total
