"""Canonical labeling and automorphism search for colored 3-hypergraphs.

Structures are given on vertices 0..n-1 with an initial integer coloring, an
unordered triple relation (collinearity) and optionally an ordered triple
relation (a multiplication graph).  Canonical forms come from iterated
partition refinement followed by full individualization backtracking, taking
the lexicographically least relabeled encoding over all branches; desk-scale
sizes keep the backtracking affordable.
"""

from __future__ import annotations

from itertools import combinations


def _refine(n, cells, r_by_v, h_by_v):
    """Split cells by neighborhood signatures until stable.

    cells: list of vertex lists (ordered partition).  Returns the refined
    ordered partition; vertices in the same cell are indistinguishable by
    color + iterated (cell of partner) multisets.
    """
    while True:
        cell_of = [0] * n
        for ci, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = ci

        def sig(v):
            r = sorted(
                tuple(sorted((cell_of[a], cell_of[b]))) for (a, b) in r_by_v[v]
            )
            h = sorted((role, cell_of[a], cell_of[b]) for (role, a, b) in h_by_v[v])
            return (tuple(r), tuple(h))

        new_cells = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            groups: dict = {}
            for v in cell:
                groups.setdefault(sig(v), []).append(v)
            if len(groups) > 1:
                changed = True
            for key in sorted(groups):
                new_cells.append(sorted(groups[key]))
        cells = new_cells
        if not changed:
            return cells


def _index_relations(n, r_triples, h_triples):
    r_by_v = [[] for _ in range(n)]
    for t in r_triples:
        a, b, c = t
        r_by_v[a].append((b, c))
        r_by_v[b].append((a, c))
        r_by_v[c].append((a, b))
    h_by_v = [[] for _ in range(n)]
    for (x, y, z) in h_triples:
        h_by_v[x].append((0, y, z))
        h_by_v[y].append((1, x, z))
        h_by_v[z].append((2, x, y))
    return r_by_v, h_by_v


def _encode(n, colors, r_triples, h_triples, perm):
    """Relabel by perm (old -> new) and emit a byte encoding."""
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    out = bytearray([n])
    out.extend(colors[inv[i]] & 0xFF for i in range(n))
    out.append(0xFD)
    rel = sorted(tuple(sorted(perm[v] for v in t)) for t in r_triples)
    for t in rel:
        out.extend(t)
    out.append(0xFE)
    hl = sorted((perm[x], perm[y], perm[z]) for (x, y, z) in h_triples)
    for t in hl:
        out.extend(t)
    return bytes(out)


def canonical_code(n, colors, r_triples, h_triples=()) -> bytes:
    """Isomorphism-invariant code; equal iff structures are isomorphic
    respecting colors (and the ordered relation when present)."""
    colors = tuple(colors)
    r_triples = [tuple(sorted(t)) for t in r_triples]
    h_triples = [tuple(t) for t in h_triples]
    r_by_v, h_by_v = _index_relations(n, r_triples, h_triples)

    init: dict = {}
    for v in range(n):
        init.setdefault(colors[v], []).append(v)
    cells0 = [sorted(init[c]) for c in sorted(init)]

    best = None

    def walk(cells):
        nonlocal best
        cells = _refine(n, cells, r_by_v, h_by_v)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            perm = [0] * n
            for pos, cell in enumerate(cells):
                perm[cell[0]] = pos
            code = _encode(n, colors, r_triples, h_triples, perm)
            if best is None or code < best:
                best = code
            return
        for v in cells[target]:
            branched = (
                cells[:target]
                + [[v], [u for u in cells[target] if u != v]]
                + cells[target + 1 :]
            )
            walk(branched)

    walk(cells0)
    return best


def _consistent(mapped, img, v, r_by_v, h_by_v, r_set, h_set):
    """Check relations whose vertices are now all mapped, after img[v] set."""
    for (a, b) in r_by_v[v]:
        if img[a] is not None and img[b] is not None:
            if tuple(sorted((img[v], img[a], img[b]))) not in r_set:
                return False
    for (role, a, b) in h_by_v[v]:
        if img[a] is not None and img[b] is not None:
            trip = [None, None, None]
            trip[role] = img[v]
            pos = [p for p in range(3) if p != role]
            trip[pos[0]], trip[pos[1]] = img[a], img[b]
            if tuple(trip) not in h_set:
                return False
    return True


def find_automorphism(
    n,
    colors,
    r_triples,
    h_triples=(),
    fixed: dict | None = None,
    must_move=None,
):
    """Search for an automorphism respecting colors.

    fixed: point -> required image (pointwise constraints).
    must_move: a vertex the automorphism must not fix.
    Returns the permutation (list old -> new) or None.
    """
    colors = tuple(colors)
    r_triples = [tuple(sorted(t)) for t in r_triples]
    h_triples = [tuple(t) for t in h_triples]
    r_by_v, h_by_v = _index_relations(n, r_triples, h_triples)
    r_set = set(r_triples)
    h_set = set(h_triples)

    cells = _refine(
        n,
        [sorted(v for v in range(n) if colors[v] == c) for c in sorted(set(colors))],
        r_by_v,
        h_by_v,
    )
    pool = [None] * n
    for cell in cells:
        for v in cell:
            pool[v] = cell

    img = [None] * n
    used = [False] * n
    for src, dst in (fixed or {}).items():
        if dst not in pool[src] or used[dst]:
            return None
        img[src] = dst
        used[dst] = True
        if not _consistent(img, img, src, r_by_v, h_by_v, r_set, h_set):
            return None

    order = sorted(
        (v for v in range(n) if img[v] is None),
        key=lambda v: (v != must_move, len(pool[v]), v),
    )

    def extend(k):
        if k == len(order):
            return True
        v = order[k]
        for w in pool[v]:
            if used[w]:
                continue
            if v == must_move and w == v:
                continue
            img[v] = w
            used[w] = True
            if _consistent(img, img, v, r_by_v, h_by_v, r_set, h_set) and extend(k + 1):
                return True
            img[v] = None
            used[w] = False
        return False

    if extend(0):
        if must_move is not None and img[must_move] == must_move:
            return None  # only possible when must_move was pre-fixed
        return list(img)
    return None


def space_relabel_invariants(space):
    """(n, colors=0, index triples) view of a LinearSpace for coding."""
    trips = [
        tuple(sorted(space.index(p) for p in t)) for t in sorted(space.triples)
    ]
    return space.n, (0,) * space.n, trips


def all_triples_of_masks(n, line_masks):
    out = []
    for lm in line_masks:
        pts = [i for i in range(n) if lm >> i & 1]
        out.extend(combinations(pts, 3))
    return out
