"""Extension pairs: primitivity, goodness, canonical codes, mu functions.

A pair is an ambient linear space split into a base and a non-empty annulus.
Classification follows the predimension calculus: the ambient is k-primitive
over the base when the base is strong, the relative delta is k and no proper
intermediate is strong on both sides; a 0-primitive pair is good when no
proper subset of the base keeps it 0-primitive.

mu functions bound the number chi of pairwise-annulus-disjoint copies of a
good pair a structure may contain.  K_mu membership is checked by
enumerating realized good pairs up to a configured ambient bound; the two
realizable shapes are completing points over a collinear pair (annulus of
size 1) and configurations in which every relevant line carries at least two
annulus points and at most one base point (a line with two base points and
an annulus point forces the whole annulus onto that line, which is never
primitive for annulus size >= 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from . import canon
from .errors import SteinerqError
from .predim import delta, delta_mask, is_strong_mask, min_delta_over
from .spaces import LinearSpace, _label_key, induced, new_linear_space


class NotPrimitive(SteinerqError):
    """Operation requires a 0-primitive pair."""


class NotGood(SteinerqError):
    """Operation requires a good pair."""


class BadEmbedding(SteinerqError):
    """A base embedding is not an induced isomorphism onto its image."""


@dataclass(frozen=True)
class ExtensionPair:
    """An ambient structure with a distinguished base; annulus = rest.

    h_triples carries an optional ordered multiplication graph so the same
    machinery codes expanded (two-relation) pairs.
    """

    ambient: LinearSpace
    base: frozenset
    h_triples: frozenset = frozenset()

    def __post_init__(self):
        for p in self.base:
            self.ambient.index(p)
        if not self.annulus:
            raise ValueError("annulus must be non-empty")

    @property
    def annulus(self) -> frozenset:
        return frozenset(self.ambient.labels) - self.base

    @property
    def base_mask(self) -> int:
        return self.ambient.mask_of(self.base)

    def reduct(self) -> "ExtensionPair":
        if not self.h_triples:
            return self
        return ExtensionPair(self.ambient, self.base)


@dataclass(frozen=True)
class Classification:
    kind: str  # not_strong | k_primitive | decomposable
    k: int | None = None


def pair_of(space: LinearSpace, base, annulus) -> ExtensionPair:
    """The realized pair on base|annulus inside a larger space."""
    base = frozenset(base)
    annulus = frozenset(annulus)
    amb = induced(space, base | annulus)
    return ExtensionPair(amb, base)


def _strong_between(space: LinearSpace, low: int, high: int) -> bool:
    """Is low strong inside the substructure on high (low <= high)?"""
    base_val = delta_mask(space, low)
    free = high & ~low
    sub = free
    while True:
        if delta_mask(space, low | sub) < base_val:
            return False
        if sub == 0:
            return True
        sub = (sub - 1) & free


def classify(base, ambient: LinearSpace) -> Classification:
    """not_strong / k_primitive(k) / decomposable for (ambient over base)."""
    b_mask = ambient.mask_of(base)
    full = ambient.full_mask()
    if b_mask == full:
        raise ValueError("base must be a proper subset of the ambient points")
    if not is_strong_mask(ambient, b_mask):
        return Classification("not_strong")
    k = delta(ambient) - delta_mask(ambient, b_mask)
    annulus = full & ~b_mask
    sub = (annulus - 1) & annulus  # proper, non-empty pieces of the annulus
    while sub:
        mid = b_mask | sub
        if is_strong_mask(ambient, mid) and _strong_between(ambient, b_mask, mid):
            return Classification("decomposable")
        sub = (sub - 1) & annulus
    return Classification("k_primitive", k)


def classify_pair(pair: ExtensionPair) -> Classification:
    return classify(pair.base, pair.ambient)


def _is_zero_primitive(base, ambient) -> bool:
    c = classify(base, ambient)
    return c.kind == "k_primitive" and c.k == 0


def is_good(base, ambient: LinearSpace) -> bool:
    """No proper subset of the base keeps the annulus 0-primitive over it."""
    base = frozenset(base)
    if not _is_zero_primitive(base, ambient):
        raise NotPrimitive("pair is not 0-primitive")
    annulus = frozenset(ambient.labels) - base
    for r in range(len(base)):
        for smaller in combinations(sorted(base, key=_label_key), r):
            sub_ambient = induced(ambient, annulus | set(smaller))
            if _is_zero_primitive(frozenset(smaller), sub_ambient):
                return False
    return True


def find_bases(base, ambient: LinearSpace) -> list[frozenset]:
    """All subsets of the base over which the annulus is good."""
    base = frozenset(base)
    if not _is_zero_primitive(base, ambient):
        raise NotPrimitive("pair is not 0-primitive")
    annulus = frozenset(ambient.labels) - base
    out = []
    for r in range(len(base) + 1):
        for cand in combinations(sorted(base, key=_label_key), r):
            cand = frozenset(cand)
            sub_ambient = induced(ambient, annulus | cand)
            if _is_zero_primitive(cand, sub_ambient) and is_good(cand, sub_ambient):
                out.append(cand)
    return out


def _pair_view(pair: ExtensionPair, pointwise: bool):
    amb = pair.ambient
    base_sorted = sorted(pair.base, key=_label_key)
    colors = [0] * amb.n
    for rank, b in enumerate(base_sorted):
        colors[amb.index(b)] = rank + 1 if pointwise else 1
    r_triples = [tuple(sorted(amb.index(p) for p in t)) for t in sorted(amb.triples)]
    h_triples = sorted(
        tuple(amb.index(p) for p in t) for t in pair.h_triples
    )
    return amb.n, tuple(colors), r_triples, h_triples


@lru_cache(maxsize=4096)
def canonical_code(pair: ExtensionPair) -> bytes:
    """Equal codes iff base-to-base, annulus-to-annulus isomorphic."""
    n, colors, r, h = _pair_view(pair, pointwise=False)
    return canon.canonical_code(n, colors, r, h)


@lru_cache(maxsize=4096)
def _code_pointwise(pair: ExtensionPair) -> bytes:
    n, colors, r, h = _pair_view(pair, pointwise=True)
    return canon.canonical_code(n, colors, r, h)


@lru_cache(maxsize=1)
def alpha_pair() -> ExtensionPair:
    """The completing-point pair: one triple over two of its points."""
    amb = new_linear_space(("b1", "b2", "x"), [("b1", "b2", "x")])
    return ExtensionPair(amb, frozenset(("b1", "b2")))


def alpha_code() -> bytes:
    return canonical_code(alpha_pair())


def _check_base_embedding(space: LinearSpace, pair: ExtensionPair, emb: dict):
    base = sorted(pair.base, key=_label_key)
    if set(emb) != set(base) or len(set(emb.values())) != len(base):
        raise BadEmbedding("embedding must injectively cover the base")
    for t in combinations(base, 3):
        inside = pair.ambient.collinear(*t)
        image = space.collinear(emb[t[0]], emb[t[1]], emb[t[2]])
        if inside != image:
            raise BadEmbedding("embedding does not preserve the base structure")


def _annulus_copies(space: LinearSpace, pair: ExtensionPair, emb: dict) -> list[frozenset]:
    """Images of the annulus under induced embeddings extending emb."""
    amb = pair.ambient
    base = sorted(pair.base, key=_label_key)
    ann = sorted(pair.annulus, key=_label_key)
    img = {b: emb[b] for b in base}
    used = set(img.values())
    found = []

    amb_triples = [tuple(t) for t in sorted(amb.triples)]

    def full_check() -> bool:
        image_pts = set(img.values())
        # forward: every ambient triple lands on a triple
        for t in amb_triples:
            if not space.collinear(img[t[0]], img[t[1]], img[t[2]]):
                return False
        # induced: no extra collinearity among the image
        count = sum(
            1 for t in space.triples if all(p in image_pts for p in t)
        )
        return count == len(amb_triples)

    def extend(k: int):
        if k == len(ann):
            if full_check():
                found.append(frozenset(img[a] for a in ann))
            return
        v = ann[k]
        for w in space.labels:
            if w in used:
                continue
            img[v] = w
            used.add(w)
            ok = True
            for t in amb_triples:
                if v in t and all(p in img for p in t):
                    if not space.collinear(img[t[0]], img[t[1]], img[t[2]]):
                        ok = False
                        break
            if ok:
                extend(k + 1)
            del img[v]
            used.discard(w)

    extend(0)
    return sorted(set(found), key=lambda s: sorted(s, key=_label_key))


def _max_disjoint(sets: list[frozenset]) -> int:
    """Maximum pairwise-disjoint subfamily size (exact, small inputs)."""
    sets = sorted(sets, key=len)
    best = 0

    def go(i: int, taken: list, count: int):
        nonlocal best
        if count + (len(sets) - i) <= best:
            return
        if i == len(sets):
            best = max(best, count)
            return
        s = sets[i]
        if all(not (s & t) for t in taken):
            taken.append(s)
            go(i + 1, taken, count + 1)
            taken.pop()
        go(i + 1, taken, count)

    go(0, [], 0)
    return best


def chi(space: LinearSpace, pair: ExtensionPair, base_embedding: dict) -> int:
    """Maximum number of copies of the annulus over the embedded base whose
    annuli are pairwise disjoint."""
    _check_base_embedding(space, pair, base_embedding)
    copies = _annulus_copies(space, pair, base_embedding)
    return _max_disjoint(copies)


@dataclass(frozen=True)
class MuFunction:
    """Finite override table plus default rule bounding good-pair copies.

    q fixes the completing-point bound mu(alpha) = q - 2 (overridable).
    default_rule is "floor-delta" (max(delta(base), 1)) or "constant-<c>".
    flags are membership claims for the classes U, T, C, verified only on
    pairs enumerated up to a size bound (see check_flags).
    """

    q: int
    overrides: tuple = ()  # sorted ((code bytes, bound), ...)
    default_rule: str = "floor-delta"
    flags: frozenset = frozenset()

    def __post_init__(self):
        if self.q < 3:
            raise ValueError("q must be at least 3")
        object.__setattr__(self, "overrides", tuple(sorted(self.overrides)))
        table = dict(self.overrides)
        if any(b < 0 for b in table.values()):
            raise ValueError("mu bounds must be non-negative")
        if table.get(alpha_code(), self.q - 2) < 1:
            raise ValueError("mu(alpha) must be at least 1")
        if not self.flags <= {"U", "T", "C"}:
            raise ValueError(f"unknown flags {set(self.flags) - {'U','T','C'}}")
        if self.default_rule != "floor-delta":
            head, _, c = self.default_rule.partition("-")
            if head != "constant" or not c.isdigit():
                raise ValueError(f"unknown default rule {self.default_rule!r}")

    def override_table(self) -> dict:
        return dict(self.overrides)

    def _rule_value(self, base_delta: int) -> int:
        if self.default_rule == "floor-delta":
            return max(base_delta, 1)
        return int(self.default_rule.partition("-")[2])

    def value_for(self, code: bytes, base_delta: int) -> int:
        table = self.override_table()
        if code in table:
            return table[code]
        if code == alpha_code():
            return self.q - 2
        return self._rule_value(base_delta)


def mu_eval(mu: MuFunction, pair: ExtensionPair) -> int:
    """Bound assigned to a good pair; raises NotGood otherwise."""
    red = pair.reduct()
    try:
        good = is_good(red.base, red.ambient)
    except NotPrimitive as e:
        raise NotGood(str(e)) from e
    if not good:
        raise NotGood("pair base is not minimal")
    base_delta = delta_mask(red.ambient, red.base_mask)
    return mu.value_for(canonical_code(red), base_delta)


def determined_points(pair: ExtensionPair) -> frozenset:
    """Annulus points fixed by every automorphism fixing the base pointwise."""
    amb = pair.ambient
    n, colors, r, h = _pair_view(pair, pointwise=False)
    fixed = {amb.index(b): amb.index(b) for b in pair.base}
    out = set()
    for p in sorted(pair.annulus, key=_label_key):
        moved = canon.find_automorphism(
            n, colors, r, h, fixed=fixed, must_move=amb.index(p)
        )
        if moved is None:
            out.add(p)
    return frozenset(out)


# ---------------------------------------------------------------------------
# realized good pairs and K_mu membership


@dataclass(frozen=True)
class KMuViolation:
    code: bytes
    base: tuple
    chi: int
    bound: int


@dataclass(frozen=True)
class KMuResult:
    ok: bool
    violation: KMuViolation | None = None

    def __bool__(self) -> bool:
        return self.ok


def _connected_subsets(adj: list[int], n: int, max_size: int):
    """Every connected subset (as mask) of the collinearity graph, once.

    Standard anchored enumeration: only vertices above the anchor may join,
    and siblings already branched at a level are forbidden below it.
    """
    for anchor in range(n):
        allowed = ~((1 << (anchor + 1)) - 1)

        def grow(cur: int, ext: int, forbidden: int):
            yield cur
            if cur.bit_count() >= max_size:
                return
            rest = ext
            done = forbidden
            while rest:
                b = rest & -rest
                rest ^= b
                nbrs = adj[b.bit_length() - 1] & allowed
                child_ext = (rest | nbrs) & ~cur & ~done & ~b
                yield from grow(cur | b, child_ext, done)
                done |= b

        yield from grow(1 << anchor, adj[anchor] & allowed, 0)


def iter_realized_good_pairs(
    space: LinearSpace, max_ambient: int = 12, max_annulus: int = 5
):
    """Yield (base frozenset, annulus frozenset, pair) for realized good
    pairs with annulus size >= 2 within the bounds.

    Completing-point (annulus size 1) realizations are not yielded here;
    in_K_mu handles them directly line by line.
    """
    n = space.n
    adj = [0] * n
    for lm in space.line_masks:
        i_rest = lm
        while i_rest:
            b = i_rest & -i_rest
            i_rest ^= b
            adj[b.bit_length() - 1] |= lm & ~b

    for c_mask in _connected_subsets(adj, n, max_annulus):
        if c_mask.bit_count() < 2:
            continue
        # each annulus point must sit on a line carrying >= 2 annulus points
        heavy = [lm for lm in space.line_masks if (lm & c_mask).bit_count() >= 2]
        covered = 0
        for lm in heavy:
            covered |= lm & c_mask
        if covered != c_mask:
            continue
        d_mask = 0
        for lm in heavy:
            d_mask |= lm & ~c_mask
        d_bits = [1 << i for i in range(n) if d_mask >> i & 1]
        c_size = c_mask.bit_count()
        for r in range(min(len(d_bits), max_ambient - c_size) + 1):
            for combo in combinations(d_bits, r):
                b_mask = 0
                for bb in combo:
                    b_mask |= bb
                a_mask = b_mask | c_mask
                if delta_mask(space, a_mask) != delta_mask(space, b_mask):
                    continue
                base = frozenset(space.points_of(b_mask))
                annulus = frozenset(space.points_of(c_mask))
                pair = pair_of(space, base, annulus)
                if not _is_zero_primitive(pair.base, pair.ambient):
                    continue
                if not is_good(pair.base, pair.ambient):
                    continue
                yield base, annulus, pair


def in_K_mu(
    space: LinearSpace,
    mu: MuFunction,
    max_ambient: int = 12,
    max_annulus: int = 5,
) -> KMuResult:
    """chi <= mu for every good pair realized within the size bounds.

    Callers are responsible for in_K0(space); the check enumerates realized
    good pairs up to the bounds (a bounded, desk-scale check by contract).
    """
    a_bound = mu.value_for(alpha_code(), 2)
    for lm in space.line_masks:
        c = lm.bit_count() - 2
        if c > a_bound:
            pts = space.points_of(lm)
            return KMuResult(
                False, KMuViolation(alpha_code(), tuple(pts[:2]), c, a_bound)
            )

    groups: dict = {}
    for base, annulus, pair in iter_realized_good_pairs(space, max_ambient, max_annulus):
        key = (base, _code_pointwise(pair))
        groups.setdefault(key, (pair, []))[1].append(annulus)
    for (base, _), (pair, annuli) in groups.items():
        x = _max_disjoint(annuli)
        bound = mu.value_for(
            canonical_code(pair), delta_mask(pair.ambient, pair.base_mask)
        )
        if x > bound:
            return KMuResult(
                False,
                KMuViolation(
                    canonical_code(pair),
                    tuple(sorted(base, key=_label_key)),
                    x,
                    bound,
                ),
            )
    return KMuResult(True)


def check_flags(mu: MuFunction, pairs) -> list[tuple]:
    """Flag-consistency report over an explicit collection of good pairs.

    Returns (flag, pair, value) entries where a claimed class inequality
    fails.  Membership flags are only ever verified against enumerated pairs
    up to a size bound; this is the bounded surrogate for the intensional
    classes.
    """
    bad = []
    for pair in pairs:
        value = mu_eval(mu, pair)
        base_delta = delta_mask(pair.ambient, pair.base_mask)
        if "U" in mu.flags and len(pair.annulus) >= 2 and value < base_delta:
            bad.append(("U", pair, value))
        if (
            "T" in mu.flags
            and pair.ambient.n > 1
            and base_delta == 2
            and value < 3
        ):
            bad.append(("T", pair, value))
        if (
            "C" in mu.flags
            and len(pair.base) == 1
            and determined_points(pair)
            and value != 0
        ):
            bad.append(("C", pair, value))
    return bad
