"""Canonical amalgams and bounded mu-respecting generic growth.

The amalgam of A and B over their shared part C keeps all triples of both
sides and fuses, for every pair of shared points, the two lines through that
pair into a single line.  Growth repeatedly attaches fresh copies of catalog
good pairs over strong base embeddings while the copy count stays below the
mu bound, re-checking class membership after every step; offending steps are
rejected rather than merged, which preserves all stated invariants at desk
scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from hashlib import blake2b
from itertools import permutations

from .classify import (
    ExtensionPair,
    MuFunction,
    canonical_code,
    chi,
    in_K_mu,
    is_good,
    mu_eval,
)
from .errors import SteinerqError
from .predim import dim_value, in_K0, is_strong_mask
from .spaces import LinearSpace, _label_key, fresh_labels, induced, new_linear_space


class NotCompatible(SteinerqError):
    """Amalgam inputs do not share their common part as an induced structure."""


class SeedNotInClass(SteinerqError):
    """Growth seeds must lie in K0 and satisfy the mu bounds."""


@dataclass(frozen=True)
class AmalgamInput:
    left: LinearSpace
    right: LinearSpace
    shared: LinearSpace

    def check(self):
        overlap = set(self.left.labels) & set(self.right.labels)
        if set(self.shared.labels) != overlap:
            raise NotCompatible("shared part must be the label intersection")
        for side in (self.left, self.right):
            if induced(side, self.shared.labels) != self.shared:
                raise NotCompatible("shared part is not induced in both sides")
        for s in (self.left, self.right, self.shared):
            if not in_K0(s):
                raise NotCompatible("amalgam inputs must lie in K0")


def _line_trace(space: LinearSpace, p, q) -> frozenset:
    line = space.line_through(p, q)
    return frozenset(line.members) if line else frozenset((p, q))


def amalgam(inp: AmalgamInput) -> LinearSpace:
    """A + B over C: keep both triple sets; points a in A-C and b in B-C are
    collinear exactly when a line based in C carries a on the A side and b on
    the B side, and then the two side lines fuse into one."""
    inp.check()
    triples = set(inp.left.triples) | set(inp.right.triples)
    shared = sorted(inp.shared.labels, key=_label_key)
    for i, p in enumerate(shared):
        for q in shared[i + 1 :]:
            fused = _line_trace(inp.left, p, q) | _line_trace(inp.right, p, q)
            if len(fused) >= 3:
                members = sorted(fused, key=_label_key)
                for a in range(len(members)):
                    for b in range(a + 1, len(members)):
                        for c in range(b + 1, len(members)):
                            triples.add((members[a], members[b], members[c]))
    points = set(inp.left.labels) | set(inp.right.labels)
    return new_linear_space(points, triples)


def amalgam_over(left: LinearSpace, right: LinearSpace) -> LinearSpace:
    """Amalgam with the shared part inferred from the label overlap."""
    overlap = set(left.labels) & set(right.labels)
    return amalgam(AmalgamInput(left, right, induced(left, overlap)))


def smoothness_check(samples) -> list:
    """Counterexamples to: base strong in the whole implies base strong in
    every intermediate.  samples: (space, mid subset, base subset) triples
    with base <= mid <= points(space)."""
    bad = []
    for space, mid, base in samples:
        b_mask = space.mask_of(base)
        if not is_strong_mask(space, b_mask):
            continue
        middle = induced(space, mid)
        if not is_strong_mask(middle, middle.mask_of(base)):
            bad.append((space, tuple(mid), tuple(base)))
    return bad


# ---------------------------------------------------------------------------
# bounded generic growth


@dataclass(frozen=True)
class GrowthStep:
    index: int
    pair_code: bytes
    base: tuple
    outcome: str  # accept | reject


@dataclass(frozen=True)
class GrowthTrace:
    steps: tuple
    result: LinearSpace
    seed: int
    budget: int


def serialize_trace(trace: GrowthTrace) -> str:
    lines = []
    for s in trace.steps:
        base = ",".join(str(p) for p in s.base)
        lines.append(
            f"step {s.index} pair={s.pair_code.hex()} base={base} outcome={s.outcome}"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def trace_digest(trace: GrowthTrace) -> str:
    return blake2b(serialize_trace(trace).encode(), digest_size=16).hexdigest()


def _attach(space: LinearSpace, pair: ExtensionPair, emb: dict) -> LinearSpace:
    """Amalgam of the space with a fresh copy of the pair over the base."""
    ann = sorted(pair.annulus, key=_label_key)
    fresh = fresh_labels(space, len(ann))
    relabel = dict(emb)
    relabel.update(dict(zip(ann, fresh)))
    copy_triples = [tuple(relabel[p] for p in t) for t in pair.ambient.triples]
    copy = new_linear_space(list(relabel.values()), copy_triples)
    shared = induced(space, emb.values())
    return amalgam(AmalgamInput(space, copy, shared))


def _base_embeddings(space: LinearSpace, pair: ExtensionPair) -> list[dict]:
    """Injective base maps that are induced isomorphisms onto their image."""
    base = sorted(pair.base, key=_label_key)
    out = []
    for image in permutations(space.labels, len(base)):
        emb = dict(zip(base, image))
        ok = True
        for t in pair.ambient.triples:
            if all(p in emb for p in t):
                if not space.collinear(*(emb[p] for p in t)):
                    ok = False
                    break
        if not ok:
            continue
        img_set = set(image)
        for t in space.triples:
            if all(p in img_set for p in t):
                inv = {v: k for k, v in emb.items()}
                if not pair.ambient.collinear(*(inv[p] for p in t)):
                    ok = False
                    break
        if ok:
            out.append(emb)
    return out


def generic_grow(
    seed_structure: LinearSpace,
    mu: MuFunction,
    budget: int,
    catalog: list[ExtensionPair],
    rng_seed: int,
    check_ambient: int = 10,
    check_annulus: int = 4,
) -> GrowthTrace:
    """Attach catalog good pairs over strong bases until the point budget or
    a fixpoint; every accepted step leaves the structure in K0 and inside the
    (bounded) mu check.  Deterministic for a fixed rng_seed."""
    if not in_K0(seed_structure) or not in_K_mu(
        seed_structure, mu, check_ambient, check_annulus
    ):
        raise SeedNotInClass("seed must lie in K0 and satisfy mu")
    for pair in catalog:
        if not in_K0(pair.ambient) or not is_good(pair.base, pair.ambient):
            raise SeedNotInClass("catalog entries must be good pairs over K0 ambients")

    bounds = [mu_eval(mu, pair) for pair in catalog]
    rng = random.Random(rng_seed)
    space = seed_structure
    steps = []
    rejected: set = set()
    step_no = 0

    while True:
        candidates = []
        for idx, pair in enumerate(catalog):
            if space.n + len(pair.annulus) > budget:
                continue
            for emb in _base_embeddings(space, pair):
                image = tuple(sorted(emb.values(), key=_label_key))
                key = (idx, tuple(sorted(emb.items())))
                if key in rejected:
                    continue
                mask = space.mask_of(image)
                if not is_strong_mask(space, mask):
                    continue
                base_dim = dim_value(space, image)
                candidates.append((base_dim, image, idx, emb, key))

        candidates.sort(key=lambda c: (c[0], tuple(str(p) for p in c[1]), c[2]))
        shuffled = []
        i = 0
        while i < len(candidates):
            j = i
            while (
                j < len(candidates)
                and candidates[j][0] == candidates[i][0]
                and candidates[j][1] == candidates[i][1]
            ):
                j += 1
            group = candidates[i:j]
            rng.shuffle(group)
            shuffled.extend(group)
            i = j

        progressed = False
        for base_dim, image, idx, emb, key in shuffled:
            pair = catalog[idx]
            if space.n + len(pair.annulus) > budget:
                continue
            if chi(space, pair, emb) >= bounds[idx]:
                continue
            grown = _attach(space, pair, emb)
            ok = in_K0(grown) and bool(
                in_K_mu(grown, mu, check_ambient, check_annulus)
            )
            outcome = "accept" if ok else "reject"
            base_order = tuple(
                emb[b] for b in sorted(pair.base, key=_label_key)
            )
            steps.append(
                GrowthStep(step_no, canonical_code(pair), base_order, outcome)
            )
            step_no += 1
            if ok:
                space = grown
                progressed = True
                break
            rejected.add(key)
        if not progressed:
            break

    return GrowthTrace(tuple(steps), space, rng_seed, budget)


def replay_states(seed_structure: LinearSpace, trace: GrowthTrace, catalog):
    """The intermediate structures after each accepted step, re-derived by
    re-attaching along the trace (for verification harnesses)."""
    by_code = {canonical_code(p): p for p in catalog}
    space = seed_structure
    states = [space]
    for step in trace.steps:
        if step.outcome != "accept":
            continue
        pair = by_code[step.pair_code]
        base = sorted(pair.base, key=_label_key)
        emb = dict(zip(base, step.base))  # step.base is in sorted-base order
        space = _attach(space, pair, emb)
        states.append(space)
    return states
