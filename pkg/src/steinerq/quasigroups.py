"""Finite magmas, quasigroups, Galois fields and block algebras.

A magma is a finite set with a total binary operation table; it is a
quasigroup when the table is a Latin square.  Block algebras are the
quasigroups x*y = y + (x-y)*a over a Galois field with a primitive element
a; they are idempotent and their automorphism group is the sharply
2-transitive affine group, which is what makes them coordinatize Steiner
systems with prime-power line length.

Equations are binary term trees over at most two variables; satisfaction is
checked exhaustively over all assignments, which suffices because every
identity used here involves only two variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

from .errors import DeskScaleExceeded, SteinerqError

AUT_ORDER_CAP = 16


class NotPrime(SteinerqError):
    """The field characteristic must be prime."""


class Reducible(SteinerqError):
    """The requested field modulus factors over its prime field."""


class NotPrimitiveElement(SteinerqError):
    """Block algebras require a generator of the multiplicative group."""


@dataclass(frozen=True)
class FiniteMagma:
    """A total binary operation table on 0..order-1 (row x, column y)."""

    order: int
    table: tuple

    def __post_init__(self):
        if len(self.table) != self.order:
            raise ValueError("table must be square")
        for row in self.table:
            if len(row) != self.order or any(
                not (0 <= v < self.order) for v in row
            ):
                raise ValueError("table entries must be element indices")

    def op(self, x: int, y: int) -> int:
        return self.table[x][y]

    @staticmethod
    def from_rows(rows) -> "FiniteMagma":
        t = tuple(tuple(r) for r in rows)
        return FiniteMagma(len(t), t)


def is_quasigroup(m: FiniteMagma) -> bool:
    """Every row and every column is a permutation (Latin square)."""
    full = set(range(m.order))
    for row in m.table:
        if set(row) != full:
            return False
    for j in range(m.order):
        if {m.table[i][j] for i in range(m.order)} != full:
            return False
    return True


def is_idempotent(m: FiniteMagma) -> bool:
    return all(m.table[x][x] == x for x in range(m.order))


def is_commutative(m: FiniteMagma) -> bool:
    return all(
        m.table[x][y] == m.table[y][x]
        for x in range(m.order)
        for y in range(x + 1, m.order)
    )


# term trees: "x", "y" or ("*", left, right)
VAR_X, VAR_Y = "x", "y"


def term_vars(term) -> set:
    if isinstance(term, str):
        return {term}
    return term_vars(term[1]) | term_vars(term[2])


def eval_term(term, m: FiniteMagma, x: int, y: int) -> int:
    if term == VAR_X:
        return x
    if term == VAR_Y:
        return y
    return m.op(eval_term(term[1], m, x, y), eval_term(term[2], m, x, y))


def format_term(term) -> str:
    if isinstance(term, str):
        return term
    return f"({format_term(term[1])}*{format_term(term[2])})"


@dataclass(frozen=True)
class EquationSet:
    """Named list of 2-variable identities (pairs of term trees)."""

    name: str
    equations: tuple

    def __post_init__(self):
        for lhs, rhs in self.equations:
            if len(term_vars(lhs) | term_vars(rhs)) > 2:
                raise ValueError("identities may use at most 2 variables")


def _m(a, b):
    return ("*", a, b)


STEINER_EQUATIONS = EquationSet(
    "steiner",
    (
        (_m(VAR_X, VAR_X), VAR_X),
        (_m(VAR_X, VAR_Y), _m(VAR_Y, VAR_X)),
        (_m(VAR_X, _m(VAR_X, VAR_Y)), VAR_Y),
    ),
)

STEIN_EQUATIONS = EquationSet(
    "stein",
    (
        (_m(VAR_X, VAR_X), VAR_X),
        (_m(_m(VAR_X, VAR_Y), VAR_Y), _m(VAR_Y, VAR_X)),
        (_m(_m(VAR_Y, VAR_X), VAR_Y), VAR_X),
    ),
)


def satisfies(m: FiniteMagma, eqs: EquationSet):
    """(True, None) or (False, (x, y, equation index)) on first failure."""
    for idx, (lhs, rhs) in enumerate(eqs.equations):
        for x in range(m.order):
            for y in range(m.order):
                if eval_term(lhs, m, x, y) != eval_term(rhs, m, x, y):
                    return False, (x, y, idx)
    return True, None


# ---------------------------------------------------------------------------
# Galois fields


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _poly_mul_mod(a, b, modulus, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    # reduce by the monic modulus
    n = len(modulus) - 1
    for i in range(len(out) - 1, n - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(n):
                out[i - n + j] = (out[i - n + j] - c * modulus[j]) % p
    return out[:n] + [0] * (n - len(out[:n]))


def _poly_is_irreducible(modulus, p) -> bool:
    """Trial division by all monic polynomials of degree <= n/2."""
    n = len(modulus) - 1
    if n == 1:
        return True

    def divides(d):
        rem = list(modulus)
        dd = len(d) - 1
        while len(rem) - 1 >= dd:
            lead = rem[-1]
            if lead:
                shift = len(rem) - 1 - dd
                inv = pow(d[-1], -1, p)
                f = lead * inv % p
                for i, di in enumerate(d):
                    rem[shift + i] = (rem[shift + i] - f * di) % p
            rem.pop()
        return all(c == 0 for c in rem)

    for deg in range(1, n // 2 + 1):
        for idx in range(p**deg):
            coeffs = []
            k = idx
            for _ in range(deg):
                coeffs.append(k % p)
                k //= p
            if divides(coeffs + [1]):
                return False
    return True


@dataclass(frozen=True)
class GaloisField:
    """GF(p^n) with elements encoded as integers (base-p digit vectors)."""

    p: int
    n: int
    modulus: tuple  # monic, coefficients low degree first, length n+1

    def __post_init__(self):
        if not _is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.n < 1 or len(self.modulus) != self.n + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree n")
        if not _poly_is_irreducible(list(self.modulus), self.p):
            raise Reducible("modulus factors over the prime field")

    @property
    def q(self) -> int:
        return self.p**self.n

    def _vec(self, e: int):
        out = []
        for _ in range(self.n):
            out.append(e % self.p)
            e //= self.p
        return out

    def _enc(self, v) -> int:
        e = 0
        for c in reversed(v[: self.n]):
            e = e * self.p + (c % self.p)
        return e

    def add(self, a: int, b: int) -> int:
        va, vb = self._vec(a), self._vec(b)
        return self._enc([(x + y) % self.p for x, y in zip(va, vb)])

    def neg(self, a: int) -> int:
        return self._enc([(-x) % self.p for x in self._vec(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return self._enc(_poly_mul_mod(self._vec(a), self._vec(b), list(self.modulus), self.p))

    def power(self, a: int, k: int) -> int:
        out, base = 1, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("0 has no multiplicative order")
        k, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            k += 1
        return k


def gf(p: int, n: int, modulus=None) -> GaloisField:
    """GF(p^n); when no modulus is given, the least irreducible one
    (coefficients read as a base-p integer) is chosen."""
    if not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be >= 1")
    if modulus is not None:
        return GaloisField(p, n, tuple(modulus))
    if n == 1:
        return GaloisField(p, 1, (0, 1))
    for idx in range(p**n):
        coeffs = []
        k = idx
        for _ in range(n):
            coeffs.append(k % p)
            k //= p
        cand = coeffs + [1]
        if _poly_is_irreducible(cand, p):
            return GaloisField(p, n, tuple(cand))
    raise Reducible(f"no irreducible polynomial of degree {n} found")  # unreachable


def primitive_elements(field: GaloisField) -> list[int]:
    """Generators of the multiplicative group."""
    return [a for a in range(1, field.q) if field.mult_order(a) == field.q - 1]


def block_algebra(field: GaloisField, a: int) -> FiniteMagma:
    """x*y = y + (x-y)*a; an idempotent quasigroup for primitive a."""
    if a not in primitive_elements(field):
        raise NotPrimitiveElement(f"{a} does not generate the multiplicative group")
    q = field.q
    rows = []
    for x in range(q):
        row = []
        for y in range(q):
            row.append(field.add(y, field.mul(field.sub(x, y), a)))
        rows.append(tuple(row))
    return FiniteMagma(q, tuple(rows))


# ---------------------------------------------------------------------------
# closures, automorphisms, sharp 2-transitivity


def two_generated(m: FiniteMagma, x: int, y: int) -> frozenset:
    """Least subset containing {x, y} closed under the operation."""
    closed = {x, y}
    frontier = [x, y]
    while frontier:
        nxt = []
        for u in list(closed):
            for v in frontier:
                for w in (m.op(u, v), m.op(v, u)):
                    if w not in closed:
                        closed.add(w)
                        nxt.append(w)
        frontier = nxt
    return frozenset(closed)


def automorphisms(m: FiniteMagma) -> list[tuple]:
    """All table-preserving permutations (practical bound: order <= 16)."""
    n = m.order
    if n > AUT_ORDER_CAP:
        raise DeskScaleExceeded(f"automorphism search capped at order {AUT_ORDER_CAP}")
    img = [None] * n
    used = [False] * n
    out = []

    def ok_after(v) -> bool:
        # vertices 0..v are assigned; verify every product constraint that
        # became fully determined when v got its image
        for a in range(v + 1):
            for x, y in ((a, v), (v, a)):
                t = m.op(x, y)
                if t <= v and m.op(img[x], img[y]) != img[t]:
                    return False
        for x in range(v):
            for y in range(v):
                if m.op(x, y) == v and m.op(img[x], img[y]) != img[v]:
                    return False
        return True

    def extend(v):
        if v == n:
            out.append(tuple(img))
            return
        for w in range(n):
            if used[w]:
                continue
            img[v] = w
            used[w] = True
            if ok_after(v):
                extend(v + 1)
            img[v] = None
            used[w] = False

    extend(0)
    return out


def is_sharply_2_transitive(m: FiniteMagma) -> bool:
    """Exactly one automorphism maps any ordered distinct pair to any other:
    |Aut| = n(n-1) and the pair action is regular."""
    n = m.order
    if n < 2:
        return False
    auts = automorphisms(m)
    if len(auts) != n * (n - 1):
        return False
    images = {(g[0], g[1]) for g in auts}
    return len(images) == n * (n - 1)


def _is_prime_power(k: int) -> bool:
    if k < 2:
        return False
    p = min(d for d in range(2, k + 1) if k % d == 0)
    while k % p == 0:
        k //= p
    return k == 1


def check_2q_variety_witness(f2: FiniteMagma, q: int) -> bool:
    """Finite witness check: size q, idempotent quasigroup, sharply
    2-transitive, and every distinct pair generates the whole algebra.
    Rejects immediately when q is not a prime power."""
    if not _is_prime_power(q):
        return False
    if f2.order != q:
        return False
    if not is_quasigroup(f2) or not is_idempotent(f2):
        return False
    for x, y in combinations(range(q), 2):
        if len(two_generated(f2, x, y)) != q:
            return False
    return is_sharply_2_transitive(f2)


def magmas_isomorphic(m1: FiniteMagma, m2: FiniteMagma) -> bool:
    """Brute-force isomorphism test for small orders."""
    if m1.order != m2.order:
        return False
    n = m1.order
    if n > 9:
        raise DeskScaleExceeded("isomorphism test brute-forces permutations")
    for perm in permutations(range(n)):
        if all(
            perm[m1.op(x, y)] == m2.op(perm[x], perm[y])
            for x in range(n)
            for y in range(n)
        ):
            return True
    return False
