"""Text document formats shared by the CLI.

All three document kinds are UTF-8 JSON:

  structure  { "points": ["a", ...], "triples": [["a","b","c"], ...] }
  magma      { "order": n, "table": [[...], ...], "points": [...]? }
  mu         { "q": n, "default_rule": "...", "overrides": [{"code": hex,
               "bound": k}, ...], "flags": ["U", ...] }

Expanded structures add "H" (ordered 3-element lists) to a structure
document; pair documents add "base" (and optionally "H").  Parsing rejects
duplicate triples; printing is canonical so parse(print(x)) == x.
"""

from __future__ import annotations

import json

from .bridge import TauPrimeStructure, validate_tau_prime
from .classify import ExtensionPair, MuFunction
from .errors import SteinerqError
from .quasigroups import FiniteMagma
from .spaces import LinearSpace, _label_key, new_linear_space


class ParseError(SteinerqError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from e


def _expect(cond: bool, message: str):
    if not cond:
        raise ParseError(message)


def _parse_points_triples(doc) -> tuple[list, list]:
    _expect(isinstance(doc, dict), "document must be a JSON object")
    pts = doc.get("points")
    trips = doc.get("triples")
    _expect(isinstance(pts, list) and all(isinstance(p, str) for p in pts),
            "'points' must be a list of strings")
    _expect(len(set(pts)) == len(pts), "duplicate points")
    _expect(isinstance(trips, list), "'triples' must be a list")
    seen = set()
    for t in trips:
        _expect(isinstance(t, list) and len(t) == 3
                and all(isinstance(p, str) for p in t),
                f"triple {t!r} must be a 3-element list of strings")
        key = frozenset(t)
        _expect(key not in seen, f"duplicate triple {sorted(t)!r}")
        seen.add(key)
    return pts, trips


def parse_structure(text: str) -> LinearSpace:
    pts, trips = _parse_points_triples(_load(text))
    return new_linear_space(pts, [tuple(t) for t in trips])


def structure_doc(space: LinearSpace) -> dict:
    return {
        "points": [str(p) for p in space.labels],
        "triples": sorted(
            [str(p) for p in sorted(t, key=_label_key)] for t in space.triples
        ),
    }


def print_structure(space: LinearSpace) -> str:
    return json.dumps(structure_doc(space), indent=1, sort_keys=True) + "\n"


def parse_magma(text: str) -> tuple[FiniteMagma, tuple | None]:
    doc = _load(text)
    _expect(isinstance(doc, dict), "document must be a JSON object")
    order = doc.get("order")
    table = doc.get("table")
    _expect(isinstance(order, int) and order >= 0, "'order' must be an integer")
    _expect(isinstance(table, list) and len(table) == order,
            "'table' must have one row per element")
    for row in table:
        _expect(isinstance(row, list) and len(row) == order,
                "table rows must all have length 'order'")
        for v in row:
            _expect(isinstance(v, int) and 0 <= v < order,
                    f"table entry {v!r} out of range")
    points = doc.get("points")
    if points is not None:
        _expect(isinstance(points, list) and len(points) == order
                and all(isinstance(p, str) for p in points),
                "'points' must name each element")
        points = tuple(points)
    return FiniteMagma(order, tuple(tuple(r) for r in table)), points


def magma_doc(m: FiniteMagma, points=None) -> dict:
    doc = {"order": m.order, "table": [list(r) for r in m.table]}
    if points is not None:
        doc["points"] = [str(p) for p in points]
    return doc


def print_magma(m: FiniteMagma, points=None) -> str:
    return json.dumps(magma_doc(m, points), indent=1, sort_keys=True) + "\n"


def parse_mu(text: str) -> MuFunction:
    doc = _load(text)
    _expect(isinstance(doc, dict), "document must be a JSON object")
    q = doc.get("q")
    _expect(isinstance(q, int), "'q' must be an integer")
    rule = doc.get("default_rule", "floor-delta")
    _expect(isinstance(rule, str), "'default_rule' must be a string")
    overrides = []
    for entry in doc.get("overrides", []):
        _expect(isinstance(entry, dict) and set(entry) == {"code", "bound"},
                "overrides are {code, bound} objects")
        try:
            code = bytes.fromhex(entry["code"])
        except (TypeError, ValueError):
            raise ParseError(f"bad code {entry['code']!r}")
        _expect(isinstance(entry["bound"], int) and entry["bound"] >= 0,
                "bounds must be non-negative integers")
        overrides.append((code, entry["bound"]))
    flags = doc.get("flags", [])
    _expect(isinstance(flags, list) and all(isinstance(f, str) for f in flags),
            "'flags' must be a list of strings")
    try:
        return MuFunction(q, tuple(overrides), rule, frozenset(flags))
    except ValueError as e:
        raise ParseError(str(e)) from e


def mu_doc(mu: MuFunction) -> dict:
    return {
        "q": mu.q,
        "default_rule": mu.default_rule,
        "overrides": [
            {"code": code.hex(), "bound": bound} for code, bound in mu.overrides
        ],
        "flags": sorted(mu.flags),
    }


def print_mu(mu: MuFunction) -> str:
    return json.dumps(mu_doc(mu), indent=1, sort_keys=True) + "\n"


def _parse_h(doc, space: LinearSpace):
    h = doc.get("H")
    _expect(isinstance(h, list), "'H' must be a list of ordered triples")
    out = set()
    for t in h:
        _expect(isinstance(t, list) and len(t) == 3
                and all(isinstance(p, str) for p in t),
                f"H entry {t!r} must be a 3-element list")
        for p in t:
            _expect(p in set(space.labels), f"H uses unknown point {p!r}")
        out.add(tuple(t))
    return frozenset(out)


def parse_tau_prime(text: str) -> TauPrimeStructure:
    doc = _load(text)
    pts, trips = _parse_points_triples(doc)
    space = new_linear_space(pts, [tuple(t) for t in trips])
    s = TauPrimeStructure(space, _parse_h(doc, space))
    try:
        validate_tau_prime(s)
    except ValueError as e:
        raise ParseError(str(e)) from e
    return s


def tau_prime_doc(s: TauPrimeStructure) -> dict:
    doc = structure_doc(s.space)
    doc["H"] = sorted([str(p) for p in t] for t in s.h_triples)
    return doc


def print_tau_prime(s: TauPrimeStructure) -> str:
    return json.dumps(tau_prime_doc(s), indent=1, sort_keys=True) + "\n"


def parse_pair(text: str) -> ExtensionPair:
    doc = _load(text)
    pts, trips = _parse_points_triples(doc)
    space = new_linear_space(pts, [tuple(t) for t in trips])
    base = doc.get("base")
    _expect(isinstance(base, list) and all(isinstance(p, str) for p in base),
            "'base' must be a list of point names")
    for p in base:
        _expect(p in set(space.labels), f"base uses unknown point {p!r}")
    h = _parse_h(doc, space) if "H" in doc else frozenset()
    try:
        return ExtensionPair(space, frozenset(base), h)
    except ValueError as e:
        raise ParseError(str(e)) from e


def pair_doc(pair: ExtensionPair) -> dict:
    doc = structure_doc(pair.ambient)
    doc["base"] = sorted(str(p) for p in pair.base)
    if pair.h_triples:
        doc["H"] = sorted([str(p) for p in t] for t in pair.h_triples)
    return doc


def print_pair(pair: ExtensionPair) -> str:
    return json.dumps(pair_doc(pair), indent=1, sort_keys=True) + "\n"
