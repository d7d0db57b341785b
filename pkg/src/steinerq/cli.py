"""Command-line front end.

Every verb maps to one library operation (or a short pipeline).  Exit
status: 0 on success, 1 on domain errors (the library error name is
printed), 2 on parse errors.  Reports are deterministic given the inputs
and --seed; --json mirrors each report as one structured document.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import amalgam as am
from . import bridge, classify, documents as docs, predim, quasigroups as qg
from . import spaces
from .errors import SteinerqError


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _point_list(arg: str) -> list[str]:
    return [p for p in arg.split(",") if p != ""]


def _emit(args, text: str, payload: dict):
    if args.json:
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _cmd_validate(args):
    space = docs.parse_structure(_read(args.infile))
    lines = spaces.lines_of(space)
    text = f"valid: {space.n} points, {len(lines)} lines"
    _emit(args, text, {"valid": True, "points": space.n, "lines": len(lines)})


def _cmd_eta(args):
    space = spaces.build_eta()
    _emit(args, docs.print_structure(space), docs.structure_doc(space))


def _cmd_delta(args):
    space = docs.parse_structure(_read(args.infile))
    d = predim.delta(space)
    _emit(args, f"delta = {d}", {"delta": d})


def _cmd_dim(args):
    space = docs.parse_structure(_read(args.infile))
    report = predim.dim(space, _point_list(args.set))
    text = f"dim = {report.value}\nwitness = {','.join(map(str, report.witness))}"
    _emit(
        args,
        text,
        {
            "dim": report.value,
            "witness": [str(p) for p in report.witness],
            "breakdown": [
                {"line": [str(p) for p in line], "nullity": nu}
                for line, nu in report.breakdown
            ],
        },
    )


def _cmd_strong(args):
    space = docs.parse_structure(_read(args.infile))
    ok = predim.is_strong(space, _point_list(args.set))
    _emit(args, f"strong = {str(ok).lower()}", {"strong": ok})


def _cmd_classify(args):
    space = docs.parse_structure(_read(args.infile))
    base = _point_list(args.base)
    c = classify.classify(base, space)
    payload = {"kind": c.kind}
    if c.kind == "k_primitive":
        payload["k"] = c.k
        text = f"classification = {c.k}-primitive"
        if c.k == 0:
            good = classify.is_good(base, space)
            payload["good"] = good
            pair = classify.ExtensionPair(space, frozenset(base))
            payload["code"] = classify.canonical_code(pair).hex()
            text += f"\ngood = {str(good).lower()}\ncode = {payload['code']}"
    else:
        text = f"classification = {c.kind}"
    _emit(args, text, payload)


def _cmd_chi(args):
    space = docs.parse_structure(_read(args.infile))
    pair = docs.parse_pair(_read(args.pair))
    emb = {}
    for piece in _point_list(args.embed):
        src, _, dst = piece.partition("=")
        emb[src] = dst
    value = classify.chi(space, pair, emb)
    _emit(args, f"chi = {value}", {"chi": value})


def _cmd_check_class(args):
    space = docs.parse_structure(_read(args.infile))
    mu = docs.parse_mu(_read(args.mu))
    k0 = predim.in_K0(space)
    payload = {"in_K0": k0}
    lines = [f"in_K0 = {str(k0).lower()}"]
    if k0:
        res = classify.in_K_mu(space, mu, args.max_ambient, args.max_annulus)
        payload["in_K_mu"] = res.ok
        lines.append(f"in_K_mu = {str(res.ok).lower()}")
        if not res.ok:
            v = res.violation
            payload["violation"] = {
                "code": v.code.hex(),
                "base": [str(p) for p in v.base],
                "chi": v.chi,
                "bound": v.bound,
            }
            lines.append(
                f"violation: pair={v.code.hex()} base={','.join(map(str, v.base))}"
                f" chi={v.chi} bound={v.bound}"
            )
    _emit(args, "\n".join(lines), payload)


def _cmd_amalgamate(args):
    left = docs.parse_structure(_read(args.left))
    right = docs.parse_structure(_read(args.right))
    out = am.amalgam_over(left, right)
    _emit(args, docs.print_structure(out), docs.structure_doc(out))


def _cmd_grow(args):
    seed_space = docs.parse_structure(_read(args.infile))
    mu = docs.parse_mu(_read(args.mu))
    if args.pair:
        catalog = [docs.parse_pair(_read(p)) for p in args.pair]
    else:
        catalog = [classify.alpha_pair()]
    trace = am.generic_grow(seed_space, mu, args.budget, catalog, args.seed)
    text = am.serialize_trace(trace) + docs.print_structure(trace.result)
    _emit(
        args,
        text,
        {
            "steps": [
                {
                    "index": s.index,
                    "pair": s.pair_code.hex(),
                    "base": [str(p) for p in s.base],
                    "outcome": s.outcome,
                }
                for s in trace.steps
            ],
            "result": docs.structure_doc(trace.result),
            "seed": trace.seed,
            "budget": trace.budget,
        },
    )


def _cmd_block_algebra(args):
    modulus = None
    if args.modulus:
        modulus = [int(c) for c in args.modulus.split(",")]
    field = qg.gf(args.p, args.n, modulus)
    magma = qg.block_algebra(field, args.a)
    _emit(args, docs.print_magma(magma), docs.magma_doc(magma))


def _cmd_check_variety(args):
    magma, _ = docs.parse_magma(_read(args.infile))
    ok = qg.check_2q_variety_witness(magma, args.q)
    _emit(args, f"witness = {str(ok).lower()}", {"witness": ok})


def _make_rng(args):
    return random.Random(args.seed)


def _cmd_coordinatize(args):
    space = docs.parse_structure(_read(args.infile))
    f2, _ = docs.parse_magma(_read(args.f2))
    rng = _make_rng(args) if args.policy == "seeded" else None
    alg = bridge.coordinatize(space, f2, args.policy, rng)
    text = docs.print_magma(alg.magma, alg.points)
    _emit(args, text, docs.magma_doc(alg.magma, alg.points))


def _cmd_extract(args):
    magma, points = docs.parse_magma(_read(args.infile))
    labels = points if points is not None else tuple(str(i) for i in range(magma.order))
    space = bridge.gamma_extract(magma, labels)
    _emit(args, docs.print_structure(space), docs.structure_doc(space))


def _cmd_derive_stm(args):
    space = docs.parse_structure(_read(args.infile))
    magma = bridge.derive_steiner_mult(space)
    text = docs.print_magma(magma, space.labels)
    _emit(args, text, docs.magma_doc(magma, space.labels))


def _cmd_complete_lines(args):
    space = docs.parse_structure(_read(args.infile))
    out = bridge.complete_lines(space, args.q)
    _emit(args, docs.print_structure(out), docs.structure_doc(out))


def _cmd_expand(args):
    space = docs.parse_structure(_read(args.infile))
    f2, _ = docs.parse_magma(_read(args.f2))
    expansions = bridge.enumerate_expansions(space, f2)
    text = [f"expansions = {len(expansions)}"]
    for i, s in enumerate(expansions):
        text.append(f"-- expansion {i}")
        text.append(docs.print_tau_prime(s).rstrip("\n"))
    _emit(
        args,
        "\n".join(text),
        {"count": len(expansions), "expansions": [docs.tau_prime_doc(s) for s in expansions]},
    )


def _cmd_mu_prime(args):
    mu = docs.parse_mu(_read(args.mu))
    pair = docs.parse_pair(_read(args.pair))
    value = bridge.derive_mu_prime(mu, pair)
    _emit(args, f"mu_prime = {value}", {"mu_prime": value})


def _cmd_orbit_check(args):
    space = docs.parse_structure(_read(args.infile))
    f2, _ = docs.parse_magma(_read(args.f2))
    rng = _make_rng(args) if args.policy == "seeded" else None
    alg = bridge.coordinatize(space, f2, args.policy, rng)
    invariant = bridge.invariance_orbit_check(space, args.a, args.b, alg)
    text = f"invariant = {str(invariant).lower()} (finite orbit evidence)"
    _emit(args, text, {"invariant": invariant, "evidence": "finite orbit check"})


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="steinerq",
        description="finite linear spaces, predimension calculus and "
        "quasigroup coordinatization",
    )
    sub = top.add_subparsers(dest="verb", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, help=kw.pop("help", None))
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized choices")
        p.set_defaults(fn=fn)
        return p

    p = add("validate", _cmd_validate, help="validate a structure document")
    p.add_argument("--in", dest="infile", required=True)

    add("eta", _cmd_eta, help="emit the 12-point single-unary-function witness structure")

    p = add("delta", _cmd_delta, help="predimension of a structure")
    p.add_argument("--in", dest="infile", required=True)

    p = add("dim", _cmd_dim, help="dimension of a point set inside a structure")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--set", required=True, help="comma-separated point names")

    p = add("strong", _cmd_strong, help="strong-substructure test")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--set", required=True)

    p = add("classify", _cmd_classify, help="primitive/decomposable classification")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--base", required=True)

    p = add("chi", _cmd_chi, help="disjoint copy count of a pair over an embedding")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--pair", required=True)
    p.add_argument("--embed", required=True, help="basept=target,... mapping")

    p = add("check-class", _cmd_check_class, help="K0 and bounded K_mu membership")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--max-ambient", type=int, default=12)
    p.add_argument("--max-annulus", type=int, default=5)

    p = add("amalgamate", _cmd_amalgamate, help="canonical amalgam over the overlap")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = add("grow", _cmd_grow, help="bounded mu-respecting generic growth")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--pair", action="append", help="catalog pair document (repeatable)")

    p = add("block-algebra", _cmd_block_algebra, help="block algebra over GF(p^n)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--modulus", help="comma-separated coefficients, low degree first")

    p = add("check-variety", _cmd_check_variety, help="2-generated witness checks")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--q", type=int, required=True)

    p = add("coordinatize", _cmd_coordinatize, help="copy a witness algebra onto each line")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--policy", choices=("canonical", "seeded"), default="canonical")

    p = add("extract", _cmd_extract, help="lines := 2-generated subalgebras")
    p.add_argument("--in", dest="infile", required=True)

    p = add("derive-stm", _cmd_derive_stm, help="third-point multiplication of an STS")
    p.add_argument("--in", dest="infile", required=True)

    p = add("complete-lines", _cmd_complete_lines, help="extend every line to length q")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--q", type=int, required=True)

    p = add("expand", _cmd_expand, help="enumerate multiplication expansions")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--f2", required=True)

    p = add("mu-prime", _cmd_mu_prime, help="derived bound of an expanded pair")
    p.add_argument("--mu", required=True)
    p.add_argument("--pair", required=True)

    p = add("orbit-check", _cmd_orbit_check, help="is the product automorphism-invariant")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--policy", choices=("canonical", "seeded"), default="canonical")

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except docs.ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except SteinerqError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
