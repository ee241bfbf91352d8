"""Command-line entry point.

Exit codes: 0 success, 1 a verdict contradicts its expectation, 2 usage
error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from . import hilbert as hb
from .catalog import GeneratorSpec, complement_ortho, generate, mo_orthocomplementation
from .core import (
    MAX_PRODUCT_ATOMS,
    BudgetExceeded,
    ClosureSpace,
    Verdict,
    WeakTensorError,
    fails,
    has_covering_property,
    holds,
    is_power_set,
    loads,
    to_dot,
    unknown,
)
from .products import (
    DEFAULT_BUDGET,
    LazyTopProduct,
    ProductContext,
    aerts_product,
    box_product,
    circ_product,
    enumerate_top,
    separated_product,
)
from .structure import (
    Exhausted,
    NotFactorable,
    NotLarge,
    automorphisms,
    central_elements,
    contains_mo,
    factor_endomorphism,
    find_orthocomplementation,
    is_connected,
    is_orthomodular,
    is_weakly_connected,
)
from .universal import NotBimorphism, factor_bimorphism, galois_correspondence, parse_map_table

log = logging.getLogger("weaktensor")

EXIT_OK, EXIT_UNEXPECTED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- io helpers


def write_atomic(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, target)


def read_input(path: str) -> str:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    log.info("input %s sha256=%s", path, hashlib.sha256(text.encode()).hexdigest()[:16])
    return text


def read_lattice(path: str) -> ClosureSpace:
    return loads(read_input(path), max_atoms=MAX_PRODUCT_ATOMS)


def verdict_document(v: Verdict, elapsed: float, **extra) -> str:
    doc = {**v.to_dict(), "timing_seconds": round(elapsed, 4), **extra}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _exit_for(v: Verdict, expect: str | None) -> int:
    if expect is None or v.status.value == expect:
        return EXIT_OK
    return EXIT_UNEXPECTED


def _default_ortho(L: ClosureSpace):
    if is_power_set(L):
        return complement_ortho(L)
    if len(L) == L.n_atoms + 2 and L.n_atoms % 2 == 0:
        return mo_orthocomplementation(L.n_atoms, L)
    found = find_orthocomplementation(L)
    if isinstance(found, Exhausted):
        raise UsageError("factor has no orthocomplementation")
    return found


def _product_context(args) -> ProductContext:
    return ProductContext([read_lattice(p) for p in args.factors])


def _parse_atoms(ctx: ProductContext, text: str) -> int:
    names = text.split()
    try:
        return ctx.ground.encode(names)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"unknown product atom: {exc}") from exc


# ---------------------------------------------------------------- verbs


def cmd_gen(args) -> int:
    if args.kind == "powerset":
        spec = GeneratorSpec.power_set(args.n)
    elif args.kind == "mo":
        spec = GeneratorSpec.mo(args.n)
    else:
        spec = GeneratorSpec.projective(args.q, args.d)
    write_atomic(args.output, generate(spec).dumps() + "\n")
    return EXIT_OK


def cmd_product(args) -> int:
    factors = [read_lattice(p) for p in args.factors]
    if args.kind == "sep":
        L = separated_product(factors, args.budget)
    elif args.kind == "top":
        L = enumerate_top(factors, args.budget)
    elif args.kind == "aerts":
        L = aerts_product(factors, [_default_ortho(F) for F in factors], args.budget).space
    elif args.kind == "circ":
        if len(factors) != 2:
            raise UsageError("circ takes exactly two factors")
        L = circ_product(*factors)
    else:
        if len(factors) != 2:
            raise UsageError("box takes exactly two factors")
        b = box_product(*factors, budget=args.budget)
        write_atomic(args.output, verdict_document(b.verdict, 0.0, size=len(b)))
        return EXIT_OK
    write_atomic(args.output, L.dumps() + "\n")
    return EXIT_OK


def cmd_member(args) -> int:
    top = LazyTopProduct(_product_context(args))
    R = _parse_atoms(top.context, args.set)
    inside = R in top
    sys.stdout.write(json.dumps({"member": inside, "set": top.names(R)}, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_join(args) -> int:
    top = LazyTopProduct(_product_context(args))
    R = top.closure(_parse_atoms(top.context, args.atoms))
    sys.stdout.write(json.dumps({"join": top.names(R)}, sort_keys=True) + "\n")
    return EXIT_OK


def _check_factor(L: ClosureSpace, args) -> Verdict:
    if not args.factors:
        raise UsageError("check factor needs --factors")
    ctx = ProductContext([read_lattice(p) for p in args.factors])
    if ctx.n_atoms != L.n_atoms:
        raise UsageError("factor sizes do not match the lattice")
    auts = automorphisms(L)
    for u in auts:
        try:
            factor_endomorphism(u, ctx)
        except (NotLarge, NotFactorable) as exc:
            return fails({"images": list(u.images), "reason": str(exc)})
    return holds({"automorphisms": len(auts)})


def cmd_check(args) -> int:
    L = read_lattice(args.lattice)
    start = time.perf_counter()
    prop = args.property
    if prop == "covering":
        v = has_covering_property(L)
    elif prop == "ortho":
        found = find_orthocomplementation(L)
        if isinstance(found, Exhausted):
            v = fails({"explored": found.explored}, note=found.reason)
        else:
            v = holds({"perp": {L.ground.atoms[p]: L.names(found.perp_atom(p)) for p in range(L.n_atoms)}})
    elif prop == "omod":
        found = find_orthocomplementation(L)
        v = unknown(note="no orthocomplementation") if isinstance(found, Exhausted) else is_orthomodular(L, found)
    elif prop == "central":
        dec = central_elements(L)
        v = holds({"central_atoms": [L.names(z) for z in dec.central_atoms],
                   "reconstruction": dec.reconstruction.status.value})
    elif prop == "mo":
        if args.n is None:
            raise UsageError("check mo needs N")
        v = contains_mo(L, args.n)
    elif prop == "connected":
        c, w = is_connected(L), is_weakly_connected(L)
        v = Verdict(w.status, {"connected": c.to_dict(), "weakly_connected": w.to_dict()})
    else:
        v = _check_factor(L, args)
    write_atomic(args.output, verdict_document(v, time.perf_counter() - start, check=prop))
    return _exit_for(v, args.expect)


def cmd_galois(args) -> int:
    L1, L2 = read_lattice(args.left), read_lattice(args.right)
    start = time.perf_counter()
    rep = galois_correspondence(L1, L2, args.budget, args.seed)
    write_atomic(args.output, verdict_document(rep.verdict, time.perf_counter() - start,
                                               maps=rep.counts[0], members=rep.counts[1]))
    return _exit_for(rep.verdict, "holds")


def cmd_factor_bimorphism(args) -> int:
    L1, L2, L = read_lattice(args.left), read_lattice(args.right), read_lattice(args.target)
    g = parse_map_table(read_input(args.table), L1, L2, L)
    start = time.perf_counter()
    try:
        h = factor_bimorphism(g, L1, L2, L)
    except NotBimorphism as exc:
        v = fails(exc.witness, note=str(exc))
        write_atomic(args.output, verdict_document(v, time.perf_counter() - start))
        return EXIT_UNEXPECTED
    preimages = {" ".join(L.names(b)) or "-": h.context.names(h.preimage(b)) for b in L.closed}
    v = holds({"preimages": preimages}, note="h restricts to g on rectangles and preimages lie in the top product")
    write_atomic(args.output, verdict_document(v, time.perf_counter() - start))
    return EXIT_OK


def _read_points(text: str) -> list[tuple[hb.ProjPoint, hb.ProjPoint]]:
    """Lines ``(a,b) (c,d)``: one product atom per line."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"expected two points per line: {line!r}")
        out.append((hb.parse_point(parts[0]), hb.parse_point(parts[1])))
    return out


def _subspace_doc(e: hb.DCircElement) -> dict:
    return {"m": e.m, "n": e.n, "rank": e.space.rank, "canonical": e.canonical,
            "basis": [[hb.format_entry(x) for x in row] for row in e.space.basis]}


def cmd_hilbert(args) -> int:
    start = time.perf_counter()
    if args.hverb == "coatom":
        e = hb.coatom_from_matrix(hb.parse_matrix(read_input(args.matrix)))
        v = holds(_subspace_doc(e))
    elif args.hverb == "member":
        e = hb.coatom_from_matrix(hb.parse_matrix(read_input(args.matrix)))
        p1, p2 = hb.parse_point(args.p1), hb.parse_point(args.p2)
        inside = hb.member(e, p1, p2)
        v = holds({"member": True}) if inside else fails({"member": False})
    elif args.hverb == "join":
        e = hb.dcirc_join(_read_points(read_input(args.atoms)))
        doc = _subspace_doc(e)
        if args.probe:
            p1, p2 = (hb.parse_point(x) for x in args.probe)
            doc["probe_member"] = hb.member(e, p1, p2)
        v = holds(doc)
    else:
        rep = hb.strict_inclusion_witnesses(args.m, args.n, args.seed)
        doc = {"separated_gap": rep.separated_verdict.to_dict(), "checks": rep.checks,
               "triple": [[str(a), str(b)] for a, b in rep.triple], "fourth": [str(x) for x in rep.fourth]}
        v = holds(doc) if rep.ok else fails(doc)
    write_atomic(args.output, verdict_document(v, time.perf_counter() - start))
    return EXIT_OK if args.hverb == "member" else _exit_for(v, "holds")


def cmd_theorem(args) -> int:
    from . import harness

    ids = list(harness.CHECKS) if args.tverb == "all" else [args.id]
    red = []
    rows = []
    for cid in ids:
        start = time.perf_counter()
        try:
            v = harness.run(cid, args.seed)
        except harness.UnknownCheck:
            raise UsageError(f"unknown theorem id {cid!r}; choose from {', '.join(harness.CHECKS)}") from None
        elapsed = time.perf_counter() - start
        if args.results:
            write_atomic(str(Path(args.results) / f"{cid}.json"), verdict_document(v, elapsed))
        if not v.holds:
            red.append(cid)
        rows.append(f"{cid:<16} {v.status.value:<8} {elapsed:8.2f}s")
    sys.stdout.write("\n".join(rows) + "\n")
    if red:
        sys.stdout.write("red alerts: " + ", ".join(red) + "\n")
    return EXIT_UNEXPECTED if red else EXIT_OK


def cmd_export_dot(args) -> int:
    write_atomic(args.output, to_dot(read_lattice(args.lattice)))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weaktensor", description="Weak tensor products of finite closure spaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--seed", type=int, default=0, help="seed for every randomized step (default 0)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="closed-set budget for enumerations")
    p.add_argument("-v", "--verbose", action="store_true")
    # the same options after the verb; SUPPRESS keeps the top-level value unless repeated
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", help="generate a catalog lattice", parents=[common])
    g.add_argument("--kind", choices=["powerset", "mo", "projective"], required=True)
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    pr = sub.add_parser("product", help="build a product of lattice files", parents=[common])
    pr.add_argument("--kind", choices=["sep", "top", "box", "aerts", "circ"], required=True)
    pr.add_argument("factors", nargs="+")
    pr.add_argument("-o", "--output")
    pr.set_defaults(func=cmd_product)

    for name, func, arg, helptext in (("member", cmd_member, "--set", "test membership in the top product"),
                                      ("join", cmd_join, "--atoms", "join in the top product")):
        s = sub.add_parser(name, help=helptext, parents=[common])
        s.add_argument("factors", nargs="+")
        s.add_argument(arg, required=True, help="space separated product atom names such as '(p0,p1)'")
        s.set_defaults(func=func)

    c = sub.add_parser("check", help="check a property of a lattice file", parents=[common])
    c.add_argument("property", choices=["covering", "ortho", "omod", "central", "mo", "connected", "factor"])
    c.add_argument("args", nargs="+", help="[N] LATTICE")
    c.add_argument("--factors", nargs="+")
    c.add_argument("--expect", choices=["holds", "fails", "unknown"])
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_check)

    ga = sub.add_parser("galois", help="join-preserving maps L1 -> L2* against the top product", parents=[common])
    ga.add_argument("left")
    ga.add_argument("right")
    ga.add_argument("-o", "--output")
    ga.set_defaults(func=cmd_galois)

    fb = sub.add_parser("factor-bimorphism", help="factor a bimorphism through the top product", parents=[common])
    fb.add_argument("left")
    fb.add_argument("right")
    fb.add_argument("target")
    fb.add_argument("table", help="map table: lines 'p1 p2 -> atoms' ('-' for empty)")
    fb.add_argument("-o", "--output")
    fb.set_defaults(func=cmd_factor_bimorphism)

    h = sub.add_parser("hilbert", help="exact product-vector constructions", parents=[common])
    hs = h.add_subparsers(dest="hverb", required=True)
    hc = hs.add_parser("coatom", parents=[common])
    hc.add_argument("--matrix", required=True)
    hm = hs.add_parser("member", parents=[common])
    hm.add_argument("--matrix", required=True)
    hm.add_argument("--p1", required=True)
    hm.add_argument("--p2", required=True)
    hj = hs.add_parser("join", parents=[common])
    hj.add_argument("--atoms", required=True, help="file with lines '(a,b) (c,d)'")
    hj.add_argument("--probe", nargs=2, metavar=("P1", "P2"))
    hw = hs.add_parser("witnesses", parents=[common])
    hw.add_argument("--m", type=int, default=2)
    hw.add_argument("--n", type=int, default=2)
    for s in (hc, hm, hj, hw):
        s.add_argument("-o", "--output")
    h.set_defaults(func=cmd_hilbert)

    t = sub.add_parser("theorem", help="run theorem checks", parents=[common])
    ts = t.add_subparsers(dest="tverb", required=True)
    tr = ts.add_parser("run", parents=[common])
    tr.add_argument("id")
    ta = ts.add_parser("all", parents=[common])
    for s in (tr, ta):
        s.add_argument("--results", help="directory for per-check verdict documents")
    t.set_defaults(func=cmd_theorem)

    d = sub.add_parser("export-dot", help="Hasse diagram in DOT", parents=[common])
    d.add_argument("lattice")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_export_dot)
    return p


def _split_check_args(args) -> None:
    if args.verb != "check":
        return
    rest = list(args.args)
    args.n = None
    if args.property == "mo":
        if len(rest) != 2:
            raise UsageError("usage: check mo N LATTICE")
        try:
            args.n = int(rest.pop(0))
        except ValueError:
            raise UsageError("N must be an integer") from None
    if len(rest) != 1:
        raise UsageError("check takes exactly one lattice file")
    args.lattice = rest[0]


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(name)s: %(message)s")
    log.info("version %s seed %d budget %d", __version__, args.seed, args.budget)
    func: Callable = args.func
    try:
        _split_check_args(args)
        return func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc} (partial {exc.partial})", file=sys.stderr)
        return EXIT_BUDGET
    except (WeakTensorError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
