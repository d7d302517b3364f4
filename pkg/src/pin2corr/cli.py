"""Command-line interface: ``pin2corr [global options] <command> ...``.

Exit status is 0 on success, 1 when a check fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Optional, Sequence

from . import catalog as cat
from .algebra import DEFAULT_VMAX, AlgebraError, torsion_blocks
from .hm_side import StandardUModule, UModuleError, connected_sum_hm, connected_sum_hm_oracle, delta_and_t
from .reporting import Report, render
from .standard_module import (
    SPHERE,
    ModuleError,
    StandardRModule,
    correction_terms,
    delta_invariant,
    lspace_check,
    tower_bottoms,
    zero_surgery_terms,
)
from .surgery import (
    LITERAL,
    MINUS,
    PLUS,
    SURGERED,
    SurgeryError,
    SurgerySpec,
    even_surgery_from_knot,
    even_surgery_terms,
    minus_terms_check,
    mutation_kill_rate,
    odd_surgery_terms,
    verify_triangle,
    whitehead_double_terms,
)
from .textio import CorrectionDocument, SemanticError, TextFormatError, TriangleSpec, ZeroData, emit_module, read_document
from .tor_engine import FPModule, TorError, geography_realize, geography_sketch, split_towers, tor_r

DEFAULT_WINDOW = (-40, 40)

# raised by the engines on inputs that violate their constraints
INPUT_ERRORS = (TextFormatError, SemanticError, ModuleError, UModuleError, TorError, SurgeryError, AlgebraError, OSError, KeyError)


class InputError(Exception):
    """Bad command-line input; reported with exit status 2."""


class CheckFailed(Exception):
    """Raised after a report is printed when one of its checks failed."""


def _terms(abg) -> Report:
    a, b, c = abg
    known = [x for x in abg if x is not None]
    return {"alpha": a, "beta": b, "gamma": c, "mu": known[0] % 2 if known else None}


def _load(path: str):
    if not os.path.exists(path):
        raise InputError(f"no such file: {path}")
    return read_document(path)


def _module_or_entry(ref: str):
    """A document from a file, or the HS module of a catalog entry of that name."""
    if os.path.exists(ref):
        return read_document(ref)
    try:
        e = cat.get_entry(ref)
    except KeyError:
        raise InputError(f"{ref} is neither a file nor a catalog entry") from None
    if e.hs is not None:
        return e.hs
    if e.corr is not None:
        return CorrectionDocument(e.name, e.corr)
    raise InputError(f"catalog entry {ref} has no module")


# ---------------------------------------------------------------------------
# commands


def cmd_corr(args) -> Report:
    doc = _module_or_entry(args.module)
    if isinstance(doc, StandardRModule):
        if doc.kind == SPHERE:
            c = correction_terms(doc)
            a, b, cc = tower_bottoms(doc)
            rep = {"name": doc.name, "kind": doc.kind, **_terms(c.abg), "bottoms": {"a": a, "b": b, "c": cc}}
            rep["Delta"] = delta_invariant(doc)
            rep["lspace"] = lspace_check(doc)
        else:
            rep = {"name": doc.name, "kind": doc.kind, "zero_terms": zero_surgery_terms(doc)}
        if args.figures:
            from .plotting import plot_r_module

            rep["figure"] = plot_r_module(doc, args.figures)
        return rep
    if isinstance(doc, StandardUModule):
        d, t = delta_and_t(doc)
        return {"name": args.module, "kind": "umodule", "delta": d, "t": t}
    if isinstance(doc, CorrectionDocument):
        return {"name": doc.name, "kind": "corr", **{k: v for k, v in doc.corr.as_dict().items()}}
    raise InputError(f"corr does not apply to a {type(doc).__name__} document")


def _sign_of(m: int) -> str:
    return PLUS if m > 0 else MINUS


def cmd_surgery(args) -> Report:
    if args.m == 0:
        raise InputError("--m must be nonzero")
    zero: Optional[ZeroData] = None
    if args.zero_data:
        doc = _load(args.zero_data)
        if not isinstance(doc, ZeroData):
            raise InputError(f"{args.zero_data} is not a zerodata document")
        zero = doc
        if zero.arf != args.arf:
            raise InputError(f"--arf {args.arf} disagrees with arf {zero.arf} in {args.zero_data}")
    ambient = args.ambient_delta if args.ambient_delta is not None else (zero.ambient_delta if zero else 0)
    rep: Report = {"arf": args.arf, "m": args.m, "ambient_delta": ambient}
    if args.m % 2 == 0:
        if args.delta_prime is not None:
            terms = even_surgery_terms(args.delta_prime, _sign_of(args.m), ambient, args.reading)
            rep["rule"] = f"even surgery ({args.reading} reading)"
        elif zero is not None:
            terms = even_surgery_from_knot(SurgerySpec(ambient, args.arf, args.m, zero.terms))
            rep["rule"] = "even surgery from delta_plus"
        else:
            raise InputError("even m needs --delta-prime or --zero-data with delta_plus")
    else:
        if zero is None:
            raise InputError("odd m needs --zero-data")
        spec = SurgerySpec(ambient, args.arf, args.m, zero.terms)
        terms = odd_surgery_terms(spec)
        rep["rule"] = f"odd surgery, Arf {args.arf}"
        rep["minus_terms"] = minus_terms_check(spec)
    rep.update(_terms(terms))
    return rep


def cmd_whitehead(args) -> Report:
    return {"delta_k": args.delta_k, **_terms(whitehead_double_terms(args.delta_k))}


def cmd_consum(args) -> Report:
    entries = []
    for ref in args.entries:
        if os.path.exists(ref):
            doc = read_document(ref)
            if not isinstance(doc, StandardUModule):
                raise InputError(f"{ref} is not a umodule document")
            entries.append(cat.CatalogEntry(ref, "from file", hm=doc))
        else:
            try:
                entries.append(cat.get_entry(ref))
            except KeyError:
                raise InputError(f"unknown catalog entry {ref}") from None
    missing = [e.name for e in entries if e.hm is None]
    if missing:
        raise InputError(f"no HM-to known for {', '.join(missing)}")
    total = entries[0].hm
    agrees = True
    for e in entries[1:]:
        fast = connected_sum_hm(total, e.hm)
        agrees = agrees and fast == connected_sum_hm_oracle(total, e.hm)
        total = fast
    corr = cat.sum_correction(entries)
    d, t = delta_and_t(total)
    rep: Report = {
        "summands": " # ".join(e.name for e in entries),
        "delta": d,
        "t": t,
        **_terms(corr.abg),
        "hm": {"tower_bottom": total.tower_bottom, "blocks": [{"bottom": b, "length": n} for b, n in total.blocks]},
        "oracle_agrees": agrees,
    }
    if args.figures:
        from .plotting import plot_u_module

        rep["figure"] = plot_u_module(total, args.figures, "consum")
    if not agrees:
        raise CheckFailed(rep)
    return rep


def cmd_tor(args) -> Report:
    docs = [_load(p) for p in (args.first, args.second)]
    for p, d in zip((args.first, args.second), docs):
        if not isinstance(d, FPModule):
            raise InputError(f"{p} is not an fp document")
    lo, hi = args.window
    if lo >= hi:
        raise InputError(f"empty window [{lo}, {hi}]")
    if (hi - lo) // 4 > args.vmax:
        raise InputError(f"window [{lo}, {hi}] needs V-powers beyond --vmax {args.vmax}")
    if args.length < 1:
        raise InputError("--length must be at least 1")
    tor = tor_r(docs[0], docs[1], lo, hi, max_h=args.length)
    rep: Report = {"first": docs[0].name, "second": docs[1].name, "window": {"lo": lo, "hi": hi}, "length": args.length}
    rows = []
    for h in sorted(tor.modules):
        for d, n in sorted(tor.dims(h).items(), reverse=True):
            if n:
                rows.append({"h": h, "degree": d, "dim": n})
    rep["dims"] = rows
    tops, torsion = split_towers(tor.modules[0], lo)
    rep["tor0_tower_tops"] = [{"top": x} for x in tops]
    blocks = [{"h": 0, "bottom": b, "length": n} for b, n in torsion]
    for h in sorted(tor.modules):
        if h:
            blocks += [{"h": h, "bottom": b, "length": n} for b, n in torsion_blocks(tor.modules[h], "V")]
    rep["torsion_blocks"] = blocks
    if args.figures:
        from .plotting import plot_tor_table

        rep["figure"] = plot_tor_table(tor, args.figures, f"{docs[0].name}_{docs[1].name}")
    return rep


def cmd_geography(args) -> Report:
    r = geography_realize(args.a, args.b, args.c)
    rep = {**r.as_dict(), "verified": True}
    if args.figures:
        from .plotting import plot_r_module
        from .standard_module import grading_shift

        rep["figure"] = plot_r_module(grading_shift(geography_sketch(r.k, r.kp), 2 * r.n), args.figures)
    return rep


def _triangle_spec(ref: str) -> TriangleSpec:
    if os.path.exists(ref):
        doc = read_document(ref)
        if not isinstance(doc, TriangleSpec):
            raise InputError(f"{ref} is not a triangle document")
        return doc
    if ref == "trefoil":
        return TriangleSpec("trefoil", "trefoil")
    parts = ref.split(":")
    if len(parts) == 3 and parts[0] == "bar" and parts[1] in "01" and parts[2] in "01":
        return TriangleSpec(ref, "bar", int(parts[1]), int(parts[2]))
    raise InputError(f"{ref} is not a file, 'trefoil', or 'bar:<arf>:<parity>'")


def cmd_verify_triangle(args) -> Report:
    spec = _triangle_spec(args.triangle)
    try:
        t = spec.build()
    except (IndexError, KeyError) as exc:
        raise InputError(f"mutation outside the triangle's maps: {exc}") from None
    report = verify_triangle(t)
    rep: Report = {"name": spec.name, "passed": report.passed}
    rep["checks"] = [{"check": k, "passed": ok, "failing_degrees": " ".join(map(str, report.failures().get(k, []))) or "none"} for k, ok in report.summary().items()]
    if args.mutants:
        killed, total = mutation_kill_rate(t, args.mutants)
        rep["mutants"] = {"killed": killed, "total": total}
    if args.figures:
        from .plotting import plot_triangle_report

        rep["figure"] = plot_triangle_report(report, args.figures)
    if not report.passed or (args.mutants and rep["mutants"]["killed"] < rep["mutants"]["total"]):
        raise CheckFailed(rep)
    return rep


def _module_summary(m: StandardRModule) -> Report:
    return {
        "kind": m.kind,
        "text": [{"line": ln} for ln in emit_module(m).splitlines()],
    }


def cmd_catalog(args) -> Report:
    entries = cat.load_catalog()
    if args.action == "list":
        return {"entries": [{"name": e.name, "source": e.flag_map.get(cat.SOURCE, ""), "description": e.description} for e in entries]}
    if not args.name:
        raise InputError("catalog show needs an entry name")
    try:
        e = cat.get_entry(args.name, entries)
    except KeyError:
        raise InputError(f"unknown catalog entry {args.name}; try 'catalog list'") from None
    rep = e.as_dict()
    rep["provenance"] = [{"note": p} for p in e.provenance]
    rep["flags"] = {k: v for k, v in e.flags} or {"none": True}
    if e.hm is not None:
        rep["hm"] = {"tower_bottom": e.hm.tower_bottom, "blocks": [{"bottom": b, "length": n} for b, n in e.hm.blocks]}
    if e.hs is not None:
        rep["hs"] = _module_summary(e.hs)
    return rep


def cmd_check_all(args) -> Report:
    results = cat.check_all()
    rep: Report = {
        "total": len(results),
        "failed": sum(1 for r in results if not r.ok),
        "checks": [{"check": r.name, "ok": r.ok, "detail": r.detail or "-"} for r in results],
    }
    if args.figures:
        from .plotting import plot_check_summary

        rep["figure"] = plot_check_summary(results, args.figures)
    if rep["failed"]:
        raise CheckFailed(rep)
    return rep


# ---------------------------------------------------------------------------
# argument parsing


def _global_options(defaults: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global options with suppressed defaults so they work in either position
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--window", nargs=2, type=int, metavar=("LO", "HI"), default=d(DEFAULT_WINDOW), help="degree window (default -40 40)")
    p.add_argument("--vmax", type=int, default=d(DEFAULT_VMAX), help="largest V-power kept (default 64)")
    p.add_argument("--format", choices=("text", "json"), default=d("text"), help="output format")
    p.add_argument("--figures", metavar="DIR", default=d(None), help="write figures into DIR")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pin2corr",
        description="Correction terms of Pin(2)-monopole Floer modules: surgeries, connected sums, Tor, triangles.",
        parents=[_global_options(True)],
    )
    sub = parser.add_subparsers(dest="command", metavar="<command>")
    sub.required = True
    common = [_global_options(False)]

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=common, help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("corr", cmd_corr, "correction terms of a module file or catalog entry")
    p.add_argument("module", help="module file, or the name of a catalog entry")

    p = add("surgery", cmd_surgery, "correction terms of 1/m surgery on a knot in an L-space")
    p.add_argument("--arf", type=int, choices=(0, 1), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--zero-data", metavar="FILE")
    p.add_argument("--ambient-delta", type=int, default=None)
    p.add_argument("--delta-prime", type=int, default=None, help="delta of the surgered manifold (even m)")
    p.add_argument("--reading", choices=(LITERAL, SURGERED), default=LITERAL)

    p = add("whitehead", cmd_whitehead, "correction terms of +1 surgery on a Whitehead double")
    p.add_argument("--delta-k", type=int, required=True)

    p = add("consum", cmd_consum, "HM-to and correction data of a connected sum")
    p.add_argument("entries", nargs="+", help="catalog entry names or umodule files")

    p = add("tor", cmd_tor, "Tor over R of two finitely presented modules")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--length", type=int, default=2, help="number of Tor groups to compute")

    p = add("geography", cmd_geography, "realize (alpha, beta, gamma) by a connected sum")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)

    p = add("verify-triangle", cmd_verify_triangle, "check an exact triangle")
    p.add_argument("triangle", help="triangle file, 'trefoil' or 'bar:<arf>:<parity>'")
    p.add_argument("--mutants", type=int, default=0, help="also run this many single-entry mutants")

    p = add("catalog", cmd_catalog, "list or show built-in examples")
    p.add_argument("action", choices=("list", "show"), nargs="?", default="list")
    p.add_argument("name", nargs="?")

    add("check-all", cmd_check_all, "run every catalog and cross-engine check")
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.vmax < 1:
        err.write("pin2corr: --vmax must be positive\n")
        return 2
    try:
        rep = args.func(args)
    except CheckFailed as exc:
        out.write(render(exc.args[0], args.format))
        return 1
    except InputError as exc:
        err.write(f"pin2corr {args.command}: {exc}\n")
        return 2
    except INPUT_ERRORS as exc:
        err.write(f"pin2corr {args.command}: {exc}\n")
        return 2
    out.write(render(rep, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
