"""Command-line entry point: construct, verify, search, report.

Exit codes: 0 success, 1 a property check failed, 2 usage or parse error,
3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Sequence

from .affine import closure
from .construct import build_rw, embed_W
from .errors import FormatError, InadmissibleError, RegaffError
from .field import QQ, make_field
from .formats import read_group, write_group
from .search import (DEFAULT_MAX_POINTS, MODES, existence_cell, existence_table, parse_field_list,
                     search_regular)
from .verify import full_suite, verify_elements

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
# Element lists are written out only up to this many points.
MAX_WRITTEN = 4096


def _add_field_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--p", type=int, help="characteristic of GF(p^ell)")
    g.add_argument("--rational", action="store_true", help="work over the rationals")
    p.add_argument("--ell", type=int, default=1, help="degree of GF(p^ell) over GF(p)")


def _add_desc_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    _add_field_args(p, required)
    p.add_argument("--n", type=int, required=required)
    w = p.add_mutually_exclusive_group()
    w.add_argument("--W", help="comma-separated field elements spanning W (embedded as (w, 0, ...))")
    w.add_argument("--W-none", action="store_true", help="W = 0, i.e. translation-free")
    p.add_argument("--example", default="auto", help="auto, 1, 2, 3 or a family name")
    p.add_argument("--d", help="comma-separated entries of d (default e_1)")


def _field(args: argparse.Namespace) -> Any:
    return QQ if args.rational else make_field(args.p, args.ell)


def _desc(args: argparse.Namespace):
    f = _field(args)
    W = None
    if args.W:
        W = [f.decode(x) for x in args.W.split(",")]
    d = [f.decode(x) for x in args.d.split(",")] if args.d else None
    desc = build_rw(f, args.n, W=None, d=d, example=args.example)
    if W is not None:
        desc = build_rw(f, args.n, W=embed_W(f, desc.k, W), d=d, example=args.example)
    return desc


def cmd_construct(args: argparse.Namespace) -> int:
    desc = _desc(args)
    report = full_suite(desc, seed=args.seed)
    f = desc.field
    order = "infinite" if desc.order is None else str(desc.order)
    print(f"family: {desc.kind} (m, k) = ({desc.m}, {desc.k}) over {f}")
    print(f"order: {order}")
    print(f"|R meet Tr|: {len(report.translations)}")
    print(f"verdict: {'PASS' if report.ok else 'FAIL'} [{report.closure_verified}]")
    if args.out:
        elems = []
        if desc.order is not None and desc.order <= MAX_WRITTEN:
            elems = list(desc.elements())
        write_group(args.out, f, desc.n, desc=desc, gens=desc.generators(), elems=elems,
                    comments=[f"order {order}", f"|R meet Tr| = {len(report.translations)}"])
        print(f"wrote {args.out}")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_verify(args: argparse.Namespace) -> int:
    if args.infile:
        gf = read_group(args.infile)
        if gf.elems:
            report = verify_elements(gf.elems, gf.field, gf.n, desc=gf.desc)
        elif gf.desc is not None:
            report = full_suite(gf.desc, seed=args.seed)
        elif gf.gens:
            if not gf.field.is_finite:
                raise FormatError("an explicit group over Q needs a FAMILY description")
            target = gf.field.order**gf.n
            try:
                S = closure(gf.gens, limit=target)
            except ValueError:
                print(f"generators produce more than q^n = {target} elements")
                print("verdict: FAIL")
                return EXIT_FAIL
            report = verify_elements(S, gf.field, gf.n)
        else:
            raise FormatError("file holds no group")
    else:
        if args.n is None or (args.p is None and not args.rational):
            raise argparse.ArgumentTypeError("verify needs --in or field and --n flags")
        report = full_suite(_desc(args), seed=args.seed)
    print(report.render())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_search(args: argparse.Namespace) -> int:
    f = make_field(args.p, args.ell)
    res = search_regular(args.n, f, args.mode, budget_nodes=args.budget_nodes,
                         checkpoint=args.checkpoint, resume=args.resume, threads=args.threads)
    print(res.summary())
    if not res.complete:
        if args.checkpoint:
            print(f"checkpoint written to {args.checkpoint}")
        return EXIT_BUDGET
    witnesses = res.witnesses()
    if witnesses and args.out:
        write_group(args.out, f, args.n, elems=sorted(witnesses[0], key=_elem_key),
                    comments=["translation-free regular subgroup found by search"])
        print(f"wrote first witness to {args.out}")
    return EXIT_OK


def _elem_key(g: Any) -> tuple:
    return tuple(g.mat.a.flat)


def _label(f: Any) -> str:
    return "Q" if not f.is_finite else str(f.order)


def cmd_report(args: argparse.Namespace) -> int:
    fields = parse_field_list(args.fields)
    ns = range(1, args.max_n + 1)
    cells = existence_table(ns, fields, max_points=args.max_points, budget_nodes=args.budget_nodes,
                            seed=args.seed)
    print("Existence of translation-free regular subgroups of AGL_n(F)")
    print()
    width = max(len(c.verdict) for c in cells)
    print(f"{'n':>3}  {'|F|':>4}  {'verdict':<{width}}  provenance")
    for c in cells:
        print(f"{c.n:>3}  {c.q_label:>4}  {c.verdict:<{width}}  {c.provenance}")
    print()
    for c in cells:
        print(c.row())
    print()
    print("Translation-free groups do not come from products in general")
    gf4 = make_field(2, 2)
    desc = build_rw(gf4, 6)
    rep = full_suite(desc, seed=args.seed)
    print(f"  AGL_6(4), {desc.kind}: order {desc.order}, |R meet Tr| = {len(rep.translations)}, "
          f"verdict {'PASS' if rep.ok else 'FAIL'} [{rep.closure_verified}]")
    c34 = next((c for c in cells if c.n == 3 and c.field == gf4), None)
    if c34 is None:
        c34 = existence_cell(3, gf4, args.max_points, args.budget_nodes, args.seed)
    print(f"  AGL_3(4): {c34.verdict} ({c34.provenance}; {c34.detail})")
    print("  so the AGL_6(4) group is not a direct product of two translation-free AGL_3(4) groups")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regaff", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build R_W and verify it")
    _add_desc_args(p)
    p.add_argument("--out", help="write a group file")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="verify a group file or a construction")
    p.add_argument("--in", dest="infile", help="group file")
    _add_desc_args(p, required=False)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="exhaustive search inside the unitriangular group")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--mode", choices=MODES, default="find_translation_free")
    p.add_argument("--budget-nodes", type=int)
    p.add_argument("--checkpoint")
    p.add_argument("--resume")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="write the first translation-free witness here")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("report", help="existence table")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--fields", default="2,3,4,5,Q", help="comma-separated prime powers and/or Q")
    p.add_argument("--max-points", type=int, default=DEFAULT_MAX_POINTS,
                   help="search cells with q^n up to this size")
    p.add_argument("--budget-nodes", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InadmissibleError as exc:
        print(f"error: inadmissible parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (argparse.ArgumentTypeError, RegaffError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
