"""Command-line entry point: ``bmpoisson <command> ...``.

Exit codes: 0 success, 1 a check or domain failure, 2 bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cohomology import CohomologyReport, cohomology_dims, table_report
from .glue import GluedStructure, Grid, glue_report
from .leaves import trace_leaf
from .models import PUBLISHED_LIE, ModelId, flaschka_ratiu, get_model, model_lie_class, proportionality_check
from .multivector import MultiVector, as_matrix, is_poisson, pfaffian
from .poly import Polynomial, parse
from .tables import discrepancy_report, render_table
from .verify import DEFAULT_SEED, SUITES, run


class UsageError(Exception):
    pass


def _model_arg(text: str) -> str:
    try:
        return ModelId.parse(text).code
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _poly_arg(text: str) -> Polynomial:
    try:
        return parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad polynomial {text!r}: {exc}") from None


def _point_arg(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("a point needs four comma-separated coordinates x1,x2,x3,t")
    return vals


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _emit(args, text: str):
    if getattr(args, "out", None) and args.command != "trace":
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# -- commands -------------------------------------------------------------------

def model_dump(code: str, k: Polynomial | None = None) -> dict:
    m = get_model(code)
    k = k if k is not None else Polynomial.const(1)
    biv = m.bivector_with(k)
    factor = proportionality_check(m.bivector, m.paper_bivector)
    lie = model_lie_class(code)
    flags = []
    published = PUBLISHED_LIE[m.code]
    if published is None:
        flags.append("unnamed-in-paper")
    elif published != lie.name:
        flags.append(f"published-class-mismatch: {published}")
    if factor is None:
        flags.append("table4-form-not-proportional")
    return {
        "model": m.code,
        "component_dim": m.id.component_dim,
        "kind": m.id.kind,
        "morse_index": m.id.morse_index,
        "casimirs": [str(c) for c in m.casimirs],
        "differentials": [[str(p) for p in d] for d in m.differentials],
        "k": str(k),
        "bivector": biv.to_json_obj(),
        "bivector_text": str(biv),
        "paper_bivector": m.paper_bivector.to_json_obj(),
        "paper_bivector_text": str(m.paper_bivector),
        "table4_form": m.table4_form,
        "proportionality_factor": None if factor is None else str(factor),
        "normal_form": m.normal_form.to_json_obj(),
        "lie_class": lie.name,
        "published_lie_class": published,
        "killing_signature": list(lie.killing_signature),
        "derived_dim": lie.derived_dim,
        "structure_constants": [[[str(v) for v in row] for row in plane] for plane in lie.structure_constants],
        "flags": flags,
    }


def cmd_model(args) -> int:
    _emit(args, _dump(model_dump(args.model, args.k)))
    return 0


def cmd_fr(args) -> int:
    pi = flaschka_ratiu(args.c1, args.c2, args.k if args.k is not None else 1)
    out = {
        "casimirs": [str(args.c1), str(args.c2)],
        "k": str(args.k if args.k is not None else 1),
        "bivector": pi.to_json_obj(),
        "bivector_text": str(pi),
        "is_poisson": is_poisson(pi),
        "pfaffian": str(pfaffian(pi)),
    }
    if args.format == "text":
        _emit(args, f"{pi}\npoisson: {out['is_poisson']}\npfaffian: {out['pfaffian']}")
    else:
        _emit(args, _dump(out))
    return 0


def cmd_verify(args) -> int:
    grid = Grid.parse(args.grid) if args.grid else None
    results = run(args.suite, seed=args.seed, grid=grid, n_points=args.points, n_triples=args.triples)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        _emit(args, _dump({
            "seed": args.seed,
            "suite": args.suite,
            "results": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
            "failed": [r.name for r in failed],
        }))
    else:
        lines = [f"seed: {args.seed}", f"suite: {args.suite}"]
        lines += [r.line() for r in results]
        lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
        if failed:
            lines.append("failed: " + "; ".join(r.name for r in failed))
        _emit(args, "\n".join(lines))
    return 1 if failed else 0


def cmd_tables(args) -> int:
    if args.which == "all":
        report = discrepancy_report()
        fmt = args.format or "text"
        text = {"json": lambda: _dump(report.to_json_obj()), "csv": report.to_csv, "text": report.to_text}[fmt]()
        _emit(args, text)
        return 0
    _emit(args, render_table(int(args.which), args.format or "text"))
    return 0


def cmd_trace(args) -> int:
    m = get_model(args.model)
    hams = args.h or [parse("x3")]
    try:
        sample = trace_leaf(m.normal_form, args.start, hams, args.step, args.n, model=m.code)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out or f"trace_{m.code}.csv")
    sidecar = sample.write(out)
    summary = {**sample.sidecar(), "csv": str(out), "sidecar": str(sidecar), "points": len(sample.points),
               "return_distance": sample.return_distance()}
    print(_dump(summary))
    return 0


def cmd_glue(args) -> int:
    grid = Grid.parse(args.grid) if args.grid else Grid.cube(-1.0, 1.0, 21)
    pi_f = as_matrix(get_model(args.pi_f).normal_form).evaluate if args.pi_f else None
    gs = GluedStructure.tubes(args.model, r0=args.r0, r1=args.r1, eps=args.eps, pi_f=pi_f)
    report = glue_report(gs, grid, h=args.h, exclude=args.exclude)
    report["rank_histogram"] = {b: {str(r): n for r, n in hist.items()} for b, hist in report["rank_histogram"].items()}
    _emit(args, _dump(report))
    return 0


def _load_bivector(source: str) -> tuple:
    try:
        return get_model(source).code, None
    except ValueError:
        pass
    path = Path(source)
    if not path.exists():
        raise UsageError(f"{source!r} is neither a model id nor a multivector JSON file")
    pi = MultiVector.from_json(path.read_text())
    return path.name, pi


def cmd_cohomology(args) -> int:
    name, pi = _load_bivector(args.target)
    degrees = tuple(int(d) for d in args.degrees.split(","))
    if pi is None:
        report = table_report(name, degrees)
    else:
        try:
            results = {d: cohomology_dims(pi, d) for d in degrees}
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        report = CohomologyReport(model=name, results=results)
    text = _dump(report.to_json_obj()) if args.format == "json" else report.to_text()
    _emit(args, text)
    return 0


# -- parser ------------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=f"random seed (default {DEFAULT_SEED})")
    p.add_argument("--out", default=argparse.SUPPRESS, help="write output to this path")
    p.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="bmpoisson", parents=[common],
                                     description="Poisson structures on 3-d Bott-Morse foliations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", parents=[common], help="dump a catalog model as JSON")
    p.add_argument("model", type=_model_arg)
    p.add_argument("--k", type=_poly_arg, default=None, help="conformal factor (polynomial)")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("fr", parents=[common], help="Flaschka-Ratiu bivector from two Casimirs")
    p.add_argument("c1", type=_poly_arg)
    p.add_argument("c2", type=_poly_arg)
    p.add_argument("--k", type=_poly_arg, default=None)
    p.set_defaults(func=cmd_fr)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--grid", action="append", help="lo:hi:n, once for all axes or four times")
    p.add_argument("--points", type=int, default=1000, help="random points per model (symplectic)")
    p.add_argument("--triples", type=int, default=100, help="random triples per bracket identity (jacobi)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tables", parents=[common], help="reproduce a published table with per-cell verdicts")
    p.add_argument("which", choices=[str(n) for n in range(2, 9)] + ["all"])
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("trace", parents=[common], help="trace a leaf by Hamiltonian flows (CSV + JSON sidecar)")
    p.add_argument("model", type=_model_arg)
    p.add_argument("--h", type=_poly_arg, action="append", help="Hamiltonian, repeat to chain flows (default x3)")
    p.add_argument("--start", type=_point_arg, required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--n", type=int, default=1000)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("glue", parents=[common], help="glued-structure Jacobiator and rank report")
    p.add_argument("--model", type=_model_arg, default="c0-i0")
    p.add_argument("--grid", action="append")
    p.add_argument("--r0", type=float, default=0.5)
    p.add_argument("--r1", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--h", type=float, default=1e-4, help="finite-difference step")
    p.add_argument("--exclude", type=float, default=1e-3, help="skip points this close to the singular set")
    p.add_argument("--pi-f", type=_model_arg, default=None,
                   help="use this model's normal form as the regular structure (breaks the gluing unless proportional)")
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("cohomology", parents=[common], help="graded Poisson cohomology of a linear bivector")
    p.add_argument("target", help="model id or path to a multivector JSON file")
    p.add_argument("--degrees", default="0,1,2,3")
    p.set_defaults(func=cmd_cohomology)
    return parser


def _join_values(argv: list) -> list:
    """Turn ``--grid -1:1:21`` into ``--grid=-1:1:21`` (and the same for
    ``--start``) so values with a leading minus are not read as options."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--grid", "--start") and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_values(argv))
    for name, default in (("seed", DEFAULT_SEED), ("out", None), ("format", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.command in ("verify", "glue") and args.grid:
        try:
            Grid.parse(args.grid)
        except ValueError as exc:
            parser.error(str(exc))
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
