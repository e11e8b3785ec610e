"""Command-line front end.

Commands::

    stolinv pipeline [--order K] [--out FILE] [--format text|structured] [--fixtures DIR] [--exact]
    stolinv eval {stolarsky,gini} P Q X Y
    stolinv verify-family THEOREM CASE [--params ...] [--samples N] [--seed S] [--tol T]
    stolinv refute {v=w,v=-w}
    stolinv derive --order 2M

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .engine import EngineError, PipelineConfig, derive_coefficient, refute_candidate, run_full_pipeline
from .exact import format_rational
from .families import FamilyError, get_case, verify_family
from .fixtures import FixtureError, load_fixtures
from .means import GINI, STOLARSKY, MeanDomainError, MeanParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _positive_float(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return x


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--samples", type=_positive_int, default=10_000, help="Monte Carlo samples (default 10000)")
    p.add_argument("--tol", type=_positive_float, default=1e-12, help="relative tolerance (default 1e-12)")
    p.add_argument("--out", help="write the report to this file")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--fixtures", help="directory of reference .poly files (default: bundled)")
    p.add_argument("--workers", type=_positive_int, default=1, help="processes for Monte Carlo shards")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="stolinv", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", parents=[common], help="run every proof stage and emit a report")
    p.add_argument("--order", type=int, default=13, help="truncation order K (default 13)")
    p.add_argument("--exact", action="store_true", help="compute the final resultant exactly")

    p = sub.add_parser("eval", parents=[common], help="evaluate a mean")
    p.add_argument("family", choices=(STOLARSKY, GINI))
    for name in ("p", "q", "x", "y"):
        p.add_argument(name, type=float)

    p = sub.add_parser("verify-family", parents=[common], help="Monte Carlo check of a solution family")
    p.add_argument("theorem", choices=("S", "G", "CorS", "CorG"))
    p.add_argument("case_id")
    p.add_argument("--params", type=float, nargs="*", default=None,
                   help="free parameters, or a prefix a b c d [p [q]]; omitted: random member")

    p = sub.add_parser("refute", parents=[common], help="order-10 coefficient at a v = +-w candidate")
    p.add_argument("case", choices=("v=w", "v=-w"))

    p = sub.add_parser("derive", parents=[common], help="print one defect coefficient")
    p.add_argument("--order", type=int, required=True, help="even coefficient order 2m")
    p.add_argument("--param", choices=("reparam", "raw"), default="reparam")
    p.add_argument("--no-eliminate", action="store_true", help="do not substitute the t and r bindings")
    return parser


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_pipeline(args) -> int:
    try:
        cfg = PipelineConfig(order=args.order, seed=args.seed, samples=args.samples, tol=args.tol,
                             fixtures=args.fixtures, exact=args.exact, workers=args.workers)
    except ValueError as exc:
        print(f"stolinv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run_full_pipeline(cfg)
    _emit(args, report.to_json() if args.format == "structured" else report.to_text())
    failed = report.failed_stage
    if failed is not None:
        print(f"stolinv: stage {failed.name} failed: {failed.diagnostic}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        m = MeanParams(args.family, args.p, args.q)
        value = m(args.x, args.y)
    except (MeanDomainError, ValueError) as exc:
        print(f"stolinv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    shown = repr(float(f"{value:.15g}"))
    if args.format == "structured":
        _emit(args, _dump({"family": args.family, "p": args.p, "q": args.q, "x": args.x, "y": args.y,
                           "value": shown}))
    else:
        _emit(args, shown + "\n")
    return EXIT_OK


def cmd_verify_family(args) -> int:
    try:
        case = get_case(args.theorem, args.case_id)
        params = args.params
        if params is None and not case.params:
            params = []
        chk = verify_family(args.theorem, args.case_id, params, samples=args.samples, seed=args.seed,
                            tol=args.tol, workers=args.workers)
    except FamilyError as exc:
        print(f"stolinv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "structured":
        _emit(args, _dump({"family": chk.label, "params": list(chk.params), "samples": chk.samples,
                           "max_residual": chk.max_residual, "worst_sample": list(chk.worst),
                           "tol": chk.tol, "ok": chk.ok}))
    else:
        t = ", ".join(f"{x:.15g}" for x in chk.params)
        _emit(args, f"{chk.label} ({t}): max relative residual {chk.max_residual:.3e} over {chk.samples} samples"
                    f" -> {'ok' if chk.ok else 'BREACH'}\n")
    if not chk.ok:
        x, y = chk.worst
        print(f"stolinv: residual {chk.max_residual:.3e} > {chk.tol:g} at x={x!r}, y={y!r}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_refute(args) -> int:
    try:
        ref = refute_candidate(args.case)
    except EngineError as exc:
        print(f"stolinv: {exc}", file=sys.stderr)
        return EXIT_FAIL
    ok = ref.value != 0
    if args.case == "v=w":
        try:
            expected = load_fixtures(args.fixtures)["refutation"].rational("value")
        except FixtureError as exc:
            print(f"stolinv: {exc}", file=sys.stderr)
            return EXIT_USAGE
        ok = ok and ref.value == expected
    if args.format == "structured":
        _emit(args, _dump({**ref.to_dict(), "ok": ok}))
    else:
        _emit(args, format_rational(ref.value) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_derive(args) -> int:
    try:
        lv = derive_coefficient(args.order, args.param, not args.no_eliminate)
    except (EngineError, ValueError) as exc:
        print(f"stolinv: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "structured":
        _emit(args, _dump({"order": args.order, "parametrization": args.param, **lv.split().to_dict()}))
    else:
        _emit(args, str(lv) + "\n")
    return EXIT_OK


COMMANDS = {
    "pipeline": cmd_pipeline,
    "eval": cmd_eval,
    "verify-family": cmd_verify_family,
    "refute": cmd_refute,
    "derive": cmd_derive,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
