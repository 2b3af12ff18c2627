"""Command-line interface.

Usage:
    monounion validate SPEC [--json] [--horizon L]
    monounion normalize SPEC WORD
    monounion mult SPEC ELEM ELEM
    monounion tset SPEC GEN ELEM GEN
    monounion analyze SPEC [--horizon L]
    monounion present SPEC [--json]
    monounion verify-presentation SPEC [--max-len N] [--budget B]
    monounion separate SPEC ELEM ELEM [--max-horizon L]
    monounion search --blocks N [bound flags] [--out DIR] [--jobs J]

Exit codes: 0 success or valid, 1 usage or I/O error, 2 invalid,
3 inconclusive (horizon or budget exhausted).  Structured output is JSON
with sorted keys; text output is a rendering of the same data.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__, analysis, presentation, residual, validate
from .model import SpecError, load_spec, parse_element, parse_word, render_element, spec_to_json
from .wordprob import multiply, normalize

OK, ERROR, INVALID, INCONCLUSIVE = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load(path: str):
    try:
        return load_spec(path)
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror or exc}") from exc


def _element(spec, text: str):
    try:
        return parse_element(text, spec.generators)
    except SpecError as exc:
        raise _Usage(str(exc)) from exc


def cmd_validate(args) -> tuple[str, int]:
    try:
        spec = _load(args.spec)
    except SpecError as exc:
        report = validate.ValidationReport(validate.INVALID, [{"check": "type", "reason": str(exc)}])
    else:
        report = validate.validate(spec, args.horizon)
    code = {validate.VALID: OK, validate.INVALID: INVALID, validate.INCONCLUSIVE: INCONCLUSIVE}[report.verdict]
    if args.json:
        return _dump({**report.to_json(), "defaults": {"horizon": args.horizon}}), code
    lines = [report.verdict]
    lines += [json.dumps(f, sort_keys=True) for f in report.findings]
    return "\n".join(lines) + "\n", code


def cmd_normalize(args) -> tuple[str, int]:
    spec = _load(args.spec)
    try:
        w = parse_word(args.word, spec.generators)
    except SpecError as exc:
        raise _Usage(str(exc)) from exc
    return render_element(normalize(spec, w)) + "\n", OK


def cmd_mult(args) -> tuple[str, int]:
    spec = _load(args.spec)
    x, y = _element(spec, args.x), _element(spec, args.y)
    return render_element(multiply(spec, x, y)) + "\n", OK


def cmd_tset(args) -> tuple[str, int]:
    spec = _load(args.spec)
    for g in (args.a, args.b):
        if g not in spec.generators:
            raise _Usage(f"unknown generator {g!r}")
    x = _element(spec, args.x)
    try:
        t = analysis.t_set(spec, args.a, x, args.b)
    except analysis.ShapeViolation as exc:
        return _dump({"error": "shape", "reason": str(exc)}), INVALID
    return _dump({**t.to_json(), "set": str(t.members)}), OK


def cmd_analyze(args) -> tuple[str, int]:
    spec = _load(args.spec)
    report = analysis.analyze(spec, args.horizon)
    return _dump(report), OK if report["pass"] else INVALID


def cmd_present(args) -> tuple[str, int]:
    spec = _load(args.spec)
    pres = presentation.extract_presentation(spec)
    if args.json:
        return _dump(pres.to_json()), OK
    return pres.render(), OK


def cmd_verify_presentation(args) -> tuple[str, int]:
    spec = _load(args.spec)
    pres = presentation.extract_presentation(spec)
    report = presentation.verify_presentation(spec, pres, args.max_len, args.budget)
    report["defaults"] = {"max_len": args.max_len, "budget": args.budget or "10|u|+|v|"}
    if report["pass"]:
        code = OK
    elif not report["relations_satisfied"] or report["check_failures"]:
        code = INVALID
    else:
        code = INCONCLUSIVE
    return _dump(report), code


def cmd_separate(args) -> tuple[str, int]:
    spec = _load(args.spec)
    x, y = _element(spec, args.x), _element(spec, args.y)
    if x == y:
        raise _Usage("elements must be distinct")
    try:
        cert = residual.separate(spec, x, y, args.max_horizon)
    except residual.RhoInconclusive as exc:
        return _dump({"verdict": "inconclusive", "reason": str(exc), "partition": exc.partition.to_json()}), INCONCLUSIVE
    except (residual.NotClosed, residual.NonMonogenicShape) as exc:
        return _dump({"verdict": "invalid", "reason": str(exc)}), INVALID
    out = cert.to_json()
    out["defaults"] = {"max_horizon": args.max_horizon}
    return _dump(out), OK


def cmd_search(args) -> tuple[str, int]:
    try:
        cfg = validate.SearchConfig(
            blocks=args.blocks,
            max_exceptions=args.max_exceptions,
            max_threshold=args.max_threshold,
            max_period=args.max_period,
            max_slope=args.max_slope,
            max_intercept=args.max_intercept,
        )
    except ValueError as exc:
        raise _Usage(str(exc)) from exc
    specs = validate.search(cfg, args.jobs)
    if args.out:
        try:
            path = validate.write_corpus(specs, args.out, cfg)
        except OSError as exc:
            raise _Usage(f"cannot write {args.out}: {exc.strerror or exc}") from exc
        return _dump({"config": cfg.__dict__, "count": len(specs), "index": str(path)}), OK
    return _dump({"config": cfg.__dict__, "count": len(specs), "specs": [spec_to_json(s) for s in specs]}), OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="monounion", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log rejected candidates and progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="type, associativity and structural checks")
    p.add_argument("spec")
    p.add_argument("--json", action="store_true")
    p.add_argument("--horizon", type=int, default=analysis.DEFAULT_HORIZON)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("normalize", help="normal form of a word")
    p.add_argument("spec")
    p.add_argument("word")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("mult", help="product of two elements")
    p.add_argument("spec")
    p.add_argument("x")
    p.add_argument("y")
    p.set_defaults(func=cmd_mult)

    p = sub.add_parser("tset", help="the set T(a, x, b)")
    p.add_argument("spec")
    p.add_argument("a")
    p.add_argument("x")
    p.add_argument("b")
    p.set_defaults(func=cmd_tset)

    p = sub.add_parser("analyze", help="structural report")
    p.add_argument("spec")
    p.add_argument("--horizon", type=int, default=analysis.DEFAULT_HORIZON)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("present", help="finite presentation")
    p.add_argument("spec")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("verify-presentation", help="derive short words to their normal forms")
    p.add_argument("spec")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--budget", type=int, default=None, help="steps per derivation (default 10|u|+|v|)")
    p.set_defaults(func=cmd_verify_presentation)

    p = sub.add_parser("separate", help="finite quotient separating two elements")
    p.add_argument("spec")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--max-horizon", type=int, default=residual.DEFAULT_MAX_HORIZON)
    p.set_defaults(func=cmd_separate)

    defaults = validate.SearchConfig()
    p = sub.add_parser("search", help="exhaustive search for valid specs")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--max-exceptions", type=int, default=defaults.max_exceptions)
    p.add_argument("--max-threshold", type=int, default=defaults.max_threshold)
    p.add_argument("--max-period", type=int, default=defaults.max_period)
    p.add_argument("--max-slope", type=int, default=defaults.max_slope)
    p.add_argument("--max-intercept", type=int, default=defaults.max_intercept)
    p.add_argument("--out", help="directory for hash-named spec files and index.json")
    p.add_argument(
        "--jobs",
        type=int,
        default=int(os.environ.get("MONOUNION_THREADS", "1")),
        help="worker processes (default $MONOUNION_THREADS or 1)",
    )
    p.set_defaults(func=cmd_search)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        text, code = args.func(args)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    sys.stdout.write(text)
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
