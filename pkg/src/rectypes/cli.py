"""Command-line workbench.

Exit codes: 0 for success or a positive verdict, 1 for a negative verdict
(not good, untypable, no normal form within fuel, ...), 2 for usage, parse
and file errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .checker import TypeCheckError, infer
from .congruence import CongruenceError, NotAFunctionType
from .corpus import CorpusError, Workspace, corpus_run, default_fuel, read_text
from .parser import ParseError, parse_term_file, parse_type
from .reduction import (
    EXHAUSTIVE,
    LEFTMOST,
    STRATEGIES,
    CycleDetected,
    FuelExhausted,
    eta_metric,
    normalize,
    sn_probe,
)
from .syntax import EquationSystemError, Term, show_term, show_type
from .translation import (
    SimulationFailure,
    TypePreservationFailure,
    Untypable,
    UnsupportedType,
    target_for,
    translate,
    verify_translation,
)

OK, NEGATIVE, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 as well; keep the message format
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(args, payload, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)


def _load_term(args) -> tuple[Term, dict]:
    src = args.term
    if os.path.isfile(src):
        src = read_text(src)
    tf = parse_term_file(src)
    return tf.term, tf.type_abbrevs


def _workspace(args) -> Workspace:
    fuel = args.fuel if getattr(args, "fuel", None) is not None else default_fuel()
    if fuel <= 0:
        raise UsageError("--fuel must be positive")
    strategy = STRATEGIES[getattr(args, "strategy", None) or LEFTMOST]
    return Workspace.load(
        getattr(args, "eqs", None), getattr(args, "ctx", None), strict=getattr(args, "strict", False),
        fuel=fuel, strategy=strategy,
    )


def _error_json(exc: Exception) -> dict:
    return {"kind": type(exc).__name__, "message": str(exc)}


# ---------------------------------------------------------------- commands


def cmd_check(args) -> int:
    ws = _workspace(args)
    m, abbrevs = _load_term(args)
    abbrevs = {**ws.type_abbrevs, **abbrevs}
    ctx = ws.context(m)
    expected = parse_type(args.expect, abbrevs) if args.expect else None
    payload = {"term": show_term(m), "context": ctx.show(), "expect": show_type(expected) if expected else None}
    try:
        t = infer(ctx, m, ws.index)
    except (TypeCheckError, NotAFunctionType) as exc:
        payload.update(verdict=False, type=None, error=_error_json(exc))
        _emit(args, payload, f"type error: {exc}")
        return NEGATIVE
    ok = expected is None or ws.index.decide(t, expected)
    payload.update(verdict=ok, type=show_type(t), error=None)
    text = f"{ctx.show()} |- {show_term(m)} : {show_type(t)}".lstrip()
    if expected is not None and not ok:
        text += f"\nnot congruent to the expected type {show_type(expected)}"
    _emit(args, payload, text)
    return OK if ok else NEGATIVE


def cmd_equiv(args) -> int:
    ws = _workspace(args)
    u, v = parse_type(args.left, ws.type_abbrevs), parse_type(args.right, ws.type_abbrevs)
    eq = ws.index.decide(u, v)
    payload = {"left": show_type(u), "right": show_type(v), "equal": eq}
    _emit(args, payload, f"{show_type(u)} {'=' if eq else '!='} {show_type(v)}")
    return OK if eq else NEGATIVE


def cmd_goodness(args) -> int:
    args.eqs = args.equations
    ws = _workspace(args)
    report = ws.report
    payload = {"good": report.good, "violations": [v.to_json() for v in report.violations]}
    lines = ["good" if report.good else "not good"]
    for v in report.violations:
        lines.append(
            f"  {v.variable} = {show_type(v.witness)} with {v.variable} negative at {list(v.path)}"
            f" (cycle {' -> '.join(v.cycle)})"
        )
    _emit(args, payload, "\n".join(lines))
    return OK if report.good else NEGATIVE


def cmd_analyze(args) -> int:
    args.eqs = args.equations
    ws = _workspace(args)
    report = ws.report
    if args.json:
        print(json.dumps(report.to_json(), indent=2, ensure_ascii=False))
        return OK if report.good else NEGATIVE
    lines = [f"good: {'yes' if report.good else 'no'}"]
    for v in report.violations:
        lines.append(f"violation: {v.variable} = {show_type(v.witness)}, negative at {list(v.path)}")
    if report.good and report.classes:
        lines.append(f"order: {report.order_text()}")
        for cls, (plus, minus) in zip(report.classes, report.split):
            rep = cls[0]
            lines.append(f"split {rep}: {rep}+ = {{{', '.join(plus)}}}, {rep}- = {{{', '.join(minus)}}}")
        for name in ws.system.variables:
            lines.append(f"lg {name} = {report.lg[name]}")
    print("\n".join(lines))
    return OK if report.good else NEGATIVE


def cmd_normalize(args) -> int:
    ws = _workspace(args)
    m, _ = _load_term(args)
    try:
        trace = normalize(m, ws.strategy, ws.fuel, ws.index)
    except (FuelExhausted, CycleDetected) as exc:
        reason = "cycle" if isinstance(exc, CycleDetected) else "fuel"
        payload = {"normal_form": None, "reason": reason, "strategy": ws.strategy, "fuel": ws.fuel}
        _emit(args, payload, f"no normal form: {exc}")
        return NEGATIVE
    nf = trace.normal_form
    payload = {
        "normal_form": show_term(nf),
        "steps": len(trace.steps),
        "strategy": ws.strategy,
        "fuel_spent": trace.fuel_spent,
    }
    if ws.strategy == EXHAUSTIVE:
        payload["normal_forms"] = [show_term(t) for t in trace.normal_forms]
    _emit(args, payload, show_term(nf))
    return OK


def cmd_trace(args) -> int:
    ws = _workspace(args)
    m, _ = _load_term(args)
    status = OK
    try:
        trace = normalize(m, ws.strategy, ws.fuel, ws.index)
    except (FuelExhausted, CycleDetected) as exc:
        trace, status = exc.trace, NEGATIVE
        print(f"stopped: {exc}", file=sys.stderr)
    rows = trace.to_json()
    text = []
    for i, row in enumerate(rows):
        where = "start" if row["rule"] is None else f"{row['rule']} {row['position']}"
        text.append(f"{i:4d}  {where:<16} {row['term']}")
    _emit(args, rows, "\n".join(text))
    return status


def cmd_eta(args) -> int:
    ws = _workspace(args)
    m, _ = _load_term(args)
    metrics = eta_metric(m, ws.fuel, ws.index)
    eta = "unknown" if metrics.eta is None else str(metrics.eta)
    _emit(args, metrics.to_json(), f"eta = {eta}, cxty = {metrics.cxty}")
    return OK if metrics.eta is not None else NEGATIVE


def cmd_sn(args) -> int:
    ws = _workspace(args)
    m, _ = _load_term(args)
    res = sn_probe(m, ws.fuel, ws.index)
    _emit(args, res.to_json(), str(res))
    return OK if res.sn else NEGATIVE


def cmd_translate(args) -> int:
    ws = _workspace(args)
    if len(ws.system):
        raise UsageError("translate works on the equation-free calculus; drop --eqs")
    m, _ = _load_term(args)
    ctx = ws.context(m)
    if args.verify:
        try:
            report = verify_translation(m, ctx, args.sim_fuel)
        except (TypePreservationFailure, SimulationFailure) as exc:
            _emit(args, {"verified": False, "error": _error_json(exc)}, f"verification failed: {exc}")
            return NEGATIVE
        payload = {"verified": True, **report.to_json()}
        lines = [
            show_term(report.translated),
            "equations: " + ", ".join(payload["equations"]),
            f"type preserved: {show_type(report.source_type)}",
        ]
        for s in report.steps:
            lines.append(f"{s.rule} step at {list(s.position)} simulated in {s.length} target steps")
        _emit(args, payload, "\n".join(lines))
        return OK
    mt = translate(m, ctx)
    equations = [f"{x} = {show_type(t)}" for x, t in target_for(m, ctx).equations]
    payload = {"source": show_term(m), "translated": show_term(mt), "equations": equations}
    _emit(args, payload, show_term(mt) + "\nequations: " + ", ".join(equations))
    return OK


def cmd_corpus(args) -> int:
    if args.corpus_command != "run":
        raise UsageError("usage: corpus run [--filter NAME]")
    results = corpus_run(args.root, args.filter, args.jobs, args.fuel)
    failed = [r for r in results if not r.passed]
    if args.json:
        print(json.dumps(
            {"entries": [r.to_json() for r in results], "passed": len(results) - len(failed), "failed": len(failed)},
            indent=2,
        ))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name}")
            for f in r.failures:
                print(f"     {f}")
        print(f"{len(results) - len(failed)} passed, {len(failed)} failed")
    return OK if not failed else NEGATIVE


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument(
        "--fuel", type=int, default=None,
        help="bound on work: steps for leftmost-outermost, distinct terms for exhaustive "
        "(default 10000, or $RECTYPES_FUEL)",
    )
    eqs = argparse.ArgumentParser(add_help=False)
    eqs.add_argument("--eqs", help="equation file (X = T lines)")
    eqs.add_argument("--strict", action="store_true", help="require free/atom declarations in equation files")
    ctx = argparse.ArgumentParser(add_help=False)
    ctx.add_argument("--ctx", help="context file (x : T and mu a : ~T lines)")
    strat = argparse.ArgumentParser(add_help=False)
    strat.add_argument("--strategy", choices=sorted(STRATEGIES), default=LEFTMOST)

    p = _Parser(prog="rectypes", description="Recursive types workbench for lambda and lambda-mu terms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    term_help = "term file or inline term text"

    s = sub.add_parser("check", parents=[common, eqs, ctx], help="type-check a term")
    s.add_argument("term", help=term_help)
    s.add_argument("--expect", help="expected type; exit 1 unless congruent")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("equiv", parents=[common, eqs], help="decide whether two types are congruent")
    s.add_argument("left")
    s.add_argument("right")
    s.set_defaults(func=cmd_equiv)

    for name, func, hlp in (
        ("goodness", cmd_goodness, "check that every type congruent to X has X only positively"),
        ("analyze", cmd_analyze, "goodness plus the variable order and class splits"),
    ):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("equations", help="equation file")
        s.add_argument("--strict", action="store_true")
        s.set_defaults(func=func)

    for name, func, hlp in (
        ("normalize", cmd_normalize, "print the normal form"),
        ("trace", cmd_trace, "print every reduction step"),
    ):
        s = sub.add_parser(name, parents=[common, eqs, strat], help=hlp)
        s.add_argument("term", help=term_help)
        s.set_defaults(func=func)

    for name, func, hlp in (
        ("eta", cmd_eta, "longest reduction length and term size"),
        ("sn", cmd_sn, "explore all reductions: SN(eta) or NotClosed"),
    ):
        s = sub.add_parser(name, parents=[common, eqs], help=hlp)
        s.add_argument("term", help=term_help)
        s.set_defaults(func=func)

    s = sub.add_parser("translate", parents=[common, eqs, ctx], help="translate a lambda-mu term to a lambda term")
    s.add_argument("term", help=term_help)
    s.add_argument("--verify", action="store_true", help="check type preservation and step simulation")
    s.add_argument("--sim-fuel", type=int, default=5000, help="terms explored per simulated step (default 5000)")
    s.set_defaults(func=cmd_translate)

    s = sub.add_parser("corpus", parents=[common], help="run the example corpus")
    s.add_argument("corpus_command", choices=["run"])
    s.add_argument("--filter", help="only entries whose name contains this text")
    s.add_argument("--root", help="corpus directory (default: ./corpus or $RECTYPES_CORPUS)")
    s.add_argument("--jobs", type=int, default=1, help="run entries in this many processes")
    s.set_defaults(func=cmd_corpus)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except (ParseError, EquationSystemError, CorpusError, CongruenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except (Untypable, UnsupportedType) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
