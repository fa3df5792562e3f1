"""Workspaces and the example corpus.

The corpus is a directory tree; each subdirectory holds ``.eqs``, ``.term``
and ``.ctx`` files plus a ``manifest.json`` listing entries and their
expected verdicts.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .checker import Context, TypeCheckError, context_for, infer, subject_reduction_probe
from .congruence import CongruenceIndex, NotAFunctionType
from .parser import parse_context, parse_equation_file, parse_term, parse_term_file, parse_type
from .positivity import AnalysisReport, analyze
from .reduction import DEFAULT_FUEL, LEFTMOST, NotNormalizing, eta_metric, normalize, sn_probe
from .syntax import EquationSystem, Term, Type, alpha_eq, show_term, show_type
from .translation import verify_translation

CORPUS_ENV = "RECTYPES_CORPUS"
FUEL_ENV = "RECTYPES_FUEL"
MANIFEST = "manifest.json"


class CorpusError(Exception):
    pass


def default_fuel() -> int:
    raw = os.environ.get(FUEL_ENV)
    if raw is None:
        return DEFAULT_FUEL
    try:
        fuel = int(raw)
    except ValueError:
        raise CorpusError(f"{FUEL_ENV}={raw!r} is not an integer") from None
    if fuel <= 0:
        raise CorpusError(f"{FUEL_ENV} must be positive")
    return fuel


def default_root() -> Path:
    env = os.environ.get(CORPUS_ENV)
    if env:
        return Path(env)
    here = Path(__file__).resolve()
    for parent in here.parents:
        if (parent / "corpus").is_dir():
            return parent / "corpus"
    return Path.cwd() / "corpus"


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


@dataclass(frozen=True)
class Workspace:
    """Equations, context and settings shared by the commands of one run."""

    system: EquationSystem = field(default_factory=EquationSystem)
    declarations: tuple = ()
    fuel: int = DEFAULT_FUEL
    strategy: str = LEFTMOST
    type_abbrevs: dict = field(default_factory=dict)

    @classmethod
    def load(
        cls, eqs: str | Path | None = None, ctx: str | Path | None = None, strict: bool = False, **settings
    ) -> "Workspace":
        if eqs:
            ef = parse_equation_file(read_text(eqs), strict)
            system, abbrevs = ef.system, ef.type_abbrevs
        else:
            system, abbrevs = EquationSystem(), {}
        decls = tuple(parse_context(read_text(ctx))) if ctx else ()
        return cls(system, decls, type_abbrevs=abbrevs, **settings)

    @cached_property
    def index(self) -> CongruenceIndex:
        return CongruenceIndex(self.system)

    @cached_property
    def report(self) -> AnalysisReport:
        return analyze(self.system, self.index)

    def context(self, m: Term) -> Context:
        return context_for(self.declarations, m)


# ---------------------------------------------------------------- entries


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    directory: Path
    eqs: str | None = None
    term: str | None = None
    ctx: str | None = None
    expect_type: str | None = None
    expect_normal_form: str | None = None
    goodness: bool | None = None
    sn: bool | None = None
    eta: int | None = None
    order: str | None = None
    equiv: tuple = ()  # pairs of type texts expected congruent (or not, with a leading "!")
    translate: bool = False
    subject_reduction: bool = True
    provenance: str = ""

    @classmethod
    def from_json(cls, data: dict, directory: Path) -> "CorpusEntry":
        known = {f for f in cls.__dataclass_fields__ if f != "directory"}
        extra = set(data) - known
        if extra:
            raise CorpusError(f"entry {data.get('name')!r}: unknown fields {sorted(extra)}")
        if "name" not in data:
            raise CorpusError(f"entry without a name in {directory}")
        if not data.get("provenance"):
            raise CorpusError(f"entry {data['name']!r} has no provenance note")
        data = dict(data)
        data["equiv"] = tuple(tuple(p) for p in data.get("equiv", ()))
        return cls(directory=directory, **data)

    def path(self, name: str | None) -> Path | None:
        return self.directory / name if name else None


@dataclass(frozen=True)
class EntryResult:
    name: str
    passed: bool
    failures: tuple[str, ...] = ()
    checks: int = 0

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": self.checks, "failures": list(self.failures)}


def load_corpus(root: str | Path | None = None, name_filter: str | None = None) -> list[CorpusEntry]:
    root = Path(root) if root is not None else default_root()
    if not root.is_dir():
        raise CorpusError(f"corpus directory {root} not found")
    out = []
    for manifest in sorted(root.glob(f"*/{MANIFEST}")):
        try:
            data = json.loads(read_text(manifest))
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{manifest}: {exc}") from None
        for item in data.get("entries", []):
            entry = CorpusEntry.from_json(item, manifest.parent)
            if name_filter is None or name_filter in entry.name:
                out.append(entry)
    return out


def run_entry(entry: CorpusEntry, fuel: int = DEFAULT_FUEL) -> EntryResult:
    failures: list[str] = []
    checks = 0

    def expect(ok: bool, what: str) -> None:
        nonlocal checks
        checks += 1
        if not ok:
            failures.append(what)

    try:
        for attr in ("eqs", "term", "ctx"):
            p = entry.path(getattr(entry, attr))
            if p is not None and not p.is_file():
                raise CorpusError(f"missing corpus file {p}")
        ws = Workspace.load(entry.path(entry.eqs), entry.path(entry.ctx), fuel=fuel)
        abbrevs: dict[str, Type] = dict(ws.type_abbrevs)
        m: Term | None = None
        if entry.term:
            tf = parse_term_file(read_text(entry.path(entry.term)))
            m = tf.term
            abbrevs.update(tf.type_abbrevs)
        if entry.goodness is not None:
            expect(ws.report.good == entry.goodness, f"goodness: expected {entry.goodness}, got {ws.report.good}")
        if entry.order is not None:
            got = ws.report.order_text() if ws.report.good else None
            expect(got == entry.order, f"order: expected {entry.order!r}, got {got!r}")
        for pair in entry.equiv:
            left, right = pair
            negated = left.startswith("!")
            u, v = parse_type(left.lstrip("!"), abbrevs), parse_type(right, abbrevs)
            expect(ws.index.decide(u, v) != negated, f"equiv {left} = {right}: wrong verdict")
        if m is not None:
            _run_term(entry, ws, m, abbrevs, fuel, expect)
    except Exception as exc:  # a crash is a failure of this entry only
        failures.append(f"{type(exc).__name__}: {exc}")
    return EntryResult(entry.name, not failures, tuple(failures), checks)


def _run_term(entry: CorpusEntry, ws: Workspace, m: Term, abbrevs: dict, fuel: int, expect) -> None:
    ctx = ws.context(m)
    if entry.expect_type is not None:
        want = parse_type(entry.expect_type, abbrevs)
        typed = True
        try:
            got = infer(ctx, m, ws.index)
            expect(ws.index.decide(got, want), f"type: expected {show_type(want)}, got {show_type(got)}")
        except (TypeCheckError, NotAFunctionType) as exc:
            typed = False
            expect(False, f"type: expected {show_type(want)}, untypable: {exc}")
        if typed and entry.subject_reduction:
            subject_reduction_probe(ctx, m, ws.index, steps=20)
            expect(True, "subject reduction")
    if entry.expect_normal_form is not None:
        want_nf = parse_term(entry.expect_normal_form, abbrevs)
        try:
            nf = normalize(m, LEFTMOST, fuel, ws.index).normal_form
            expect(nf is not None and alpha_eq(nf, want_nf), f"normal form: got {show_term(nf)}")
        except NotNormalizing as exc:
            expect(False, f"normal form: {exc}")
    if entry.sn is not None:
        res = sn_probe(m, fuel, ws.index)
        expect(res.sn == entry.sn, f"sn: expected {entry.sn}, got {res}")
    if entry.eta is not None:
        got_eta = eta_metric(m, fuel, ws.index).eta
        expect(got_eta == entry.eta, f"eta: expected {entry.eta}, got {got_eta}")
    if entry.translate:
        verify_translation(m, ctx)
        expect(True, "translation")


def _run_entry_star(args: tuple[CorpusEntry, int]) -> EntryResult:
    return run_entry(*args)


def corpus_run(
    root: str | Path | None = None,
    name_filter: str | None = None,
    jobs: int = 1,
    fuel: int | None = None,
) -> list[EntryResult]:
    """Run every entry; with jobs > 1 entries run in separate processes."""
    entries = load_corpus(root, name_filter)
    fuel = fuel if fuel is not None else default_fuel()
    if jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_entry_star, [(e, fuel) for e in entries]))
    return [run_entry(e, fuel) for e in entries]
