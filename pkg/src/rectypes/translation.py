"""Translation of the equation-free lambda-mu calculus into lambda terms
typed modulo X = ~~X.

A mu-abstraction of type U becomes an application of the eliminator M_U,
which has type ~~U -> U once every variable X is identified with ~~X.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .checker import EMPTY, Context, TypeCheckError, check, infer
from .congruence import CongruenceIndex, NotAFunctionType
from .reduction import one_step_reducts, reaches, redex_rule
from .syntax import (
    App,
    Arrow,
    Atom,
    Bottom,
    EquationSystem,
    Lam,
    Mu,
    Name,
    Term,
    TVar,
    Type,
    Var,
    alpha_key,
    fresh_name,
    lambda_names,
    mu_names,
    neg,
    show_term,
    show_type,
    subterms,
    type_vars,
)

DEFAULT_SIMULATION_FUEL = 5000


class TranslationError(Exception):
    pass


class UnsupportedType(TranslationError):
    pass


class Untypable(TranslationError):
    pass


class TypePreservationFailure(TranslationError):
    pass


class SimulationFailure(TranslationError):
    pass


# ---------------------------------------------------------------- eliminators


def build_mt(t: Type) -> Term:
    """Closed term M_t of type ~~t -> t (modulo X = ~~X)."""
    return _mt(t, set())


def _mt(t: Type, used: set[str]) -> Term:
    def fresh(base: str) -> str:
        name = fresh_name(base, used)
        used.add(name)
        return name

    x = fresh("x")
    if t is Bottom:
        z = fresh("z")
        return Lam(x, neg(neg(t)), App(Var(x), Lam(z, Bottom, Var(z))))
    if isinstance(t, TVar):
        return Lam(x, neg(neg(t)), Var(x))
    if isinstance(t, Atom):
        raise UnsupportedType(f"atomic constant {t.name} has no eliminator; only bot is allowed")
    assert isinstance(t, Arrow)
    y, z, s = fresh("y"), fresh("z"), fresh("t")
    inner = Lam(s, t, App(Var(z), App(Var(s), Var(y))))
    body = App(_mt(t.cod, used), Lam(z, neg(t.cod), App(Var(x), inner)))
    return Lam(x, neg(neg(t)), Lam(y, t.dom, body))


def target_system(variables: Iterable[str]) -> EquationSystem:
    """X = ~~X for every listed variable."""
    return EquationSystem.build({v: neg(neg(TVar(v))) for v in sorted(set(variables))}, strict=True)


# ---------------------------------------------------------------- terms


def _annotation_vars(m: Term) -> set[str]:
    if isinstance(m, Var):
        return set()
    if isinstance(m, (Lam, Mu)):
        return type_vars(m.ann) | _annotation_vars(m.body)
    if isinstance(m, App):
        return _annotation_vars(m.fun) | _annotation_vars(m.arg)
    return _annotation_vars(m.arg)


def _context_vars(ctx: Context) -> set[str]:
    out: set[str] = set()
    for t in (*ctx.lambdas.values(), *ctx.mus.values()):
        out |= type_vars(t)
    return out


def separate_namespaces(m: Term, ctx: Context = EMPTY) -> Term:
    """Rename binders so no identifier is used both as lambda- and mu-variable.

    Bound mu-binders move; a bound lambda-binder only moves when its name is a
    free mu-variable of the context.
    """
    lam_side = set(ctx.lambdas) | lambda_names(m)
    mu_side = set(ctx.mus) | mu_names(m)
    clash = lam_side & mu_side
    if not clash:
        return m
    avoid = lam_side | mu_side

    def rename(x: str) -> str:
        new = fresh_name(x, avoid)
        avoid.add(new)
        return new

    def go(m: Term, lam_ren: dict[str, str], mu_ren: dict[str, str]) -> Term:
        if isinstance(m, Var):
            return Var(lam_ren.get(m.name, m.name))
        if isinstance(m, App):
            return App(go(m.fun, lam_ren, mu_ren), go(m.arg, lam_ren, mu_ren))
        if isinstance(m, Name):
            return Name(mu_ren.get(m.var, m.var), go(m.arg, lam_ren, mu_ren))
        if isinstance(m, Lam):
            x = rename(m.var) if m.var in ctx.mus else m.var
            return Lam(x, m.ann, go(m.body, {**lam_ren, m.var: x}, mu_ren))
        a = rename(m.var) if m.var in clash else m.var
        return Mu(a, m.ann, go(m.body, lam_ren, {**mu_ren, m.var: a}))

    return go(m, {}, {})


def translate(m: Term, ctx: Context = EMPTY) -> Term:
    """m*: homomorphic on lambda terms, mu a:U. b |-> M_U (\\a:~U. b*), [a] n |-> a n*."""
    source = CongruenceIndex()
    try:
        infer(ctx, m, source)
    except (TypeCheckError, NotAFunctionType) as exc:
        raise Untypable(f"{show_term(m)} is not typable without equations: {exc}") from exc
    return _translate(separate_namespaces(m, ctx))


def _translate(m: Term) -> Term:
    if isinstance(m, Var):
        return m
    if isinstance(m, Lam):
        return Lam(m.var, m.ann, _translate(m.body))
    if isinstance(m, App):
        return App(_translate(m.fun), _translate(m.arg))
    if isinstance(m, Name):
        return App(Var(m.var), _translate(m.arg))
    assert isinstance(m, Mu)
    return App(build_mt(m.ann), Lam(m.var, neg(m.ann), _translate(m.body)))


def target_for(m: Term, ctx: Context = EMPTY) -> EquationSystem:
    """The target equations for m: one X = ~~X per variable in its annotations, context and type."""
    try:
        u = infer(ctx, m, CongruenceIndex())
    except (TypeCheckError, NotAFunctionType) as exc:
        raise Untypable(f"{show_term(m)} is not typable without equations: {exc}") from exc
    return target_system(_annotation_vars(m) | _context_vars(ctx) | type_vars(u))


def translate_context(ctx: Context) -> Context:
    """mu-variables a : ~U become lambda-variables of type ~U."""
    return Context.of({**ctx.lambdas, **{a: neg(u) for a, u in ctx.mus.items()}})


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class SimulatedStep:
    position: tuple[int, ...]
    rule: str
    length: int  # target steps found, always >= 1


@dataclass(frozen=True)
class TranslationReport:
    source: Term
    source_type: Type
    translated: Term
    system: EquationSystem
    steps: tuple[SimulatedStep, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "source": show_term(self.source),
            "type": show_type(self.source_type),
            "translated": show_term(self.translated),
            "equations": [f"{x} = {show_type(t)}" for x, t in self.system.equations],
            "type_preserved": True,
            "simulation": [
                {"rule": s.rule, "position": list(s.position), "target_steps": s.length} for s in self.steps
            ],
        }


def verify_translation(
    m: Term, ctx: Context = EMPTY, fuel: int = DEFAULT_SIMULATION_FUEL
) -> TranslationReport:
    """Check type preservation and step-by-step simulation for m.

    Raises TypePreservationFailure or SimulationFailure with the offending
    term; both indicate a bug.
    """
    source = CongruenceIndex()
    try:
        u = infer(ctx, m, source)
    except (TypeCheckError, NotAFunctionType) as exc:
        raise Untypable(f"{show_term(m)} is not typable without equations: {exc}") from exc
    system = target_system(_annotation_vars(m) | _context_vars(ctx) | type_vars(u))
    index = CongruenceIndex(system)
    mt = translate(m, ctx)
    tctx = translate_context(ctx)
    try:
        ok = check(tctx, mt, u, index)
    except (TypeCheckError, NotAFunctionType) as exc:
        raise TypePreservationFailure(f"translation {show_term(mt)} is untypable: {exc}") from exc
    if not ok:
        raise TypePreservationFailure(
            f"translation {show_term(mt)} has type {show_type(infer(tctx, mt, index))}, expected {show_type(u)}"
        )
    steps = []
    for position, rule, n in one_step_reducts(m):
        nt = translate(n, ctx)
        # redexes already present in the goal lie in untouched context; try without them first
        skip = frozenset(alpha_key(s) for s in subterms(nt) if redex_rule(s))
        length = reaches(mt, nt, fuel, skip=skip) or reaches(mt, nt, fuel)
        if length is None:
            raise SimulationFailure(
                f"{rule}-step at {list(position)}: {show_term(mt)} does not reach {show_term(nt)} within {fuel} terms"
            )
        steps.append(SimulatedStep(tuple(position), rule, length))
    return TranslationReport(m, u, mt, system, tuple(steps))
