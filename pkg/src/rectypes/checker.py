"""Syntax-directed type checking modulo a congruence.

The conversion rule is folded into the other rules: application looks for an
arrow congruent to the function's type and compares the argument modulo the
congruence; mu and named terms compare against bot / the name's type.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .congruence import CongruenceIndex, NotAFunctionType
from .syntax import (
    App,
    Arrow,
    Bottom,
    Lam,
    Mu,
    Name,
    Term,
    Type,
    Var,
    alpha_key,
    free_mu_vars,
    is_neg,
    neg,
    show_term,
    show_type,
)


class TypeCheckError(Exception):
    pass


class UnboundVariable(TypeCheckError):
    pass


class ArgumentTypeMismatch(TypeCheckError):
    def __init__(self, term: Term, expected: Type, found: Type, index: CongruenceIndex):
        self.term, self.expected, self.found = term, expected, found
        super().__init__(
            f"argument {show_term(term)} has type {show_type(found)}"
            f" {_class_info(index, found)}, expected {show_type(expected)} {_class_info(index, expected)}"
        )


class MuBodyNotBottom(TypeCheckError):
    pass


class NamedTermTypeMismatch(TypeCheckError):
    pass


class SubjectReductionViolation(AssertionError):
    def __init__(self, msg: str, reduct: Term):
        super().__init__(msg)
        self.reduct = reduct


def _class_info(index: CongruenceIndex, t: Type) -> str:
    names = index.defined_in_class(t)
    return f"[class of {', '.join(names)}]" if names else "[no defined variable in class]"


@dataclass(frozen=True)
class Context:
    """x : U declarations and a : ~U declarations (stored as U)."""

    lambdas: Mapping[str, Type] = field(default_factory=lambda: MappingProxyType({}))
    mus: Mapping[str, Type] = field(default_factory=lambda: MappingProxyType({}))

    def __post_init__(self) -> None:
        clash = set(self.lambdas) & set(self.mus)
        if clash:
            raise ValueError(f"{sorted(clash)} declared as both lambda- and mu-variable")

    @classmethod
    def of(cls, lambdas: Mapping[str, Type] | None = None, mus: Mapping[str, Type] | None = None) -> "Context":
        return cls(MappingProxyType(dict(lambdas or {})), MappingProxyType(dict(mus or {})))

    @classmethod
    def from_declarations(cls, decls: Iterable, mu_names: Iterable[str] = ()) -> "Context":
        """Declarations ``x : T``; a name used as a mu-variable (or marked mu) binds ``a : ~U``."""
        mu_names = set(mu_names)
        lams: dict[str, Type] = {}
        mus: dict[str, Type] = {}
        for d in decls:
            is_mu = d.mu if d.mu is not None else d.name in mu_names
            if is_mu:
                if not is_neg(d.type):
                    raise TypeCheckError(f"mu-variable {d.name} must be declared at a type ~U, got {show_type(d.type)}")
                mus[d.name] = d.type.dom
            else:
                lams[d.name] = d.type
        return cls.of(lams, mus)

    def bind(self, x: str, t: Type) -> "Context":
        mus = self.mus
        if x in mus:
            mus = {k: v for k, v in mus.items() if k != x}
        return Context.of({**self.lambdas, x: t}, mus)

    def bind_mu(self, a: str, u: Type) -> "Context":
        lams = self.lambdas
        if a in lams:
            lams = {k: v for k, v in lams.items() if k != a}
        return Context.of(lams, {**self.mus, a: u})

    def show(self) -> str:
        parts = [f"{x} : {show_type(t)}" for x, t in self.lambdas.items()]
        parts += [f"{a} : {show_type(neg(u))}" for a, u in self.mus.items()]
        return ", ".join(parts)


EMPTY = Context.of()


@dataclass(frozen=True)
class Judgment:
    ctx: Context
    term: Term
    type: Type

    def show(self) -> str:
        return f"{self.ctx.show()} |- {show_term(self.term)} : {show_type(self.type)}"


def infer(ctx: Context, m: Term, index: CongruenceIndex) -> Type:
    if isinstance(m, Var):
        if m.name not in ctx.lambdas:
            raise UnboundVariable(f"unbound variable {m.name}")
        return ctx.lambdas[m.name]
    if isinstance(m, Lam):
        return Arrow(m.ann, infer(ctx.bind(m.var, m.ann), m.body, index))
    if isinstance(m, App):
        ft = infer(ctx, m.fun, index)
        dom, cod = index.head_arrow(ft)
        at = infer(ctx, m.arg, index)
        if not index.decide(at, dom):
            raise ArgumentTypeMismatch(m.arg, dom, at, index)
        return cod
    if isinstance(m, Mu):
        bt = infer(ctx.bind_mu(m.var, m.ann), m.body, index)
        if not index.decide(bt, Bottom):
            raise MuBodyNotBottom(f"body of mu {m.var} has type {show_type(bt)}, expected bot")
        return m.ann
    assert isinstance(m, Name)
    if m.var not in ctx.mus:
        raise UnboundVariable(f"unbound mu-variable {m.var}")
    u = ctx.mus[m.var]
    at = infer(ctx, m.arg, index)
    if not index.decide(at, u):
        raise NamedTermTypeMismatch(
            f"[{m.var}] expects type {show_type(u)}, got {show_term(m.arg)} : {show_type(at)}"
        )
    return Bottom


def check(ctx: Context, m: Term, expected: Type, index: CongruenceIndex) -> bool:
    return index.decide(infer(ctx, m, index), expected)


def typable(ctx: Context, m: Term, index: CongruenceIndex) -> bool:
    try:
        infer(ctx, m, index)
    except (TypeCheckError, NotAFunctionType):
        return False
    return True


def subject_reduction_probe(ctx: Context, m: Term, index: CongruenceIndex, steps: int = 20) -> list[Judgment]:
    """Re-type every reduct met in a breadth-first walk of at most ``steps`` one-step reductions."""
    from .reduction import one_step_reducts

    t0 = infer(ctx, m, index)
    trace = [Judgment(ctx, m, t0)]
    seen = {alpha_key(m)}
    todo = deque([m])
    budget = steps
    while todo and budget > 0:
        cur = todo.popleft()
        for _, _, n in one_step_reducts(cur, index):
            if budget <= 0:
                break
            budget -= 1
            try:
                tn = infer(ctx, n, index)
            except (TypeCheckError, NotAFunctionType) as exc:
                raise SubjectReductionViolation(f"reduct {show_term(n)} is untypable: {exc}", n) from exc
            if not index.decide(t0, tn):
                raise SubjectReductionViolation(
                    f"reduct {show_term(n)} has type {show_type(tn)}, not congruent to {show_type(t0)}", n
                )
            trace.append(Judgment(ctx, n, tn))
            k = alpha_key(n)
            if k not in seen:
                seen.add(k)
                todo.append(n)
    return trace


def context_for(decls: Iterable, m: Term) -> Context:
    return Context.from_declarations(decls, free_mu_vars(m))
