"""Types and terms of the simply typed lambda/lambda-mu calculus.

Terms are named (Church-style annotated binders).  Alpha-equivalence is
decided on a nameless key, and substitution renames binders with a fresh
name supply when capture would occur.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Union


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class _Bottom:
    def __str__(self) -> str:
        return "bot"

    def __repr__(self) -> str:
        return "Bottom"

    def __reduce__(self) -> str:
        # keep the singleton across pickling
        return "Bottom"


Bottom = _Bottom()

Type = Union[Atom, TVar, Arrow, _Bottom]


def neg(t: Type) -> Arrow:
    return Arrow(t, Bottom)


def arrows(*ts: Type) -> Type:
    """Right-nested arrow: arrows(A, B, C) == A -> (B -> C)."""
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Arrow(t, out)
    return out


def is_neg(t: Type) -> bool:
    return isinstance(t, Arrow) and t.cod is Bottom


def type_vars(t: Type) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, TVar):
            out.add(u.name)
        elif isinstance(u, Arrow):
            stack.append(u.dom)
            stack.append(u.cod)
    return out


def type_atoms(t: Type) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Atom):
            out.add(u.name)
        elif isinstance(u, Arrow):
            stack.append(u.dom)
            stack.append(u.cod)
    return out


def type_size(t: Type) -> int:
    """Node count: leaves are 1, an arrow is 1 plus both sides."""
    if isinstance(t, Arrow):
        return 1 + type_size(t.dom) + type_size(t.cod)
    return 1


lg = type_size


def subtypes(t: Type) -> Iterator[Type]:
    yield t
    if isinstance(t, Arrow):
        yield from subtypes(t.dom)
        yield from subtypes(t.cod)


def replace_type_vars(t: Type, env: dict[str, Type]) -> Type:
    if isinstance(t, TVar):
        return env.get(t.name, t)
    if isinstance(t, Arrow):
        return Arrow(replace_type_vars(t.dom, env), replace_type_vars(t.cod, env))
    return t


def show_type(t: Type) -> str:
    if isinstance(t, (Atom, TVar)):
        return t.name
    if t is Bottom:
        return "bot"
    assert isinstance(t, Arrow)
    if t.cod is Bottom:
        return "~" + _type_atomic(t.dom)
    left = show_type(t.dom)
    if isinstance(t.dom, Arrow) and t.dom.cod is not Bottom:
        left = f"({left})"
    return f"{left} -> {show_type(t.cod)}"


def _type_atomic(t: Type) -> str:
    s = show_type(t)
    if isinstance(t, Arrow) and t.cod is not Bottom:
        return f"({s})"
    return s


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class Lam:
    var: str
    ann: Type
    body: "Term"

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class Mu:
    """mu a:U. body  -- the bound name a has type ~U, the whole term has type U."""

    var: str
    ann: Type
    body: "Term"

    def __str__(self) -> str:
        return show_term(self)


@dataclass(frozen=True)
class Name:
    """[a] arg"""

    var: str
    arg: "Term"

    def __str__(self) -> str:
        return show_term(self)


Term = Union[Var, Lam, App, Mu, Name]


def apps(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def children(m: Term) -> tuple[Term, ...]:
    if isinstance(m, App):
        return (m.fun, m.arg)
    if isinstance(m, (Lam, Mu)):
        return (m.body,)
    if isinstance(m, Name):
        return (m.arg,)
    return ()


def with_children(m: Term, kids: tuple[Term, ...]) -> Term:
    if isinstance(m, App):
        return App(kids[0], kids[1])
    if isinstance(m, Lam):
        return Lam(m.var, m.ann, kids[0])
    if isinstance(m, Mu):
        return Mu(m.var, m.ann, kids[0])
    if isinstance(m, Name):
        return Name(m.var, kids[0])
    return m


def subterm_at(m: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        m = children(m)[i]
    return m


def replace_at(m: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    kids = list(children(m))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(m, tuple(kids))


def term_size(m: Term) -> int:
    """Structural complexity: number of syntax nodes."""
    return 1 + sum(term_size(c) for c in children(m))


cxty = term_size


def subterms(m: Term) -> Iterator[Term]:
    yield m
    for c in children(m):
        yield from subterms(c)


def free_vars(m: Term) -> set[str]:
    """Free lambda-variables."""
    if isinstance(m, Var):
        return {m.name}
    if isinstance(m, Lam):
        return free_vars(m.body) - {m.var}
    if isinstance(m, App):
        return free_vars(m.fun) | free_vars(m.arg)
    if isinstance(m, Mu):
        return free_vars(m.body)
    return free_vars(m.arg)


def free_mu_vars(m: Term) -> set[str]:
    if isinstance(m, Var):
        return set()
    if isinstance(m, Lam):
        return free_mu_vars(m.body)
    if isinstance(m, App):
        return free_mu_vars(m.fun) | free_mu_vars(m.arg)
    if isinstance(m, Mu):
        return free_mu_vars(m.body) - {m.var}
    return free_mu_vars(m.arg) | {m.var}


def lambda_names(m: Term) -> set[str]:
    """Every identifier used in lambda position, bound or free."""
    out: set[str] = set()
    for s in subterms(m):
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, Lam):
            out.add(s.var)
    return out


def mu_names(m: Term) -> set[str]:
    out: set[str] = set()
    for s in subterms(m):
        if isinstance(s, (Mu, Name)):
            out.add(s.var)
    return out


def all_names(m: Term) -> set[str]:
    return lambda_names(m) | mu_names(m)


# ---------------------------------------------------------------- fresh names

_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def fresh_name(base: str, avoid: set[str]) -> str:
    m = _SUFFIX.match(base)
    stem = m.group(1) if m and m.group(1) else base
    if base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


# ---------------------------------------------------------------- substitution


def subst(m: Term, x: str, n: Term) -> Term:
    """Capture-avoiding m[x := n]."""
    return _subst(m, x, n, free_vars(n), free_mu_vars(n))


def _subst(m: Term, x: str, n: Term, fv_n: set[str], fmv_n: set[str]) -> Term:
    if isinstance(m, Var):
        return n if m.name == x else m
    if isinstance(m, App):
        return App(_subst(m.fun, x, n, fv_n, fmv_n), _subst(m.arg, x, n, fv_n, fmv_n))
    if isinstance(m, Name):
        return Name(m.var, _subst(m.arg, x, n, fv_n, fmv_n))
    if isinstance(m, Lam):
        if m.var == x or x not in free_vars(m.body):
            return m
        var, body = m.var, m.body
        if var in fv_n:
            var = fresh_name(var, fv_n | fmv_n | all_names(body) | {x})
            body = rename_lambda(body, m.var, var)
        return Lam(var, m.ann, _subst(body, x, n, fv_n, fmv_n))
    assert isinstance(m, Mu)
    if x not in free_vars(m.body):
        return m
    var, body = m.var, m.body
    if var in fmv_n:
        var = fresh_name(var, fmv_n | fv_n | all_names(body) | {x})
        body = rename_mu(body, m.var, var)
    return Mu(var, m.ann, _subst(body, x, n, fv_n, fmv_n))


def rename_lambda(m: Term, old: str, new: str) -> Term:
    # new is fresh for m, so no capture can happen
    if isinstance(m, Var):
        return Var(new) if m.name == old else m
    if isinstance(m, Lam):
        if m.var == old:
            return m
        return Lam(m.var, m.ann, rename_lambda(m.body, old, new))
    if isinstance(m, App):
        return App(rename_lambda(m.fun, old, new), rename_lambda(m.arg, old, new))
    if isinstance(m, Mu):
        return Mu(m.var, m.ann, rename_lambda(m.body, old, new))
    return Name(m.var, rename_lambda(m.arg, old, new))


def rename_mu(m: Term, old: str, new: str) -> Term:
    if isinstance(m, Var):
        return m
    if isinstance(m, Lam):
        return Lam(m.var, m.ann, rename_mu(m.body, old, new))
    if isinstance(m, App):
        return App(rename_mu(m.fun, old, new), rename_mu(m.arg, old, new))
    if isinstance(m, Mu):
        if m.var == old:
            return m
        return Mu(m.var, m.ann, rename_mu(m.body, old, new))
    return Name(new if m.var == old else m.var, rename_mu(m.arg, old, new))


def mu_subst(m: Term, a: str, n: Term) -> Term:
    """m[a = n]: every free ``[a] P`` becomes ``[a] (P' n)``; a stays free."""
    return _mu_subst(m, a, n, free_vars(n), free_mu_vars(n))


def _mu_subst(m: Term, a: str, n: Term, fv_n: set[str], fmv_n: set[str]) -> Term:
    if isinstance(m, Var):
        return m
    if isinstance(m, App):
        return App(_mu_subst(m.fun, a, n, fv_n, fmv_n), _mu_subst(m.arg, a, n, fv_n, fmv_n))
    if isinstance(m, Name):
        inner = _mu_subst(m.arg, a, n, fv_n, fmv_n)
        if m.var == a:
            return Name(a, App(inner, n))
        return Name(m.var, inner)
    if isinstance(m, Lam):
        if a not in free_mu_vars(m.body):
            return m
        var, body = m.var, m.body
        if var in fv_n:
            var = fresh_name(var, fv_n | fmv_n | all_names(body) | {a})
            body = rename_lambda(body, m.var, var)
        return Lam(var, m.ann, _mu_subst(body, a, n, fv_n, fmv_n))
    assert isinstance(m, Mu)
    if m.var == a or a not in free_mu_vars(m.body):
        return m
    var, body = m.var, m.body
    if var in fmv_n:
        var = fresh_name(var, fmv_n | all_names(body) | fv_n | {a})
        body = rename_mu(body, m.var, var)
    return Mu(var, m.ann, _mu_subst(body, a, n, fv_n, fmv_n))


# ---------------------------------------------------------------- alpha-equivalence


def alpha_key(m: Term) -> tuple:
    """Nameless, hashable key; equal keys <=> alpha-equivalent terms.

    Bound lambda- and mu-variables become de Bruijn indices into separate
    scopes, free variables keep their names.
    """
    return _key(m, (), ())


def _key(m: Term, lam: tuple[str, ...], mus: tuple[str, ...]) -> tuple:
    if isinstance(m, Var):
        for i in range(len(lam) - 1, -1, -1):
            if lam[i] == m.name:
                return ("b", len(lam) - 1 - i)
        return ("f", m.name)
    if isinstance(m, Lam):
        return ("L", m.ann, _key(m.body, lam + (m.var,), mus))
    if isinstance(m, App):
        return ("A", _key(m.fun, lam, mus), _key(m.arg, lam, mus))
    if isinstance(m, Mu):
        return ("M", m.ann, _key(m.body, lam, mus + (m.var,)))
    for i in range(len(mus) - 1, -1, -1):
        if mus[i] == m.var:
            return ("N", ("b", len(mus) - 1 - i), _key(m.arg, lam, mus))
    return ("N", ("f", m.var), _key(m.arg, lam, mus))


def alpha_eq(m: Term, n: Term) -> bool:
    return alpha_key(m) == alpha_key(n)


# ---------------------------------------------------------------- printing


def show_term(m: Term) -> str:
    if isinstance(m, Var):
        return m.name
    if isinstance(m, Lam):
        return f"\\{m.var}:{show_type(m.ann)}. {show_term(m.body)}"
    if isinstance(m, Mu):
        return f"mu {m.var}:{show_type(m.ann)}. {show_term(m.body)}"
    if isinstance(m, Name):
        return f"[{m.var}] {show_term(m.arg)}"
    head, args = m, []
    while isinstance(head, App):
        args.append(head.arg)
        head = head.fun
    args.reverse()
    parts = [_term_atomic(head)] + [_term_atomic(a) for a in args]
    return " ".join(parts)


def _term_atomic(m: Term) -> str:
    s = show_term(m)
    return s if isinstance(m, Var) else f"({s})"


# ---------------------------------------------------------------- equation systems


class EquationSystemError(ValueError):
    pass


@dataclass(frozen=True)
class EquationSystem:
    """A finite family of equations X_i = F_i over atoms and type variables.

    ``equations`` keeps declaration order, which fixes variable indices.
    ``free`` lists type variables without an equation (treated as constants).
    """

    equations: tuple[tuple[str, Type], ...] = ()
    atoms: frozenset = frozenset()
    free: frozenset = frozenset()

    @classmethod
    def build(cls, equations, atoms=(), free=None, strict: bool = False) -> "EquationSystem":
        """Validate and build.  Non-strict mode infers undeclared atoms/free variables."""
        eqs = tuple((n, t) for n, t in (equations.items() if isinstance(equations, dict) else equations))
        names = [n for n, _ in eqs]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise EquationSystemError(f"more than one equation for {sorted(dup)}")
        used_vars = set().union(*(type_vars(t) for _, t in eqs)) if eqs else set()
        used_atoms = set().union(*(type_atoms(t) for _, t in eqs)) if eqs else set()
        atoms = set(atoms)
        free = set(free) if free is not None else set()
        undeclared = used_vars - set(names) - free
        unknown_atoms = used_atoms - atoms
        if strict:
            if undeclared:
                raise EquationSystemError(
                    f"type variables {sorted(undeclared)} have no equation and are not declared free"
                )
            if unknown_atoms:
                raise EquationSystemError(f"undeclared atoms {sorted(unknown_atoms)}")
        else:
            free |= undeclared
            atoms |= unknown_atoms
        bad = free & set(names)
        if bad:
            raise EquationSystemError(f"{sorted(bad)} declared free but also defined")
        return cls(eqs, frozenset(atoms), frozenset(free))

    @property
    def defs(self) -> dict[str, Type]:
        return dict(self.equations)

    @property
    def variables(self) -> list[str]:
        return [n for n, _ in self.equations]

    def rhs(self, name: str) -> Type:
        for n, t in self.equations:
            if n == name:
                return t
        raise KeyError(name)

    def is_defined(self, name: str) -> bool:
        return any(n == name for n, _ in self.equations)

    def __len__(self) -> int:
        return len(self.equations)

    def show(self) -> str:
        lines = []
        if self.atoms:
            lines.append("atom " + " ".join(sorted(self.atoms)))
        if self.free:
            lines.append("free " + " ".join(sorted(self.free)))
        lines += [f"{n} = {show_type(t)}" for n, t in self.equations]
        return "\n".join(lines) + "\n"
