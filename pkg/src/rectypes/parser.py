"""Concrete syntax for types, terms, equation files, term files and contexts.

Types::

    bot | X (uppercase: type variable) | a (lowercase: atom) | T -> T | ~T | (T)

Terms::

    \\x:T. M | mu a:T. M | [a] M | M N | x | (M)

``\\`` may be written ``λ``, ``mu`` may be written ``μ``, ``->`` may be ``→``,
``~`` may be ``¬`` and ``bot`` may be ``⊥``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    App,
    Arrow,
    Atom,
    Bottom,
    EquationSystem,
    EquationSystemError,
    Lam,
    Mu,
    Name,
    Term,
    TVar,
    Type,
    Var,
    all_names,
    fresh_name,
    lambda_names,
    mu_names,
    subst,
)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<arrow>->|→)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[\\λμ.:()\[\]~¬⊥])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"mu": "mu", "μ": "mu", "bot": "bot", "⊥": "bot", "\\": "lam", "λ": "lam", "¬": "~"}


def tokenize(src: str, line: int = 1) -> list[Token]:
    out: list[Token] = []
    pos, col = 0, 1
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group()
        kind = m.lastgroup
        if kind == "ident" and text in _KEYWORDS:
            kind = _KEYWORDS[text]
        elif kind == "sym":
            kind = _KEYWORDS.get(text, text)
        if kind != "ws":
            out.append(Token(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, tokens: list[Token], abbrevs: dict[str, Type] | None = None):
        self.toks = tokens
        self.i = 0
        self.abbrevs = abbrevs or {}

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str) -> ParseError:
        return ParseError(msg, self.tok.line, self.tok.col)

    def expect(self, kind: str) -> Token:
        t = self.tok
        if t.kind != kind:
            want = "identifier" if kind == "ident" else repr(kind)
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise self.fail(f"expected {want}, got {got}")
        self.i += 1
        return t

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise self.fail(f"unexpected {self.tok.text!r}")

    # types

    def type_(self) -> Type:
        left = self.type_prefix()
        if self.tok.kind == "arrow":
            self.i += 1
            return Arrow(left, self.type_())
        return left

    def type_prefix(self) -> Type:
        if self.tok.kind == "~":
            self.i += 1
            return Arrow(self.type_prefix(), Bottom)
        return self.type_atom()

    def type_atom(self) -> Type:
        t = self.tok
        if t.kind == "bot":
            self.i += 1
            return Bottom
        if t.kind == "ident":
            self.i += 1
            if t.text in self.abbrevs:
                return self.abbrevs[t.text]
            return TVar(t.text) if t.text[0].isupper() else Atom(t.text)
        if t.kind == "(":
            self.i += 1
            ty = self.type_()
            self.expect(")")
            return ty
        raise self.fail("expected a type")

    # terms

    _STARTS_ATOM = ("ident", "(")
    _STARTS_BINDER = ("lam", "mu", "[")

    def term(self) -> Term:
        k = self.tok.kind
        if k in self._STARTS_BINDER:
            return self.binder()
        if k not in self._STARTS_ATOM:
            raise self.fail("expected a term")
        head = self.term_atom()
        while True:
            k = self.tok.kind
            if k in self._STARTS_ATOM:
                head = App(head, self.term_atom())
            elif k in self._STARTS_BINDER:
                return App(head, self.binder())
            else:
                return head

    def binder(self) -> Term:
        t = self.tok
        if t.kind == "[":
            self.i += 1
            a = self.expect("ident").text
            self.expect("]")
            return Name(a, self.term())
        self.i += 1
        x = self.expect("ident").text
        self.expect(":")
        ann = self.type_()
        self.expect(".")
        body = self.term()
        return Lam(x, ann, body) if t.kind == "lam" else Mu(x, ann, body)

    def term_atom(self) -> Term:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            return Var(t.text)
        self.expect("(")
        m = self.term()
        self.expect(")")
        return m


def parse_type(src: str, abbrevs: dict[str, Type] | None = None) -> Type:
    p = _Parser(tokenize(src), abbrevs)
    t = p.type_()
    p.done()
    return t


def parse_term(src: str, abbrevs: dict[str, Type] | None = None, *, line: int = 1) -> Term:
    p = _Parser(tokenize(src, line), abbrevs)
    m = p.term()
    p.done()
    check_namespaces(m, line)
    return unshadow(m)


def check_namespaces(m: Term, line: int = 1) -> None:
    clash = lambda_names(m) & mu_names(m)
    if clash:
        name = sorted(clash)[0]
        raise ParseError(f"{name!r} is used both as a lambda-variable and a mu-variable", line, 1)


def unshadow(m: Term) -> Term:
    """Rename binders that shadow an enclosing binder of the same name."""
    avoid = set(all_names(m))

    def go(m: Term, scope: frozenset[str], ren: dict[str, str]) -> Term:
        if isinstance(m, Var):
            return Var(ren.get(m.name, m.name))
        if isinstance(m, App):
            return App(go(m.fun, scope, ren), go(m.arg, scope, ren))
        if isinstance(m, Name):
            return Name(ren.get(m.var, m.var), go(m.arg, scope, ren))
        x = m.var
        if x in scope:
            x = fresh_name(m.var, avoid)
            avoid.add(x)
        inner = {**ren, m.var: x}
        cls = Lam if isinstance(m, Lam) else Mu
        return cls(x, m.ann, go(m.body, scope | {x}, inner))

    return go(m, frozenset(), {})


# ---------------------------------------------------------------- files


def _logical_lines(src: str) -> list[tuple[int, str]]:
    """Strip comments and join indented continuation lines."""
    out: list[tuple[int, str]] = []
    for no, raw in enumerate(src.splitlines(), start=1):
        text = raw.split("#", 1)[0].rstrip()
        if not text.strip():
            continue
        if raw[:1] in (" ", "\t") and out:
            lno, prev = out[-1]
            out[-1] = (lno, prev + " " + text.strip())
        else:
            out.append((no, text.strip()))
    return out


_DEF = re.compile(r"^([A-Za-z_][A-Za-z0-9_']*)\s*=\s*(.*)$")


def _directive(text: str, keyword: str, lno: int) -> tuple[str, str]:
    m = _DEF.match(text[len(keyword):].strip())
    if not m:
        raise ParseError(f"malformed {keyword} directive", lno, 1)
    return m.group(1), m.group(2)


def _type_at(src: str, lno: int, abbrevs: dict[str, Type]) -> Type:
    p = _Parser(tokenize(src, lno), abbrevs)
    t = p.type_()
    p.done()
    return t


@dataclass(frozen=True)
class EquationFile:
    system: EquationSystem
    type_abbrevs: dict


def parse_equations(src: str, strict: bool = False) -> EquationSystem:
    """Equation file: ``X = T`` lines, ``atom a b``, ``free Y Z``, ``type Abbrev = T``.

    With ``strict`` every undefined variable and atom must be declared;
    otherwise they are inferred from the right-hand sides.
    """
    return parse_equation_file(src, strict).system


def parse_equation_file(src: str, strict: bool = False) -> EquationFile:
    abbrevs: dict[str, Type] = {}
    eqs: list[tuple[str, Type]] = []
    atoms: set[str] = set()
    free: set[str] = set()
    for lno, text in _logical_lines(src):
        word = text.split(None, 1)[0]
        if word == "atom":
            atoms.update(text.split()[1:])
        elif word == "free":
            free.update(text.split()[1:])
        elif word == "type":
            name, body = _directive(text, "type", lno)
            abbrevs[name] = _type_at(body, lno, abbrevs)
        else:
            m = _DEF.match(text)
            if not m:
                raise ParseError("expected 'X = <type>'", lno, 1)
            name = m.group(1)
            if not name[0].isupper():
                raise ParseError(f"{name!r} is not a type variable", lno, 1)
            if any(n == name for n, _ in eqs):
                raise ParseError(f"second equation for {name}", lno, 1)
            eqs.append((name, _type_at(m.group(2), lno, abbrevs)))
    try:
        system = EquationSystem.build(eqs, atoms=atoms, free=free, strict=strict)
    except EquationSystemError as exc:
        raise ParseError(str(exc), 1, 1) from None
    return EquationFile(system, abbrevs)


@dataclass(frozen=True)
class TermFile:
    term: Term
    type_abbrevs: dict
    defs: dict


def parse_term_file(src: str) -> TermFile:
    """Term file: ``type Name = T`` and ``let name = M`` lines, then the term."""
    abbrevs: dict[str, Type] = {}
    defs: dict[str, Term] = {}
    body: list[str] = []
    first_line = None
    for lno, text in _logical_lines(src):
        word = text.split(None, 1)[0]
        if word == "type" and not body:
            name, rhs = _directive(text, "type", lno)
            abbrevs[name] = _type_at(rhs, lno, abbrevs)
        elif word == "let" and not body:
            name, rhs = _directive(text, "let", lno)
            defs[name] = expand_defs(parse_term(rhs, abbrevs, line=lno), defs)
        else:
            if first_line is None:
                first_line = lno
            body.append(text)
    if not body:
        raise ParseError("no term found", 1, 1)
    term = parse_term(" ".join(body), abbrevs, line=first_line or 1)
    term = unshadow(expand_defs(term, defs))
    check_namespaces(term)
    return TermFile(term, abbrevs, defs)


def expand_defs(m: Term, defs: dict[str, Term]) -> Term:
    for name in reversed(list(defs)):
        m = subst(m, name, defs[name])
    return m


@dataclass(frozen=True)
class Declaration:
    name: str
    type: Type
    mu: bool | None  # None: decided by how the term uses the name


def parse_context(src: str) -> list[Declaration]:
    """Context file: ``x : T`` lines; ``mu a : ~U`` forces a mu-binding."""
    abbrevs: dict[str, Type] = {}
    out: list[Declaration] = []
    for lno, text in _logical_lines(src):
        if text.startswith("type "):
            name, rhs = _directive(text, "type", lno)
            abbrevs[name] = _type_at(rhs, lno, abbrevs)
            continue
        mu: bool | None = None
        if text.startswith(("mu ", "μ ")):
            mu = True
            text = text.split(None, 1)[1]
        if ":" not in text:
            raise ParseError("expected 'name : type'", lno, 1)
        name, ty = (s.strip() for s in text.split(":", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
            raise ParseError(f"bad variable name {name!r}", lno, 1)
        out.append(Declaration(name, _type_at(ty, lno, abbrevs), mu))
    return out
