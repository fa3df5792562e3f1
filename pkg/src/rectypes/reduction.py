"""Beta and mu reduction, normalization strategies and reduction-graph metrics.

Redex positions are paths of child indices (App: 0 = function, 1 = argument;
Lam/Mu/Name: 0 = body).  The reduction graph is memoized on alpha keys.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .congruence import CongruenceIndex, NotAFunctionType
from .syntax import (
    App,
    Arrow,
    Lam,
    Mu,
    Term,
    Type,
    alpha_key,
    all_names,
    children,
    free_mu_vars,
    fresh_name,
    mu_subst,
    rename_mu,
    replace_at,
    show_term,
    subst,
    subterm_at,
    subterms,
    term_size,
)

DEFAULT_FUEL = 10000
BETA, MU = "beta", "mu"
LEFTMOST, EXHAUSTIVE = "leftmost-outermost", "exhaustive"
STRATEGIES = {"leftmost-outermost": LEFTMOST, "lo": LEFTMOST, "exhaustive": EXHAUSTIVE}

Path = tuple[int, ...]


class NotARedex(ValueError):
    pass


class NotNormalizing(Exception):
    def __init__(self, msg: str, trace: "ReductionTrace | None" = None):
        super().__init__(msg)
        self.trace = trace


class FuelExhausted(NotNormalizing):
    """The bound was hit; this says nothing about divergence."""


class CycleDetected(NotNormalizing):
    """The reduction graph closed but contains a cycle: an infinite reduction exists."""


# ---------------------------------------------------------------- one step


def redex_rule(m: Term) -> str | None:
    if isinstance(m, App):
        if isinstance(m.fun, Lam):
            return BETA
        if isinstance(m.fun, Mu):
            return MU
    return None


def redexes(m: Term) -> list[tuple[Path, str]]:
    """All redex positions in leftmost-outermost (pre-)order."""
    out: list[tuple[Path, str]] = []
    stack: list[tuple[Term, Path]] = [(m, ())]
    while stack:
        t, path = stack.pop()
        rule = redex_rule(t)
        if rule:
            out.append((path, rule))
        kids = children(t)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((kids[i], path + (i,)))
    return out


def _mu_codomain(ann: Type, index: CongruenceIndex | None) -> Type:
    if isinstance(ann, Arrow):
        return ann.cod
    if index is not None:
        try:
            return index.head_arrow(ann)[1]
        except NotAFunctionType:
            pass
    return ann


def contract(redex: Term, index: CongruenceIndex | None = None) -> Term:
    rule = redex_rule(redex)
    if rule is None:
        raise NotARedex(f"{show_term(redex)} is not a redex")
    assert isinstance(redex, App)
    fun, arg = redex.fun, redex.arg
    if rule == BETA:
        assert isinstance(fun, Lam)
        return subst(fun.body, fun.var, arg)
    assert isinstance(fun, Mu)
    a, body = fun.var, fun.body
    if a in free_mu_vars(arg):
        a = fresh_name(a, all_names(body) | all_names(arg))
        body = rename_mu(body, fun.var, a)
    # the bound name's type shrinks from ~(U -> V) to ~V
    return Mu(a, _mu_codomain(fun.ann, index), mu_subst(body, a, arg))


def step(m: Term, position: Path, index: CongruenceIndex | None = None) -> Term:
    try:
        sub = subterm_at(m, tuple(position))
    except IndexError:
        raise NotARedex(f"no subterm at position {list(position)}") from None
    return replace_at(m, tuple(position), contract(sub, index))


def one_step_reducts(m: Term, index: CongruenceIndex | None = None) -> list[tuple[Path, str, Term]]:
    return [(p, r, replace_at(m, p, contract(subterm_at(m, p), index))) for p, r in redexes(m)]


def is_normal(m: Term) -> bool:
    return not any(redex_rule(s) for s in subterms(m))


# ---------------------------------------------------------------- traces


@dataclass(frozen=True)
class Step:
    position: Path
    rule: str
    before: Term
    after: Term

    def to_json(self) -> dict:
        return {"rule": self.rule, "position": list(self.position), "term": show_term(self.after)}


@dataclass
class ReductionTrace:
    start: Term
    steps: list[Step] = field(default_factory=list)
    terminated: bool = False
    fuel_spent: int = 0
    normal_forms: list[Term] = field(default_factory=list)

    @property
    def last(self) -> Term:
        return self.steps[-1].after if self.steps else self.start

    @property
    def normal_form(self) -> Term | None:
        return self.last if self.terminated else None

    def to_json(self) -> list[dict]:
        return [{"rule": None, "position": None, "term": show_term(self.start)}] + [s.to_json() for s in self.steps]


def normalize(
    m: Term,
    strategy: str = LEFTMOST,
    fuel: int = DEFAULT_FUEL,
    index: CongruenceIndex | None = None,
) -> ReductionTrace:
    """Leftmost-outermost: fuel counts steps.  Exhaustive: fuel counts distinct terms visited."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    strategy = STRATEGIES.get(strategy, strategy)
    if strategy == LEFTMOST:
        return _normalize_lo(m, fuel, index)
    if strategy == EXHAUSTIVE:
        return _normalize_exhaustive(m, fuel, index)
    raise ValueError(f"unknown strategy {strategy!r}")


def _normalize_lo(m: Term, fuel: int, index: CongruenceIndex | None) -> ReductionTrace:
    trace = ReductionTrace(m)
    cur = m
    while True:
        rs = redexes(cur)
        if not rs:
            trace.terminated = True
            trace.normal_forms = [cur]
            return trace
        if trace.fuel_spent >= fuel:
            raise FuelExhausted(f"no normal form after {fuel} leftmost-outermost steps", trace)
        path, rule = rs[0]
        nxt = step(cur, path, index)
        trace.steps.append(Step(path, rule, cur, nxt))
        trace.fuel_spent += 1
        cur = nxt


def _normalize_exhaustive(m: Term, fuel: int, index: CongruenceIndex | None) -> ReductionTrace:
    g = explore(m, fuel, index)
    trace = ReductionTrace(m, fuel_spent=len(g.nodes))
    if not g.closed:
        raise FuelExhausted(f"reduction graph not closed after visiting {fuel} terms", trace)
    lengths = g.longest_paths()
    if lengths is None:
        raise CycleDetected("the reduction graph has a cycle", trace)
    # follow a longest path down to a normal form
    k = g.root
    while g.succ[k]:
        path, rule, nk = max(g.succ[k], key=lambda e: lengths[e[2]])
        trace.steps.append(Step(path, rule, g.nodes[k], g.nodes[nk]))
        k = nk
    trace.terminated = True
    trace.normal_forms = [g.nodes[k] for k in g.normal_keys()]
    return trace


# ---------------------------------------------------------------- reduction graph


@dataclass
class ReductionGraph:
    root: tuple
    nodes: dict  # alpha key -> representative term
    succ: dict  # alpha key -> [(path, rule, alpha key)]
    closed: bool

    def normal_keys(self) -> list[tuple]:
        return [k for k in self.nodes if k in self.succ and not self.succ[k]]

    def longest_paths(self) -> dict | None:
        """Longest reduction length from every node, or None if a cycle is reachable."""
        if not self.closed:
            return None
        out: dict = {}
        on_stack: set = set()
        stack = [(self.root, 0)]
        while stack:
            k, i = stack.pop()
            if i == 0:
                if k in out:
                    continue
                on_stack.add(k)
            succ = self.succ[k]
            if i < len(succ):
                stack.append((k, i + 1))
                nk = succ[i][2]
                if nk in on_stack:
                    return None
                if nk not in out:
                    stack.append((nk, 0))
                continue
            on_stack.discard(k)
            out[k] = max((out[e[2]] + 1 for e in succ), default=0)
        return out


def explore(m: Term, fuel: int = DEFAULT_FUEL, index: CongruenceIndex | None = None) -> ReductionGraph:
    """Breadth-first exploration; at most ``fuel`` distinct terms are expanded."""
    root = alpha_key(m)
    nodes = {root: m}
    succ: dict = {}
    todo = deque([root])
    while todo:
        if len(succ) >= fuel:
            return ReductionGraph(root, nodes, succ, False)
        k = todo.popleft()
        out = []
        for path, rule, n in one_step_reducts(nodes[k], index):
            nk = alpha_key(n)
            if nk not in nodes:
                nodes[nk] = n
                todo.append(nk)
            out.append((path, rule, nk))
        succ[k] = out
    return ReductionGraph(root, nodes, succ, True)


# ---------------------------------------------------------------- metrics


@dataclass(frozen=True)
class Metrics:
    eta: int | None  # None: unknown (fuel exhausted or cyclic graph)
    cxty: int

    @property
    def etac(self) -> tuple[int | None, int]:
        return (self.eta, self.cxty)

    def to_json(self) -> dict:
        return {"eta": self.eta, "cxty": self.cxty, "etac": list(self.etac)}


def eta_metric(m: Term, fuel: int = DEFAULT_FUEL, index: CongruenceIndex | None = None) -> Metrics:
    g = explore(m, fuel, index)
    lengths = g.longest_paths()
    return Metrics(None if lengths is None else lengths[g.root], term_size(m))


@dataclass(frozen=True)
class SNResult:
    verdict: str  # "SN" or "NotClosed"
    eta: int | None
    visited: int
    reason: str | None = None  # "fuel" or "cycle" when NotClosed

    @property
    def sn(self) -> bool:
        return self.verdict == "SN"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "eta": self.eta, "visited": self.visited, "reason": self.reason}

    def __str__(self) -> str:
        if self.sn:
            return f"SN({self.eta})"
        return f"NotClosed({self.reason})"


def sn_probe(m: Term, fuel: int = DEFAULT_FUEL, index: CongruenceIndex | None = None) -> SNResult:
    g = explore(m, fuel, index)
    if not g.closed:
        return SNResult("NotClosed", None, len(g.nodes), "fuel")
    lengths = g.longest_paths()
    if lengths is None:
        return SNResult("NotClosed", None, len(g.nodes), "cycle")
    return SNResult("SN", lengths[g.root], len(g.nodes))


class TermSet:
    """Set of terms up to alpha-equivalence."""

    def __init__(self, terms=(), complete: bool = True):
        self._items: dict = {}
        self.complete = complete
        for t in terms:
            self.add(t)

    def add(self, t: Term) -> None:
        self._items.setdefault(alpha_key(t), t)

    def __contains__(self, t: Term) -> bool:
        return alpha_key(t) in self._items

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items.values())


def subterms_of_reducts(m: Term, fuel: int = DEFAULT_FUEL, index: CongruenceIndex | None = None) -> TermSet:
    """{N | N is a subterm of a reduct of m}; ``complete`` is False if the graph did not close."""
    g = explore(m, fuel, index)
    out = TermSet(complete=g.closed)
    for t in g.nodes.values():
        for s in subterms(t):
            out.add(s)
    return out


def reaches(
    src: Term,
    dst: Term,
    fuel: int,
    index: CongruenceIndex | None = None,
    *,
    strict: bool = True,
    skip: frozenset | set = frozenset(),
) -> int | None:
    """Length of a shortest reduction src ->+ dst (->* if not strict), or None within fuel.

    Redexes whose alpha key is in ``skip`` are never contracted, which
    narrows the search; a path found that way is still a genuine reduction.
    """
    target = alpha_key(dst)
    start = alpha_key(src)
    if not strict and start == target:
        return 0
    dist = {start: 0}
    nodes = {start: src}
    todo = deque([start])
    expanded = 0
    while todo and expanded < fuel:
        k = todo.popleft()
        expanded += 1
        cur = nodes[k]
        for path, _ in redexes(cur):
            sub = subterm_at(cur, path)
            if skip and alpha_key(sub) in skip:
                continue
            n = replace_at(cur, path, contract(sub, index))
            nk = alpha_key(n)
            if nk == target:
                return dist[k] + 1
            if nk not in dist:
                dist[nk] = dist[k] + 1
                nodes[nk] = n
                todo.append(nk)
    return None
