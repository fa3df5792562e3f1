"""Polarity, goodness (no negative self-dependency) and the variable order.

The goodness check works on a finite signed dependency graph between defined
variables: an edge ``j -(s)-> m`` records a concrete type T ~ X_j in which
X_m occurs with polarity s.  The congruence is good iff no closed walk has
negative sign; a negative walk is turned into an explicit witness type by
plugging the edge witnesses into each other.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .congruence import CongruenceIndex
from .syntax import Arrow, EquationSystem, TVar, Type, lg, show_type, type_vars

POS, NEG = "+", "-"

Path = tuple[int, ...]  # 0 = domain, 1 = codomain


class NotGood(Exception):
    pass


class UnknownClass(KeyError):
    pass


def flip(sign: str) -> str:
    return NEG if sign == POS else POS


def times(a: str, b: str) -> str:
    return POS if a == b else NEG


def path_sign(path: Path) -> str:
    return NEG if path.count(0) % 2 else POS


def polarity(t: Type, x: str) -> frozenset[str]:
    """Polarities at which the variable x occurs in t (empty when absent)."""
    return frozenset(path_sign(p) for p in occurrences(t, x))


def in_positive(t: Type, x: str) -> bool:
    """t is in T+(x)."""
    return NEG not in polarity(t, x)


def in_negative(t: Type, x: str) -> bool:
    """t is in T-(x)."""
    return POS not in polarity(t, x)


def in_polar(t: Type, x: str, sign: str) -> bool:
    return in_positive(t, x) if sign == POS else in_negative(t, x)


def occurrences(t: Type, x: str, path: Path = ()) -> Iterator[Path]:
    if isinstance(t, TVar):
        if t.name == x:
            yield path
    elif isinstance(t, Arrow):
        yield from occurrences(t.dom, x, path + (0,))
        yield from occurrences(t.cod, x, path + (1,))


def positions(t: Type, path: Path = ()) -> Iterator[tuple[Path, Type]]:
    yield path, t
    if isinstance(t, Arrow):
        yield from positions(t.dom, path + (0,))
        yield from positions(t.cod, path + (1,))


def type_at(t: Type, path: Path) -> Type:
    for step in path:
        assert isinstance(t, Arrow)
        t = t.cod if step else t.dom
    return t


def replace_type_at(t: Type, path: Path, new: Type) -> Type:
    if not path:
        return new
    assert isinstance(t, Arrow)
    if path[0] == 0:
        return Arrow(replace_type_at(t.dom, path[1:], new), t.cod)
    return Arrow(t.dom, replace_type_at(t.cod, path[1:], new))


# ---------------------------------------------------------------- dependency graph


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    sign: str
    witness: Type  # witness ~ X_src
    path: Path  # X_dst occurs in witness at path

    def __post_init__(self) -> None:
        assert path_sign(self.path) == self.sign


def dependency_edges(system: EquationSystem, index: CongruenceIndex) -> list[Edge]:
    """One edge per (src, dst, sign), each carrying a witness type.

    Besides the occurrences in F_j itself, a proper subterm S of F_j that is
    congruent to a defined X_m yields F_j[S := X_m], a type congruent to X_j
    containing X_m; likewise X_m ~ X_j gives the witness X_m.
    """
    defined = system.variables
    edges: dict[tuple[str, str, str], Edge] = {}

    def add(e: Edge) -> None:
        edges.setdefault((e.src, e.dst, e.sign), e)

    for j, rhs in system.equations:
        for m in index.defined_in_class(TVar(j)):
            if m != j:
                add(Edge(j, m, POS, TVar(m), ()))
        for path, sub in positions(rhs):
            if isinstance(sub, TVar) and sub.name in system.defs:
                add(Edge(j, sub.name, path_sign(path), rhs, path))
            if not path:
                continue
            for m in index.defined_in_class(sub):
                if sub != TVar(m):
                    add(Edge(j, m, path_sign(path), replace_type_at(rhs, path, TVar(m)), path))
    order = {n: i for i, n in enumerate(defined)}
    return sorted(edges.values(), key=lambda e: (order[e.src], order[e.dst], e.sign))


def _adjacency(edges: list[Edge], names: list[str]) -> dict[str, list[Edge]]:
    adj: dict[str, list[Edge]] = {n: [] for n in names}
    for e in edges:
        adj[e.src].append(e)
    return adj


def reachability(edges: list[Edge], names: list[str]) -> dict[str, set[str]]:
    """reach[j] = {i | j reaches i}, reflexive."""
    adj = _adjacency(edges, names)
    out = {}
    for n in names:
        seen = {n}
        todo = [n]
        while todo:
            u = todo.pop()
            for e in adj[u]:
                if e.dst not in seen:
                    seen.add(e.dst)
                    todo.append(e.dst)
        out[n] = seen
    return out


def components(names: list[str], reach: dict[str, set[str]]) -> list[list[str]]:
    """Classes of mutual reachability, each in declaration order, ordered by first member."""
    out: list[list[str]] = []
    placed: set[str] = set()
    for n in names:
        if n in placed:
            continue
        cls = [m for m in names if m in reach[n] and n in reach[m]]
        placed.update(cls)
        out.append(cls)
    return out


# ---------------------------------------------------------------- goodness


@dataclass(frozen=True)
class Violation:
    variable: str
    witness: Type
    path: Path
    cycle: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "variable": self.variable,
            "witness": show_type(self.witness),
            "path": list(self.path),
            "cycle": list(self.cycle),
        }


@dataclass(frozen=True)
class Goodness:
    good: bool
    violations: tuple[Violation, ...]


def _compose(walk: list[Edge]) -> tuple[Type, Path]:
    t, path = walk[0].witness, walk[0].path
    for e in walk[1:]:
        t = replace_type_at(t, path, e.witness)
        path = path + e.path
    return t, path


def _signs_in_class(
    cls: list[str], adj: dict[str, list[Edge]]
) -> tuple[dict[str, str], dict[str, Edge | None], tuple[Edge, ...] | None]:
    """BFS sign labelling from the class representative.

    Returns the labelling, the BFS tree and, if some edge inside the class is
    inconsistent with the labelling, that edge.
    """
    members = set(cls)
    rep = cls[0]
    sign = {rep: POS}
    parent: dict[str, Edge | None] = {rep: None}
    todo = deque([rep])
    while todo:
        u = todo.popleft()
        for e in adj[u]:
            if e.dst in members and e.dst not in sign:
                sign[e.dst] = times(sign[u], e.sign)
                parent[e.dst] = e
                todo.append(e.dst)
    for u in cls:
        for e in adj[u]:
            if e.dst in members and sign[e.dst] != times(sign[u], e.sign):
                return sign, parent, (e,)
    return sign, parent, None


def _tree_path(parent: dict[str, Edge | None], v: str) -> list[Edge]:
    out = []
    while parent[v] is not None:
        e = parent[v]
        out.append(e)
        v = e.src
    return out[::-1]


def _path_between(adj: dict[str, list[Edge]], src: str, dst: str, members: set[str]) -> list[Edge]:
    if src == dst:
        return []
    parent: dict[str, Edge] = {}
    todo = deque([src])
    seen = {src}
    while todo:
        u = todo.popleft()
        for e in adj[u]:
            if e.dst in members and e.dst not in seen:
                seen.add(e.dst)
                parent[e.dst] = e
                if e.dst == dst:
                    out = []
                    v = dst
                    while v != src:
                        out.append(parent[v])
                        v = parent[v].src
                    return out[::-1]
                todo.append(e.dst)
    raise AssertionError(f"{dst} not reachable from {src} inside its class")


def _walk_sign(walk: list[Edge]) -> str:
    s = POS
    for e in walk:
        s = times(s, e.sign)
    return s


def check_goodness(system: EquationSystem, index: CongruenceIndex) -> Goodness:
    names = system.variables
    edges = dependency_edges(system, index)
    adj = _adjacency(edges, names)
    reach = reachability(edges, names)
    violations = []
    for cls in components(names, reach):
        _, parent, bad = _signs_in_class(cls, adj)
        if bad is None:
            continue
        (e,) = bad
        members = set(cls)
        back = _path_between(adj, e.dst, cls[0], members)
        via_edge = _tree_path(parent, e.src) + [e] + back
        via_tree = _tree_path(parent, e.dst) + back
        walk = via_edge if _walk_sign(via_edge) == NEG else via_tree
        assert _walk_sign(walk) == NEG
        witness, path = _compose(walk)
        cycle = tuple([walk[0].src] + [x.dst for x in walk])
        violations.append(Violation(cls[0], witness, path, cycle))
    return Goodness(not violations, tuple(violations))


# ---------------------------------------------------------------- order analysis


@dataclass(frozen=True)
class AnalysisReport:
    good: bool
    violations: tuple[Violation, ...] = ()
    below: dict = field(default_factory=dict)  # j -> {i | i <= j}
    classes: tuple[tuple[str, ...], ...] = ()
    class_order: tuple[tuple[int, int], ...] = ()  # (a, b): classes[a] < classes[b]
    split: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()
    signs: dict = field(default_factory=dict)  # variable -> sign relative to its class representative
    lg: dict = field(default_factory=dict)

    def leq(self, i: str, j: str) -> bool:
        return i in self.below[j]

    def equiv(self, i: str, j: str) -> bool:
        return self.leq(i, j) and self.leq(j, i)

    def less(self, i: str, j: str) -> bool:
        return self.leq(i, j) and not self.equiv(i, j)

    def class_index(self, x: str) -> int:
        for k, cls in enumerate(self.classes):
            if x in cls:
                return k
        raise UnknownClass(x)

    def parts(self, x: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
        """(x+, x-) with x in x+."""
        plus, minus = self.split[self.class_index(x)]
        return (plus, minus) if self.signs[x] == POS else (minus, plus)

    def order_text(self) -> str:
        """Render the class order, e.g. ``X1 ~ X2 < X3``; partial orders list the pairs."""
        names = [" ~ ".join(c) for c in self.classes]
        chain = all((k, k + 1) in self.class_order for k in range(len(self.classes) - 1))
        if chain:
            return " < ".join(names)
        pairs = [f"{names[a]} < {names[b]}" for a, b in self.class_order]
        return "; ".join(names if not pairs else pairs)

    def to_json(self) -> dict:
        return {
            "good": self.good,
            "violations": [v.to_json() for v in self.violations],
            "classes": [list(c) for c in self.classes],
            "order": [[list(self.classes[a]), list(self.classes[b])] for a, b in self.class_order],
            "split": [{"plus": list(p), "minus": list(m)} for p, m in self.split],
            "leq": {j: sorted(v) for j, v in self.below.items()},
            "lg": dict(self.lg),
        }


def order_analysis(system: EquationSystem, index: CongruenceIndex) -> AnalysisReport:
    goodness = check_goodness(system, index)
    if not goodness.good:
        raise NotGood(f"order analysis needs a good congruence; violations at {[v.variable for v in goodness.violations]}")
    names = system.variables
    edges = dependency_edges(system, index)
    adj = _adjacency(edges, names)
    reach = reachability(edges, names)
    below = {j: set(reach[j]) for j in names}
    classes = components(names, reach)
    pos = {n: k for k, cls in enumerate(classes) for n in cls}
    order = set()
    for j in names:
        for i in reach[j]:
            if pos[i] != pos[j]:
                order.add((pos[i], pos[j]))
    split = []
    signs: dict[str, str] = {}
    for cls in classes:
        sign, _, bad = _signs_in_class(cls, adj)
        assert bad is None
        signs.update(sign)
        split.append((tuple(n for n in cls if sign[n] == POS), tuple(n for n in cls if sign[n] == NEG)))
    return AnalysisReport(
        good=True,
        below=below,
        classes=tuple(tuple(c) for c in classes),
        class_order=tuple(sorted(order)),
        split=tuple(split),
        signs=signs,
        lg={n: lg(t) for n, t in system.equations},
    )


def analyze(system: EquationSystem, index: CongruenceIndex) -> AnalysisReport:
    """Full report for good systems, verdict plus violations otherwise."""
    goodness = check_goodness(system, index)
    if not goodness.good:
        return AnalysisReport(False, goodness.violations, lg={n: lg(t) for n, t in system.equations})
    return order_analysis(system, index)


def class_membership(t: Type, i: str, eps: str, report: AnalysisReport) -> bool:
    """t belongs to T_i^eps."""
    if i not in report.below:
        raise UnknownClass(i)
    allowed = report.below[i]
    defined = report.below.keys()
    for v in type_vars(t):
        if v in defined and v not in allowed:
            return False
    same, other = report.parts(i)
    return all(in_polar(t, j, eps) for j in same) and all(in_polar(t, j, flip(eps)) for j in other)


def smaller_vars_only(t: Type, i: str, report: AnalysisReport) -> bool:
    """t belongs to T'_i (defined variables strictly below i only)."""
    return all(report.less(v, i) for v in type_vars(t) if v in report.below)
