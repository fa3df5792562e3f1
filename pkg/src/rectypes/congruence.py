"""Congruence closure for the least congruence generated by X_i = F_i.

Type variables, atoms and bot are nullary constants, arrow is the only
binary constructor.  Every type ever queried is interned first, so closure
over the interned subterms decides the word problem exactly.
"""
from __future__ import annotations

import threading

from .syntax import Arrow, Bottom, EquationSystem, TVar, Type, show_type


class CongruenceError(Exception):
    pass


class NotAFunctionType(CongruenceError):
    def __init__(self, t: Type, cycle: tuple[str, ...] = ()):
        self.type = t
        self.cycle = cycle
        msg = f"{show_type(t)} is not congruent to an arrow type"
        if cycle:
            msg += " (unfolding visits " + " -> ".join(cycle) + ")"
        super().__init__(msg)


class ArityMismatch(CongruenceError):
    pass


class FrozenIndexError(CongruenceError):
    pass


class CongruenceIndex:
    """Union-find over interned type nodes plus a signature table for arrows.

    Thread model: one writer.  After :meth:`freeze`, queries never mutate the
    index (unknown types are classified by lookup only) and may run
    concurrently; interning on a frozen index raises FrozenIndexError.
    """

    def __init__(self, system: EquationSystem | None = None):
        self.system = system or EquationSystem()
        self._defs = self.system.defs
        self._types: list[Type] = []
        self._ids: dict[Type, int] = {}
        self._kids: list[tuple[int, int] | None] = []
        self._parent: list[int] = []
        self._uses: dict[int, list[int]] = {}
        self._sig: dict[tuple[int, int], int] = {}
        self._arrow: dict[int, int] = {}
        self._frozen = False
        self._lock = threading.Lock()
        self.intern(Bottom)
        for name, rhs in self.system.equations:
            self._merge(self.intern(TVar(name)), self.intern(rhs))

    # -- union-find

    def _find(self, i: int) -> int:
        parent = self._parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def _find_ro(self, i: int) -> int:
        while self._parent[i] != i:
            i = self._parent[i]
        return i

    def intern(self, t: Type) -> int:
        """Add t and its subterms; return the node id of t."""
        i = self._ids.get(t)
        if i is not None:
            return i
        if self._frozen:
            raise FrozenIndexError(f"index is frozen; cannot intern {show_type(t)}")
        with self._lock:
            return self._intern(t)

    def _intern(self, t: Type) -> int:
        i = self._ids.get(t)
        if i is not None:
            return i
        kids = None
        if isinstance(t, Arrow):
            kids = (self._intern(t.dom), self._intern(t.cod))
        i = len(self._types)
        self._types.append(t)
        self._ids[t] = i
        self._kids.append(kids)
        self._parent.append(i)
        self._uses[i] = []
        if kids is not None:
            self._arrow[i] = i
            for k in set(kids):
                self._uses[self._find(k)].append(i)
            key = (self._find(kids[0]), self._find(kids[1]))
            other = self._sig.get(key)
            if other is None:
                self._sig[key] = i
            else:
                self._merge(i, other)
        return i

    def _merge(self, a: int, b: int) -> None:
        pending = [(a, b)]
        while pending:
            a, b = pending.pop()
            ra, rb = self._find(a), self._find(b)
            if ra == rb:
                continue
            if rb < ra:
                ra, rb = rb, ra
            # smallest id stays the representative
            self._parent[rb] = ra
            arrows = [self._arrow[r] for r in (ra, rb) if r in self._arrow]
            if arrows:
                self._arrow[ra] = min(arrows)
            self._arrow.pop(rb, None)
            moved = self._uses.pop(rb)
            for p in moved:
                d, c = self._kids[p]
                key = (self._find(d), self._find(c))
                other = self._sig.get(key)
                if other is None:
                    self._sig[key] = p
                elif self._find(other) != self._find(p):
                    pending.append((p, other))
            self._uses[ra].extend(moved)

    # -- freezing

    def freeze(self) -> "CongruenceIndex":
        self._frozen = True
        return self

    def thaw(self) -> "CongruenceIndex":
        self._frozen = False
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    # -- queries

    def class_key(self, t: Type):
        """Hashable key equal for two types iff they are congruent."""
        if not self._frozen:
            return self._find(self.intern(t))
        return self._lookup(t)

    def _lookup(self, t: Type):
        i = self._ids.get(t)
        if i is not None:
            return self._find_ro(i)
        if isinstance(t, Arrow):
            kd, kc = self._lookup(t.dom), self._lookup(t.cod)
            if isinstance(kd, int) and isinstance(kc, int):
                j = self._sig.get((kd, kc))
                if j is not None:
                    return self._find_ro(j)
            return ("new", kd, kc)
        return ("leaf", t)

    def decide(self, u: Type, v: Type) -> bool:
        if u == v:
            return True
        return self.class_key(u) == self.class_key(v)

    def head_arrow(self, u: Type) -> tuple[Type, Type]:
        """Some (A, B) with u ~ A -> B, found by unfolding defined head variables."""
        t, seen = u, []
        while True:
            if isinstance(t, Arrow):
                return t.dom, t.cod
            if isinstance(t, TVar) and t.name in self._defs and t.name not in seen:
                seen.append(t.name)
                t = self._defs[t.name]
                continue
            break
        key = self.class_key(u)
        if isinstance(key, int) and key in self._arrow:
            a = self._types[self._arrow[key]]
            return a.dom, a.cod
        if isinstance(t, TVar) and t.name in seen:
            seen.append(t.name)
        raise NotAFunctionType(u, tuple(seen))

    def decompose(self, u: Type, v: Type) -> tuple[tuple[Type, Type], tuple[Type, Type]] | tuple:
        if not (isinstance(u, Arrow) and isinstance(v, Arrow)):
            raise ArityMismatch(f"decompose needs two arrow types, got {show_type(u)} and {show_type(v)}")
        if not self.decide(u, v):
            return ()
        return (u.dom, v.dom), (u.cod, v.cod)

    # -- introspection

    def classes(self) -> list[list[Type]]:
        groups: dict[int, list[Type]] = {}
        for i, t in enumerate(self._types):
            groups.setdefault(self._find_ro(i), []).append(t)
        return [groups[k] for k in sorted(groups)]

    def class_of(self, t: Type) -> list[Type]:
        key = self.class_key(t)
        return [s for i, s in enumerate(self._types) if self._find_ro(i) == key]

    def defined_in_class(self, t: Type) -> list[str]:
        """Defined variables congruent to t, in declaration order."""
        key = self.class_key(t)
        return [n for n in self.system.variables if self.class_key(TVar(n)) == key]

    def check_closure(self) -> list[tuple[Type, Type]]:
        """Pairs of merged arrows whose components are not merged (must be empty)."""
        bad = []
        first: dict[int, int] = {}
        for i, kids in enumerate(self._kids):
            if kids is None:
                continue
            r = self._find_ro(i)
            j = first.setdefault(r, i)
            if j == i:
                continue
            dj = self._kids[j]
            if self._find_ro(kids[0]) != self._find_ro(dj[0]) or self._find_ro(kids[1]) != self._find_ro(dj[1]):
                bad.append((self._types[j], self._types[i]))
        return bad

    def __len__(self) -> int:
        return len(self._types)


def build_index(system: EquationSystem) -> CongruenceIndex:
    return CongruenceIndex(system)

